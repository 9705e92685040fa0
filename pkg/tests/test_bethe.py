import math

import numpy as np
import pytest

from rabi_spectra import bethe, fock
from rabi_spectra.core import ModelParams, ReducedParams, invert, reduce


def reduced(kappa: float, nu: float, delta: float = 1.0) -> ReducedParams:
    lam_m = delta * nu / kappa
    lam_p = math.hypot(lam_m, nu * nu)
    return ReducedParams(delta, lam_p, lam_m, nu, kappa)


def appendix_coeffs(r: ReducedParams, epsilon: float) -> tuple[float, float, float]:
    """Independent oracle: the raw cubic-equation coefficients c_j / a_3."""
    dl, nu, lp, lm = r.delta, r.nu, r.lambda_plus, r.lambda_minus
    e = epsilon - lp
    a3 = -lm / nu
    c0 = (-(dl * (dl * dl - e * e + lp) + e * lm)
          - nu * nu * (dl - lm) - nu ** 4 * dl)
    c1 = ((dl * dl * lm - dl * lp - e * (e + 1) * lm) / nu
          - nu * (dl - lm - 2 * dl * epsilon) + nu ** 3 * lm)
    c2 = -2 * lm * epsilon
    return c0 / a3, c1 / a3, c2 / a3


class TestOdeCoefficients:
    def test_d2_is_2_nu_eps(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            r = reduced(rng.uniform(0.2, 1.5), rng.uniform(0.1, 1.0),
                        rng.uniform(0.2, 2.0))
            eps = rng.uniform(-1, 5)
            assert bethe.ode_coefficients(r, eps).d2 == pytest.approx(2 * r.nu * eps)

    def test_matches_raw_cubic_coefficients(self):
        r = reduce(ModelParams(1.0, 1.0, 1.3, 0.4))
        for eps in (2.0, 0.7, -0.5):
            got = bethe.ode_coefficients(r, eps)
            c0, c1, c2 = appendix_coeffs(r, eps)
            assert got.d0 == pytest.approx(c0, rel=1e-13)
            assert got.d1 == pytest.approx(c1, rel=1e-13)
            assert got.d2 == pytest.approx(c2, rel=1e-13)

    def test_eps_zero(self):
        r = reduced(0.5, 0.4)
        assert bethe.ode_coefficients(r, 0.0).d2 == 0.0

    def test_pole_data(self):
        r = reduced(0.5, 0.4, 1.1)
        c = bethe.ode_coefficients(r, 3.0)
        assert c.rho == (0.4, -0.4, 0.5)
        assert c.nu_s == (-2.0, -3.0, -1.0)
        assert c.nu0 == -0.8
        # Moment identities of the pole data
        assert sum(c.rho) == pytest.approx(r.kappa)
        assert sum(c.nu_s) == pytest.approx(-2 * 3.0)
        s, p_ = c.rho, 0.0
        p_ = s[0] * s[1] + s[0] * s[2] + s[1] * s[2]
        assert p_ == pytest.approx(-r.nu ** 2)

    def test_rabi_limit_raises(self):
        with pytest.raises(bethe.RabiLimit):
            bethe.ode_coefficients(reduce(ModelParams(1, 1, 1, 1)), 1.0)


class TestResidualBae:
    def test_n1_closed_form_randomized(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            kappa, nu = rng.uniform(0.1, 1.0, 2)
            r = reduced(kappa, nu)
            for z1 in bethe.closed_form_roots_n1(kappa, nu):
                res = bethe.residual_bae([z1], r, 1.0)
                assert np.max(np.abs(res)) < 1e-12

    def test_n0_empty(self):
        assert len(bethe.residual_bae([], reduced(0.5, 0.5), 0.0)) == 0

    def test_perturbed_root_detected(self):
        kappa, nu = 0.6, 0.4
        r = reduced(kappa, nu)
        z1 = bethe.closed_form_roots_n1(kappa, nu)[0]
        res = bethe.residual_bae([z1 + 0.1], r, 1.0)
        assert np.max(np.abs(res)) > 1e-3

    def test_pole_collision(self):
        r = reduced(0.6, 0.4)
        with pytest.raises(bethe.PoleCollision):
            bethe.residual_bae([0.4 + 1e-12], r, 1.0)


@pytest.fixture(scope="module")
def branch_solutions():
    """Converged Bethe branches across several (n, kappa, nu), ~100 solutions."""
    out = []
    combos = [(2, 0.5, 0.45), (2, 0.3, 0.6), (3, 0.4, 0.35), (3, 0.7, 0.5),
              (4, 0.25, 0.4), (4, 0.6, 0.3), (5, 0.1, 0.3), (5, 0.45, 0.55),
              (3, 0.15, 0.7), (2, 0.8, 0.25), (4, 0.35, 0.65), (5, 0.2, 0.45),
              (4, 0.15, 0.5), (5, 0.3, 0.35), (3, 0.55, 0.25), (4, 0.45, 0.55)]
    for n, kappa, nu in combos:
        sols = bethe.branch_Z(n, kappa, nu, extra_starts=250)
        out += [(n, kappa, nu, s) for s in sols]
    assert len(out) >= 100
    return out


class TestLambdaMachinery:
    def test_lambda_from_roots_trivial_n0(self):
        st = bethe.lambda_from_roots([], reduced(0.5, 0.4), 0)
        assert st.lam == (0.0, 0.0, 0.0)

    def test_sum_rule_and_quad_on_branches(self, branch_solutions):
        for n, kappa, nu, s in branch_solutions:
            st = bethe.lambda_from_roots(s.roots, reduced(kappa, nu), n)
            d = st.degeneracies
            assert sum(dj * lj for dj, lj in zip(d, st.lam)) == pytest.approx(n, abs=1e-9)
            # quadratic equation residual for every level
            for j in range(3):
                nxt = bethe._lambda_scaled_derivative(s.roots, st.levels[j], 1, nu)
                res = bethe.hierarchy_residual(j, 0, st.lam, [], nxt,
                                               st.levels, d, nu)
                assert abs(res) < 1e-10 * max(1.0, max(abs(v) for v in st.lam) ** 2)

    def test_hierarchy_residuals_all_orders(self, branch_solutions):
        for n, kappa, nu, s in branch_solutions:
            st = bethe.lambda_from_roots(s.roots, reduced(kappa, nu), n)
            for j, d_j in enumerate(st.degeneracies):
                for l in range(d_j):
                    derivs = [bethe._lambda_scaled_derivative(s.roots, st.levels[j], o, nu)
                              for o in range(1, l + 1)]
                    nxt = bethe._lambda_scaled_derivative(s.roots, st.levels[j], l + 1, nu)
                    terms = bethe.hierarchy_terms(j, l, st.lam, derivs, nxt,
                                                  st.levels, st.degeneracies, nu)
                    scale = max(1.0, max(abs(t) for t in terms))
                    assert abs(math.fsum(terms)) < 1e-9 * scale

    def test_linear_solve_matches_roots(self, branch_solutions):
        for n, kappa, nu, s in branch_solutions:
            if n < 2:
                continue
            st = bethe.lambda_from_roots(s.roots, reduced(kappa, nu), n)
            lam = bethe.lambda_linear_solve(s.Z1, s.Z2, n, kappa, nu)
            for a, b in zip(lam, st.lam):
                assert a == pytest.approx(b, rel=1e-10, abs=1e-10)

    def test_linear_solve_matches_matrix_randomized(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            n = int(rng.integers(2, 7))
            kappa, nu = rng.uniform(0.1, 1.2, 2)
            if abs(kappa - nu) < 0.05:
                continue
            z1, z2 = rng.uniform(-20, 20, 2)
            lam = bethe.lambda_linear_solve(z1, z2, n, kappa, nu)
            m, rhs = bethe.lambda_linear_matrix(n, kappa, nu)
            want = np.linalg.solve(m, rhs(z1, z2))
            assert np.allclose(lam, want, rtol=1e-9, atol=1e-9)
            # first line of the moment system, identically in (Z1, Z2)
            d = (n - 1, n, 1)
            assert sum(dj * lj for dj, lj in zip(d, lam)) == pytest.approx(n, rel=1e-9)

    def test_linear_solve_n1_guard_and_safe_path(self):
        with pytest.raises(bethe.SingularSystem):
            bethe.lambda_linear_solve(0.1, 0.2, 1, 0.5, 0.4)
        kappa, nu = 0.5, 0.4
        z1 = bethe.closed_form_roots_n1(kappa, nu)[0]
        l2, l3 = bethe.lambda_linear_solve_n1(z1, kappa, nu)
        st = bethe.lambda_from_roots([z1], reduced(kappa, nu), 1)
        assert l2 == pytest.approx(st.lam[1], rel=1e-10)
        assert l3 == pytest.approx(st.lam[2], rel=1e-10)
        # sum rule with d = (0, 1, 1): Lambda_2 + Lambda_3 = 1
        assert st.lam[1] + st.lam[2] == pytest.approx(1.0, abs=1e-12)

    def test_singular_at_kappa_eq_nu(self):
        with pytest.raises(bethe.SingularSystem):
            bethe.lambda_linear_solve(0.1, 0.2, 3, 0.5, 0.5)

    def test_n0_degenerate_collapse(self):
        # Z1 = Z2 = 0 with n = 0: conditions collapse; the reduced system is
        # consistent only on kappa = nu, where both residuals vanish for any delta.
        for delta in (0.3, 1.0, 2.2):
            nu = 0.6
            ra, rb = bethe.condition_residuals(0.0, 0.0, 0, nu, nu, delta)
            assert abs(ra) < 1e-12 and abs(rb) < 1e-12


class TestPowerSums:
    def test_round_trip_conjugate_closed(self):
        rng = np.random.default_rng(24)
        for _ in range(50):
            n_pairs = int(rng.integers(0, 3))
            n_real = int(rng.integers(1, 4))
            re = rng.uniform(-3, 3, n_pairs)
            im = rng.uniform(0.1, 2, n_pairs)
            zr = rng.uniform(-3, 3, n_real)
            roots = np.concatenate([re + 1j * im, re - 1j * im, zr])
            n = len(roots)
            ps = [float(n)] + [float(np.sum(roots ** k).real) for k in range(1, n + 1)]
            rec = bethe.roots_from_power_sums(ps)
            assert np.allclose(np.sort_complex(rec), np.sort_complex(roots), atol=1e-8)

    def test_power_sums_consistent_with_branches(self, branch_solutions):
        for n, kappa, nu, s in branch_solutions:
            if n < 2:
                continue
            lam = bethe.lambda_linear_solve(s.Z1, s.Z2, n, kappa, nu)
            zs = bethe.power_sums_from_lambda(
                n, s.Z1, s.Z2, lam, (nu, -nu, kappa), (n - 1.0, float(n), 1.0), nu)
            for k in range(n + 1):
                want = float(np.sum(s.roots ** k).real)
                assert zs[k] == pytest.approx(want, rel=1e-8, abs=1e-7)


class TestExceptionalCondition:
    def test_degenerate_error(self):
        with pytest.raises(bethe.Degenerate):
            bethe.exceptional_condition(1, 0.5, 0.4, 1.0)

    def test_n0_condition(self):
        assert bethe.exceptional_condition_n0(0.7, 0.4) == pytest.approx(0.3)

    def test_f_vanishes_at_fock_confirmed_points(self):
        # Exact eps = 2 crossings located by brute force on a weak-coupling
        # slice; F evaluated there must change sign in a tight bracket.
        pts = bethe.find_exceptional(
            2, {"omega": 1.0, "omega0": 0.7, "g2": 0.1}, "g1", (0.2, 2.6),
            grid=200, n_max=140)
        assert len(pts) >= 3
        for pt in pts:
            assert pt.verified
            assert pt.verified_gap < 1e-7
            assert abs(pt.epsilon_at_crossing - 2) < 1e-6
            assert pt.solution.residual_max < 1e-10

    def test_n1_both_conditions_needed(self):
        # A zero of the first condition alone is not exceptional; verification
        # against the second condition must reject it.
        kappa, nu = 0.5, 0.3
        delta = 1.2588  # near a spurious first-condition zero
        from scipy.optimize import brentq
        d0 = brentq(lambda d: bethe.exceptional_condition_n1(kappa, nu, d, 1),
                    1.1, 1.4, xtol=1e-12)
        z1 = bethe.closed_form_roots_n1(kappa, nu)[1]
        ra, rb = bethe.condition_residuals(z1, z1 * z1, 1, kappa, nu, d0)
        assert abs(ra) < 1e-10
        assert abs(rb) > 1e-2
        r = reduce(invert(kappa, nu, d0, 1.0))
        assert bethe._bethe_side_solution(1, r, 1) is None


class TestFindExceptional:
    def test_n0_curve(self):
        for g2 in (0.2, 0.5):
            pts = bethe.find_exceptional(
                0, {"omega": 1.0, "omega0": 1.0, "g2": g2}, "g1", (1.0, 2.0),
                grid=120, n_max=140)
            assert len(pts) == 1
            assert pts[0].params.g1 == pytest.approx(math.sqrt(2 + g2 * g2), abs=1e-8)
            assert pts[0].verified

    def test_n1_points_confirmed(self):
        pts = bethe.find_exceptional(
            1, {"omega": 1.0, "omega0": 0.7, "g2": 0.1}, "g1", (0.2, 2.6),
            grid=200, n_max=140)
        assert len(pts) == 3
        for pt in pts:
            assert pt.verified
            assert abs(pt.epsilon_at_crossing - 1) < 1e-6
            res = bethe.residual_bae(pt.solution.roots, pt.reduced, 1.0)
            assert np.max(np.abs(res)) < 1e-12

    def test_bad_free_param(self):
        with pytest.raises(ValueError):
            bethe.find_exceptional(0, {"omega": 1.0}, "g1", (0.1, 1.0))


class TestBranches:
    def test_n1_matches_closed_form(self):
        kappa, nu = 0.4, 0.35
        sols = bethe.branch_Z(1, kappa, nu)
        want = sorted(bethe.closed_form_roots_n1(kappa, nu))
        got = sorted(s.Z1 for s in sols)
        assert got == pytest.approx(want, rel=1e-12)

    def test_n5_kappa01_ten_branches(self):
        sols = bethe.branch_Z(5, 0.1, 0.3, extra_starts=600)
        assert len(sols) == 10
        for s in sols:
            assert s.residual_max < 1e-10
        # nearly degenerate pairs are present
        z1s = sorted(s.Z1 for s in sols)
        close_pairs = sum(1 for a, b in zip(z1s, z1s[1:]) if abs(a - b) < 0.1)
        assert close_pairs >= 2

    def test_branch_count_at_most_2n(self):
        for (n, kappa, nu) in [(2, 0.5, 0.45), (3, 0.4, 0.35), (4, 0.25, 0.4)]:
            sols = bethe.branch_Z(n, kappa, nu, extra_starts=300)
            assert 1 <= len(sols) <= 2 * n


class TestAsymptotics:
    def test_root_sum_identity_via_laguerre(self):
        # sum y_j over roots of L_n^(-1-2n) equals n(n + alpha) = -n(n+1)
        from rabi_spectra.special import genlaguerre_roots
        for n in range(1, 7):
            roots = genlaguerre_roots(n, -1 - 2 * n)
            assert np.sum(roots).real == pytest.approx(-n * (n + 1), rel=1e-9)

    def test_ground_branch_match(self):
        a1, a2 = bethe.asymptotic_Z(5, 0.1, 0.05)
        sols = bethe.branch_Z(5, 0.1, 0.05, extra_starts=200)
        s = sols[0]  # ground branch: most negative Z1
        assert abs(s.Z1 - a1) / abs(s.Z1) < 1e-2
        assert abs(s.Z2 - a2) / abs(s.Z2) < 1e-2

    def test_n1_leading_term(self):
        # exact z1- root expands as -1/nu + O(1); the asymptotic Z1 for n=1
        # carries the same -n(n+1)/(2 nu) = -1/nu leading term
        kappa = 0.3
        for nu in (0.02, 0.01):
            z_minus = bethe.closed_form_roots_n1(kappa, nu)[1]
            a1, _ = bethe.asymptotic_Z(1, kappa, nu)
            assert z_minus * nu == pytest.approx(-1.0, abs=0.05)
            assert a1 * nu == pytest.approx(-1.0, abs=0.05)
            assert z_minus == pytest.approx(a1, rel=0.05)


class TestRabiLine:
    def test_n0_condition_closed_form(self):
        assert bethe.rabi_condition(0, 0.3, 0.5) == pytest.approx(1 - 0.25 - 4 * 0.09)

    def test_lambda_sum_rule(self):
        rng = np.random.default_rng(25)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            nu = rng.uniform(0.1, 1.0)
            z1 = rng.uniform(-5, 5)
            l1 = (2 * nu * z1 + n * (n + 2 + 2 * nu * nu)) / (4 * nu ** 2 * n)
            l2 = -(2 * nu * z1 + n * (n + 2 - 2 * nu * nu)) / (4 * nu ** 2 * (n + 1))
            assert n * l1 + (n + 1) * l2 == pytest.approx(n, rel=1e-9)

    def test_juddian_points_verified(self):
        pts = bethe.rabi_exceptional(1, 1.0, 1.0, (0.5, 1.1), grid=150, n_max=160)
        assert len(pts) == 1
        pt = pts[0]
        assert pt.verified
        assert pt.n == 2  # eps = n + 1
        assert pt.verified_gap < 1e-7
        assert abs(pt.epsilon_at_crossing - 2) < 1e-6
        res = bethe.residual_bae_rabi(pt.solution.roots, pt.reduced.nu, 2.0)
        assert np.max(np.abs(res)) < 1e-10


class TestEigenstates:
    def test_n0_cat_projection(self):
        p = ModelParams(1.0, 1.0, 1.5, 0.5)
        r = reduce(p)
        sol = bethe.BetheSolution(0, np.zeros(0, dtype=complex), 0.0, 0.0, 0.0)
        gap, eps_at = bethe._fock_gap_at(p, 0, 160)
        pt = bethe.ExceptionalPoint(0, p, r, sol, gap, eps_at, True)
        u_plus, u_minus = bethe.eigenstate_at_exceptional(pt, n_max=160)
        h = fock.build(p, 160)
        assert fock.eigvec_overlap(h, 0, u_plus) > 1 - 1e-4
        assert fock.eigvec_overlap(h, 0, u_minus) > 1 - 1e-4
        # generalized cats superpose both displacements
        coh = fock.coherent_state(r.nu, 160)
        w_plus = np.linalg.norm(u_plus[0::2] @ coh) ** 2 + np.linalg.norm(u_plus[1::2] @ coh) ** 2
        assert 0.05 < w_plus < 0.95

    def test_n1_displaced_single_excitation_states(self):
        # (a' - z1)|nu>-type doublet members at an n=1 point
        pts = bethe.find_exceptional(
            1, {"omega": 1.0, "omega0": 0.7, "g2": 0.1}, "g1", (0.3, 0.5),
            grid=60, n_max=160)
        assert pts
        pt = pts[0]
        assert len(pt.solution.roots) == 1
        u_plus, u_minus = bethe.eigenstate_at_exceptional(pt, n_max=160)
        h = fock.build(pt.params, 160)
        from scipy.linalg import eigh
        evals = eigh(h.matrix, eigvals_only=True) + pt.reduced.lambda_plus
        level = int(np.argmin(np.abs(evals - 1.0)))
        assert fock.eigvec_overlap(h, level, u_plus) > 1 - 1e-4
        assert fock.eigvec_overlap(h, level, u_minus) > 1 - 1e-4

    def test_n2_doublet_overlap(self):
        pts = bethe.find_exceptional(
            2, {"omega": 1.0, "omega0": 0.7, "g2": 0.1}, "g1", (0.2, 1.2),
            grid=120, n_max=160)
        assert pts
        pt = pts[0]
        u_plus, u_minus = bethe.eigenstate_at_exceptional(pt, n_max=160)
        h = fock.build(pt.params, 160)
        lam_p = pt.reduced.lambda_plus
        # locate the doublet level index at eps = 2
        from scipy.linalg import eigh
        evals = eigh(h.matrix, eigvals_only=True) + lam_p
        level = int(np.argmin(np.abs(evals - 2.0)))
        assert fock.eigvec_overlap(h, level, u_plus) > 1 - 1e-4
        assert fock.eigvec_overlap(h, level, u_minus) > 1 - 1e-4

    def test_not_verified_raises(self):
        p = ModelParams(1.0, 1.0, 1.5, 0.5)
        pt = bethe.ExceptionalPoint(0, p, reduce(p), None, 1.0, 0.0, False, "nope")
        with pytest.raises(bethe.NotVerified):
            bethe.eigenstate_at_exceptional(pt)
