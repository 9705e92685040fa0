"""Exceptional-spectrum engine: Bethe/Richardson equations in Lambda variables.

The exceptional eigenvalues sit at integer shifted energy eps = n. Their
polynomial Bargmann factors have roots (rapidities) z_i obeying Richardson
equations with three "levels" eps_s = (nu, -nu, kappa) of degeneracies
d_s = (n-1, n, 1):

    sum_{j!=i} 2/(z_j - z_i) + sum_s d_s/(z_i - eps_s) + 2 nu = 0.

The change of variables Lambda_j = (1/2nu) sum_k 1/(eps_j - z_k) closes into
a quadratic equation plus a derivative hierarchy; together with the two
integer-energy conditions fixing (Z1, Z2) this collapses the root search to
a single scalar condition F(kappa, nu, delta) whose zeros are the
exceptional parameter surfaces. Scaled derivatives are used throughout:

    Lambda_j^(l) = (-1)^l l! / (2nu)^(l+1) * sum_k (eps_j - z_k)^(-(l+1)),

the unique convention under which valid root sets satisfy the hierarchy.

On the Rabi line g1 = g2 the kappa level disappears; the two-level variant
with degeneracies (n, n+1) at fixed eps = n + 1 handles the Juddian points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import fock
from .core import ModelParams, ReducedParams, reduce
from .special import genlaguerre_roots

PARAM_TOL = 1e-10
BETHE_TOL = 1e-10
COND_TOL = 1e-8
POLE_TOL = 1e-8


class RabiLimit(ValueError):
    """General-model path called on (or too near) the Rabi line g1 = g2."""


class PoleCollision(ValueError):
    """A rapidity sits on a pole of the Bethe equations."""


class SingularSystem(ValueError):
    """Lambda linear system is singular (kappa^2 = nu^2, or n = 1 where the
    Lambda_1 coefficient d_1 = n - 1 drops out)."""


class Degenerate(ValueError):
    """n <= 1 requested from the generic hierarchy (dedicated paths exist)."""


class NotVerified(RuntimeError):
    pass


@dataclass(frozen=True)
class OdeCoefficients:
    """Coefficients of the second-order Bargmann ODE.

    D2(z) = d0 + d1 z + d2 z^2 over the pole set rho = (nu, -nu, kappa) with
    exponent parameters nu_s = (1-eps, -eps, -1) and nu0 = -2 nu.
    """

    d0: float
    d1: float
    d2: float
    rho: tuple[float, float, float]
    nu_s: tuple[float, float, float]
    nu0: float


@dataclass(frozen=True)
class BetheSolution:
    n: int
    roots: np.ndarray
    Z1: float
    Z2: float
    residual_max: float
    branch_id: str = ""


@dataclass(frozen=True)
class LambdaState:
    lam: tuple[float, ...]
    derivatives: dict[int, list[float]]
    levels: tuple[float, ...]
    degeneracies: tuple[int, ...]


@dataclass(frozen=True)
class ExceptionalPoint:
    n: int
    params: ModelParams
    reduced: ReducedParams
    solution: BetheSolution | None
    verified_gap: float
    epsilon_at_crossing: float
    verified: bool
    message: str = ""


def ode_coefficients(r: ReducedParams, epsilon: float) -> OdeCoefficients:
    """D2 coefficients and pole data of the Bargmann ODE at shifted energy eps."""
    if r.rabi_limit or r.kappa is None:
        raise RabiLimit("ode_coefficients needs lambda- != 0; use the Rabi-limit path")
    k, nu, dl, lp = r.kappa, r.nu, r.delta, r.lambda_plus
    e = epsilon - lp
    d0 = k * (dl * dl - epsilon * epsilon + 2 * epsilon * lp - lp * lp + lp + nu * nu + nu ** 4) \
        + nu * (epsilon - lp - nu * nu)
    d1 = e * (e + 1) - dl * dl + dl * lp / r.lambda_minus + nu * k - nu * nu \
        - 2 * nu * epsilon * k - nu ** 4
    d2 = 2 * nu * epsilon
    return OdeCoefficients(
        d0=d0, d1=d1, d2=d2,
        rho=(nu, -nu, k),
        nu_s=(1 - epsilon, -epsilon, -1.0),
        nu0=-2 * nu,
    )


# ---------------------------------------------------------------------------
# Bethe ansatz equations and their Newton solver
# ---------------------------------------------------------------------------

def _bae_residual_generic(
    roots: np.ndarray, levels: Sequence[float], strengths: Sequence[float], nu: float
) -> np.ndarray:
    """Richardson-form residuals sum 2/(z_j-z_i) + sum_s w_s/(z_i-e_s) + 2nu."""
    z = np.asarray(roots, dtype=complex)
    n = len(z)
    res = np.full(n, 2 * nu, dtype=complex)
    for i in range(n):
        for j in range(n):
            if j != i:
                res[i] += 2.0 / (z[j] - z[i])
        for e_s, w_s in zip(levels, strengths):
            res[i] += w_s / (z[i] - e_s)
    return res


def _check_poles(roots: np.ndarray, levels: Sequence[float]) -> None:
    z = np.asarray(roots, dtype=complex)
    for e_s in levels:
        if len(z) and np.min(np.abs(z - e_s)) < POLE_TOL:
            raise PoleCollision(f"rapidity within {POLE_TOL} of pole {e_s}")
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            if abs(z[i] - z[j]) < POLE_TOL:
                raise PoleCollision("coincident rapidities")


def residual_bae(
    roots: Sequence[complex], r: ReducedParams, epsilon: float
) -> np.ndarray:
    """Left-hand sides of the Bethe equations, one per rapidity.

    The pole strengths are (eps-1, eps, 1) at (nu, -nu, kappa); at the
    exceptional condition eps = n these are the integer degeneracies.
    """
    if r.kappa is None:
        raise RabiLimit("residual_bae on the Rabi line: use residual_bae_rabi")
    z = np.asarray(roots, dtype=complex)
    if len(z) == 0:
        return np.zeros(0)
    levels = (r.nu, -r.nu, r.kappa)
    _check_poles(z, levels)
    return _bae_residual_generic(z, levels, (epsilon - 1.0, epsilon, 1.0), r.nu)


def residual_bae_rabi(roots: Sequence[complex], nu: float, epsilon: float) -> np.ndarray:
    """Rabi-line Bethe residuals: the kappa pole is absent."""
    z = np.asarray(roots, dtype=complex)
    if len(z) == 0:
        return np.zeros(0)
    levels = (nu, -nu)
    _check_poles(z, levels)
    return _bae_residual_generic(z, levels, (epsilon - 1.0, epsilon), nu)


def _newton_bae(
    start: np.ndarray,
    levels: Sequence[float],
    strengths: Sequence[float],
    nu: float,
    tol: float = BETHE_TOL,
    max_iter: int = 80,
) -> np.ndarray | None:
    """Damped Newton in (Re z, Im z) coordinates with the analytic Jacobian.

    The residual map is holomorphic per root, so the real 2n x 2n Jacobian is
    assembled from the complex one. Returns None on non-convergence.
    """
    z = np.asarray(start, dtype=complex).copy()
    n = len(z)
    if n == 0:
        return z
    lv = np.asarray(levels, dtype=float)
    wt = np.asarray(strengths, dtype=float)

    def resid(zz: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            dz = zz[None, :] - zz[:, None]  # z_j - z_i at [i, j]
            np.fill_diagonal(dz, 1.0)
            inv = 2.0 / dz
            np.fill_diagonal(inv, 0.0)
            pair = np.sum(inv, axis=1)
            pole = np.sum(wt[None, :] / (zz[:, None] - lv[None, :]), axis=1)
        return pair + pole + 2 * nu

    def jac(zz: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            dz = zz[None, :] - zz[:, None]  # z_j - z_i at [i, j]
            np.fill_diagonal(dz, 1.0)
            inv2 = 2.0 / dz ** 2
            np.fill_diagonal(inv2, 0.0)
            diag = np.sum(inv2, axis=1) \
                - np.sum(wt[None, :] / (zz[:, None] - lv[None, :]) ** 2, axis=1)
            j = -inv2
            np.fill_diagonal(j, diag)
        return j

    f = resid(z)
    fn = np.max(np.abs(f))
    polish = 0
    for _ in range(max_iter):
        if fn < tol:
            # a few extra steps drive the residual to roundoff
            polish += 1
            if polish > 3 or fn == 0.0:
                break
        jc = jac(z)
        jr = np.block([[jc.real, -jc.imag], [jc.imag, jc.real]])
        rhs = np.concatenate([f.real, f.imag])
        try:
            step = np.linalg.solve(jr, -rhs)
        except np.linalg.LinAlgError:
            return None
        dzc = step[:n] + 1j * step[n:]
        lam = 1.0
        improved = False
        for _ in range(25):
            z_new = z + lam * dzc
            if np.min(np.abs(z_new[:, None] - lv[None, :])) < POLE_TOL:
                lam *= 0.5
                continue
            f_new = resid(z_new)
            fn_new = np.max(np.abs(f_new))
            if fn_new < fn or fn_new < tol:
                z, f, fn = z_new, f_new, fn_new
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    if fn >= tol:
        return None
    # Snap conjugate-pair dust onto the real axis.
    scale = max(1.0, np.max(np.abs(z)))
    z = np.where(np.abs(z.imag) < 1e-12 * scale, z.real + 0j, z)
    return z


def _is_conjugate_closed(z: np.ndarray, rtol: float = 1e-7) -> bool:
    scale = max(1.0, np.max(np.abs(z))) if len(z) else 1.0
    pool = list(z)
    for zi in z:
        if abs(zi.imag) < rtol * scale:
            continue
        if not any(abs(np.conj(zi) - zj) < rtol * scale for zj in pool):
            return False
    return True


# ---------------------------------------------------------------------------
# Lambda variables, the linear system, and the derivative hierarchy
# ---------------------------------------------------------------------------

def _lambda_scaled_derivative(
    roots: np.ndarray, eps_j: float, order: int, nu: float
) -> float:
    """Lambda_j^(l) = (-1)^l l!/(2nu)^(l+1) sum_k (eps_j - z_k)^-(l+1)."""
    z = np.asarray(roots, dtype=complex)
    s = np.sum(1.0 / (eps_j - z) ** (order + 1)) if len(z) else 0.0
    val = (-1) ** order * math.factorial(order) / (2 * nu) ** (order + 1) * s
    return float(np.real(val))


def lambda_from_roots(
    roots: Sequence[complex], r: ReducedParams, n: int
) -> LambdaState:
    """Lambda values and scaled derivatives evaluated directly from rapidities.

    Degeneracies follow the exceptional assignment d = (n-1, n, 1) at the
    levels (nu, -nu, kappa); derivatives are produced for every level with
    d_j > 1 up to order d_j - 1.
    """
    if r.kappa is None:
        raise RabiLimit("lambda_from_roots on the Rabi line")
    z = np.asarray(roots, dtype=complex)
    levels = (r.nu, -r.nu, r.kappa)
    degeneracies = (n - 1, n, 1)
    if len(z):
        _check_poles(z, levels)
    lam = tuple(_lambda_scaled_derivative(z, e, 0, r.nu) for e in levels)
    derivs: dict[int, list[float]] = {}
    for j, d_j in enumerate(degeneracies):
        if d_j > 1:
            derivs[j] = [
                _lambda_scaled_derivative(z, levels[j], l, r.nu)
                for l in range(1, d_j)
            ]
    return LambdaState(lam=lam, derivatives=derivs, levels=levels,
                       degeneracies=degeneracies)


def lambda_linear_solve(
    Z1: float, Z2: float, n: int, kappa: float, nu: float
) -> tuple[float, float, float]:
    """Closed-form solution of the linear system for (Lambda_1,2,3).

    Valid for n >= 2 and kappa^2 != nu^2; n = 1 carries a vanishing
    Lambda_1 coefficient and is served by the closed-form root instead.
    """
    if n < 2:
        raise SingularSystem("Lambda_2 closed form carries an (n-1) denominator; n >= 2 required")
    if abs(kappa * kappa - nu * nu) < 1e-14 * max(1.0, kappa * kappa, nu * nu):
        raise SingularSystem("kappa^2 = nu^2: degenerate two-step case")
    # Solved from the moment system; lambda_1 carries the (n-1) denominator
    # (its coefficient d_1 = n-1 drops out of the system at n = 1).
    l1 = (n * n * (nu - kappa) - 2 * kappa * nu ** 2 * n
          + Z1 * (-2 * kappa * nu + 2 * nu ** 2 + 2) + 2 * nu * Z2) / (4 * nu ** 2 * (n - 1) * (nu - kappa))
    l2 = (-n * n * (kappa + nu) + 2 * nu * n * (kappa * nu - 1)
          - 2 * Z1 * (kappa * nu + nu * nu - 1) + 2 * nu * Z2) / (4 * n * nu ** 2 * (kappa + nu))
    l3 = (kappa * n - 2 * nu ** 3 * n - nu * n + 2 * Z1 + 2 * nu * Z2) / (2 * kappa ** 2 * nu - 2 * nu ** 3)
    return (l1, l2, l3)


def lambda_linear_solve_n1(
    Z1: float, kappa: float, nu: float
) -> tuple[float, float]:
    """(Lambda_2, Lambda_3) for n = 1, where Lambda_1 drops out (d_1 = 0).

    The first two moment equations form a 2x2 system; the third is then a
    consistency identity on Bethe roots.
    """
    if abs(kappa + nu) < 1e-14:
        raise SingularSystem("kappa = -nu")
    # Lambda_2 + Lambda_3 = 1;  2 nu (-nu Lambda_2 + kappa Lambda_3) = 2 + 2 nu Z1
    rhs = (2 + 2 * nu * Z1) / (2 * nu)
    l3 = (rhs + nu) / (kappa + nu)
    l2 = 1.0 - l3
    return l2, l3


def lambda_linear_matrix(
    n: int, kappa: float, nu: float
) -> tuple[np.ndarray, Callable[[float, float], np.ndarray]]:
    """The 3x3 linear system behind `lambda_linear_solve`, for cross-checks.

    Returns (M, rhs(Z1, Z2)) such that M @ Lambda = rhs.
    """
    d = np.array([n - 1, n, 1], dtype=float)
    e = np.array([nu, -nu, kappa])
    m = np.vstack([d, 2 * nu * d * e, 2 * nu * d * e ** 2])

    def rhs(Z1: float, Z2: float) -> np.ndarray:
        return np.array([
            n,
            n * (n + 1) + 2 * nu * Z1,
            2 * Z1 + n * (kappa - nu) + 2 * nu * Z2,
        ])

    return m, rhs


def hierarchy_terms(
    j: int,
    l: int,
    lam: Sequence[float],
    derivs_j: Sequence[float],
    next_deriv: float,
    levels: Sequence[float],
    degeneracies: Sequence[float],
    nu: float,
) -> list[float]:
    """Additive terms of the l-th derivative equation E_j^(l).

    derivs_j holds Lambda_j^(1..l) (scaled convention); next_deriv supplies
    Lambda_j^(l+1), whose coefficient (1 - d_j/(l+1)) vanishes identically at
    l = d_j - 1 where the equation turns into a pure constraint. l = 0
    reproduces the quadratic equation. The term list lets callers form both
    the residual and its natural magnitude scale.
    """
    d_j = degeneracies[j]

    def lam_j(order: int) -> float:
        if order == 0:
            return lam[j]
        if order == l + 1:
            return next_deriv
        return derivs_j[order - 1]

    terms = [(1.0 - d_j / (l + 1)) * lam_j(l + 1), -lam_j(l)]
    for k in range(l + 1):
        terms.append(comb(l, k) * lam_j(k) * lam_j(l - k))
    fact_l = math.factorial(l)
    for i, (e_i, d_i) in enumerate(zip(levels, degeneracies)):
        if i == j:
            continue
        de = e_i - levels[j]
        terms.append(-fact_l * d_i * (lam[i] - lam[j])
                     / ((2 * nu) ** (l + 1) * de ** (l + 1)))
        for m in range(1, l + 1):
            terms.append(fact_l * d_i * lam_j(l - m + 1)
                         / ((2 * nu) ** m * math.factorial(l - m + 1) * de ** m))
    return terms


def hierarchy_residual(
    j: int,
    l: int,
    lam: Sequence[float],
    derivs_j: Sequence[float],
    next_deriv: float,
    levels: Sequence[float],
    degeneracies: Sequence[float],
    nu: float,
) -> float:
    """Residual of the l-th derivative equation E_j^(l); see hierarchy_terms."""
    return math.fsum(hierarchy_terms(j, l, lam, derivs_j, next_deriv,
                                     levels, degeneracies, nu))


def _hierarchy_closure(
    j: int,
    lam: Sequence[float],
    levels: Sequence[float],
    degeneracies: Sequence[int],
    nu: float,
) -> float:
    """Solve the Lambda_j derivative chain; return the terminal residual.

    For degeneracy d_j the chain E_j^(0..d_j-2) determines
    Lambda_j^(1..d_j-1); E_j^(d_j-1) has a vanishing leading coefficient and
    its value is the scalar exceptional condition.
    """
    d_j = degeneracies[j]
    derivs: list[float] = []
    for l in range(d_j):
        coeff = 1.0 - d_j / (l + 1)
        rest = hierarchy_residual(j, l, lam, derivs, 0.0, levels, degeneracies, nu)
        if l < d_j - 1:
            derivs.append(-rest / coeff)
        else:
            return rest
    raise AssertionError("unreachable: d_j >= 1 always terminates the chain")


# ---------------------------------------------------------------------------
# The exceptional condition F and its special cases
# ---------------------------------------------------------------------------

def lambda_plus_of(kappa: float, nu: float, delta: float) -> float:
    """lambda+ from (kappa, nu, delta) via lambda+^2 - lambda-^2 = nu^4."""
    return math.hypot(delta * nu / kappa, nu * nu)


def z1z2_from_conditions(
    n: int, kappa: float, nu: float, delta: float
) -> tuple[float, float]:
    """(Z1, Z2) imposed by the two integer-energy conditions at eps = n."""
    lp = lambda_plus_of(kappa, nu, delta)
    d2 = delta * delta
    z1 = (lp * lp - (2 * n + 1 - kappa / nu) * lp
          - (d2 + nu * (nu - kappa) + nu ** 4)) / (2 * nu)
    z2 = (-lp * lp + (2 * n + 1 - kappa / nu + kappa * kappa - nu * nu) * lp
          + (d2 + nu * (nu - kappa) + kappa * kappa * nu * nu
             + 2 * n * nu * nu * (nu * nu + 1))) / (2 * nu ** 2)
    return z1, z2


def condition_residuals(
    Z1: float, Z2: float, n: int, kappa: float, nu: float, delta: float
) -> tuple[float, float]:
    """Residuals of the two integer-energy conditions for given (Z1, Z2)."""
    z1c, z2c = z1z2_from_conditions(n, kappa, nu, delta)
    return 2 * nu * (Z1 - z1c), 2 * nu * nu * (Z2 - z2c)


def closed_form_roots_n1(kappa: float, nu: float) -> tuple[float, float]:
    """The two analytic n=1 rapidities z_{1,+-}."""
    disc = math.sqrt(nu * nu * (kappa + nu) ** 2 + 1)
    base = kappa * nu - nu * nu - 1
    return ((base + disc) / (2 * nu), (base - disc) / (2 * nu))


def exceptional_condition_n0(kappa: float, nu: float) -> float:
    """n = 0: both conditions collapse to kappa = nu (lambda- = delta)."""
    return kappa - nu


def exceptional_condition_n1(
    kappa: float, nu: float, delta: float, branch: int = 0
) -> float:
    """n = 1 condition residual with the closed-form rapidity of `branch`.

    Returns the first condition's residual; on the exceptional surface the
    second follows automatically (they are dependent modulo the Bethe
    equations), and verification re-checks it.
    """
    z1 = closed_form_roots_n1(kappa, nu)[branch]
    r_a, _ = condition_residuals(z1, z1 * z1, 1, kappa, nu, delta)
    return r_a


def exceptional_condition(n: int, kappa: float, nu: float, delta: float) -> float:
    """Scalar residual F whose zeros locate exceptional points at eps = n >= 2.

    Pipeline: (Z1, Z2) from the integer-energy conditions, (Lambda_1,2,3)
    from the linear system, then the Lambda_1 derivative chain; F is the
    terminal hierarchy equation.
    """
    if n <= 1:
        raise Degenerate("n = 0 and n = 1 have dedicated closed forms")
    if nu <= 0:
        raise ValueError("nu must be positive")
    z1, z2 = z1z2_from_conditions(n, kappa, nu, delta)
    lam = lambda_linear_solve(z1, z2, n, kappa, nu)
    levels = (nu, -nu, kappa)
    degeneracies = (n - 1, n, 1)
    return _hierarchy_closure(0, lam, levels, degeneracies, nu)


def power_sums_from_lambda(
    n: int,
    Z1: float,
    Z2: float,
    lam: Sequence[float],
    levels: Sequence[float],
    degeneracies: Sequence[float],
    nu: float,
) -> list[float]:
    """Power sums Z_0..Z_n of the rapidities from the Lambda data.

    Z_{k} follows from summing z_i^k times the Richardson equations, which
    telescope into a recursion in the lower power sums; this seeds the
    polynomial whose roots initialize Newton refinement.
    """
    zs = [float(n), Z1, Z2][: n + 1]
    d = np.asarray(degeneracies, dtype=float)
    e = np.asarray(levels, dtype=float)
    lm = np.asarray(lam, dtype=float)
    for k in range(len(zs), n + 1):
        conv = sum(zs[a] * zs[k - 1 - a] for a in range(k))
        pole = sum(
            d[s] * sum(zs[a] * e[s] ** (k - 1 - a) for a in range(k))
            for s in range(len(e))
        )
        zk = float(np.dot(d * lm, e ** k)) + (conv - k * zs[k - 1] - pole) / (2 * nu)
        zs.append(zk)
    return zs


def roots_from_power_sums(power_sums: Sequence[float]) -> np.ndarray:
    """Monic-polynomial roots from Z_0..Z_n via Newton's identities."""
    n = int(round(power_sums[0]))
    if n == 0:
        return np.zeros(0, dtype=complex)
    elem = [1.0]
    for k in range(1, n + 1):
        ek = sum((-1) ** (i - 1) * elem[k - i] * power_sums[i] for i in range(1, k + 1)) / k
        elem.append(ek)
    coeffs = [(-1) ** k * elem[k] for k in range(n + 1)]
    return np.roots(coeffs)


# ---------------------------------------------------------------------------
# Locating exceptional points along one-parameter scans
# ---------------------------------------------------------------------------

_FREE_PARAMS = ("omega", "omega0", "g1", "g2")


def _params_with(fixed: dict, free: str, value: float) -> ModelParams:
    kw = dict(fixed)
    kw[free] = value
    return ModelParams(**kw)


def _recover_solution(
    n: int, r: ReducedParams, branch_hint: int | None = None
) -> BetheSolution | None:
    """Rapidities at a candidate exceptional point, Newton-refined."""
    kappa, nu = r.kappa, r.nu
    if n == 0:
        return BetheSolution(n=0, roots=np.zeros(0, dtype=complex), Z1=0.0, Z2=0.0,
                             residual_max=0.0, branch_id="n0")
    z1c, z2c = z1z2_from_conditions(n, kappa, nu, r.delta)
    levels = (nu, -nu, kappa)
    strengths = (n - 1.0, float(n), 1.0)
    if n == 1:
        candidates = closed_form_roots_n1(kappa, nu)
        order = [branch_hint] if branch_hint is not None else [0, 1]
        for b in order:
            z = np.array([candidates[b]], dtype=complex)
            if abs(z[0] - z1c) < 1e-6 * max(1.0, abs(z1c)):
                res = np.max(np.abs(residual_bae(z, r, float(n))))
                return BetheSolution(1, z, float(z[0].real), float((z[0] ** 2).real),
                                     float(res), branch_id=f"z1{'+' if b == 0 else '-'}")
        return None
    lam = lambda_linear_solve(z1c, z2c, n, kappa, nu)
    zs = power_sums_from_lambda(n, z1c, z2c, lam, levels, strengths, nu)
    start = roots_from_power_sums(zs)
    z = _newton_bae(start, levels, strengths, nu)
    if z is None:
        return None
    try:
        res = np.max(np.abs(residual_bae(z, r, float(n))))
    except PoleCollision:
        return None
    Z1, Z2 = np.sum(z), np.sum(z ** 2)
    if abs(Z1.imag) > 1e-8 or abs(Z2.imag) > 1e-8:
        return None
    return BetheSolution(n, z, float(Z1.real), float(Z2.real), float(res))


def _fock_gap_at(p: ModelParams, n: int, n_max: int) -> tuple[float, float]:
    """(gap, eps at the pair) for the adjacent pair closest to eps = n."""
    lam_p = reduce(p).lambda_plus
    # Enough levels to bracket eps = n comfortably.
    k = 2 * (n + 3) + int(2 * lam_p) + 8
    k = min(k, 2 * (n_max + 1))
    eps = fock._eps_levels(p, n_max, k)
    gaps = np.diff(eps)
    mids = 0.5 * (eps[:-1] + eps[1:])
    cand = np.where(np.abs(mids - n) < 0.5)[0]
    if len(cand) == 0:
        return math.inf, math.nan
    best = cand[np.argmin(gaps[cand])]
    return float(gaps[best]), float(mids[best])


def _bethe_side_solution(
    n: int, r: ReducedParams, branch_hint: int | None
) -> BetheSolution | None:
    """Recovered rapidities if the point is Bethe-consistent, else None.

    A zero of the single-chain condition F is only necessary; the recovered
    roots must solve the Bethe equations and reproduce both integer-energy
    conditions. Candidates failing here are bracketing artifacts, not
    exceptional points.
    """
    sol = _recover_solution(n, r, branch_hint)
    if sol is None or sol.residual_max > BETHE_TOL * 10:
        return None
    ra, rb = condition_residuals(sol.Z1, sol.Z2, n, r.kappa, r.nu, r.delta)
    scale = max(1.0, abs(sol.Z1), abs(sol.Z2))
    if max(abs(ra), abs(rb)) > COND_TOL * scale:
        return None
    return sol


def _verify_point(
    n: int,
    p: ModelParams,
    r: ReducedParams,
    sol: BetheSolution,
    n_max: int,
) -> ExceptionalPoint:
    gap, eps_at = _fock_gap_at(p, n, n_max)
    ok = gap < fock.GAP_TOL * p.omega and abs(eps_at - n) < fock.INT_TOL
    msg = "" if ok else f"fock gap {gap:.2e} at eps {eps_at:.6f}"
    return ExceptionalPoint(
        n=n, params=p, reduced=r, solution=sol, verified_gap=gap,
        epsilon_at_crossing=eps_at, verified=ok, message=msg,
    )


def find_exceptional(
    n: int,
    fixed: dict[str, float],
    free: str,
    free_range: tuple[float, float],
    grid: int = 400,
    n_max: int = fock.DEFAULT_N_MAX,
    verify: bool = True,
) -> list[ExceptionalPoint]:
    """Scan one model parameter for zeros of the exceptional condition.

    `fixed` holds three of {omega, omega0, g1, g2}; `free` names the fourth,
    scanned over free_range on a uniform grid with sign-change bracketing and
    bisection to PARAM_TOL. Each root is verified: rapidities recovered and
    residual-checked, conditions re-evaluated, and the fock gap at eps = n
    confirmed. Unverified roots are returned flagged, never dropped.
    """
    if free not in _FREE_PARAMS or set(fixed) != set(_FREE_PARAMS) - {free}:
        raise ValueError(f"free must be one of {_FREE_PARAMS} with the rest fixed")
    lo, hi = free_range
    ts = np.linspace(lo, hi, grid)
    branches: list[int | None] = [0, 1] if n == 1 else [None]
    points: list[ExceptionalPoint] = []

    def f_of(t: float, branch: int | None) -> float:
        try:
            p = _params_with(fixed, free, float(t))
        except ValueError:
            return math.nan
        r = reduce(p)
        if r.rabi_limit or r.kappa is None or r.nu <= 0:
            return math.nan
        # The immediate Rabi neighborhood is served by rabi_exceptional.
        if abs(r.lambda_minus) < 1e-6 * r.lambda_plus:
            return math.nan
        # kappa^2 = nu^2 degenerates the Lambda system for n >= 1; for n = 0
        # kappa = nu is the exceptional surface itself.
        if n >= 1 and abs(r.kappa ** 2 - r.nu ** 2) < 1e-10 * max(1.0, r.nu ** 2):
            return math.nan
        try:
            if n == 0:
                return exceptional_condition_n0(r.kappa, r.nu)
            if n == 1:
                return exceptional_condition_n1(r.kappa, r.nu, r.delta, branch)
            return exceptional_condition(n, r.kappa, r.nu, r.delta)
        except (SingularSystem, ValueError, ZeroDivisionError):
            return math.nan

    for branch in branches:
        vals = np.array([f_of(t, branch) for t in ts])
        for i in range(len(ts) - 1):
            a, b = vals[i], vals[i + 1]
            if not (np.isfinite(a) and np.isfinite(b)) or a * b > 0:
                continue
            if a == 0.0 and b == 0.0:
                continue
            try:
                t_root = brentq(lambda t: f_of(t, branch), ts[i], ts[i + 1],
                                xtol=PARAM_TOL, rtol=8.9e-16)
            except ValueError:
                continue
            p = _params_with(fixed, free, float(t_root))
            r = reduce(p)
            sol = _bethe_side_solution(n, r, branch)
            if sol is None:
                continue
            if verify:
                pt = _verify_point(n, p, r, sol, n_max)
            else:
                pt = ExceptionalPoint(n, p, r, sol, math.nan, math.nan,
                                      True, "fock check skipped")
            # The same root can be bracketed by both n=1 branches; dedupe.
            if not any(abs(getattr(q.params, free) - t_root) < 1e-7 * max(1.0, abs(t_root))
                       for q in points):
                points.append(pt)
    points.sort(key=lambda q: getattr(q.params, free))
    return points


# ---------------------------------------------------------------------------
# Branch tracking in nu and the nu -> 0 asymptotics
# ---------------------------------------------------------------------------

def asymptotic_Z(n: int, kappa: float, nu: float) -> tuple[float, float]:
    """Ground-branch (Z1, Z2) in the nu -> 0 limit.

    All rapidities diverge like Laguerre-polynomial roots over 2 nu; the
    root sums of L_n^(-1-2n) give the closed forms.
    """
    t = kappa / nu - 1.0
    z1 = -n * (n + 1) / (2 * nu) + 0.5 * nu * t
    z2 = (n * (n + 1) / (2 * nu * nu) - 0.5 * (n + 1) * t
          + nu * nu * t * t / (4 * n))
    return z1, z2


def _stieltjes_group_roots(
    poles: Sequence[float], strengths: Sequence[float], degree: int
) -> np.ndarray | None:
    """Roots of the degree-q polynomial solution of the two-pole Stieltjes
    problem sum 2/(w_j - w_i) + sum_s a_s/(w_i - p_s) = 0.

    The polynomial solves A(z) y'' + B(z) y' = lam y with A = prod(z - p_s),
    B = sum_s a_s prod_{t != s}(z - p_t); solutions are nullspace vectors of
    the operator restricted to degree <= q.
    """
    q = degree
    if q == 0:
        return np.zeros(0)
    p0, p1 = poles
    a0, a1 = strengths
    dim = q + 1
    op = np.zeros((dim, dim))
    # A y'' with A = (z - p0)(z - p1) = z^2 - (p0+p1) z + p0 p1
    for k in range(2, dim):
        c = k * (k - 1)
        op[k, k] += c                       # z^2 * z^{k-2}
        op[k - 1, k] += -(p0 + p1) * c
        op[k - 2, k] += p0 * p1 * c
    # B y' with B = a0 (z - p1) + a1 (z - p0)
    for k in range(1, dim):
        op[k, k] += (a0 + a1) * k
        op[k - 1, k] += -(a0 * p1 + a1 * p0) * k
    lam = q * (q - 1) + q * (a0 + a1)
    m = op - lam * np.eye(dim)
    _, s, vt = np.linalg.svd(m)
    if s[-1] > 1e-8 * max(1.0, s[0]):
        return None
    coeffs = vt[-1]
    if abs(coeffs[-1]) < 1e-10:
        return None
    return np.roots(coeffs[::-1])


def _partition_starts(n: int, kappa: float, nu: float) -> list[tuple[str, np.ndarray]]:
    """Leading-order root configurations at small nu, one per scale partition.

    p rapidities diverge like Laguerre roots / (2 nu), q shrink like nu times
    Jacobi-type roots, and the rest sit at O(1) near the kappa pole.
    """
    starts: list[tuple[str, np.ndarray]] = []
    for p_div in range(n + 1):
        for q in range(n - p_div + 1):
            m1 = n - p_div - q
            groups = []
            ok = True
            if p_div:
                u = genlaguerre_roots(p_div, -2 * p_div - 1)
                groups.append(u / (2 * nu) + (kappa * nu - nu * nu) / (2 * n))
            if q:
                x = _stieltjes_group_roots((1.0, -1.0), (n - 1.0, float(n)), q)
                if x is None or np.min(np.abs(np.abs(x) - 1.0)) < 1e-6:
                    ok = False
                else:
                    groups.append(nu * x)
            if m1 and ok:
                w = _stieltjes_group_roots((0.0, kappa), (2.0 * n - 1.0 - 2 * q, 1.0), m1)
                if w is None or np.min(np.abs(w - kappa)) < 1e-8 or np.min(np.abs(w)) < 1e-8:
                    ok = False
                else:
                    groups.append(w)
            if not ok:
                continue
            z = np.concatenate(groups) if groups else np.zeros(0)
            if len(z) != n:
                continue
            starts.append((f"p{p_div}q{q}m{m1}", z.astype(complex)))
    return starts


def _dedupe_key(z: np.ndarray, digits: int = 6) -> tuple:
    zs = sorted(z, key=lambda c: (round(c.real, digits), round(abs(c.imag), digits)))
    return tuple((round(c.real, digits), round(abs(c.imag), digits)) for c in zs)


def closed_system_terminals(
    n: int, kappa: float, nu: float, Z1: float, Z2: float
) -> tuple[float, float]:
    """Terminal residuals (T1, T2) of the closed Lambda system at (Z1, Z2).

    The linear system fixes (Lambda_1,2,3) from (Z1, Z2); the level-1 and
    level-2 derivative chains then terminate in one scalar constraint each.
    Common zeros are the Bethe branches at fixed (n, kappa, nu).
    """
    lam = lambda_linear_solve(Z1, Z2, n, kappa, nu)
    levels = (nu, -nu, kappa)
    deg = (n - 1, n, 1)
    t1 = _hierarchy_closure(0, lam, levels, deg, nu)
    t2 = _hierarchy_closure(1, lam, levels, deg, nu)
    return t1, t2


def _newton_2d(
    func: Callable[[float, float], tuple[float, float]],
    x0: float,
    y0: float,
    tol: float = 1e-12,
    max_iter: int = 60,
) -> tuple[float, float] | None:
    """Damped Newton with forward-difference Jacobian for 2x2 systems."""
    x, y = float(x0), float(y0)
    try:
        fx, fy = func(x, y)
    except (ValueError, ZeroDivisionError, OverflowError):
        return None
    fn = math.hypot(fx, fy)
    for _ in range(max_iter):
        if not math.isfinite(fn):
            return None
        hx = 1e-7 * max(1.0, abs(x))
        hy = 1e-7 * max(1.0, abs(y))
        try:
            fxx, fyx = func(x + hx, y)
            fxy, fyy = func(x, y + hy)
        except (ValueError, ZeroDivisionError, OverflowError):
            return None
        j = np.array([[(fxx - fx) / hx, (fxy - fx) / hy],
                      [(fyx - fy) / hx, (fyy - fy) / hy]])
        try:
            dx, dy = np.linalg.solve(j, [-fx, -fy])
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        improved = False
        for _ in range(30):
            xn, yn = x + lam * dx, y + lam * dy
            try:
                gx, gy = func(xn, yn)
            except (ValueError, ZeroDivisionError, OverflowError):
                lam *= 0.5
                continue
            gn = math.hypot(gx, gy)
            if gn < fn:
                x, y, fx, fy, fn = xn, yn, gx, gy, gn
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
        # Converged when the step stalls at roundoff scale.
        if abs(dx) < tol * max(1.0, abs(x)) and abs(dy) < tol * max(1.0, abs(y)):
            return x, y
    return (x, y) if fn < 1e-6 else None


def _z_start_candidates(
    n: int, kappa: float, nu: float, extra: int, seed: int
) -> list[tuple[float, float]]:
    """(Z1, Z2) seeds: scale-partition asymptotics plus a coarse random cloud."""
    cands: list[tuple[float, float]] = []
    for _, z in _partition_starts(n, kappa, nu):
        Z1, Z2 = np.sum(z), np.sum(z * z)
        if abs(Z1.imag) < 1e-9 * max(1.0, abs(Z1)) and abs(Z2.imag) < 1e-9 * max(1.0, abs(Z2)):
            cands.append((float(Z1.real), float(Z2.real)))
    rng = np.random.default_rng(seed)
    s1 = n * (n + 1) / (2 * nu)
    for _ in range(extra):
        z1 = rng.uniform(-1.2 * s1, 0.5 * s1)
        z2 = rng.uniform(-0.5 * s1, 1.2 * s1 ** 2 / max(1, n))
        cands.append((z1, z2))
    return cands


def branch_Z(
    n: int,
    kappa: float,
    nu: float,
    extra_starts: int = 600,
    seed: int = 7,
) -> list[BetheSolution]:
    """All distinct Bethe-root branches (Z1, Z2) at fixed (n, kappa, nu).

    Solves the closed Lambda system in the (Z1, Z2) plane by multistart
    Newton (seeds from the nu -> 0 scale-partition asymptotics plus a random
    cloud), then recovers and polishes the rapidities of each candidate;
    only root sets that solve the Bethe equations survive.
    """
    if n < 1:
        raise ValueError("branch_Z needs n >= 1")
    if n == 1:
        sols = []
        for b, z1 in enumerate(closed_form_roots_n1(kappa, nu)):
            z = np.array([z1], dtype=complex)
            res = np.max(np.abs(_bae_residual_generic(z, (nu, -nu, kappa),
                                                      (0.0, 1.0, 1.0), nu)))
            sols.append(BetheSolution(1, z, z1, z1 * z1, float(res),
                                      branch_id=f"z1{'+' if b == 0 else '-'}"))
        return sols
    levels = (nu, -nu, kappa)
    strengths = (n - 1.0, float(n), 1.0)

    def terminals(z1: float, z2: float) -> tuple[float, float]:
        return closed_system_terminals(n, kappa, nu, z1, z2)

    found: dict[tuple, BetheSolution] = {}
    for z1_0, z2_0 in _z_start_candidates(n, kappa, nu, extra_starts, seed):
        sol2d = _newton_2d(terminals, z1_0, z2_0)
        if sol2d is None:
            continue
        Z1, Z2 = sol2d
        lam = lambda_linear_solve(Z1, Z2, n, kappa, nu)
        try:
            zs = power_sums_from_lambda(n, Z1, Z2, lam, levels, strengths, nu)
            start = roots_from_power_sums(zs)
        except (ValueError, OverflowError):
            continue
        z = _newton_bae(start, levels, strengths, nu)
        if z is None or len(z) != n:
            continue
        if np.min([np.min(np.abs(z - e)) for e in levels]) < POLE_TOL:
            continue
        if n > 1 and np.min(np.abs(z[:, None] - z[None, :])[~np.eye(n, dtype=bool)]) < POLE_TOL:
            continue
        if not _is_conjugate_closed(z):
            continue
        key = _dedupe_key(z)
        if key in found:
            continue
        res = np.max(np.abs(_bae_residual_generic(z, levels, strengths, nu)))
        if res > BETHE_TOL * 10:
            continue
        Z1r, Z2r = np.sum(z), np.sum(z ** 2)
        found[key] = BetheSolution(n, z, float(Z1r.real), float(Z2r.real),
                                   float(res), branch_id=f"b{len(found)}")
    solutions = sorted(found.values(), key=lambda s: (s.Z1, s.Z2))
    # Label the all-diverging (ground) branch: most negative Z1.
    if solutions:
        relabeled = []
        for i, s in enumerate(solutions):
            bid = "ground" if i == 0 else f"b{i}"
            relabeled.append(BetheSolution(s.n, s.roots, s.Z1, s.Z2,
                                           s.residual_max, bid))
        solutions = relabeled
    return solutions


# ---------------------------------------------------------------------------
# Rabi limit g1 = g2
# ---------------------------------------------------------------------------

def rabi_condition(n: int, nu: float, delta: float) -> float:
    """Scalar Juddian condition on the Rabi line at eps = n + 1.

    The kappa level is absent; the polynomial degree is n with pole
    strengths (n, n+1) and the single linear condition
    2 nu Z1 = 1 - delta^2 - 2 nu^2 (n + 2).
    """
    if n == 0:
        return 1.0 - delta * delta - 4 * nu * nu
    Z1 = (1.0 - delta * delta - 2 * nu * nu * (n + 2)) / (2 * nu)
    l1 = (2 * nu * Z1 + n * (n + 2 + 2 * nu * nu)) / (4 * nu ** 2 * n)
    l2 = -(2 * nu * Z1 + n * (n + 2 - 2 * nu * nu)) / (4 * nu ** 2 * (n + 1))
    return _hierarchy_closure(0, (l1, l2), (nu, -nu), (n, n + 1), nu)


def _recover_rabi_solution(n: int, nu: float, delta: float) -> BetheSolution | None:
    if n == 0:
        return BetheSolution(0, np.zeros(0, dtype=complex), 0.0, 0.0, 0.0, "rabi-n0")
    Z1 = (1.0 - delta * delta - 2 * nu * nu * (n + 2)) / (2 * nu)
    l1 = (2 * nu * Z1 + n * (n + 2 + 2 * nu * nu)) / (4 * nu ** 2 * n)
    l2 = -(2 * nu * Z1 + n * (n + 2 - 2 * nu * nu)) / (4 * nu ** 2 * (n + 1))
    levels, strengths = (nu, -nu), (float(n), float(n + 1))
    # Z2 from the k=2 moment relation of the two-level Richardson system.
    zs = [float(n), Z1]
    d = np.array(strengths)
    e = np.array(levels)
    lm = np.array([l1, l2])
    for k in range(2, n + 1):
        conv = sum(zs[a] * zs[k - 1 - a] for a in range(k))
        pole = sum(d[s] * sum(zs[a] * e[s] ** (k - 1 - a) for a in range(k))
                   for s in range(2))
        zs.append(float(np.dot(d * lm, e ** k)) + (conv - k * zs[k - 1] - pole) / (2 * nu))
    start = roots_from_power_sums(zs)
    z = _newton_bae(start, levels, strengths, nu)
    if z is None:
        return None
    res = np.max(np.abs(residual_bae_rabi(z, nu, float(n + 1))))
    Z1r, Z2r = np.sum(z), np.sum(z ** 2)
    return BetheSolution(n, z, float(Z1r.real), float(Z2r.real), float(res), "rabi")


def rabi_exceptional(
    n: int,
    omega: float,
    omega0: float,
    g_range: tuple[float, float],
    grid: int = 400,
    n_max: int = fock.DEFAULT_N_MAX,
    verify: bool = True,
) -> list[ExceptionalPoint]:
    """Juddian points on the Rabi line g1 = g2 = g, at eps = n + 1."""
    delta = omega0 / omega
    lo, hi = g_range
    gs = np.linspace(max(lo, 1e-6), hi, grid)

    def f_of(g: float) -> float:
        return rabi_condition(n, g / omega, delta)

    points: list[ExceptionalPoint] = []
    vals = np.array([f_of(g) for g in gs])
    for i in range(len(gs) - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or a * b > 0:
            continue
        g_root = brentq(f_of, gs[i], gs[i + 1], xtol=PARAM_TOL, rtol=8.9e-16)
        p = ModelParams(omega, omega0, g_root, g_root)
        r = reduce(p)
        sol = _recover_rabi_solution(n, g_root / omega, delta)
        ok = sol is not None and sol.residual_max < BETHE_TOL * 10
        msgs = [] if ok else ["rapidity recovery failed"]
        gap, eps_at = (math.nan, math.nan)
        if verify:
            gap, eps_at = _fock_gap_at(p, n + 1, n_max)
            if not (gap < fock.GAP_TOL * omega and abs(eps_at - (n + 1)) < fock.INT_TOL):
                ok = False
                msgs.append(f"fock gap {gap:.2e} at eps {eps_at!r}")
        points.append(ExceptionalPoint(
            n=n + 1, params=p, reduced=r, solution=sol, verified_gap=gap,
            epsilon_at_crossing=eps_at, verified=ok, message="; ".join(msgs),
        ))
    return points


# ---------------------------------------------------------------------------
# Exceptional eigenstates
# ---------------------------------------------------------------------------

def _poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


def _poly_eval_flip(c: np.ndarray) -> np.ndarray:
    """Coefficients of P(-z) from those of P(z) (ascending order)."""
    out = c.copy()
    out[1::2] *= -1
    return out


def bargmann_doublet_polynomials(
    roots: np.ndarray, r: ReducedParams, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Spin-component polynomials (P_plus, P_minus) of the exceptional state.

    The first Bargmann component is psi_1 = e^(-nu z) chi(z) with
    chi = prod (z - z_i); the second follows from the first-order ODE and
    stays polynomial because (z - kappa) divides its numerator exactly at an
    exceptional point. Transforming back to the physical spin basis gives

        f_plus  = sqrt(g1/g2) (psi_2 - psi_1),   f_minus = psi_1 + psi_2,

    returned as ascending coefficient arrays (both degree n) with the
    displacement e^(-nu z) factored out.
    """
    nu, kappa, lp, lm = r.nu, r.kappa, r.lambda_plus, r.lambda_minus
    e = n - lp
    chi = np.array([1.0])
    for z_i in roots:
        chi = _poly_mul(chi, np.array([-z_i, 1.0]))
    chi = np.real_if_close(chi, tol=1e8).astype(float)
    dchi = chi[1:] * np.arange(1, len(chi))
    # numerator ((lp + nu^2)/nu z + e - nu^2) chi - (z - nu) chi'
    num = np.zeros(len(chi) + 1)
    num[: len(chi)] += (e - nu * nu) * chi
    num[1: len(chi) + 1] += (lp + nu * nu) / nu * chi
    num[: len(dchi)] += nu * dchi
    num[1: len(dchi) + 1] -= dchi
    num *= nu / lm
    # divide by (z - kappa): synthetic division, ascending coefficients
    quot = np.zeros(len(num) - 1)
    carry = num[-1]
    for k in range(len(num) - 2, -1, -1):
        quot[k] = carry
        carry = num[k] + kappa * carry
    rem = carry
    scale = max(1.0, np.max(np.abs(num)))
    if abs(rem) > 1e-7 * scale:
        raise NotVerified(f"(z - kappa) does not divide psi_2 numerator (rem {rem:.2e})")
    q = quot
    g_ratio = math.sqrt(r.lambda_plus + r.lambda_minus) / math.sqrt(r.lambda_plus - r.lambda_minus)
    p_plus = math.sqrt(g_ratio) * (q - chi) if len(q) == len(chi) else None
    if p_plus is None:
        raise AssertionError("degree mismatch in doublet polynomials")
    p_minus = chi + q
    return p_plus, p_minus


def eigenstate_at_exceptional(
    pt: ExceptionalPoint, n_max: int = fock.DEFAULT_N_MAX
) -> tuple[np.ndarray, np.ndarray]:
    """The degenerate doublet at a verified exceptional point, as truncated
    Fock x spin vectors (parity eigenstates, orthonormal).

    Built from the Bargmann solution: one member displaces by -nu with spin
    polynomials (P_plus, P_minus), the other is its parity image displacing
    by +nu. Generalized cat states are their normalized sum and difference.
    """
    if not pt.verified:
        raise NotVerified(f"point not verified: {pt.message}")
    if pt.solution is None:
        raise NotVerified("no rapidity data on this point")
    r = pt.reduced
    n = pt.solution.n
    p_plus, p_minus = bargmann_doublet_polynomials(pt.solution.roots, r, n)
    coh_m = fock.coherent_state(-r.nu, n_max)
    coh_p = fock.coherent_state(+r.nu, n_max)
    u1 = (fock.spin_product(fock.apply_creation_polynomial(p_minus, coh_m), (1, 0))
          + fock.spin_product(fock.apply_creation_polynomial(p_plus, coh_m), (0, 1)))
    u2 = (fock.spin_product(fock.apply_creation_polynomial(_poly_eval_flip(p_minus), coh_p), (1, 0))
          - fock.spin_product(fock.apply_creation_polynomial(_poly_eval_flip(p_plus), coh_p), (0, 1)))
    u1 /= np.linalg.norm(u1)
    u2 /= np.linalg.norm(u2)
    plus = u1 + u2
    minus = u1 - u2
    return plus / np.linalg.norm(plus), minus / np.linalg.norm(minus)
