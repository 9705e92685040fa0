import math

import numpy as np
import pytest
from scipy.linalg import eigh

from rabi_spectra import fock
from rabi_spectra.core import ModelParams
from rabi_spectra.weakpert import jc_level


def jc_levels_sorted(p: ModelParams, count: int) -> np.ndarray:
    """Closed-form JC spectrum (g2 = 0), ascending."""
    vals = [jc_level(-1, 1, p).E0]
    for n in range(count + 6):
        vals.append(jc_level(n, 0, p).E0)
        vals.append(jc_level(n, 1, p).E0)
    return np.sort(vals)[:count]


def test_build_decoupled_diagonal():
    p = ModelParams(1.0, 0.4, 0.0, 0.0)
    h = fock.build(p, 5)
    want = []
    for n in range(6):
        want += [n - 0.4, n + 0.4]
    assert np.allclose(np.diag(h.matrix), want)
    assert np.count_nonzero(h.matrix - np.diag(np.diag(h.matrix))) == 0


def test_build_nonzero_pattern_small():
    p = ModelParams(1.0, 0.3, 0.7, 0.2)
    h = fock.build(p, 2)
    m = h.matrix
    # |n,+> <-> |n+1,->: g1 sqrt(n+1)
    assert m[1, 2] == pytest.approx(0.7 * 1.0)
    assert m[3, 4] == pytest.approx(0.7 * math.sqrt(2))
    # |n,-> <-> |n+1,+>: g2 sqrt(n+1)
    assert m[0, 3] == pytest.approx(0.2 * 1.0)
    assert m[2, 5] == pytest.approx(0.2 * math.sqrt(2))
    # nothing else off-diagonal
    mm = m.copy()
    for (i, j) in [(1, 2), (3, 4), (0, 3), (2, 5)]:
        mm[i, j] = mm[j, i] = 0.0
    assert np.count_nonzero(mm - np.diag(np.diag(mm))) == 0


def test_build_exactly_symmetric_randomized():
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = ModelParams(rng.uniform(0.5, 2), rng.uniform(-2, 2),
                        rng.uniform(0, 2), rng.uniform(0, 2))
        h = fock.build(p, 12)
        assert np.array_equal(h.matrix, h.matrix.T)


def test_cutoff_too_small():
    with pytest.raises(fock.CutoffTooSmall):
        fock.build(ModelParams(1, 1, 1, 1), 0)


def test_jc_closed_form_oracle():
    p = ModelParams(1.0, 0.8, 0.45, 0.0)
    h = fock.build(p, 120)
    evals = eigh(h.matrix, eigvals_only=True)
    want = jc_levels_sorted(p, 20)
    assert np.max(np.abs(evals[:20] - want)) < 1e-12


def test_crossing_plane_fig3_point():
    # g1^2 - g2^2 = 2 omega omega0 puts the two lowest shifted levels at eps=0
    p = ModelParams(1.0, 1.0, 1.5, 0.5)
    h = fock.build(p, 200)
    res = fock.diagonalize(h, 4)
    assert res.epsilons[1] - res.epsilons[0] < 1e-10
    assert abs(res.epsilons[0]) < 1e-8


def test_diagonalize_identity_example():
    p = ModelParams(1.0, 0.3, 0.0, 0.0)
    res = fock.diagonalize(fock.build(p, 60), 4)
    assert np.allclose(res.epsilons, [-0.3, 0.3, 0.7, 1.3], atol=1e-12)
    assert res.convergence_estimate <= fock.CONV_TOL


def test_diagonalize_not_converged():
    # huge coupling at a tiny cutoff: top of spectrum is garbage
    p = ModelParams(1.0, 0.5, 3.0, 2.0)
    h = fock.build(p, 6)
    with pytest.raises(fock.NotConverged):
        fock.diagonalize(h, 14)


def test_variational_monotonicity():
    p = ModelParams(1.0, 0.7, 1.1, 0.6)
    e1 = eigh(fock.build(p, 60).matrix, eigvals_only=True)[:20]
    e2 = eigh(fock.build(p, 120).matrix, eigvals_only=True)[:20]
    assert np.all(e2 <= e1 + 1e-12)


def test_parity_block_oracle_randomized():
    rng = np.random.default_rng(6)
    for _ in range(100):
        p = ModelParams(1.0, rng.uniform(-1.5, 1.5),
                        rng.uniform(0, 1.5), rng.uniform(0, 1.5))
        h = fock.build(p, 24)
        be, bo = fock.parity_blocks(h)
        merged = np.sort(np.concatenate([
            eigh(be, eigvals_only=True), eigh(bo, eigvals_only=True)]))
        full = eigh(h.matrix, eigvals_only=True)
        assert np.max(np.abs(merged - full)) < 1e-12


def test_parity_oracle_rabi_point():
    p = ModelParams(1.0, 1.0, 0.75, 0.75)
    h = fock.build(p, 150)
    be, bo = fock.parity_blocks(h)
    merged = np.sort(np.concatenate([
        eigh(be, eigvals_only=True), eigh(bo, eigvals_only=True)]))
    full = eigh(h.matrix, eigvals_only=True)
    assert np.max(np.abs(merged[:80] - full[:80])) < 1e-10


def test_eigvec_overlap_self_and_bounds():
    p = ModelParams(1.0, 0.6, 0.8, 0.3)
    h = fock.build(p, 40)
    _, vecs = eigh(h.matrix)
    assert fock.eigvec_overlap(h, 3, vecs[:, 3]) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(fock.IndexOutOfRange):
        fock.eigvec_overlap(h, 10_000, vecs[:, 0])


def test_coherent_state_displacement():
    alpha = 0.8
    v = fock.coherent_state(alpha, 120)
    n = np.arange(121)
    # <a> = alpha for a coherent state
    a_exp = np.sum(np.sqrt(n[1:]) * v[1:] * v[:-1])
    assert a_exp == pytest.approx(alpha, rel=1e-12)


def test_apply_creation_polynomial():
    v0 = np.zeros(6)
    v0[0] = 1.0
    out = fock.apply_creation_polynomial([0.0, 1.0], v0)  # a'|0> = |1>
    assert out[1] == pytest.approx(1.0)
    out2 = fock.apply_creation_polynomial([2.0, 0.0, 1.0], v0)  # (2 + a'^2)|0>
    assert out2[0] == pytest.approx(2.0)
    assert out2[2] == pytest.approx(math.sqrt(2))


def test_scan_crossings_n0_curve():
    p = ModelParams(1.0, 1.0, 0.0, 0.2)
    grid = np.linspace(1.2, 1.6, 41)
    events = fock.scan_crossings(p, grid, n_levels=4, n_max=140)
    crossings = [ev for ev in events if ev.kind == "crossing"]
    assert len(crossings) == 1
    ev = crossings[0]
    assert ev.g1_location == pytest.approx(math.sqrt(2.04), abs=1e-7)
    assert abs(ev.epsilon_at_event) < 1e-6
    assert ev.gap < 1e-8
    assert ev.level_pair == (0, 1)


def test_scan_crossings_jc_all_exact():
    # g2 = 0: conserved N_ex means no repulsion between sectors
    p = ModelParams(1.0, 1.0, 0.0, 0.0)
    grid = np.linspace(1.2, 1.6, 41)
    events = fock.scan_crossings(p, grid, n_levels=4, n_max=120)
    assert events
    assert all(ev.kind == "crossing" for ev in events)


def test_scan_crossings_avoided_near_half_integer():
    p = ModelParams(1.0, 1.0, 0.0, 0.056)
    grid = np.linspace(0.35, 0.75, 51)
    events = fock.scan_crossings(p, grid, n_levels=8, n_max=140)
    avoided = [ev for ev in events if ev.kind == "avoided"]
    assert avoided
    for ev in avoided:
        frac = abs(ev.epsilon_at_event - round(ev.epsilon_at_event - 0.5) - 0.5)
        assert frac < 0.05
