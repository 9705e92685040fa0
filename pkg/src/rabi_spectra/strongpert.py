"""Strong-coupling analytics.

Small omega0: the adiabatic (displaced-oscillator) approximation. The spin
rotation turns the coupling into beta (a + a') sigma_z with beta =
(g1+g2)/2, leaving omega0 and lambda = (g1-g2)/2 as perturbations; the
spectrum is two quasi-degenerate harmonic ladders with Laguerre-weighted,
exponentially small splittings.

Large omega0: Bogoliubov operators A = (g1 a + g2 a')/g- map the model onto
a JC-like Hamiltonian (well defined only for g1 > g2) plus a squeeze term
whose first-order contribution vanishes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .core import ModelParams
from .special import genlaguerre


class UndefinedRegime(ValueError):
    """Squeezed-basis operators require g1 > g2."""


class InvalidIndex(ValueError):
    pass


@dataclass(frozen=True)
class AdiabaticParams:
    beta: float
    lambda_asym: float
    displacement: float   # beta / omega
    laguerre_arg: float   # 4 beta^2 / omega^2

    @classmethod
    def from_params(cls, p: ModelParams) -> "AdiabaticParams":
        beta = 0.5 * (p.g1 + p.g2)
        lam = 0.5 * (p.g1 - p.g2)
        return cls(beta=beta, lambda_asym=lam, displacement=beta / p.omega,
                   laguerre_arg=4 * beta * beta / (p.omega * p.omega))


@dataclass(frozen=True)
class SqueezedParams:
    g_minus: float
    omega_g: float
    r: float              # squeezing parameter, tanh r = g2/g1
    shift: float          # omega g2^2 / g-^2

    @classmethod
    def from_params(cls, p: ModelParams) -> "SqueezedParams":
        if p.g1 <= p.g2:
            raise UndefinedRegime("squeezed-basis operators need g1 > g2")
        gm2 = p.g1 ** 2 - p.g2 ** 2
        return cls(
            g_minus=math.sqrt(gm2),
            omega_g=p.omega * (p.g1 ** 2 + p.g2 ** 2) / gm2,
            r=math.atanh(p.g2 / p.g1),
            shift=p.omega * p.g2 ** 2 / gm2,
        )


def displaced_overlap(M: int, N: int, beta_over_omega: float) -> float:
    """Overlap <M_-|N_+> of oppositely displaced Fock states.

    Closed Laguerre form; satisfies <M_-|N_+> = (-1)^(N-M) <N_-|M_+>.
    """
    if M < 0 or N < 0:
        raise InvalidIndex("Fock indices must be nonnegative")
    a = beta_over_omega
    x = 4 * a * a
    if M < N:
        lg = 0.5 * (math.lgamma(M + 1) - math.lgamma(N + 1))
        return math.exp(-x / 2 + lg) * (2 * a) ** (N - M) * genlaguerre(M, N - M, x)
    lg = 0.5 * (math.lgamma(N + 1) - math.lgamma(M + 1))
    return math.exp(-x / 2 + lg) * (-2 * a) ** (M - N) * genlaguerre(N, M - N, x)


def displaced_a_element(M: int, N: int, beta_over_omega: float) -> float:
    """<M_-| a |N_+> = sqrt(N) <M_-|(N-1)_+> - (beta/omega) <M_-|N_+>."""
    val = -beta_over_omega * displaced_overlap(M, N, beta_over_omega)
    if N > 0:
        val += math.sqrt(N) * displaced_overlap(M, N - 1, beta_over_omega)
    return val


def adiabatic_block(N: int, p: ModelParams) -> tuple[float, float]:
    """(E_N, |off-diagonal|) of the N-th 2x2 adiabatic block."""
    ap = AdiabaticParams.from_params(p)
    x = ap.laguerre_arg
    e_n = p.omega * (N - ap.displacement ** 2)
    off = math.exp(-x / 2) * abs(
        p.omega0 * genlaguerre(N, 0, x)
        + ap.lambda_asym * 2 * ap.displacement * (genlaguerre(N - 1, 1, x) + genlaguerre(N, 1, x))
    )
    return e_n, off


def adiabatic_energies(N: int, p: ModelParams) -> tuple[float, float]:
    """Quasi-degenerate pair (E_N^-, E_N^+) of the adiabatic approximation.

    E_N +- exp(-2 beta^2/omega^2) |omega0 L_N^0(x) + lambda (2 beta/omega)
    [L_{N-1}^1 + L_N^1](x)| with x = 4 beta^2/omega^2 and E_N =
    omega (N - beta^2/omega^2). Intended regime: beta/omega >~ 1,
    omega0 << omega, |g1 - g2| small.
    """
    if N < 0:
        raise InvalidIndex("N must be nonnegative")
    ap = AdiabaticParams.from_params(p)
    if ap.displacement < 0.75 or abs(p.omega0) > 0.5 * p.omega:
        warnings.warn("adiabatic approximation used outside its regime "
                      "(needs beta >~ omega and omega0 << omega)", stacklevel=2)
    e_n, off = adiabatic_block(N, p)
    return (e_n - off, e_n + off)


def squeezed_spectrum(n: int, sign: int, p: ModelParams) -> float:
    """Large-omega0 spectrum in the squeezed basis.

    E_{n,+-} = omega_g (n - 1/2) +- (1/2) sqrt((2 omega0 - omega_g)^2 +
    4 n g-^2) + omega g2^2/g-^2, the exact spectrum of the JC-form leading
    Hamiltonian (the squeeze perturbation has vanishing first order). n = 0
    exists only on the lower branch (the JC sector containing |0,->).
    """
    sq = SqueezedParams.from_params(p)
    if sign not in (-1, 1):
        raise InvalidIndex("sign must be -1 or +1")
    if n < 0 or (n == 0 and sign == 1):
        raise InvalidIndex("n = 0 exists only on the lower branch")
    coupling_scale = p.omega * p.g1 * p.g2 / sq.g_minus ** 2
    if coupling_scale > 0.05 * sq.omega_g:
        warnings.warn("squeeze perturbation is not small here; the "
                      "approximation degrades as g1 -> g2", stacklevel=2)
    rad = math.hypot(2 * p.omega0 - sq.omega_g, 2 * math.sqrt(n) * sq.g_minus)
    return sq.omega_g * (n - 0.5) + 0.5 * sign * rad + sq.shift


def squeezed_levels(p: ModelParams, count: int) -> list[float]:
    """The `count` lowest squeezed-basis energies, ascending."""
    out = [squeezed_spectrum(0, -1, p)]
    n = 1
    while len(out) < 3 * count:
        out.append(squeezed_spectrum(n, -1, p))
        out.append(squeezed_spectrum(n, +1, p))
        n += 1
    return sorted(out)[:count]
