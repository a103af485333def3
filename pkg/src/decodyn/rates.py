"""Second-order (short-time) decoherence rates.

Both rates share one quadrature over the initial density matrix,

    rate = (cb/hbar) * h^2 sum |rho(Q1,Q2)|^2 (Q1-Q2)^2 g(Qbar)^2

with g = df/dQ for the classical rate and g = [f(Q1)-f(Q2)]/(Q1-Q2) for the
quantum rate, and cb = thermal_strength(bath).  The ratio quantum/classical
is therefore independent of hbar and of the bath for a fixed initial matrix;
it equals 1 exactly for f = a*Q + b*Q**2 where the two weights coincide.

All quadratures reduce with numpy's pairwise summation over fixed-shape
grids, so results are deterministic for a given grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import BathSpec, thermal_strength
from .model import CouplingFunction
from .states import DensityMatrixGrid, SuperpositionState, build_density_matrix

__all__ = [
    "RatePair",
    "classical_rate2",
    "quantum_rate2",
    "rate_pair",
    "linear_closed_form",
    "separation_scan",
    "hbar_scan",
]

# below this the classical rate is reported as underflowed and the ratio as
# infinite rather than NaN (the cubic-coupling scenario)
_UNDERFLOW = 1e-300


@dataclass(frozen=True)
class RatePair:
    """Classical and quantum quadratic-in-time entropy coefficients, 1/time^2."""

    classical_rate: float
    quantum_rate: float
    ratio: float

    @classmethod
    def from_rates(cls, classical: float, quantum: float) -> "RatePair":
        if classical < _UNDERFLOW:
            ratio = math.inf if quantum >= _UNDERFLOW else math.nan
        else:
            ratio = quantum / classical
        return cls(classical_rate=classical, quantum_rate=quantum, ratio=ratio)


def _weighted_integrals(rho0: DensityMatrixGrid, f: CouplingFunction) -> tuple[float, float]:
    q = rho0.grid.q
    h = rho0.grid.spacing
    q1 = q[:, None]
    q2 = q[None, :]
    dq = q1 - q2
    qbar = 0.5 * (q1 + q2)
    w = np.abs(rho0.values) ** 2 * dq**2
    slope = f.slope(qbar)
    fd = f.finite_difference(qbar, dq)
    i_c = float(h * h * np.sum(w * slope**2))
    i_q = float(h * h * np.sum(w * fd**2))
    return i_c, i_q


def classical_rate2(rho0: DensityMatrixGrid, f: CouplingFunction, cb: float, hbar: float) -> float:
    i_c, _ = _weighted_integrals(rho0, f)
    return (cb / hbar) * i_c


def quantum_rate2(rho0: DensityMatrixGrid, f: CouplingFunction, cb: float, hbar: float) -> float:
    _, i_q = _weighted_integrals(rho0, f)
    return (cb / hbar) * i_q


def rate_pair(rho0: DensityMatrixGrid, f: CouplingFunction, cb: float, hbar: float) -> RatePair:
    """Both rates from a single pass over the shared grid."""
    i_c, i_q = _weighted_integrals(rho0, f)
    pref = cb / hbar
    return RatePair.from_rates(pref * i_c, pref * i_q)


def linear_closed_form(delta2q: float, bath: BathSpec) -> float:
    """Closed form of both rates for f(Q) = Q on a pure state of position
    variance delta2q:  2 * delta2q * thermal_strength(bath) / hbar."""
    if delta2q < 0:
        raise ValueError("variance must be nonnegative")
    return 2.0 * delta2q * thermal_strength(bath) / bath.hbar


def separation_scan(
    f: CouplingFunction,
    separations,
    sigma: float,
    bath: BathSpec,
) -> list[RatePair]:
    """Rates for symmetric cats of increasing separation, one RatePair per
    separation.  Packet width must stay well below the smallest separation
    so the packets are distinguishable."""
    seps = [float(s) for s in separations]
    if any(b <= a for a, b in zip(seps, seps[1:])):
        raise ValueError("separations must be strictly increasing")
    if not sigma < 0.5 * seps[0]:
        raise ValueError(f"sigma={sigma} too wide for smallest separation {seps[0]}")
    cb = thermal_strength(bath)
    out = []
    for sep in seps:
        state = SuperpositionState.symmetric_cat(sep, sigma)
        rho0 = build_density_matrix(state, hbar=bath.hbar)
        out.append(rate_pair(rho0, f, cb, bath.hbar))
    return out


def hbar_scan(
    rho0: DensityMatrixGrid,
    f: CouplingFunction,
    bath: BathSpec,
    hbar_factors,
) -> list[RatePair]:
    """Rates at rescaled hbar with the initial matrix held fixed.  Each rate
    scales with hbar, the ratio does not."""
    import dataclasses

    out = []
    for factor in hbar_factors:
        scaled = dataclasses.replace(bath, hbar=bath.hbar * float(factor))
        cb = thermal_strength(scaled)
        out.append(rate_pair(rho0, f, cb, scaled.hbar))
    return out
