"""Model configuration and the system-bath coupling function f(Q).

The system couples to every bath mode through a single position-dependent
function f(Q).  Three evaluation modes of f drive everything downstream:

* ``eval``              -- f(Q) itself,
* ``slope``             -- df/dQ, which enters the classical decay exponents,
* ``finite_difference`` -- [f(Qbar + dQ/2) - f(Qbar - dQ/2)] / dQ, the
  two-point difference quotient that enters the quantum decay exponents.

For f = a*Q + b*Q**2 the difference quotient equals the derivative for every
(Qbar, dQ), so linear/quadratic couplings produce identical classical and
quantum decoherence dynamics.  All differences between the two descriptions
come from couplings where slope and finite_difference disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "ModelConfig",
    "CouplingFunction",
    "LinearCoupling",
    "QuadraticCoupling",
    "PolynomialCoupling",
    "SinusoidalCoupling",
    "TabulatedCoupling",
    "coupling_from_config",
]


@dataclass(frozen=True)
class ModelConfig:
    """Global scales of a run.

    beta is the inverse temperature; ``math.inf`` means zero temperature.
    system_mass and any system potential are accepted for completeness but
    unused: none of the implemented quantities depend on them.
    """

    hbar: float = 1.0
    beta: float = math.inf
    system_mass: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive (use math.inf for T=0), got {self.beta}")
        if not self.system_mass > 0:
            raise ValueError(f"system_mass must be positive, got {self.system_mass}")

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)


def _wrap(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


class CouplingFunction:
    """Base class for coupling functions; subclasses define values/derivative.

    All evaluation methods accept scalars or arrays and broadcast.
    Instances are immutable and safe to share across workers.
    """

    def _values(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _derivative(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_bounded(self) -> bool:
        raise NotImplementedError

    def eval(self, q):
        """f(Q)."""
        arr = np.asarray(q, dtype=float)
        return _wrap(self._values(arr), arr.ndim == 0)

    def slope(self, qbar):
        """df/dQ at Qbar (analytic for parametric variants)."""
        arr = np.asarray(qbar, dtype=float)
        return _wrap(self._derivative(arr), arr.ndim == 0)

    def finite_difference(self, qbar, dq):
        """[f(Qbar + dQ/2) - f(Qbar - dQ/2)] / dQ.

        dQ = 0 returns slope(Qbar), the continuous limit, which keeps
        integrands well defined on the Q1 = Q2 diagonal.
        """
        qb = np.asarray(qbar, dtype=float)
        d = np.asarray(dq, dtype=float)
        scalar = qb.ndim == 0 and d.ndim == 0
        qb, d = np.broadcast_arrays(qb, d)
        diff = self._values(qb + 0.5 * d) - self._values(qb - 0.5 * d)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = diff / d
        out = np.where(d == 0.0, self._derivative(qb), out)
        return _wrap(out, scalar)

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class LinearCoupling(CouplingFunction):
    """f(Q) = a*Q."""

    a: float = 1.0

    def _values(self, q):
        return self.a * q

    def _derivative(self, q):
        return np.full_like(q, self.a)

    @property
    def is_bounded(self):
        return self.a == 0.0

    def to_config(self):
        return {"variant": "linear", "a": self.a}


@dataclass(frozen=True)
class QuadraticCoupling(CouplingFunction):
    """f(Q) = a*Q + b*Q**2."""

    a: float = 1.0
    b: float = 0.0

    def _values(self, q):
        return q * (self.a + self.b * q)

    def _derivative(self, q):
        return self.a + 2.0 * self.b * q

    @property
    def is_bounded(self):
        return self.a == 0.0 and self.b == 0.0

    def to_config(self):
        return {"variant": "quadratic", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class PolynomialCoupling(CouplingFunction):
    """f(Q) = sum_k c_k Q^k with coefficients in ascending order."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.coefficients) == 0:
            raise ValueError("polynomial needs at least one coefficient")

    @property
    def degree(self) -> int:
        for k in range(len(self.coefficients) - 1, -1, -1):
            if self.coefficients[k] != 0.0:
                return k
        return 0

    def _values(self, q):
        return np.polynomial.polynomial.polyval(q, self.coefficients)

    def _derivative(self, q):
        der = np.polynomial.polynomial.polyder(self.coefficients)
        return np.polynomial.polynomial.polyval(q, der)

    @property
    def is_bounded(self):
        return self.degree == 0

    def to_config(self):
        return {"variant": "polynomial", "coefficients": list(self.coefficients)}


@dataclass(frozen=True)
class SinusoidalCoupling(CouplingFunction):
    """f(Q) = amplitude * sin(2*pi*Q/wavelength + phase); bounded."""

    amplitude: float = 1.0
    wavelength: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if self.wavelength == 0:
            raise ValueError("wavelength must be nonzero")

    def _values(self, q):
        return self.amplitude * np.sin(2.0 * np.pi * q / self.wavelength + self.phase)

    def _derivative(self, q):
        k = 2.0 * np.pi / self.wavelength
        return self.amplitude * k * np.cos(k * q + self.phase)

    @property
    def is_bounded(self):
        return True

    def to_config(self):
        return {
            "variant": "sinusoidal",
            "amplitude": self.amplitude,
            "wavelength": self.wavelength,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class TabulatedCoupling(CouplingFunction):
    """f(Q) given by samples on a strictly increasing grid.

    eval uses cubic interpolation; slope uses centered differences on the
    table (O(h^2) accurate).  Evaluation outside the grid is a domain error.
    """

    q_grid: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        q = tuple(float(x) for x in self.q_grid)
        v = tuple(float(x) for x in self.values)
        object.__setattr__(self, "q_grid", q)
        object.__setattr__(self, "values", v)
        if len(q) != len(v):
            raise ValueError("q_grid and values must have equal length")
        if len(q) < 4:
            raise ValueError("tabulated coupling needs at least 4 points")
        if not np.all(np.diff(q) > 0):
            raise ValueError("q_grid must be strictly increasing")

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.q_grid, self.values)

    @cached_property
    def _slope_table(self) -> np.ndarray:
        return np.gradient(np.asarray(self.values), np.asarray(self.q_grid))

    def _check_range(self, q: np.ndarray):
        lo, hi = self.q_grid[0], self.q_grid[-1]
        if np.any(q < lo) or np.any(q > hi):
            raise ValueError(f"tabulated coupling evaluated outside [{lo}, {hi}]")

    def _values(self, q):
        self._check_range(q)
        return self._spline(q)

    def _derivative(self, q):
        self._check_range(q)
        return np.interp(q, self.q_grid, self._slope_table)

    @property
    def is_bounded(self):
        return True

    def to_config(self):
        return {"variant": "tabulated", "q": list(self.q_grid), "values": list(self.values)}


def coupling_from_config(cfg: dict) -> CouplingFunction:
    """Build a coupling function from its JSON configuration."""
    if not isinstance(cfg, dict) or "variant" not in cfg:
        raise ValueError("coupling config must be an object with a 'variant' key")
    kind = cfg["variant"]
    try:
        if kind == "linear":
            return LinearCoupling(a=float(cfg.get("a", 1.0)))
        if kind == "quadratic":
            return QuadraticCoupling(a=float(cfg.get("a", 1.0)), b=float(cfg.get("b", 0.0)))
        if kind == "polynomial":
            return PolynomialCoupling(coefficients=tuple(cfg["coefficients"]))
        if kind == "sinusoidal":
            return SinusoidalCoupling(
                amplitude=float(cfg.get("amplitude", 1.0)),
                wavelength=float(cfg["wavelength"]),
                phase=float(cfg.get("phase", 0.0)),
            )
        if kind == "tabulated":
            return TabulatedCoupling(q_grid=tuple(cfg["q"]), values=tuple(cfg["values"]))
    except KeyError as exc:
        raise ValueError(f"coupling config for variant '{kind}' is missing {exc}") from exc
    raise ValueError(f"unknown coupling variant '{kind}'")
