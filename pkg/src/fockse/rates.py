"""Parameter objects shared by every formula.

Rates are kept exactly as given (int, Fraction or float).  The exact pipeline
asks for :meth:`RateSet.exact`, which converts them to Fractions; the float
pipeline uses the ``float`` accessors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import as_rational

__all__ = ["UNFILTERED", "RateSet", "BundleSpec", "ThermalParams", "CONFLUENT_WINDOW", "DEFAULT_N_CAP"]

# relative distance |Gamma/gamma - 1| below which float code uses the
# coinciding-rate (series) branch instead of the generic formulas
CONFLUENT_WINDOW = 1e-4
DEFAULT_N_CAP = 10


class _Unfiltered:
    """Sentinel for an ideal, infinitely broad detector."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNFILTERED"

    def __reduce__(self):
        return (_Unfiltered, ())

    def __float__(self):
        return math.inf


UNFILTERED = _Unfiltered()


def _check_rate(name, value):
    if isinstance(value, bool):
        raise TypeError(f"{name} must be a number")
    v = float(value)
    if not math.isfinite(v) or v <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")


def _div(a, b):
    """Exact quotient when both operands are exact, float otherwise."""
    if isinstance(a, float) or isinstance(b, float):
        return float(a) / float(b)
    return Fraction(a) / Fraction(b)


def _normalize_filter(Gamma):
    if Gamma is None or Gamma is UNFILTERED:
        return UNFILTERED
    if isinstance(Gamma, float) and math.isinf(Gamma) and Gamma > 0:
        return UNFILTERED
    _check_rate("Gamma", Gamma)
    return Gamma


@dataclass(frozen=True)
class RateSet:
    """Emitter decay rate, filter bandwidth, detector efficiency and mode frequency."""

    gamma_a: object = 1
    Gamma: object = UNFILTERED
    xi: object = 1
    omega_a: float = 0.0

    def __post_init__(self):
        _check_rate("gamma_a", self.gamma_a)
        object.__setattr__(self, "Gamma", _normalize_filter(self.Gamma))
        x = float(self.xi)
        if not (0.0 <= x <= 1.0):
            raise ValueError(f"xi must lie in [0, 1], got {self.xi!r}")
        if not math.isfinite(float(self.omega_a)):
            raise ValueError("omega_a must be finite")

    @property
    def filtered(self) -> bool:
        return self.Gamma is not UNFILTERED

    def require_filter(self):
        if not self.filtered:
            raise ValueError("this quantity needs a finite filter bandwidth Gamma")

    @property
    def Gamma_plus(self):
        self.require_filter()
        return self.Gamma + self.gamma_a

    @property
    def Gamma_minus(self):
        self.require_filter()
        return self.Gamma - self.gamma_a

    @property
    def confluent(self) -> bool:
        """True when Gamma equals gamma_a exactly."""
        return self.filtered and self.Gamma == self.gamma_a

    @property
    def near_confluent(self) -> bool:
        """True inside the float pipeline's series window around Gamma = gamma_a."""
        return self.filtered and abs(float(self.Gamma) / float(self.gamma_a) - 1.0) < CONFLUENT_WINDOW

    # float views
    @property
    def g(self) -> float:
        return float(self.gamma_a)

    @property
    def G(self) -> float:
        return float(self.Gamma)

    @property
    def keep_probability(self):
        """Probability that one emitted photon is ever detected: xi*Gamma/Gamma_+."""
        if not self.filtered:
            return self.xi
        return _div(self.xi * self.Gamma, self.Gamma + self.gamma_a)

    def is_exact(self) -> bool:
        vals = [self.gamma_a, self.xi] + ([self.Gamma] if self.filtered else [])
        return all(not isinstance(v, float) for v in vals)

    def exact(self) -> "RateSet":
        """Copy with gamma_a, Gamma and xi as Fractions."""
        return RateSet(
            as_rational(self.gamma_a),
            as_rational(self.Gamma) if self.filtered else UNFILTERED,
            as_rational(self.xi),
            self.omega_a,
        )

    def floats(self) -> "RateSet":
        return RateSet(
            float(self.gamma_a),
            float(self.Gamma) if self.filtered else UNFILTERED,
            float(self.xi),
            float(self.omega_a),
        )

    def with_filter(self, Gamma) -> "RateSet":
        return RateSet(self.gamma_a, Gamma, self.xi, self.omega_a)


@dataclass(frozen=True)
class BundleSpec:
    """Photon number N of the initial Fock state."""

    N: int
    cap: int = DEFAULT_N_CAP

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise TypeError("N must be an integer")
        object.__setattr__(self, "N", int(self.N))
        if not 1 <= self.N <= self.cap:
            raise ValueError(f"N must be in 1..{self.cap}, got {self.N}")

    def check_index(self, k: int, name: str = "k", lo: int = 1):
        if int(k) != k or not lo <= k <= self.N:
            raise ValueError(f"{name} must be in {lo}..{self.N}, got {k}")


def as_bundle(spec) -> BundleSpec:
    return spec if isinstance(spec, BundleSpec) else BundleSpec(int(spec))


@dataclass(frozen=True)
class ThermalParams:
    """Incoherently pumped cavity (pump P_a, decay gamma_a) seen through a filter Gamma."""

    P_a: object
    gamma_a: object = 1
    Gamma: object = UNFILTERED

    def __post_init__(self):
        _check_rate("gamma_a", self.gamma_a)
        p = float(self.P_a)
        if not (0.0 <= p < float(self.gamma_a)):
            raise ValueError("need 0 <= P_a < gamma_a for a steady state")
        object.__setattr__(self, "Gamma", _normalize_filter(self.Gamma))

    @property
    def filtered(self) -> bool:
        return self.Gamma is not UNFILTERED

    @property
    def theta(self):
        return _div(self.P_a, self.gamma_a)

    @property
    def Q_squared(self):
        P, g = self.P_a, self.gamma_a
        return P**4 - 4 * P**3 * g + 10 * P**2 * g**2 - 4 * P * g**3 + g**4

    @property
    def Q(self) -> float:
        return math.sqrt(float(self.Q_squared))

    @property
    def mean_photons(self):
        return _div(self.P_a, self.gamma_a - self.P_a)

    def with_filter(self, Gamma) -> "ThermalParams":
        return ThermalParams(self.P_a, self.gamma_a, Gamma)
