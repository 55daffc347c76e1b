"""Normal uncertainty distribution N(e, sigma) and the intervals built from it.

The distribution function is logistic in shape,

    Phi(z) = 1 / (1 + exp(pi (e - z) / (sqrt(3) sigma))),

and its inverse is ``e + sqrt(3) sigma / pi * ln(alpha / (1 - alpha))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInputError

__all__ = [
    "SCALE",
    "Interval",
    "NormalUncertain",
    "cdf",
    "inv",
    "confidence_interval",
    "acceptance_interval",
    "ci_half_width",
    "ai_half_width",
]

#: sqrt(3)/pi, the factor converting log-odds into standard-deviation units.
SCALE = math.sqrt(3.0) / math.pi


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise InvalidInputError(f"interval bounds out of order: [{self.lo}, {self.hi}]")

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def excludes(self, x: float) -> bool:
        """True when ``x`` lies strictly outside; boundary points count as inside."""
        return x < self.lo or x > self.hi

    def shifted(self, c: float) -> Interval:
        return Interval(self.lo + c, self.hi + c)

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]


def _check_finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise InvalidInputError(f"{name} must be finite, got {x!r}")
    return x


def _check_prob(name: str, alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"{name} must lie in (0, 1), got {alpha!r}")
    return alpha


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise InvalidInputError(f"sigma must be finite and > 0, got {sigma!r}")
    return sigma


@dataclass(frozen=True)
class NormalUncertain:
    """Normal uncertainty distribution with location ``e`` and scale ``sigma``."""

    e: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "e", _check_finite("e", self.e))
        object.__setattr__(self, "sigma", _check_sigma(self.sigma))

    def cdf(self, z: float) -> float:
        return cdf(z, self)

    def inv(self, alpha: float) -> float:
        return inv(alpha, self)


def cdf(z: float, d: NormalUncertain) -> float:
    z = _check_finite("z", z)
    t = (z - d.e) / (SCALE * d.sigma)
    # logistic in the log-odds t; branch so exp never overflows
    if t >= 0.0:
        return 1.0 / (1.0 + math.exp(-t))
    u = math.exp(t)
    return u / (1.0 + u)


def inv(alpha: float, d: NormalUncertain) -> float:
    alpha = _check_prob("alpha", alpha)
    return d.e + SCALE * d.sigma * (math.log(alpha) - math.log1p(-alpha))


def _exact(x: float) -> Fraction:
    # levels are entered as decimal literals; read them back as such so that
    # e.g. a 0.95 CI and a 0.05 AI share the odds ratio 39 exactly
    return Fraction(repr(float(x)))


def ci_half_width(sigma: float, level: float) -> float:
    """Half-width ``sigma * sqrt(3)/pi * ln((1 + level) / (1 - level))``."""
    sigma = _check_sigma(sigma)
    q = _exact(_check_prob("level", level))
    return sigma * SCALE * math.log((1 + q) / (1 - q))


def ai_half_width(sigma: float, alpha: float) -> float:
    """Half-width of the two-sided acceptance interval at significance ``alpha``."""
    sigma = _check_sigma(sigma)
    q = _exact(_check_prob("alpha", alpha))
    return sigma * SCALE * math.log((1 - q / 2) / (q / 2))


def confidence_interval(est: float, sigma: float, level: float) -> Interval:
    """Symmetric confidence interval at confidence ``level`` (e.g. 0.95)."""
    est = _check_finite("est", est)
    h = ci_half_width(sigma, level)
    return Interval(est - h, est + h)


def acceptance_interval(center: float, sigma: float, alpha: float) -> Interval:
    """``[Phi^-1(alpha/2), Phi^-1(1 - alpha/2)]`` under N(center, sigma)."""
    center = _check_finite("center", center)
    h = ai_half_width(sigma, alpha)
    return Interval(center - h, center + h)
