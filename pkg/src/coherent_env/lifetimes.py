"""Conditional component lifetimes ``X(theta)`` given an environment value.

Each model is a baseline law combined with a link that lets the environment
act on it:

* ``none``          survival ``S0(x)``
* ``scale``         survival ``S0(t x)``, hazard ``t r0(t x)``
* ``mult-frailty``  survival ``S0(x)**t``, hazard ``t r0(x)``
* ``add-frailty``   survival ``S0(x) exp(-t x)``, hazard ``r0(x) + t``

where ``t = theta**theta_power`` (``theta_power`` defaults to 1; ``-1`` turns
a model that deteriorates with ``theta`` into one that improves).
Everything is computed from the log-survival and the hazard, so tails keep
full relative precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import NegativeTimeError, OutOfRangeError, ThetaOutOfSupportError, UndefinedAtZeroError

BASELINES = ("exponential", "weibull", "gamma")
LINKS = ("none", "scale", "mult-frailty", "add-frailty")
ORIENTATIONS = ("increasing", "decreasing", "constant")

_LINK_ALIASES = {
    "none": "none",
    "scale": "scale",
    "mult-frailty": "mult-frailty",
    "multiplicative-frailty": "mult-frailty",
    "multiplicative": "mult-frailty",
    "add-frailty": "add-frailty",
    "additive-frailty": "add-frailty",
    "additive": "add-frailty",
}


@dataclass(frozen=True)
class Baseline:
    """Baseline law: ``exponential(rate)``, ``weibull(shape, scale)`` or ``gamma(a, rate b)``."""

    family: str
    params: tuple

    def __post_init__(self):
        if self.family not in BASELINES:
            raise ValueError(f"unknown baseline {self.family!r}; expected one of {BASELINES}")
        params = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", params)
        expected = 1 if self.family == "exponential" else 2
        if len(params) != expected:
            raise OutOfRangeError(f"{self.family} baseline takes {expected} parameter(s), got {len(params)}")
        if any(not np.isfinite(v) or v <= 0 for v in params):
            raise OutOfRangeError(f"{self.family} parameters must be positive, got {params}")

    def logsf(self, x: np.ndarray) -> np.ndarray:
        if self.family == "exponential":
            return -self.params[0] * x
        if self.family == "weibull":
            shape, scale = self.params
            return -((x / scale) ** shape)
        a, b = self.params
        return stats.gamma.logsf(x, a, scale=1.0 / b)

    def hazard(self, x: np.ndarray) -> np.ndarray:
        if self.family == "exponential":
            return np.full_like(x, self.params[0])
        if self.family == "weibull":
            shape, scale = self.params
            with np.errstate(divide="ignore"):
                return shape / scale * (x / scale) ** (shape - 1.0)
        a, b = self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.exp(stats.gamma.logpdf(x, a, scale=1.0 / b) - self.logsf(x))

    def as_dict(self) -> dict:
        if self.family == "exponential":
            return {"baseline": "exponential", "rate": self.params[0]}
        if self.family == "weibull":
            return {"baseline": "weibull", "shape": self.params[0], "scale": self.params[1]}
        return {"baseline": "gamma", "a": self.params[0], "b": self.params[1]}


def exponential(rate: float) -> Baseline:
    return Baseline("exponential", (rate,))


def weibull(shape: float, scale: float = 1.0) -> Baseline:
    return Baseline("weibull", (shape, scale))


def gamma(a: float, b: float = 1.0) -> Baseline:
    return Baseline("gamma", (a, b))


def _default_orientation(link: str, power: float) -> str:
    if link == "none":
        return "constant"
    return "decreasing" if power > 0 else "increasing"


@dataclass(frozen=True)
class ConditionalLifetimeModel:
    """Lifetime law of one component given the environment value ``theta``.

    ``orientation`` is the declared stochastic direction in ``theta``:
    ``"decreasing"`` means larger ``theta`` gives a stochastically smaller
    lifetime. It is metadata; the orders module checks it numerically.
    """

    baseline: Baseline
    link: str = "none"
    theta_power: float = 1.0
    orientation: str | None = field(default=None)

    def __post_init__(self):
        link = _LINK_ALIASES.get(str(self.link).lower())
        if link is None:
            raise ValueError(f"unknown link {self.link!r}; expected one of {LINKS}")
        object.__setattr__(self, "link", link)
        power = float(self.theta_power)
        if power == 0 or not np.isfinite(power):
            raise OutOfRangeError("theta_power must be finite and nonzero")
        object.__setattr__(self, "theta_power", power)
        if self.orientation is None:
            object.__setattr__(self, "orientation", _default_orientation(link, power))
        elif self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}, got {self.orientation!r}")

    # theta ------------------------------------------------------------------

    def theta_support(self) -> tuple[float, bool]:
        """Lower end of the admissible theta range and whether it is included."""
        if self.link == "none":
            return 0.0, True
        if self.link == "add-frailty" and self.theta_power > 0:
            return 0.0, True
        return 0.0, False

    def _t(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        lo, closed = self.theta_support()
        bad = ~np.isfinite(theta) | (theta < lo) | ((theta == lo) & (not closed))
        if np.any(bad):
            raise ThetaOutOfSupportError(
                f"theta={theta[bad].ravel()[0]:g} outside the support of the {self.link} link"
            )
        if self.link == "none":
            return theta
        with np.errstate(divide="ignore"):
            return theta**self.theta_power

    @staticmethod
    def _x(x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(np.isnan(x)):
            raise NegativeTimeError("lifetimes are evaluated at x >= 0")
        return x

    # log-survival and hazard -----------------------------------------------

    def log_survival(self, x, theta=1.0) -> np.ndarray:
        x, t = np.broadcast_arrays(self._x(x), self._t(theta))
        b = self.baseline
        if self.link == "none":
            return b.logsf(x)
        if self.link == "scale":
            return b.logsf(t * x)
        if self.link == "mult-frailty":
            return t * b.logsf(x)
        return b.logsf(x) - t * x

    def hazard(self, x, theta=1.0) -> np.ndarray:
        x, t = np.broadcast_arrays(self._x(x), self._t(theta))
        b = self.baseline
        if self.link == "none":
            return b.hazard(x)
        if self.link == "scale":
            return t * b.hazard(t * x)
        if self.link == "mult-frailty":
            return t * b.hazard(x)
        return b.hazard(x) + t

    # derived quantities ----------------------------------------------------

    def survival(self, x, theta=1.0) -> np.ndarray:
        return np.exp(self.log_survival(x, theta))

    def cdf(self, x, theta=1.0) -> np.ndarray:
        return -np.expm1(self.log_survival(x, theta))

    def density(self, x, theta=1.0) -> np.ndarray:
        ls = self.log_survival(x, theta)
        r = self.hazard(x, theta)
        with np.errstate(invalid="ignore"):
            return np.where(np.exp(ls) == 0, 0.0, r * np.exp(ls))

    def reversed_hazard(self, x, theta=1.0) -> np.ndarray:
        x = self._x(x)
        if np.any(x == 0):
            raise UndefinedAtZeroError("reversed hazard is undefined at x = 0 since F(0) = 0")
        return self.density(x, theta) / self.cdf(x, theta)

    def as_dict(self) -> dict:
        out = dict(self.baseline.as_dict())
        out["link"] = self.link
        if self.theta_power != 1.0:
            out["theta_power"] = self.theta_power
        if self.orientation != _default_orientation(self.link, self.theta_power):
            out["orientation"] = self.orientation
        return out

    def __str__(self) -> str:
        b = self.baseline
        args = ",".join(f"{v:g}" for v in b.params)
        tail = "" if self.theta_power == 1.0 else f", theta^{self.theta_power:g}"
        return f"{b.family}({args})|{self.link}{tail}"


def survival(m: ConditionalLifetimeModel, x, theta=1.0):
    return m.survival(x, theta)


def density(m: ConditionalLifetimeModel, x, theta=1.0):
    return m.density(x, theta)


def hazard(m: ConditionalLifetimeModel, x, theta=1.0):
    return m.hazard(x, theta)


def reversed_hazard(m: ConditionalLifetimeModel, x, theta=1.0):
    return m.reversed_hazard(x, theta)
