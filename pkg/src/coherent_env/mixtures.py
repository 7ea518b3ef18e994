"""Random environments and the mixed lifetime ``tau(X(Theta))``.

Given the environment ``Theta``, component ``i`` survives past ``x`` with
probability ``p_i = S_i(x | theta)`` and the system with probability
``h(p)``; the unconditional survival integrates that over the law of
``Theta``. Discrete laws give exact weighted sums. Continuous laws use
Gauss-Legendre on the support truncated at a high quantile, with weights
renormalised to one and a node-doubling convergence check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, special, stats

from .distortions import ScalarDistortion
from .errors import OutOfRangeError, QuadratureNotConvergedError, ThetaOutOfSupportError
from .lifetimes import ConditionalLifetimeModel

ENV_FAMILIES = ("gamma", "uniform", "beta")
DEFAULT_NODES = 64
DEFAULT_TRUNCATION = 1.0 - 1e-10
DEFAULT_QUAD_TOL = 1e-8


@dataclass(frozen=True)
class Environment:
    """Law of the environment ``Theta`` on ``[0, inf)``.

    Discrete: ``atoms`` is a tuple of ``(theta, weight)``. Continuous:
    ``family`` with ``params`` (``gamma``: shape ``a`` and rate ``b``;
    ``uniform``: ``lo, hi``; ``beta``: ``a, b, lo, hi``). ``truncation`` is
    the upper quantile closing the window on which environment orders are
    compared and, for gamma laws, the end of the quadrature interval.
    """

    kind: str
    atoms: tuple = ()
    family: str | None = None
    params: tuple = ()
    nodes: int = DEFAULT_NODES
    truncation: float = DEFAULT_TRUNCATION
    quad_tol: float = DEFAULT_QUAD_TOL

    def __post_init__(self):
        if self.kind == "discrete":
            atoms = tuple((float(t), float(w)) for t, w in self.atoms)
            if not atoms:
                raise OutOfRangeError("a discrete environment needs at least one atom")
            thetas = np.array([t for t, _ in atoms])
            weights = np.array([w for _, w in atoms])
            if np.any(~np.isfinite(thetas)) or np.any(thetas < 0):
                raise ThetaOutOfSupportError("environment atoms must lie in [0, inf)")
            if np.any(weights <= 0):
                raise OutOfRangeError("environment weights must be positive")
            if abs(weights.sum() - 1.0) > 1e-12:
                raise OutOfRangeError(f"environment weights sum to {weights.sum():.15g}, not 1")
            if len(set(thetas.tolist())) != len(atoms):
                raise OutOfRangeError("environment atoms must be distinct")
            order = np.argsort(thetas)
            object.__setattr__(self, "atoms", tuple(atoms[i] for i in order))
        elif self.kind == "continuous":
            if self.family not in ENV_FAMILIES:
                raise ValueError(f"unknown environment family {self.family!r}; expected one of {ENV_FAMILIES}")
            params = tuple(float(v) for v in self.params)
            object.__setattr__(self, "params", params)
            _frozen(self.family, params)
            if int(self.nodes) < 2:
                raise OutOfRangeError("quadrature needs at least 2 nodes")
            object.__setattr__(self, "nodes", int(self.nodes))
            if not 0.5 < self.truncation <= 1.0:
                raise OutOfRangeError("truncation quantile must lie in (0.5, 1]")
        else:
            raise ValueError(f"environment kind must be 'discrete' or 'continuous', got {self.kind!r}")

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"

    @property
    def is_degenerate(self) -> bool:
        return self.is_discrete and len(self.atoms) == 1

    def dist(self):
        """Frozen scipy distribution of a continuous environment."""
        if self.is_discrete:
            raise TypeError("discrete environments have no scipy law")
        return _frozen(self.family, self.params)

    def support(self) -> tuple[float, float]:
        if self.is_discrete:
            return self.atoms[0][0], self.atoms[-1][0]
        lo, hi = self.dist().support()
        return float(lo), float(hi)

    def truncated_support(self) -> tuple[float, float]:
        if self.is_discrete:
            return self.support()
        d = self.dist()
        lo, hi = d.support()
        if np.isfinite(hi) and self.truncation >= 1.0:
            return float(lo), float(hi)
        return float(lo), float(min(hi, d.ppf(self.truncation)))

    def rule(self, nodes: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights (summing to one) representing ``Theta``.

        Gamma laws use Gauss-Jacobi with weight ``theta^(a-1)`` on
        ``[0, q]``, ``q`` the ``truncation`` quantile, with ``exp(-b theta)``
        folded into the weights; beta laws use Gauss-Jacobi with both
        endpoint exponents; uniform laws use Gauss-Legendre.
        """
        if self.is_discrete:
            return np.array([t for t, _ in self.atoms]), np.array([w for _, w in self.atoms])
        n = self.nodes if nodes is None else int(nodes)
        if self.family == "gamma":
            a, b = self.params
            hi = self.truncated_support()[1]
            x, w = special.roots_jacobi(n, 0.0, a - 1.0)
            theta = 0.5 * hi * (x + 1.0)
            w = w * np.exp(-b * theta)
            return theta, w / w.sum()
        if self.family == "beta":
            a, b, lo, hi = self.params
            x, w = special.roots_jacobi(n, b - 1.0, a - 1.0)
        else:
            lo, hi = self.params
            x, w = np.polynomial.legendre.leggauss(n)
        theta = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        return theta, w / w.sum()

    def integrate(self, fn, check: bool = True) -> np.ndarray:
        """``E[fn(Theta)]`` where ``fn`` maps a node vector to ``(..., nodes)`` values.

        With ``check`` the fixed rule is compared against twice as many nodes;
        if they disagree the expectation is recomputed adaptively as
        ``int_0^1 fn(F^-1(u)) du``.
        """
        theta, w = self.rule()
        out = fn(theta) @ w
        if check and not self.is_discrete:
            theta2, w2 = self.rule(2 * self.nodes)
            diff = np.max(np.abs(fn(theta2) @ w2 - out), initial=0.0)
            if not diff <= self.quad_tol:
                out = self._adaptive(fn, diff)
        return out

    def _adaptive(self, fn, diff: float) -> np.ndarray:
        d = self.dist()
        with np.errstate(over="ignore", under="ignore"):
            val, err = integrate.quad_vec(
                lambda u: fn(np.atleast_1d(d.ppf(u)))[..., 0], 0.0, 1.0,
                epsabs=0.1 * self.quad_tol, epsrel=0.0, norm="max", limit=500,
            )
        if not err <= self.quad_tol:
            raise QuadratureNotConvergedError(
                f"{self.nodes} vs {2 * self.nodes} nodes differ by {diff:.3g} and the adaptive "
                f"fallback reached only {err:.3g} > {self.quad_tol:g}"
            )
        return val

    def quantile_probes(self, count: int = 5) -> np.ndarray:
        """Representative theta values: atoms, or evenly spaced interior quantiles."""
        if self.is_discrete:
            return np.array([t for t, _ in self.atoms])
        q = (np.arange(count) + 0.5) / count
        return self.dist().ppf(q)

    def as_dict(self) -> dict:
        if self.is_discrete:
            return {"atoms": [[t, w] for t, w in self.atoms]}
        names = {"gamma": ("a", "b"), "uniform": ("lo", "hi"), "beta": ("a", "b", "lo", "hi")}[self.family]
        out = {"family": self.family, **dict(zip(names, self.params)), "nodes": self.nodes}
        if self.truncation != DEFAULT_TRUNCATION:
            out["truncation"] = self.truncation
        return out

    def __str__(self) -> str:
        if self.is_discrete:
            return "atoms[" + ", ".join(f"{t:g}:{w:g}" for t, w in self.atoms) + "]"
        return f"{self.family}(" + ", ".join(f"{v:g}" for v in self.params) + ")"


def _frozen(family: str, params: tuple):
    if family == "gamma":
        if len(params) != 2 or min(params) <= 0:
            raise OutOfRangeError("gamma environment takes shape a > 0 and rate b > 0")
        a, b = params
        return stats.gamma(a, scale=1.0 / b)
    if family == "uniform":
        if len(params) != 2 or not 0 <= params[0] < params[1]:
            raise OutOfRangeError("uniform environment takes 0 <= lo < hi")
        lo, hi = params
        return stats.uniform(lo, hi - lo)
    if len(params) != 4 or min(params[:2]) <= 0 or not 0 <= params[2] < params[3]:
        raise OutOfRangeError("beta environment takes a > 0, b > 0 and 0 <= lo < hi")
    a, b, lo, hi = params
    return stats.beta(a, b, loc=lo, scale=hi - lo)


def discrete(atoms) -> Environment:
    return Environment("discrete", atoms=tuple(tuple(a) for a in atoms))


def point(theta: float) -> Environment:
    """Deterministic environment fixed at ``theta``."""
    return Environment("discrete", atoms=((theta, 1.0),))


def gamma_env(a: float, b: float, nodes: int = DEFAULT_NODES) -> Environment:
    return Environment("continuous", family="gamma", params=(a, b), nodes=nodes)


def uniform_env(lo: float, hi: float, nodes: int = DEFAULT_NODES) -> Environment:
    return Environment("continuous", family="uniform", params=(lo, hi), nodes=nodes)


def beta_env(a: float, b: float, lo: float = 0.0, hi: float = 1.0, nodes: int = DEFAULT_NODES) -> Environment:
    return Environment("continuous", family="beta", params=(a, b, lo, hi), nodes=nodes)


@dataclass(frozen=True)
class MixedSystemLifetime:
    """Lifetime ``tau(X(Theta))`` of a coherent system in a random environment.

    ``distortion`` is a :class:`DistortionFunction` (or anything with
    ``eval_log``, ``complement_log`` and ``gradient_clipped``), together with
    one marginal per component; or a :class:`ScalarDistortion` with a single
    marginal shared by all components.
    """

    distortion: object
    marginals: Sequence[ConditionalLifetimeModel]
    environment: Environment
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if self.scalar:
            if len(self.marginals) != 1:
                raise OutOfRangeError("a scalar distortion takes exactly one shared marginal")
        elif len(self.marginals) != self.distortion.n:
            raise OutOfRangeError(f"{len(self.marginals)} marginals for {self.distortion.n} components")

    @property
    def scalar(self) -> bool:
        return isinstance(self.distortion, ScalarDistortion)

    def _logp(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        # shape (len(x), len(theta), n)
        return np.stack(
            [m.log_survival(x[:, None], theta[None, :]) for m in self.marginals], axis=-1
        )

    def _cond(self, x, which: str) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        h = self.distortion

        def fn(theta):
            logp = self._logp(x, theta)
            if self.scalar:
                p = np.exp(logp[..., 0])
                if which == "sf":
                    return h(p)
                if which == "cdf":
                    return h.complement(p)
                f = self.marginals[0].density(x[:, None], theta[None, :])
                return f * h.prime(np.clip(p, np.finfo(float).tiny, np.nextafter(1.0, 0.0)))
            if which == "sf":
                return h.eval_log(logp)
            if which == "cdf":
                return h.complement_log(logp)
            f = np.stack([m.density(x[:, None], theta[None, :]) for m in self.marginals], axis=-1)
            return np.sum(f * h.gradient_clipped(np.exp(logp)), axis=-1)

        return self.environment.integrate(fn, check=self.check)

    def survival(self, x) -> np.ndarray:
        return _shape_like(x, np.clip(self._cond(x, "sf"), 0.0, 1.0))

    def cdf(self, x) -> np.ndarray:
        return _shape_like(x, np.clip(self._cond(x, "cdf"), 0.0, 1.0))

    def density(self, x) -> np.ndarray:
        return _shape_like(x, np.maximum(self._cond(x, "pdf"), 0.0))

    def hazard(self, x) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.density(x) / self.survival(x)

    def reversed_hazard(self, x) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.density(x) / self.cdf(x)

    def conditional(self, theta: float) -> "MixedSystemLifetime":
        """The same system with the environment fixed at ``theta``."""
        return MixedSystemLifetime(self.distortion, self.marginals, point(theta), self.check)


def _shape_like(x, values: np.ndarray) -> np.ndarray:
    return values.reshape(np.shape(x)) if np.ndim(x) else values[0]


def mixture_survival(m: MixedSystemLifetime, x):
    return m.survival(x)


def mixture_cdf(m: MixedSystemLifetime, x):
    return m.cdf(x)


def mixture_density(m: MixedSystemLifetime, x):
    return m.density(x)


def mixture_hazard(m: MixedSystemLifetime, x):
    return m.hazard(x)


def mixture_reversed_hazard(m: MixedSystemLifetime, x):
    return m.reversed_hazard(x)
