"""Domination (dual distortion) functions of coherent systems.

``h(p) = P(system works)`` when component ``i`` works with probability
``p_i`` and the working indicators are coupled through a survival copula. It
is obtained by inclusion-exclusion over the minimal path sets::

    h(p) = sum_{S nonempty subfamily} (-1)^{|S|+1} C(mask(union S; p))

where ``mask(A; p)`` keeps ``p_i`` for ``i`` in ``A`` and puts 1 elsewhere.
Terms sharing the same union are merged, which leaves at most ``2**n``
integer-weighted masks (the Moebius coefficients of the structure function).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable

import numpy as np

from .copulas import SurvivalCopula
from .errors import BoundaryPointError, DimensionMismatchError, OutOfRangeError, OutOfUnitCubeError, TooManyPathsError
from .structures import CoherentStructure

MAX_TERMS = 1 << 20
DIAGNOSTIC_EPS = 1e-6
EPS = np.finfo(float).eps


def mobius_coefficients(structure: CoherentStructure) -> np.ndarray:
    """Coefficients ``c_A`` with ``h_indep(p) = sum_A c_A prod_{i in A} p_i``.

    Indexed by bit mask ``A``; integer valued.
    """
    f = structure.working_table().astype(np.int64)
    n = structure.n
    masks = np.arange(f.size)
    for i in range(n):
        hi = (masks >> i) & 1 == 1
        f[hi] -= f[masks[hi] ^ (1 << i)]
    return f


def inclusion_exclusion_terms(paths) -> list[tuple[int, int]]:
    """Ungrouped expansion: one ``(sign, union mask)`` per nonempty subfamily."""
    masks = sorted(sum(1 << (i - 1) for i in p) for p in paths)
    r = len(masks)
    if (1 << r) - 1 > MAX_TERMS:
        raise TooManyPathsError(f"{r} path sets give {(1 << r) - 1} inclusion-exclusion terms")
    terms = []
    for size in range(1, r + 1):
        sign = 1 if size % 2 else -1
        for sub in combinations(masks, size):
            u = 0
            for m in sub:
                u |= m
            terms.append((sign, u))
    return terms


@dataclass(frozen=True)
class DistortionFunction:
    """Domination function ``h`` built from a structure and a survival copula."""

    structure: CoherentStructure
    copula: SurvivalCopula
    coefs: np.ndarray = field(repr=False)
    masks: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.structure.n

    @property
    def terms(self) -> list[tuple[int, frozenset]]:
        """``(coefficient, component set)`` pairs of the merged expansion."""
        return [
            (int(c), frozenset(int(j) + 1 for j in np.flatnonzero(row)))
            for c, row in zip(self.coefs, self.masks)
        ]

    def _check(self, p, interior=False) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.ndim == 0 or p.shape[-1] != self.n:
            raise DimensionMismatchError(f"expected vectors of length {self.n}, got shape {p.shape}")
        if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
            raise OutOfUnitCubeError("distortion arguments must lie in [0, 1]")
        if interior and (np.any(p <= 0) or np.any(p >= 1)):
            raise BoundaryPointError("gradient needs p strictly inside (0, 1)^n")
        return p

    def _masked_log(self, logp: np.ndarray) -> np.ndarray:
        return np.where(self.masks, logp[..., None, :], 0.0)

    def __call__(self, p) -> np.ndarray:
        return self.eval(p)

    def eval(self, p) -> np.ndarray:
        p = self._check(p)
        with np.errstate(divide="ignore"):
            return self.eval_log(np.log(p))

    def complement(self, p) -> np.ndarray:
        p = self._check(p)
        with np.errstate(divide="ignore"):
            return self.complement_log(np.log(p))

    def eval_log(self, logp) -> np.ndarray:
        """``h`` at ``p = exp(logp)``."""
        vals = self.copula.cdf_log(self._masked_log(np.asarray(logp, dtype=float)))
        return np.clip(vals @ self.coefs, 0.0, 1.0)

    def complement_log(self, logp) -> np.ndarray:
        """``1 - h`` at ``p = exp(logp)``, summed from the term complements."""
        comps = self.copula.complement_log(self._masked_log(np.asarray(logp, dtype=float)))
        return np.clip(comps @ self.coefs, 0.0, 1.0)

    def gradient(self, p) -> np.ndarray:
        """Exact ``dh/dp_i``, shape ``p.shape``."""
        p = self._check(p, interior=True)
        return self._gradient(p)

    def _gradient(self, p: np.ndarray) -> np.ndarray:
        args = np.where(self.masks, p[..., None, :], 1.0)
        g = self.copula.gradient(args) * self.masks
        return np.einsum("...tn,t->...n", g, self.coefs)

    def gradient_clipped(self, p) -> np.ndarray:
        """Gradient with ``p`` pulled into the open cube, for integrands."""
        p = np.clip(np.asarray(p, dtype=float), np.finfo(float).tiny, np.nextafter(1.0, 0.0))
        return self._gradient(self._check(p))

    # Rounding-error bounds. The signed expansion can cancel (1 - h near
    # p = 1 for instance), so each value comes with an absolute error bound
    # proportional to the sum of the magnitudes of its terms.

    def _term_scale(self, logp: np.ndarray) -> np.ndarray:
        masked = self._masked_log(logp)
        return 4.0 * EPS * (self.n + 1.0 + np.abs(masked.sum(axis=-1)))

    def eval_err(self, p) -> tuple[np.ndarray, np.ndarray]:
        """``h(p)`` and an absolute rounding-error bound."""
        p = self._check(p)
        with np.errstate(divide="ignore"):
            logp = np.log(p)
        vals = self.copula.cdf_log(self._masked_log(logp))
        err = (np.abs(vals) * self._term_scale(logp)) @ np.abs(self.coefs)
        return np.clip(vals @ self.coefs, 0.0, 1.0), err

    def complement_err(self, p) -> tuple[np.ndarray, np.ndarray]:
        p = self._check(p)
        with np.errstate(divide="ignore"):
            logp = np.log(p)
        comps = self.copula.complement_log(self._masked_log(logp))
        err = (np.abs(comps) * self._term_scale(logp)) @ np.abs(self.coefs)
        return np.clip(comps @ self.coefs, 0.0, 1.0), err

    def gradient_err(self, p) -> tuple[np.ndarray, np.ndarray]:
        p = self._check(p, interior=True)
        args = np.where(self.masks, p[..., None, :], 1.0)
        g = self.copula.gradient(args) * self.masks
        scale = self._term_scale(np.log(p))[..., None]
        val = np.einsum("...tn,t->...n", g, self.coefs)
        err = np.einsum("...tn,t->...n", np.abs(g) * scale, np.abs(self.coefs))
        return val, err


def build(structure: CoherentStructure, copula: SurvivalCopula) -> DistortionFunction:
    if copula.dim != structure.n:
        raise DimensionMismatchError(f"copula dimension {copula.dim} != structure size {structure.n}")
    c = mobius_coefficients(structure)
    idx = np.flatnonzero(c)
    if idx.size > MAX_TERMS:
        raise TooManyPathsError(f"{idx.size} inclusion-exclusion terms exceed {MAX_TERMS}")
    masks = ((idx[:, None] >> np.arange(structure.n)) & 1).astype(bool)
    return DistortionFunction(structure, copula, c[idx].astype(float), masks)


def eval(h: DistortionFunction, p) -> np.ndarray:  # noqa: A001
    return h.eval(p)


def gradient(h: DistortionFunction, p) -> np.ndarray:
    return h.gradient(p)


def elasticities(h, p) -> np.ndarray:
    """``p_i * dh/dp_i / h(p)`` for every coordinate."""
    p = np.asarray(p, dtype=float)
    return p * h.gradient(p) / h.eval(p)[..., None]


def reverse_elasticities(h, p) -> np.ndarray:
    """``(1 - p_i) * dh/dp_i / (1 - h(p))`` for every coordinate."""
    p = np.asarray(p, dtype=float)
    return (1.0 - p) * h.gradient(p) / h.complement(p)[..., None]


# -- scalar (iid) distortions -------------------------------------------------


@dataclass(frozen=True)
class ScalarDistortion:
    """``p -> h(p, ..., p)`` with its complement and two exact derivatives.

    ``errors`` optionally maps ``"value"``, ``"comp"``, ``"d1"``, ``"d2"`` to
    callables returning absolute rounding-error bounds; without it each value
    is taken to be accurate to a few ulps.
    """

    value: Callable
    comp: Callable
    d1: Callable
    d2: Callable
    label: str = "h"
    errors: dict | None = field(default=None, compare=False)

    def error(self, part: str, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.errors and part in self.errors:
            return self.errors[part](p)
        fn = {"value": self.value, "comp": self.comp, "d1": self.d1, "d2": self.d2}[part]
        return 8.0 * EPS * np.abs(fn(p))

    def __call__(self, p):
        return self.value(np.asarray(p, dtype=float))

    def complement(self, p):
        return self.comp(np.asarray(p, dtype=float))

    def prime(self, p):
        return self.d1(np.asarray(p, dtype=float))

    def second(self, p):
        return self.d2(np.asarray(p, dtype=float))


def iid_profile(h: DistortionFunction) -> ScalarDistortion:
    sizes = h.masks.sum(axis=1)
    by_size = {int(a): float(h.coefs[sizes == a].sum()) for a in np.unique(sizes)}
    by_size = {a: b for a, b in by_size.items() if b != 0}
    cop = h.copula

    def part(k):
        def f(p):
            return sum(b * cop.diagonal(a, p)[k] for a, b in by_size.items())
        return f

    def err(k):
        def f(p):
            lp = np.abs(np.log(p))
            return sum(
                abs(b) * np.abs(cop.diagonal(a, p)[k]) * 8.0 * EPS * (cop.dim + 1.0 + a * (1.0 + lp))
                for a, b in by_size.items()
            )
        return f

    errors = {"value": err(0), "comp": err(1), "d1": err(2), "d2": err(3)}
    return ScalarDistortion(part(0), part(1), part(2), part(3), label=f"iid[{h.structure}, {cop}]", errors=errors)


def kofn_closed_form(k: int, n: int) -> ScalarDistortion:
    """``h_{k:n}(p) = sum_{i>=k} C(n,i) p^i (1-p)^(n-i)`` with exact derivatives."""
    if not 1 <= k <= n:
        raise OutOfRangeError(f"k-out-of-n needs 1 <= k <= n, got k={k}, n={n}")
    lead = n * comb(n - 1, k - 1)

    def value(p):
        q = 1.0 - p
        return sum(comb(n, i) * p**i * q ** (n - i) for i in range(k, n + 1))

    def comp(p):
        q = 1.0 - p
        return sum(comb(n, i) * p**i * q ** (n - i) for i in range(0, k))

    def d1(p):
        return lead * p ** (k - 1) * (1.0 - p) ** (n - k)

    def d2(p):
        q = 1.0 - p
        out = np.zeros_like(p)
        if k > 1:
            out = out + (k - 1) * p ** (k - 2) * q ** (n - k)
        if n > k:
            out = out - (n - k) * p ** (k - 1) * q ** (n - k - 1)
        return lead * out

    def d2_err(p):
        q = 1.0 - p
        mag = np.zeros_like(p)
        if k > 1:
            mag = mag + (k - 1) * p ** (k - 2) * q ** (n - k)
        if n > k:
            mag = mag + (n - k) * p ** (k - 1) * q ** (n - k - 1)
        return 8.0 * EPS * (n + 1.0) * lead * mag

    def pos_err(fn):
        return lambda p: 8.0 * EPS * (n + 1.0) * np.abs(fn(p))

    errors = {"value": pos_err(value), "comp": pos_err(comp), "d1": pos_err(d1), "d2": d2_err}
    return ScalarDistortion(value, comp, d1, d2, label=f"h_{k}:{n}", errors=errors)


@dataclass(frozen=True)
class Diagnostics:
    eta: Callable
    rho: Callable
    kappa: Callable
    kappa_bar: Callable


def diagnostics(h: ScalarDistortion) -> Diagnostics:
    """Pointwise ratio functionals of a scalar distortion on (0, 1).

    ``eta = p h'/h``, ``rho = (1-p) h'/(1-h)``, ``kappa = p h''/h'`` and
    ``kappa_bar = (1-p) h''/h'``.
    """
    return Diagnostics(
        eta=lambda p: np.asarray(p) * h.prime(p) / h(p),
        rho=lambda p: (1.0 - np.asarray(p)) * h.prime(p) / h.complement(p),
        kappa=lambda p: np.asarray(p) * h.second(p) / h.prime(p),
        kappa_bar=lambda p: (1.0 - np.asarray(p)) * h.second(p) / h.prime(p),
    )


def diagnostic_grid(n_points: int = 1000, eps: float = DIAGNOSTIC_EPS) -> np.ndarray:
    return np.linspace(eps, 1.0 - eps, n_points)


# -- k-out-of-n with independent components ------------------------------------


def _count_distribution(p: np.ndarray) -> np.ndarray:
    """Poisson-binomial pmf of the number of working components, last axis."""
    n = p.shape[-1]
    dist = np.zeros(p.shape[:-1] + (n + 1,))
    dist[..., 0] = 1.0
    for i in range(n):
        pi = p[..., i : i + 1]
        shifted = np.concatenate([np.zeros(dist.shape[:-1] + (1,)), dist[..., :-1]], axis=-1)
        dist = dist * (1.0 - pi) + shifted * pi
    return dist


@dataclass(frozen=True)
class KofnIndependent:
    """``h_{k:n}`` for independent, not necessarily identical, components."""

    k: int
    n: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise OutOfRangeError(f"k-out-of-n needs 1 <= k <= n, got k={self.k}, n={self.n}")

    def _p(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.n:
            raise DimensionMismatchError(f"expected vectors of length {self.n}, got shape {p.shape}")
        return p

    def __call__(self, p):
        return self.eval(p)

    def eval(self, p):
        return _count_distribution(self._p(p))[..., self.k :].sum(axis=-1)

    def complement(self, p):
        return _count_distribution(self._p(p))[..., : self.k].sum(axis=-1)

    def eval_log(self, logp):
        return self.eval(np.exp(logp))

    def complement_log(self, logp):
        return self.complement(np.exp(logp))

    def gradient_clipped(self, p):
        return self.gradient(p)

    # the dynamic programme only adds and multiplies nonnegative numbers
    def eval_err(self, p):
        v = self.eval(p)
        return v, 8.0 * EPS * (self.n + 1.0) * v

    def complement_err(self, p):
        v = self.complement(p)
        return v, 8.0 * EPS * (self.n + 1.0) * v

    def gradient_err(self, p):
        g = self.gradient(p)
        return g, 8.0 * EPS * (self.n + 1.0) * np.abs(g)

    def gradient(self, p):
        p = self._p(p)
        out = np.empty_like(p)
        for i in range(self.n):
            others = np.delete(p, i, axis=-1)
            out[..., i] = _count_distribution(others)[..., self.k - 1]
        return out
