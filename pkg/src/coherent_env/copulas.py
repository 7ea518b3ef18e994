"""Survival copulas of the catalog and their exact first partials.

All four families are exchangeable, so besides the joint value we expose the
diagonal section ``C(p,..,p,1,..,1)`` with ``a`` free coordinates and its first
two derivatives. Values and complements are computed from ``log u`` so that
``1 - C`` stays accurate when every ``u`` is close to one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryPointError, DimensionMismatchError, OutOfRangeError, OutOfUnitCubeError

FAMILIES = ("independence", "fgm", "gumbel-barnett", "clayton-oakes")

_ALIASES = {
    "independence": "independence",
    "indep": "independence",
    "product": "independence",
    "fgm": "fgm",
    "farlie-gumbel-morgenstern": "fgm",
    "gumbel-barnett": "gumbel-barnett",
    "gb": "gumbel-barnett",
    "clayton-oakes": "clayton-oakes",
    "clayton": "clayton-oakes",
    "co": "clayton-oakes",
}


@dataclass(frozen=True)
class SurvivalCopula:
    """Parametric survival copula ``C(u_1, ..., u_n)``.

    ``param`` is the FGM coefficient (in [-1, 1]), the Gumbel-Barnett ``alpha``
    (> 0) or the Clayton-Oakes ``theta`` (> 0); it is ``None`` for independence.
    """

    family: str
    dim: int
    param: float | None = None

    def __post_init__(self):
        fam = _ALIASES.get(str(self.family).lower())
        if fam is None:
            raise ValueError(f"unknown copula family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise OutOfRangeError(f"copula dimension must be a positive integer, got {self.dim!r}")
        if self.dim == 1 and fam != "independence":
            raise OutOfRangeError(f"{fam} copula needs dimension >= 2")
        if fam == "independence":
            if self.param not in (None, 0, 0.0):
                raise OutOfRangeError("independence copula takes no parameter")
            object.__setattr__(self, "param", None)
            return
        if self.param is None:
            raise OutOfRangeError(f"{fam} copula needs a parameter")
        p = float(self.param)
        object.__setattr__(self, "param", p)
        if fam == "fgm" and not -1.0 <= p <= 1.0:
            raise OutOfRangeError(f"FGM parameter must lie in [-1, 1], got {p}")
        if fam in ("gumbel-barnett", "clayton-oakes") and not p > 0:
            raise OutOfRangeError(f"{fam} parameter must be > 0, got {p}")

    # -- joint value ---------------------------------------------------------

    def _check(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.ndim == 0 or u.shape[-1] != self.dim:
            raise DimensionMismatchError(f"expected vectors of length {self.dim}, got shape {u.shape}")
        if np.any(~np.isfinite(u)) or np.any(u < 0) or np.any(u > 1):
            raise OutOfUnitCubeError("copula arguments must lie in [0, 1]")
        return u

    def __call__(self, u) -> np.ndarray:
        return self.cdf(u)

    def cdf(self, u) -> np.ndarray:
        u = self._check(u)
        with np.errstate(divide="ignore"):
            return self.cdf_log(np.log(u))

    def complement(self, u) -> np.ndarray:
        """``1 - C(u)`` without cancellation near ``u = 1``."""
        u = self._check(u)
        with np.errstate(divide="ignore"):
            return self.complement_log(np.log(u))

    def cdf_log(self, logu) -> np.ndarray:
        return self._from_log(logu)[0]

    def complement_log(self, logu) -> np.ndarray:
        return self._from_log(logu)[1]

    def _from_log(self, logu):
        logu = np.asarray(logu, dtype=float)
        zero = np.any(np.isneginf(logu), axis=-1)
        lg = np.where(np.isneginf(logu), -1.0, logu)
        s = lg.sum(axis=-1)
        fam, a = self.family, self.param
        if fam == "independence":
            val, comp = np.exp(s), -np.expm1(s)
        elif fam == "fgm":
            prod_u = np.exp(s)
            corr = a * np.prod(-np.expm1(lg), axis=-1)
            val = prod_u * (1.0 + corr)
            comp = -np.expm1(s) - prod_u * corr
        elif fam == "gumbel-barnett":
            e = s - a * np.prod(lg, axis=-1)
            val, comp = np.exp(e), -np.expm1(e)
        else:
            t = np.log1p(np.sum(np.expm1(-a * lg), axis=-1)) / a
            val, comp = np.exp(-t), -np.expm1(-t)
        val = np.where(zero, 0.0, val)
        comp = np.where(zero, 1.0, comp)
        return val, comp

    # -- first partials ------------------------------------------------------

    def partial(self, u, i: int) -> np.ndarray:
        """``dC/du_i`` in closed form; ``i`` is the 1-based coordinate."""
        u = self._check(u)
        if not 1 <= i <= self.dim:
            raise OutOfRangeError(f"coordinate {i} outside 1..{self.dim}")
        return self.gradient(u)[..., i - 1]

    def gradient(self, u) -> np.ndarray:
        """All first partials at once, shape ``u.shape``."""
        u = self._check(u)
        fam, a, n = self.family, self.param, self.dim
        if fam == "gumbel-barnett" and np.any(u == 0):
            raise BoundaryPointError("Gumbel-Barnett partials are singular where some u_j = 0")
        if fam == "clayton-oakes" and np.any(u == 0):
            raise BoundaryPointError("Clayton-Oakes partial is singular at u_i = 0")
        others = _prod_except(u)
        if fam == "independence":
            return others
        if fam == "fgm":
            return others * (1.0 + a * (1.0 - 2.0 * u) * _prod_except(1.0 - u))
        if fam == "gumbel-barnett":
            lg = np.log(u)
            c = np.exp(lg.sum(axis=-1) - a * np.prod(lg, axis=-1))[..., None]
            return c * (1.0 - a * _prod_except(lg)) / u
        s = 1.0 + np.sum(np.expm1(-a * np.log(u)), axis=-1)
        return u ** (-a - 1.0) * (s ** (-1.0 / a - 1.0))[..., None]

    # -- diagonal sections ---------------------------------------------------

    def diagonal(self, a: int, p):
        """Section ``g(p) = C(p,..,p,1,..,1)`` with ``a`` free coordinates.

        Returns ``(g, 1 - g, g', g'')`` evaluated at ``p`` in (0, 1).
        """
        if not 1 <= a <= self.dim:
            raise OutOfRangeError(f"section size {a} outside 1..{self.dim}")
        p = np.asarray(p, dtype=float)
        lp = np.log(p)
        fam, t = self.family, self.param
        joint = a == self.dim
        if fam == "independence" or (fam in ("fgm", "gumbel-barnett") and not joint):
            g = np.exp(a * lp)
            return g, -np.expm1(a * lp), a * p ** (a - 1), a * (a - 1) * p ** (a - 2) if a > 1 else np.zeros_like(p)
        if fam == "fgm":
            q = 1.0 - p
            pq = p * q
            g = p**a * (1.0 + t * q**a)
            comp = -np.expm1(a * lp) - t * pq**a
            d1 = a * p ** (a - 1) + t * a * pq ** (a - 1) * (q - p)
            d2 = a * (a - 1) * p ** (a - 2) + t * a * ((a - 1) * pq ** (a - 2) * (1 - 2 * p) ** 2 - 2 * pq ** (a - 1))
            return g, comp, d1, d2
        if fam == "gumbel-barnett":
            e = a * lp - t * lp**a
            g = np.exp(e)
            u1 = (a - t * a * lp ** (a - 1)) / p
            u2 = (-t * a * (a - 1) * lp ** (a - 2) - a + t * a * lp ** (a - 1)) / p**2
            return g, -np.expm1(e), g * u1, g * (u1**2 + u2)
        s = 1.0 + a * np.expm1(-t * lp)
        e = -np.log1p(a * np.expm1(-t * lp)) / t
        g = np.exp(e)
        d1 = a * p ** (-t - 1.0) * s ** (-1.0 / t - 1.0)
        d2 = a * (t + 1.0) * p ** (-t - 2.0) * s ** (-1.0 / t - 1.0) * (a * p ** (-t) / s - 1.0)
        return g, -np.expm1(e), d1, d2

    def __str__(self) -> str:
        if self.param is None:
            return f"{self.family}(dim={self.dim})"
        return f"{self.family}(dim={self.dim}, param={self.param:g})"


def _prod_except(v: np.ndarray) -> np.ndarray:
    """Products of all coordinates but one along the last axis."""
    n = v.shape[-1]
    out = np.empty_like(v)
    for i in range(n):
        out[..., i] = np.prod(np.delete(v, i, axis=-1), axis=-1)
    return out


def independence(dim: int) -> SurvivalCopula:
    return SurvivalCopula("independence", dim)


def fgm(dim: int, lam: float) -> SurvivalCopula:
    return SurvivalCopula("fgm", dim, lam)


def gumbel_barnett(dim: int, alpha: float) -> SurvivalCopula:
    return SurvivalCopula("gumbel-barnett", dim, alpha)


def clayton_oakes(dim: int, theta: float) -> SurvivalCopula:
    return SurvivalCopula("clayton-oakes", dim, theta)


def eval(c: SurvivalCopula, u) -> np.ndarray:  # noqa: A001 - mirrors the operation name
    return c.cdf(u)


def partial(c: SurvivalCopula, u, i: int) -> np.ndarray:
    return c.partial(u, i)
