"""Monte Carlo oracle for mixed system lifetimes.

Draw ``theta`` from the environment, a vector ``u`` from the survival copula
and set ``X_i = S_i^{-1}(u_i | theta)``. Because ``C`` couples *survival*
margins, a small ``u_i`` means a long life; sampling stays on the survival
scale throughout. The system lifetime is ``max over paths of min over the
path``. Survival curves are indicator means with binomial standard errors.

Reproducibility: the sample is cut into fixed-size chunks, each with its own
``SeedSequence`` child, and counts are summed in chunk order. The result
does not depend on how many workers process the chunks.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from .copulas import SurvivalCopula
from .errors import OutOfRangeError, UnsupportedFamilyDimensionError
from .lifetimes import ConditionalLifetimeModel
from .mixtures import Environment
from .structures import CoherentStructure

MIN_SAMPLES = 1000
CHUNK = 50_000
FGM_BOUND = 2.0
BISECT_TOL = 1e-10
CSV_FIELDS = ("x", "estimate", "stderr", "analytic", "|z|")


# -- copulas -------------------------------------------------------------------


def sample_copula(c: SurvivalCopula, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """``size`` draws of ``U`` with joint cdf ``C``; shape ``(size, dim)``.

    With ``X_i = S_i^{-1}(U_i)`` the lifetimes then have joint survival
    ``C(S_1, ..., S_n)``.
    """
    n = c.dim
    if c.family == "independence":
        return rng.random((size, n))
    if c.family == "fgm":
        return _fgm(c.param, n, rng, size)
    if c.family == "gumbel-barnett":
        if n != 2:
            raise UnsupportedFamilyDimensionError(f"no Gumbel-Barnett sampler for n={n}; only n=2 is supported")
        return _gumbel_barnett(c.param, rng, size)
    return _clayton(c.param, n, rng, size)


def _fgm(lam: float, n: int, rng, size: int) -> np.ndarray:
    """Rejection from iid uniforms; the density ``1 + lam prod(1 - 2u)`` is at most 2."""
    out = np.empty((0, n))
    while out.shape[0] < size:
        need = size - out.shape[0]
        u = rng.random((2 * need + 16, n))
        accept = rng.random(u.shape[0]) * FGM_BOUND <= 1.0 + lam * np.prod(1.0 - 2.0 * u, axis=1)
        out = np.vstack([out, u[accept]])
    return out[:size]


def fgm_acceptance(lam: float, n: int, rng, size: int) -> float:
    """Empirical acceptance rate of the FGM rejection step."""
    u = rng.random((size, n))
    accept = rng.random(size) * FGM_BOUND <= 1.0 + lam * np.prod(1.0 - 2.0 * u, axis=1)
    return float(accept.mean())


def _gumbel_barnett(alpha: float, rng, size: int) -> np.ndarray:
    """Conditional inversion: solve ``dC/du1 (u1, u2) = v`` for ``u2`` by bisection."""
    u1 = rng.random(size)
    v = rng.random(size)
    l1 = np.log(u1)

    def cond(u2):
        l2 = np.log(u2)
        return u2 * np.exp(-alpha * l1 * l2) * (1.0 - alpha * l2)

    lo, hi = np.zeros(size), np.ones(size)
    while np.max(hi - lo) > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        below = cond(mid) < v
        lo, hi = np.where(below, mid, lo), np.where(below, hi, mid)
    return np.column_stack([u1, 0.5 * (lo + hi)])


def _clayton(theta: float, n: int, rng, size: int) -> np.ndarray:
    """Marshall-Olkin: gamma frailty ``V`` and ``U_i = (1 + E_i / V)^(-1/theta)``."""
    v = rng.gamma(1.0 / theta, 1.0, size)[:, None]
    e = rng.exponential(1.0, (size, n))
    return (1.0 + e / v) ** (-1.0 / theta)


# -- lifetimes ------------------------------------------------------------------------


def _baseline_inverse(m: ConditionalLifetimeModel, logu: np.ndarray) -> np.ndarray:
    """``x`` with baseline log-survival equal to ``logu``."""
    b = m.baseline
    if b.family == "exponential":
        return -logu / b.params[0]
    if b.family == "weibull":
        shape, scale = b.params
        return scale * (-logu) ** (1.0 / shape)
    a, rate = b.params
    return special.gammainccinv(a, np.exp(logu)) / rate


def inverse_survival(m: ConditionalLifetimeModel, u: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """``S^{-1}(u | theta)``, closed form where possible and bisection otherwise."""
    u = np.asarray(u, dtype=float)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), u.shape)
    logu = np.log(u)
    if m.link == "none":
        return _baseline_inverse(m, logu)
    t = m._t(theta)
    if m.link == "scale":
        return _baseline_inverse(m, logu) / t
    if m.link == "mult-frailty":
        return _baseline_inverse(m, logu / t)
    if m.baseline.family == "exponential":
        return -logu / (m.baseline.params[0] + t)
    return _bisect_survival(m, logu, theta)


def _bisect_survival(m, logu, theta) -> np.ndarray:
    hi = np.ones_like(logu)
    while True:
        short = m.log_survival(hi, theta) > logu
        if not short.any():
            break
        hi = np.where(short, 2.0 * hi, hi)
    lo = np.zeros_like(logu)
    while np.max((hi - lo) / np.maximum(hi, 1.0)) > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        alive = m.log_survival(mid, theta) > logu
        lo, hi = np.where(alive, mid, lo), np.where(alive, hi, mid)
    return 0.5 * (lo + hi)


def system_lifetime(structure: CoherentStructure, x: np.ndarray) -> np.ndarray:
    """``tau`` for rows of component lifetimes ``x`` (shape ``(size, n)``)."""
    x = np.atleast_2d(x)
    if structure.kind == "kofn":
        return np.sort(x, axis=1)[:, structure.n - structure.k]
    return np.max([x[:, [i - 1 for i in sorted(p)]].min(axis=1) for p in structure.path_sets], axis=0)


def sample_theta(env: Environment, rng: np.random.Generator, size: int) -> np.ndarray:
    if env.is_discrete:
        thetas, w = env.rule()
        return thetas[rng.choice(len(thetas), size=size, p=w)]
    return env.dist().ppf(rng.random(size))


def sample_lifetimes(system, rng: np.random.Generator, size: int = 1):
    """Draws of ``(theta, component lifetimes, system lifetime)`` for a ``SystemSpec``."""
    theta = sample_theta(system.environment, rng, size)
    u = sample_copula(system.copula, rng, size)
    u = np.clip(u, np.finfo(float).tiny, 1.0)
    x = np.column_stack([inverse_survival(m, u[:, i], theta) for i, m in enumerate(system.marginals)])
    return theta, x, system_lifetime(system.structure, x)


# -- survival estimates ------------------------------------------------------------------


@dataclass(frozen=True)
class SimulationPlan:
    system: object
    n: int = 200_000
    seed: int = 0
    x_grid: tuple = (0.0, 0.25, 0.5, 1.0, 2.0)
    workers: int = 1

    def __post_init__(self):
        if int(self.n) < MIN_SAMPLES:
            raise OutOfRangeError(f"simulation needs N >= {MIN_SAMPLES}, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x_grid", tuple(float(v) for v in self.x_grid))
        if any(v < 0 for v in self.x_grid):
            raise OutOfRangeError("simulation grid must be nonnegative")


@dataclass(frozen=True)
class SurvivalEstimate:
    x: np.ndarray
    estimate: np.ndarray
    stderr: np.ndarray
    analytic: np.ndarray

    @property
    def z(self) -> np.ndarray:
        diff = np.abs(self.estimate - self.analytic)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = diff / self.stderr
        return np.where(self.stderr > 0, z, np.where(diff > 1e-12, np.inf, 0.0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for row in zip(self.x, self.estimate, self.stderr, self.analytic, self.z):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def _chunk_counts(system, grid: np.ndarray, seed_seq: np.random.SeedSequence, size: int) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    _, _, tau = sample_lifetimes(system, rng, size)
    return (tau[:, None] > grid[None, :]).sum(axis=0)


def estimate_survival(plan: SimulationPlan) -> SurvivalEstimate:
    grid = np.asarray(plan.x_grid)
    sizes = [CHUNK] * (plan.n // CHUNK) + ([plan.n % CHUNK] if plan.n % CHUNK else [])
    children = np.random.SeedSequence(plan.seed).spawn(len(sizes))
    jobs = list(zip(children, sizes))
    if plan.workers > 1:
        with ThreadPoolExecutor(plan.workers) as ex:
            parts = list(ex.map(lambda job: _chunk_counts(plan.system, grid, *job), jobs))
    else:
        parts = [_chunk_counts(plan.system, grid, *job) for job in jobs]
    counts = np.sum(parts, axis=0)
    est = counts / plan.n
    se = np.sqrt(est * (1.0 - est) / plan.n)
    analytic = plan.system.lifetime().survival(grid)
    return SurvivalEstimate(grid, est, se, np.atleast_1d(analytic))
