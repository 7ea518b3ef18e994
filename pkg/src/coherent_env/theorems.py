"""Numerical verification of the comparison theorems and k-out-of-n lemmas.

Every theorem is checked in two independent halves. The sufficient
conditions are checked on grids:

* distortion inequalities over ``p`` in ``(0, 1)^N`` use a scrambled Sobol
  set plus the diagonal;
* "decreasing in each ``p_i``" claims use coordinate sweeps;
* per-``theta`` lifetime hypotheses use order checks at probe values of
  the environment.

The conclusion is checked on the mixed lifetimes themselves. A report is
*sufficient* when some condition set is fully certified. It is
*consistent* unless it is sufficient while the conclusion is violated,
which would be a soundness alarm.

Conventions: both systems are evaluated on one vector ``p`` of length
``max(n, m)``; system 1 reads ``p[:n]`` and system 2 reads ``p[:m]``.
Theorem ids: 3.1-3.6 compare systems in one environment, 4.1-4.6 in two
different environments, and 5.1-5.10 against system 2 in a deterministic
(single-atom) environment.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from . import orders
from .copulas import SurvivalCopula, independence
from .distortions import EPS, DistortionFunction, KofnIndependent, ScalarDistortion, build, iid_profile, kofn_closed_form
from .errors import DimensionMismatchError, IndexConstraintViolatedError, OutOfRangeError
from .lifetimes import ConditionalLifetimeModel, exponential
from .mixtures import Environment, MixedSystemLifetime
from .orders import CERTIFIED, INCONCLUSIVE, VIOLATED, GridSpec, OrderVerdict
from .structures import CoherentStructure, k_out_of_n

P_EPS = 1e-6
ROMAN = ("i", "ii", "iii", "iv", "v", "vi")

SAME_ENV = ("3.1", "3.2", "3.3", "3.4", "3.5", "3.6")
DIFF_ENV = ("4.1", "4.2", "4.3", "4.4", "4.5", "4.6")
ONE_DET = ("5.1", "5.2", "5.3", "5.4", "5.5", "5.6", "5.7", "5.8", "5.9", "5.10")
THEOREMS = SAME_ENV + DIFF_ENV + ONE_DET
# the likelihood-ratio theorem for non-identical components is also known as 5.12
ALIASES = {"5.12": "5.6"}

CONCLUSION = {
    "3.1": "st", "3.2": "hr", "3.3": "rhr", "3.4": "st", "3.5": "hr", "3.6": "rhr",
    "4.1": "st", "4.2": "hr", "4.3": "rhr", "4.4": "st", "4.5": "hr", "4.6": "rhr",
    "5.1": "st", "5.2": "hr", "5.3": "hr", "5.4": "rhr", "5.5": "rhr", "5.6": "lr",
    "5.7": "st", "5.8": "hr", "5.9": "rhr", "5.10": "lr",
}
IID = {"3.4", "3.5", "3.6", "4.4", "4.5", "4.6", "5.7", "5.8", "5.9", "5.10"}


# -- scenario ----------------------------------------------------------------


@dataclass(frozen=True)
class SystemSpec:
    """A coherent system with its copula, component laws and environment."""

    structure: CoherentStructure
    copula: SurvivalCopula
    marginals: tuple
    environment: Environment
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.marginals) != self.structure.n:
            raise DimensionMismatchError(
                f"system {self.name or ''} has {self.structure.n} components but {len(self.marginals)} marginals"
            )
        if self.copula.dim != self.structure.n:
            raise DimensionMismatchError(f"copula dimension {self.copula.dim} != {self.structure.n} components")

    @property
    def n(self) -> int:
        return self.structure.n

    @property
    def identical(self) -> bool:
        return all(m == self.marginals[0] for m in self.marginals)

    def distortion(self):
        """Evaluator of ``h``; k-out-of-n with independence uses the exact count DP."""
        if self.structure.kind == "kofn" and self.copula.family == "independence":
            return KofnIndependent(self.structure.k, self.structure.n)
        return build(self.structure, self.copula)

    def scalar_profile(self) -> ScalarDistortion:
        if self.structure.kind == "kofn" and self.copula.family == "independence":
            return kofn_closed_form(self.structure.k, self.structure.n)
        return iid_profile(build(self.structure, self.copula))

    def lifetime(self, check: bool = True) -> MixedSystemLifetime:
        return MixedSystemLifetime(self.distortion(), self.marginals, self.environment, check)


@dataclass(frozen=True)
class ComparisonScenario:
    """Two systems to compare, plus the grids used to check claims.

    ``env2`` may equal ``env1`` (theorems 3.x), differ (4.x) or be a single
    atom (5.x); the environments live on the systems.
    """

    name: str
    system1: SystemSpec
    system2: SystemSpec
    grid: GridSpec = GridSpec()
    p_points: int = 1000
    sobol_log2: int = 12
    sweep_bases: int = 64
    sweep_steps: int = 128
    theta_probes: int = 5
    seed: int = 20240601
    p_lo: float = P_EPS
    theorems: tuple = ()
    expect_violated: dict = field(default_factory=dict)

    @property
    def env1(self) -> Environment:
        return self.system1.environment

    @property
    def env2(self) -> Environment:
        return self.system2.environment


# -- report model ---------------------------------------------------------------


@dataclass(frozen=True)
class Claim:
    key: str
    text: str
    verdict: OrderVerdict


def _status(claims: Sequence[Claim]) -> str:
    if any(c.verdict.holds == VIOLATED for c in claims):
        return VIOLATED
    if all(c.verdict.holds == CERTIFIED for c in claims):
        return CERTIFIED
    return INCONCLUSIVE


@dataclass(frozen=True)
class Condition:
    """A numbered hypothesis; ``alternatives`` encodes "A or B" statements."""

    cid: str
    label: str
    text: str
    alternatives: tuple

    @property
    def claims(self) -> list[Claim]:
        return [c for alt in self.alternatives for c in alt]

    @property
    def status(self) -> str:
        statuses = [_status(alt) for alt in self.alternatives]
        if CERTIFIED in statuses:
            return CERTIFIED
        if all(s == VIOLATED for s in statuses):
            return VIOLATED
        return INCONCLUSIVE

    def worst(self) -> Claim | None:
        cl = [c for c in self.claims if not np.isnan(c.verdict.margin)]
        return min(cl, key=lambda c: c.verdict.margin) if cl else None


@dataclass(frozen=True)
class TheoremReport:
    theorem: str
    scenario: str
    conditions: tuple
    condition_sets: tuple
    conclusion: OrderVerdict
    notes: tuple = ()

    def condition(self, label: str) -> Condition:
        for c in self.conditions:
            if c.label == label or c.cid == label:
                return c
        raise KeyError(label)

    @property
    def sufficient(self) -> bool:
        status = {c.label: c.status for c in self.conditions}
        return any(all(status[l] == CERTIFIED for l in s) for s in self.condition_sets)

    @property
    def consistent(self) -> bool:
        return not (self.sufficient and self.conclusion.holds == VIOLATED)

    @property
    def violated_conditions(self) -> list[str]:
        return [c.label for c in self.conditions if c.status == VIOLATED]

    def claim_verdicts(self) -> dict[str, str]:
        return {c.key: c.verdict.holds for cond in self.conditions for c in cond.claims}

    def rows(self) -> list[dict]:
        out = []
        for c in self.conditions:
            w = c.worst()
            out.append({
                "theorem": self.theorem,
                "item": c.cid,
                "label": f"({c.label})",
                "verdict": c.status,
                "worst_margin": "" if w is None else f"{w.verdict.margin:.6g}",
                "witness": "" if w is None else f"{w.key}: {w.verdict.witness_text()}",
                "text": c.text,
            })
        cv = self.conclusion
        out.append({
            "theorem": self.theorem,
            "item": "conclusion",
            "label": cv.order,
            "verdict": cv.holds,
            "worst_margin": f"{cv.margin:.6g}",
            "witness": cv.witness_text(),
            "text": f"tau1 <={cv.order} tau2",
        })
        sets = " | ".join("{" + ",".join(s) + "}" for s in self.condition_sets)
        out.append({
            "theorem": self.theorem,
            "item": "summary",
            "label": "sufficient" if self.sufficient else "not-sufficient",
            "verdict": "consistent" if self.consistent else "SOUNDNESS-ALARM",
            "worst_margin": "",
            "witness": ",".join(self.violated_conditions),
            "text": f"condition sets {sets}",
        })
        return out


REPORT_FIELDS = ("theorem", "item", "label", "verdict", "worst_margin", "witness", "text")


def reports_to_csv(reports: Sequence[TheoremReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerows(r.rows())
    return buf.getvalue()


# -- evaluation context ---------------------------------------------------------------


class _Conditional:
    """Law of one component given a fixed environment value."""

    def __init__(self, model: ConditionalLifetimeModel, theta: float):
        self.model, self.theta = model, float(theta)

    def survival(self, x):
        return self.model.survival(x, self.theta)

    def cdf(self, x):
        return self.model.cdf(x, self.theta)

    def density(self, x):
        return self.model.density(x, self.theta)


def _rel(val: np.ndarray, err: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        r = err / np.abs(val)
    return np.where(np.isfinite(r), r, 1.0)


class _Context:
    def __init__(self, s: ComparisonScenario):
        self.s = s
        self.n, self.m = s.system1.n, s.system2.n
        self.N = max(self.n, self.m)
        self.h1 = s.system1.distortion()
        self.h2 = s.system2.distortion()
        self._cache: dict = {}
        self._sample = None
        self._sweeps = None
        self._scalar = {}

    # sample sets -----------------------------------------------------------

    def sample(self) -> np.ndarray:
        if self._sample is None:
            sob = qmc.Sobol(self.N, scramble=True, seed=self.s.seed).random_base2(self.s.sobol_log2)
            lo = self.s.p_lo
            diag = np.linspace(lo, 1 - P_EPS, self.s.p_points)[:, None] * np.ones(self.N)
            self._sample = np.vstack([lo + (1 - P_EPS - lo) * sob, diag])
        return self._sample

    def sweep_bases(self) -> np.ndarray:
        if self._sweeps is None:
            sob = qmc.Sobol(self.N, scramble=True, seed=self.s.seed + 1).random(self.s.sweep_bases)
            self._sweeps = self.s.p_lo + (1 - P_EPS - self.s.p_lo) * sob
        return self._sweeps

    def p_grid(self) -> np.ndarray:
        return np.linspace(self.s.p_lo, 1 - P_EPS, self.s.p_points)

    def scalar(self, which: int) -> ScalarDistortion:
        if which not in self._scalar:
            sys = self.s.system1 if which == 1 else self.s.system2
            self._scalar[which] = sys.scalar_profile()
        return self._scalar[which]

    # multivariate quantities -------------------------------------------------

    def quantity(self, which: int, kind: str, P: np.ndarray):
        """Values and relative errors of a distortion functional at points ``P``.

        ``kind`` is one of ``h``, ``comp``, ``hr`` (grad/h), ``rhr``
        (grad/(1-h)), ``el`` (p grad/h), ``rev`` ((1-p) grad/(1-h)),
        ``el_sum`` and ``rev_sum``. Results on the shared sample are memoised.
        """
        if P is self._sample:
            key = ("q", which, kind)
            if key not in self._cache:
                self._cache[key] = self._quantity(which, kind, P)
            return self._cache[key]
        return self._quantity(which, kind, P)

    def _quantity(self, which: int, kind: str, P: np.ndarray):
        h, d = (self.h1, self.n) if which == 1 else (self.h2, self.m)
        p = P[..., :d]
        if kind == "h":
            v, e = h.eval_err(p)
            return v, _rel(v, e)
        if kind == "comp":
            v, e = h.complement_err(p)
            return v, _rel(v, e)
        g, ge = h.gradient_err(p)
        rg = _rel(g, ge)
        if kind in ("hr", "el", "el_sum"):
            base, be = h.eval_err(p)
            w = p
        else:
            base, be = h.complement_err(p)
            w = 1.0 - p
        rb = _rel(base, be)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            if kind in ("hr", "rhr"):
                return g / base[..., None], rg + rb
            terms = w * g / base[..., None]
        if kind in ("el", "rev"):
            return terms, rg + rb
        total = terms.sum(axis=-1)
        err = (np.abs(terms) * (rg + rb)).sum(axis=-1)
        return total, _rel(total, err)

    # claim builders ----------------------------------------------------------------

    def dominance(self, key: str, text: str, lo: Callable, hi: Callable) -> Claim:
        P = self.sample()
        a, ra = lo(P)
        b, rb = hi(P)
        v = orders.dominance_verdict(P, a, b, self.s.grid.tol, "dominance", relerr=ra + rb)
        return Claim(key, text, v)

    def sweep(self, key: str, text: str, fn: Callable, coords: Sequence[int], direction: str, own: bool) -> Claim:
        """``fn`` monotone in each coordinate of ``coords`` (0-based) along sweeps."""
        bases = self.sweep_bases()
        grid = np.linspace(self.s.p_lo, 1 - P_EPS, self.s.sweep_steps)
        worst, where = np.inf, ()
        for j in coords:
            P = np.repeat(bases[:, None, :], grid.size, axis=1)
            P[:, :, j] = grid
            vals, rel = fn(P)
            if own:
                vals, rel = vals[..., j], rel[..., j]
            steps = orders.monotone_rows(vals, direction, rel)
            b, k = np.unravel_index(np.argmin(steps), steps.shape)
            if steps[b, k] < worst:
                worst = float(steps[b, k])
                where = (f"p{j + 1}", float(grid[k]), float(grid[k + 1]), "at", *[float(v) for v in bases[b]])
        holds = CERTIFIED if worst >= -self.s.grid.tol else VIOLATED
        return Claim(key, text, OrderVerdict("monotone", holds, worst, where))

    def scalar_monotone(self, key: str, text: str, fn: Callable, direction: str, mask: Callable | None = None) -> Claim:
        p = self.p_grid()
        vals, rel = fn(p)
        if mask is not None:
            keep = mask(p)
            p, vals, rel = p[keep], vals[keep], rel[keep]
        return Claim(key, text, orders.monotone_verdict(p, vals, direction, self.s.grid.tol, "monotone", relerr=rel))

    def scalar_dominance(self, key: str, text: str, lo: Callable, hi: Callable) -> Claim:
        p = self.p_grid()
        a, ra = lo(p)
        b, rb = hi(p)
        return Claim(key, text, orders.dominance_verdict(p, a, b, self.s.grid.tol, "dominance", relerr=ra + rb))

    # lifetime hypotheses ----------------------------------------------------------

    def probes(self, *envs: Environment) -> np.ndarray:
        vals = np.concatenate([e.quantile_probes(self.s.theta_probes) for e in envs])
        return np.unique(vals)

    def order_check(self, order: str, a: tuple, b: tuple) -> OrderVerdict:
        key = (order, a, b)
        if key not in self._cache:
            la, lb = _Conditional(*a), _Conditional(*b)
            self._cache[key] = orders.check_order(order, la, lb, self.s.grid)
        return self._cache[key]

    def life_claim(self, key: str, text: str, order: str, pairs: Sequence[tuple]) -> Claim:
        """Worst verdict over a list of ``((model, theta), (model, theta))`` pairs."""
        worst, wit = None, ()
        for a, b in pairs:
            v = self.order_check(order, a, b)
            if worst is None or v.holds == VIOLATED and worst.holds != VIOLATED or (
                (v.holds == VIOLATED) == (worst.holds == VIOLATED) and v.margin < worst.margin
            ):
                worst, wit = v, (f"theta={a[1]:g}|{b[1]:g}", *v.witness)
        if worst is None:
            return Claim(key, text, OrderVerdict(order, CERTIFIED, 0.0, (), "vacuous"))
        holds = worst.holds
        if holds == CERTIFIED and any(self.order_check(order, a, b).holds == INCONCLUSIVE for a, b in pairs):
            holds = INCONCLUSIVE
        return Claim(key, text, OrderVerdict(order, holds, worst.margin, wit, worst.note))


def _pairs(ts: np.ndarray):
    return [(float(a), float(b)) for a, b in combinations(ts, 2)]


# -- shared condition builders -------------------------------------------------------------


def _cond(cid: int, label: str, text: str, *alternatives) -> Condition:
    return Condition(f"C{cid}", label, text, tuple(tuple(a) for a in alternatives))


def _theta_monotone(ctx: _Context, who: str, order: str, direction: str, ts, idx: Sequence[int]) -> list[Claim]:
    """``W_i(t1) <=order W_i(t2)`` (increasing) or reversed, for ``t1 <= t2``."""
    sys = ctx.s.system1 if who == "X" else ctx.s.system2
    claims = []
    for i in idx:
        mdl = sys.marginals[i]
        if direction == "increasing":
            pairs = [((mdl, a), (mdl, b)) for a, b in _pairs(ts)]
            key = f"{who}{i + 1}(t1)<={order} {who}{i + 1}(t2)"
        else:
            pairs = [((mdl, b), (mdl, a)) for a, b in _pairs(ts)]
            key = f"{who}{i + 1}(t2)<={order} {who}{i + 1}(t1)"
        claims.append(ctx.life_claim(key, f"{key} for t1<=t2", order, pairs))
    return claims


def _same_theta(ctx: _Context, order: str, ts, idx: Sequence[int]) -> list[Claim]:
    """``X_j(t) <=order Y_j(t)`` at every probe ``t``."""
    out = []
    for j in idx:
        a, b = ctx.s.system1.marginals[j], ctx.s.system2.marginals[j]
        key = f"X{j + 1}(t)<={order} Y{j + 1}(t)"
        out.append(ctx.life_claim(key, key, order, [((a, t), (b, t)) for t in ts]))
    return out


def _fixed_y(ctx: _Context, order: str, ts, pairs_idx: Sequence[tuple]) -> list[Claim]:
    """``X_i(t) <=order Y_j`` with ``Y`` in its deterministic environment."""
    theta0 = ctx.s.env2.atoms[0][0]
    out = []
    for i, j in pairs_idx:
        a, b = ctx.s.system1.marginals[i], ctx.s.system2.marginals[j]
        key = f"X{i + 1}(t)<={order} Y{j + 1}"
        out.append(ctx.life_claim(key, key, order, [((a, t), (b, theta0)) for t in ts]))
    return out


def _env_claim(ctx: _Context, order: str) -> Claim:
    v = orders.check_environment_order(order, ctx.s.env1, ctx.s.env2, ctx.s.grid.tol)
    key = f"Theta1<={order} Theta2"
    return Claim(key, key, v)


# distortion claims (multivariate)


def _dist_le(ctx, kind1, kind2, idx=None, flip=False, key="", text=""):
    """``q1 <= q2`` (or ``>=`` with ``flip``) for quantity kinds of h1 and h2."""
    claims = []
    if idx is None:
        lo = lambda P: ctx.quantity(1, kind1, P)
        hi = lambda P: ctx.quantity(2, kind2, P)
        if flip:
            lo, hi = hi, lo
        return [ctx.dominance(key, text, lo, hi)]
    for i in idx:
        def f1(P, i=i):
            v, r = ctx.quantity(1, kind1, P)
            return v[..., i], r[..., i]

        def f2(P, i=i):
            v, r = ctx.quantity(2, kind2, P)
            return v[..., i], r[..., i]

        lo, hi = (f2, f1) if flip else (f1, f2)
        claims.append(ctx.dominance(f"{key}[{i + 1}]", f"{text}, i={i + 1}", lo, hi))
    return claims


def _own_sweep(ctx, which, kind, idx, direction, tag):
    fn = lambda P: ctx.quantity(which, kind, P)
    return [ctx.sweep(f"{tag}[{i + 1}]", f"{tag} {direction} in p{i + 1}", fn, [i], direction, own=True) for i in idx]


def _all_sweep(ctx, which, kind, coords, direction, tag):
    fn = lambda P: ctx.quantity(which, kind, P)
    return [ctx.sweep(tag, f"{tag} {direction} in every p_i", fn, list(coords), direction, own=False)]


# scalar (iid) quantities


def _sq(ctx, which, name):
    """Scalar functional of h_which on a p-grid: values and relative errors."""
    sd = ctx.scalar(which)

    def f(p):
        h, he = sd(p), sd.error("value", p)
        c, ce = sd.complement(p), sd.error("comp", p)
        d1, d1e = sd.prime(p), sd.error("d1", p)
        rh, rc, rd = _rel(h, he), _rel(c, ce), _rel(d1, d1e)
        with np.errstate(divide="ignore", invalid="ignore"):
            if name == "h":
                return h, rh
            if name == "comp":
                return c, rc
            if name == "d1":
                return d1, rd
            if name == "eta":
                return p * d1 / h, rd + rh + EPS
            if name == "rho":
                return (1 - p) * d1 / c, rd + rc + EPS
            d2, d2e = sd.second(p), sd.error("d2", p)
            r2 = _rel(d2, d2e)
            if name == "kappa":
                return p * d2 / d1, r2 + rd + EPS
            if name == "kappa_bar":
                return (1 - p) * d2 / d1, r2 + rd + EPS
            if name == "d2":
                return d2, r2
        raise ValueError(name)

    return f


def _ratio(f, g):
    def r(p):
        a, ra = f(p)
        b, rb = g(p)
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b, ra + rb
    return r


def inflection_claims(ctx_or_grid, sd: ScalarDistortion, tag: str, tol: float = orders.DEFAULT_TOL):
    """Claims "kappa decreasing-positive below mu, kappa_bar decreasing-negative above".

    ``mu`` is located as the sign change of ``h''`` on the grid (0 or 1 when
    ``h''`` keeps one sign). Returns ``(claims, mu_hat)``.
    """
    p = ctx_or_grid.p_grid() if isinstance(ctx_or_grid, _Context) else np.asarray(ctx_or_grid)
    d2 = sd.second(p)
    d2e = sd.error("d2", p)
    sign = np.where(np.abs(d2) <= d2e, 0, np.sign(d2))
    pos = np.flatnonzero(sign > 0)
    neg = np.flatnonzero(sign < 0)
    if neg.size == 0:
        mu = 1.0
    elif pos.size == 0:
        mu = 0.0
    else:
        lo, hi = pos.max(), neg.min()
        mu = 0.5 * (p[lo] + p[hi]) if lo < hi else float("nan")
    claims = []
    d1 = sd.prime(p)
    r1 = _rel(d1, sd.error("d1", p))
    r2 = _rel(d2, d2e)
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = p * d2 / d1
        kbar = (1 - p) * d2 / d1
    rel = r1 + r2 + EPS
    if np.isnan(mu):
        v = OrderVerdict("sign", VIOLATED, -1.0, (float(p[neg.min()]), float(p[pos.max()])), "h'' changes sign more than once")
        return [Claim(f"{tag}:single-sign-change", "h'' has a single sign change", v)], mu
    below, above = p < mu, p > mu
    claims.append(Claim(f"{tag}:kappa-dec", f"p h''/h' decreasing on (0, mu) of {tag}",
                        orders.monotone_verdict(p[below], kappa[below], "decreasing", tol, "monotone", relerr=rel[below])
                        if below.sum() >= 2 else OrderVerdict("monotone", CERTIFIED, 0.0, (), "vacuous")))
    claims.append(Claim(f"{tag}:kappa-pos", f"p h''/h' positive on (0, mu) of {tag}", _sign_verdict(p[below], d2[below], d2e[below], +1)))
    claims.append(Claim(f"{tag}:kappa_bar-dec", f"(1-p) h''/h' decreasing on (mu, 1) of {tag}",
                        orders.monotone_verdict(p[above], kbar[above], "decreasing", tol, "monotone", relerr=rel[above])
                        if above.sum() >= 2 else OrderVerdict("monotone", CERTIFIED, 0.0, (), "vacuous")))
    claims.append(Claim(f"{tag}:kappa_bar-neg", f"(1-p) h''/h' negative on (mu, 1) of {tag}", _sign_verdict(p[above], d2[above], d2e[above], -1)))
    return claims, mu


def _sign_verdict(p, vals, errs, sign) -> OrderVerdict:
    if vals.size == 0:
        return OrderVerdict("sign", CERTIFIED, 0.0, (), "vacuous")
    s = sign * vals
    bad = s < -errs
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        return OrderVerdict("sign", VIOLATED, float(s[k]), (float(p[k]),))
    k = int(np.argmin(s))
    return OrderVerdict("sign", CERTIFIED, float(s[k]), (float(p[k]),))


# -- theorem definitions --------------------------------------------------------------


def _require(cond: bool, msg: str):
    if not cond:
        raise DimensionMismatchError(msg)


def _conditions(thm: str, ctx: _Context):
    """Conditions and condition sets of one theorem."""
    s, n, m = ctx.s, ctx.n, ctx.m
    mn = min(n, m)
    sec = thm.split(".")[0]
    base = thm if sec != "4" else "3." + thm.split(".")[1]
    ts = ctx.probes(s.env1) if sec in ("3", "5") else ctx.probes(s.env1, s.env2)
    if sec == "5":
        return _conditions_5(thm, ctx, ts)

    if base == "3.1":
        c1 = _cond(1, "i", "h1(p) <= h2(p)", _dist_le(ctx, "h", "h", key="h1<=h2", text="h1(p) <= h2(p)"))
        if sec == "3":
            c2 = _cond(2, "ii", "X_i(t) <=st Y_i(t), i <= min(n,m)", _same_theta(ctx, "st", ts, range(mn)))
            return [c1, c2], [("i", "ii")]
        c2 = _cond(2, "ii", "X_i st-increasing in theta and X_j(t) <=st Y_j(t)",
                   _theta_monotone(ctx, "X", "st", "increasing", ts, range(n)) + _same_theta(ctx, "st", ts, range(mn)))
        c3 = _cond(3, "iii", "Y_i st-increasing in theta and X_j(t) <=st Y_j(t)",
                   _theta_monotone(ctx, "Y", "st", "increasing", ts, range(m)) + _same_theta(ctx, "st", ts, range(mn)))
        c4 = _cond(4, "iv", "Theta1 <=st Theta2", [_env_claim(ctx, "st")])
        return [c1, c2, c3, c4], [("i", "ii", "iv"), ("i", "iii", "iv")]

    if base == "3.2":
        _require(n >= m, f"theorem {thm} needs n >= m, got n={n}, m={m}")
        c1 = _cond(1, "i", "(1/h1) dh1/dp_i >= (1/h2) dh2/dp_i, i <= m",
                   _dist_le(ctx, "hr", "hr", idx=range(m), flip=True, key="grad/h", text="(1/h1)dh1/dp_i >= (1/h2)dh2/dp_i"))
        c2 = _cond(2, "ii", "(p_i/h2) dh2/dp_i decreasing in p_i, i <= m", _own_sweep(ctx, 2, "el", range(m), "decreasing", "p_i/h2 dh2/dp_i"))
        c3 = _cond(3, "iii", "X increasing, X(t) <=hr Y(t), Y decreasing (hr)",
                   _theta_monotone(ctx, "X", "hr", "increasing", ts, range(n)) + _same_theta(ctx, "hr", ts, range(m))
                   + _theta_monotone(ctx, "Y", "hr", "decreasing", ts, range(m)))
        c4 = _cond(4, "iv", "X decreasing, X(t) <=hr Y(t), Y increasing (hr)",
                   _theta_monotone(ctx, "X", "hr", "decreasing", ts, range(n)) + _same_theta(ctx, "hr", ts, range(m))
                   + _theta_monotone(ctx, "Y", "hr", "increasing", ts, range(m)))
        conds, sets = [c1, c2, c3, c4], [("i", "ii", "iii"), ("i", "ii", "iv")]
        return _with_env(ctx, sec, conds, sets, "hr")

    if base == "3.3":
        _require(m >= n, f"theorem {thm} needs m >= n, got n={n}, m={m}")
        c1 = _cond(1, "i", "(1/(1-h1)) dh1/dp_i <= (1/(1-h2)) dh2/dp_i, i <= n",
                   _dist_le(ctx, "rhr", "rhr", idx=range(n), key="grad/(1-h)", text="(1/(1-h1))dh1/dp_i <= (1/(1-h2))dh2/dp_i"))
        c2 = _cond(2, "ii", "((1-p_i)/(1-h1)) dh1/dp_i increasing in p_i, i <= n",
                   _own_sweep(ctx, 1, "rev", range(n), "increasing", "(1-p_i)/(1-h1) dh1/dp_i"))
        c3 = _cond(3, "iii", "X increasing, X(t) <=rhr Y(t), Y decreasing (rhr)",
                   _theta_monotone(ctx, "X", "rhr", "increasing", ts, range(n)) + _same_theta(ctx, "rhr", ts, range(n))
                   + _theta_monotone(ctx, "Y", "rhr", "decreasing", ts, range(m)))
        c4 = _cond(4, "iv", "X decreasing, X(t) <=rhr Y(t), Y increasing (rhr)",
                   _theta_monotone(ctx, "X", "rhr", "decreasing", ts, range(n)) + _same_theta(ctx, "rhr", ts, range(n))
                   + _theta_monotone(ctx, "Y", "rhr", "increasing", ts, range(m)))
        return _with_env(ctx, sec, [c1, c2, c3, c4], [("i", "ii", "iii"), ("i", "ii", "iv")], "rhr")

    h1, h2 = _sq(ctx, 1, "h"), _sq(ctx, 2, "h")
    if base == "3.4":
        c1 = _cond(1, "i", "h1(p) <= h2(p)", [ctx.scalar_dominance("iid:h1<=h2", "h1(p) <= h2(p)", h1, h2)])
        if sec == "3":
            c2 = _cond(2, "ii", "X1(t) <=st Y1(t)", _same_theta(ctx, "st", ts, [0]))
            return [c1, c2], [("i", "ii")]
        c2 = _cond(2, "ii", "X1 st-increasing in theta and X1(t) <=st Y1(t)",
                   _theta_monotone(ctx, "X", "st", "increasing", ts, [0]) + _same_theta(ctx, "st", ts, [0]))
        c3 = _cond(3, "iii", "Y1 st-increasing in theta and X1(t) <=st Y1(t)",
                   _theta_monotone(ctx, "Y", "st", "increasing", ts, [0]) + _same_theta(ctx, "st", ts, [0]))
        c4 = _cond(4, "iv", "Theta1 <=st Theta2", [_env_claim(ctx, "st")])
        return [c1, c2, c3, c4], [("i", "ii", "iv"), ("i", "iii", "iv")]

    if base == "3.5":
        c1 = _cond(1, "i", "h1/h2 increasing", [ctx.scalar_monotone("iid:h1/h2-inc", "h1(p)/h2(p) increasing", _ratio(h1, h2), "increasing")])
        c2 = _cond(2, "ii", "p h2'/h2 decreasing", [ctx.scalar_monotone("iid:eta2-dec", "p h2'/h2 decreasing", _sq(ctx, 2, "eta"), "decreasing")])
        c3 = _cond(3, "iii", "X1(t1) <=hr X1(t2) <=hr Y1(t2) <=hr Y1(t1)",
                   _theta_monotone(ctx, "X", "hr", "increasing", ts, [0]) + _same_theta(ctx, "hr", ts, [0])
                   + _theta_monotone(ctx, "Y", "hr", "decreasing", ts, [0]))
        c4 = _cond(4, "iv", "X1(t2) <=hr X1(t1) <=hr Y1(t1) <=hr Y1(t2)",
                   _theta_monotone(ctx, "X", "hr", "decreasing", ts, [0]) + _same_theta(ctx, "hr", ts, [0])
                   + _theta_monotone(ctx, "Y", "hr", "increasing", ts, [0]))
        return _with_env(ctx, sec, [c1, c2, c3, c4], [("i", "ii", "iii"), ("i", "ii", "iv")], "hr")

    if base == "3.6":
        c1 = _cond(1, "i", "(1-h1)/(1-h2) increasing",
                   [ctx.scalar_monotone("iid:(1-h1)/(1-h2)-inc", "(1-h1)/(1-h2) increasing", _ratio(_sq(ctx, 1, "comp"), _sq(ctx, 2, "comp")), "increasing")])
        c2 = _cond(2, "ii", "(1-p) h1'/(1-h1) increasing",
                   [ctx.scalar_monotone("iid:rho1-inc", "(1-p) h1'/(1-h1) increasing", _sq(ctx, 1, "rho"), "increasing")])
        c3 = _cond(3, "iii", "X1(t1) <=rhr X1(t2) <=rhr Y1(t2) <=rhr Y1(t1)",
                   _theta_monotone(ctx, "X", "rhr", "increasing", ts, [0]) + _same_theta(ctx, "rhr", ts, [0])
                   + _theta_monotone(ctx, "Y", "rhr", "decreasing", ts, [0]))
        c4 = _cond(4, "iv", "X1(t2) <=rhr X1(t1) <=rhr Y1(t1) <=rhr Y1(t2)",
                   _theta_monotone(ctx, "X", "rhr", "decreasing", ts, [0]) + _same_theta(ctx, "rhr", ts, [0])
                   + _theta_monotone(ctx, "Y", "rhr", "increasing", ts, [0]))
        return _with_env(ctx, sec, [c1, c2, c3, c4], [("i", "ii", "iii"), ("i", "ii", "iv")], "rhr")
    raise OutOfRangeError(f"unknown theorem {thm}")


def _with_env(ctx, sec, conds, sets, order):
    if sec == "3":
        return conds, sets
    conds = conds + [_cond(len(conds) + 1, "v", f"Theta1 <={order} Theta2", [_env_claim(ctx, order)])]
    return conds, [tuple(s) + ("v",) for s in sets]


def _conditions_5(thm: str, ctx: _Context, ts):
    n, m = ctx.n, ctx.m
    mn = min(n, m)
    allpairs = [(i, j) for i in range(n) for j in range(m)]
    if thm == "5.1":
        c1 = _cond(1, "i", "h1(p) <= h2(p)", _dist_le(ctx, "h", "h", key="h1<=h2", text="h1(p) <= h2(p)"))
        c2 = _cond(2, "ii", "X_i(t) <=st Y_i, i <= min(n,m)", _fixed_y(ctx, "st", ts, [(i, i) for i in range(mn)]))
        return [c1, c2], [("i", "ii")]
    if thm == "5.2":
        c1 = _cond(1, "i", "sum (p_i/h1) dh1/dp_i >= sum (p_i/h2) dh2/dp_i",
                   _dist_le(ctx, "el_sum", "el_sum", flip=True, key="sum-el", text="sum elasticities of h1 >= of h2"))
        c2 = _cond(2, "ii", "sum (p_i/h1) dh1/dp_i decreasing in each p_i", _all_sweep(ctx, 1, "el_sum", range(n), "decreasing", "sum-el h1"))
        c3 = _cond(3, "iii", "sum (p_i/h2) dh2/dp_i decreasing in each p_i", _all_sweep(ctx, 2, "el_sum", range(m), "decreasing", "sum-el h2"))
        c4 = _cond(4, "iv", "X_i(t) <=hr Y_j for all i, j", _fixed_y(ctx, "hr", ts, allpairs))
        return [c1, c2, c3, c4], [("i", "ii", "iv"), ("i", "iii", "iv")]
    if thm == "5.3":
        _require(n >= m, f"theorem {thm} needs n >= m, got n={n}, m={m}")
        c1 = _cond(1, "i", "(p_i/h1) dh1/dp_i >= (p_i/h2) dh2/dp_i, i <= m",
                   _dist_le(ctx, "el", "el", idx=range(m), flip=True, key="el", text="p_i/h1 dh1/dp_i >= p_i/h2 dh2/dp_i"))
        c2 = _cond(2, "ii", "(p_i/h1) dh1/dp_i or (p_i/h2) dh2/dp_i decreasing in p_i",
                   _own_sweep(ctx, 1, "el", range(m), "decreasing", "p_i/h1 dh1/dp_i"),
                   _own_sweep(ctx, 2, "el", range(m), "decreasing", "p_i/h2 dh2/dp_i"))
        c3 = _cond(3, "iii", "X_i(t) <=hr Y_i, i <= m", _fixed_y(ctx, "hr", ts, [(i, i) for i in range(m)]))
        return [c1, c2, c3], [("i", "ii", "iii")]
    if thm == "5.4":
        c1 = _cond(1, "i", "sum ((1-p_i)/(1-h1)) dh1/dp_i <= sum ((1-p_i)/(1-h2)) dh2/dp_i",
                   _dist_le(ctx, "rev_sum", "rev_sum", key="sum-rev", text="sum reversed elasticities of h1 <= of h2"))
        c2 = _cond(2, "ii", "sum ((1-p_i)/(1-h1)) dh1/dp_i increasing in each p_i", _all_sweep(ctx, 1, "rev_sum", range(n), "increasing", "sum-rev h1"))
        c3 = _cond(3, "iii", "sum ((1-p_i)/(1-h2)) dh2/dp_i increasing in each p_i", _all_sweep(ctx, 2, "rev_sum", range(m), "increasing", "sum-rev h2"))
        c4 = _cond(4, "iv", "X_i(t) <=rhr Y_j for all i, j", _fixed_y(ctx, "rhr", ts, allpairs))
        return [c1, c2, c3, c4], [("i", "ii", "iv"), ("i", "iii", "iv")]
    if thm == "5.5":
        _require(m >= n, f"theorem {thm} needs m >= n, got n={n}, m={m}")
        c1 = _cond(1, "i", "((1-p_i)/(1-h1)) dh1/dp_i <= ((1-p_i)/(1-h2)) dh2/dp_i, i <= n",
                   _dist_le(ctx, "rev", "rev", idx=range(n), key="rev", text="(1-p_i)/(1-h1) dh1/dp_i <= (1-p_i)/(1-h2) dh2/dp_i"))
        c2 = _cond(2, "ii", "((1-p_i)/(1-h1)) dh1/dp_i or ((1-p_i)/(1-h2)) dh2/dp_i increasing in p_i",
                   _own_sweep(ctx, 1, "rev", range(n), "increasing", "(1-p_i)/(1-h1) dh1/dp_i"),
                   _own_sweep(ctx, 2, "rev", range(n), "increasing", "(1-p_i)/(1-h2) dh2/dp_i"))
        c3 = _cond(3, "iii", "X_i(t) <=rhr Y_i, i <= n", _fixed_y(ctx, "rhr", ts, [(i, i) for i in range(n)]))
        return [c1, c2, c3], [("i", "ii", "iii")]
    if thm == "5.6":
        c1 = _cond(1, "i", "(dh2/dq_j)/(dh1/dp_i) increasing in x for every theta", _lr_ratio_claims(ctx, ts))
        c2 = _cond(2, "ii", "X_i(t) <=lr Y_j for all i, j", _fixed_y(ctx, "lr", ts, allpairs))
        return [c1, c2], [("i", "ii")]

    h1, h2 = _sq(ctx, 1, "h"), _sq(ctx, 2, "h")
    if thm == "5.7":
        c1 = _cond(1, "i", "h1(p) <= h2(p)", [ctx.scalar_dominance("iid:h1<=h2", "h1(p) <= h2(p)", h1, h2)])
        c2 = _cond(2, "ii", "X1(t) <=st Y1", _fixed_y(ctx, "st", ts, [(0, 0)]))
        return [c1, c2], [("i", "ii")]
    if thm == "5.8":
        c1 = _cond(1, "i", "h1/h2 increasing", [ctx.scalar_monotone("iid:h1/h2-inc", "h1(p)/h2(p) increasing", _ratio(h1, h2), "increasing")])
        c2 = _cond(2, "ii", "p h1'/h1 or p h2'/h2 decreasing",
                   [ctx.scalar_monotone("iid:eta1-dec", "p h1'/h1 decreasing", _sq(ctx, 1, "eta"), "decreasing")],
                   [ctx.scalar_monotone("iid:eta2-dec", "p h2'/h2 decreasing", _sq(ctx, 2, "eta"), "decreasing")])
        c3 = _cond(3, "iii", "X1(t) <=hr Y1", _fixed_y(ctx, "hr", ts, [(0, 0)]))
        return [c1, c2, c3], [("i", "ii", "iii")]
    if thm == "5.9":
        c1 = _cond(1, "i", "(1-h1)/(1-h2) increasing",
                   [ctx.scalar_monotone("iid:(1-h1)/(1-h2)-inc", "(1-h1)/(1-h2) increasing", _ratio(_sq(ctx, 1, "comp"), _sq(ctx, 2, "comp")), "increasing")])
        c2 = _cond(2, "ii", "(1-p) h1'/(1-h1) or (1-p) h2'/(1-h2) increasing",
                   [ctx.scalar_monotone("iid:rho1-inc", "(1-p) h1'/(1-h1) increasing", _sq(ctx, 1, "rho"), "increasing")],
                   [ctx.scalar_monotone("iid:rho2-inc", "(1-p) h2'/(1-h2) increasing", _sq(ctx, 2, "rho"), "increasing")])
        c3 = _cond(3, "iii", "X1(t) <=rhr Y1", _fixed_y(ctx, "rhr", ts, [(0, 0)]))
        return [c1, c2, c3], [("i", "ii", "iii")]
    if thm == "5.10":
        c1 = _cond(1, "i", "h1'/h2' increasing",
                   [ctx.scalar_monotone("iid:h1'/h2'-inc", "h1'(p)/h2'(p) increasing", _ratio(_sq(ctx, 1, "d1"), _sq(ctx, 2, "d1")), "increasing")])
        alt1, _ = inflection_claims(ctx, ctx.scalar(1), "h1")
        alt2, _ = inflection_claims(ctx, ctx.scalar(2), "h2")
        c2 = _cond(2, "ii", "for k=1 or 2: kappa_k decreasing-positive below mu, kappa_bar_k decreasing-negative above", alt1, alt2)
        c3 = _cond(3, "iii", "X1(t) <=lr Y1", _fixed_y(ctx, "lr", ts, [(0, 0)]))
        return [c1, c2, c3], [("i", "ii", "iii")]
    raise OutOfRangeError(f"unknown theorem {thm}")


def _lr_ratio_claims(ctx: _Context, ts) -> list[Claim]:
    """``(dh2/dq_j)(q(x)) / (dh1/dp_i)(p(x|t))`` increasing in ``x`` for each probe ``t``."""
    s = ctx.s
    xs = s.grid.ratio_points()
    theta0 = s.env2.atoms[0][0]
    tiny, top = np.finfo(float).tiny, np.nextafter(1.0, 0.0)
    q = np.stack([mdl.survival(xs, theta0) for mdl in s.system2.marginals], axis=-1)
    g2, g2e = ctx.h2.gradient_err(np.clip(q, tiny, top))
    claims = []
    for i in range(ctx.n):
        for j in range(ctx.m):
            worst = None
            for t in ts:
                p = np.stack([mdl.survival(xs, t) for mdl in s.system1.marginals], axis=-1)
                g1, g1e = ctx.h1.gradient_err(np.clip(p, tiny, top))
                num, den = g2[:, j], g1[:, i]
                ok = (np.abs(num) > orders.RATIO_FLOOR) & (np.abs(den) > orders.RATIO_FLOOR)
                rel = _rel(num, g2e[:, j]) + _rel(den, g1e[:, i])
                v = orders.monotone_verdict(xs[ok], num[ok] / den[ok], "increasing", s.grid.tol, "monotone", relerr=rel[ok])
                if worst is None or v.margin < worst[0].margin:
                    worst = (v, t)
            v, t = worst
            key = f"dh2/dq{j + 1} / dh1/dp{i + 1} inc in x"
            claims.append(Claim(key, key, OrderVerdict(v.order, v.holds, v.margin, (f"theta={t:g}", *v.witness), v.note)))
    return claims


# -- entry points ---------------------------------------------------------------------


def normalize_theorem(thm: str) -> str:
    t = ALIASES.get(str(thm).strip(), str(thm).strip())
    if t not in THEOREMS:
        raise OutOfRangeError(f"unknown theorem id {thm!r}; expected one of {', '.join(THEOREMS)}")
    return t


def _verify(s: ComparisonScenario, thm: str, group: str) -> TheoremReport:
    thm = normalize_theorem(thm)
    if thm.split(".")[0] != group:
        raise OutOfRangeError(f"theorem {thm} is not one of the {group}.x theorems")
    if thm in IID and not (s.system1.identical and s.system2.identical):
        raise DimensionMismatchError(f"theorem {thm} needs identical components within each system")
    _check_window(s)
    ctx = _Context(s)
    conds, sets = _conditions(thm, ctx)
    order = CONCLUSION[thm]
    conclusion = orders.check_order(order, s.system1.lifetime(), s.system2.lifetime(), s.grid)
    return TheoremReport(thm, s.name, tuple(conds), tuple(tuple(x) for x in sets), conclusion)


def _check_window(s: ComparisonScenario) -> None:
    """With ``p_lo`` above the default, every component survival on the window must stay above it."""
    if s.p_lo == P_EPS:
        return
    if not P_EPS < s.p_lo < 1:
        raise OutOfRangeError(f"p_lo must lie in [{P_EPS:g}, 1), got {s.p_lo:g}")
    x_hi = s.grid.x_hi
    for sys in (s.system1, s.system2):
        theta, _ = sys.environment.rule()
        for mdl in sys.marginals:
            low = float(np.min(mdl.survival(x_hi, theta)))
            if low < s.p_lo:
                raise OutOfRangeError(
                    f"p_lo={s.p_lo:g} but a component survival drops to {low:.3g} at x={x_hi:g}; shrink the window"
                )


def verify_same_env(s: ComparisonScenario, thm: str) -> TheoremReport:
    if s.env1 != s.env2:
        raise OutOfRangeError("theorems 3.x need both systems in the same environment")
    return _verify(s, thm, "3")


def verify_diff_env(s: ComparisonScenario, thm: str) -> TheoremReport:
    return _verify(s, thm, "4")


def verify_one_deterministic(s: ComparisonScenario, thm: str) -> TheoremReport:
    if not s.env2.is_degenerate:
        raise OutOfRangeError("theorems 5.x need system 2 in a deterministic (single-atom) environment")
    return _verify(s, thm, "5")


def verify(s: ComparisonScenario, thm: str) -> TheoremReport:
    thm = normalize_theorem(thm)
    sec = thm.split(".")[0]
    return {"3": verify_same_env, "4": verify_diff_env, "5": verify_one_deterministic}[sec](s, thm)


# -- k-out-of-n lemmas -----------------------------------------------------------------------


@dataclass(frozen=True)
class LemmaRow:
    claim: str
    verdict: OrderVerdict
    mu_hat: float = float("nan")
    mu: float = float("nan")


@dataclass(frozen=True)
class LemmaReport:
    k: int
    n: int
    l: int
    m: int
    rows: tuple

    @property
    def all_certified(self) -> bool:
        return all(r.verdict.certified for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "n", "l", "m", "claim", "verdict", "worst_margin", "witness", "mu_hat", "mu"])
        for r in self.rows:
            w.writerow([
                self.k, self.n, self.l, self.m, r.claim, r.verdict.holds, f"{r.verdict.margin:.6g}",
                r.verdict.witness_text(),
                "" if np.isnan(r.mu_hat) else f"{r.mu_hat:.6g}",
                "" if np.isnan(r.mu) else f"{r.mu:.6g}",
            ])
        return buf.getvalue()


def check_lemma_indices(k: int, n: int, l: int, m: int) -> None:
    if not (1 <= k <= n and 1 <= l <= m):
        raise IndexConstraintViolatedError(f"need 1 <= k <= n and 1 <= l <= m, got k={k}, n={n}, l={l}, m={m}")
    if l > k:
        raise IndexConstraintViolatedError(f"lemmas need l <= k, got l={l}, k={k}")
    if n - k > m - l:
        raise IndexConstraintViolatedError(f"lemmas need n-k <= m-l, got n-k={n - k}, m-l={m - l}")


def _kofn_scenario(k, n, l, m, p_points, sweep_steps, sobol_log2, seed) -> ComparisonScenario:
    env = Environment("discrete", atoms=((1.0, 1.0),))
    lt = ConditionalLifetimeModel(exponential(1.0))
    s1 = SystemSpec(k_out_of_n(k, n), independence(n), (lt,) * n, env)
    s2 = SystemSpec(k_out_of_n(l, m), independence(m), (lt,) * m, env)
    return ComparisonScenario(f"kofn({k},{n};{l},{m})", s1, s2, GridSpec(0.0, 5.0, 200), p_points=p_points,
                              sweep_steps=sweep_steps, sobol_log2=sobol_log2, seed=seed)


def _lemma_marginals(n: int, m: int):
    """An lr-ordered pair of component families: every ``Z_i <=lr W_j``."""
    z = [ConditionalLifetimeModel(exponential(2.0 + 0.25 * i)) for i in range(n)]
    w = [ConditionalLifetimeModel(exponential(1.0 / (1.0 + 0.2 * j))) for j in range(m)]
    return z, w


LEMMA_PARTS = ("2.2", "2.3", "2.4", "2.5", "2.6")


def certify_kofn_lemmas(
    k: int, n: int, l: int, m: int, p_points: int = 1000, sweep_steps: int = 128, sobol_log2: int = 12,
    seed: int = 20240601, parts: Sequence[str] = LEMMA_PARTS,
) -> LemmaReport:
    """Certify the k-out-of-n lemma claims for ``h_{k:n}`` against ``h_{l:m}``.

    ``parts`` selects lemma groups by number; all of them by default.
    """
    check_lemma_indices(k, n, l, m)
    unknown = set(parts) - set(LEMMA_PARTS)
    if unknown:
        raise OutOfRangeError(f"unknown lemma part(s) {sorted(unknown)}; expected some of {LEMMA_PARTS}")
    ctx = _Context(_kofn_scenario(k, n, l, m, p_points, sweep_steps, sobol_log2, seed))
    rows: list[LemmaRow] = []

    def add(claim: Claim, mu_hat=float("nan"), mu=float("nan")):
        rows.append(LemmaRow(claim.key, claim.verdict, mu_hat, mu))

    for which, (kk, nn) in ((1, (k, n)), (2, (l, m))):
        if "2.2" not in parts:
            break
        tag = f"h{kk}:{nn}"
        add(ctx.scalar_monotone(f"2.2(i) {tag}: p h'/h decreasing", "", _sq(ctx, which, "eta"), "decreasing"))
        add(ctx.scalar_monotone(f"2.2(ii) {tag}: (1-p) h'/(1-h) increasing", "", _sq(ctx, which, "rho"), "increasing"))
        if nn > 1:
            claims, mu_hat = inflection_claims(ctx, ctx.scalar(which), tag)
            mu = (kk - 1) / (nn - 1)
            for c in claims:
                add(Claim(f"2.2(iii) {c.key}", c.text, c.verdict), mu_hat, mu)
            step = ctx.p_grid()[1] - ctx.p_grid()[0]
            ok = abs(mu_hat - mu) <= step
            v = OrderVerdict("location", CERTIFIED if ok else VIOLATED, float(step - abs(mu_hat - mu)), (mu_hat, mu))
            add(Claim(f"2.2(iii) {tag}: sign change of h'' at mu", "", v), mu_hat, mu)

    if "2.3" in parts:
        _lemma23(ctx, add)
    if "2.4" in parts:
        for which, (kk, nn) in ((1, (k, n)), (2, (l, m))):
            tag = f"h{kk}:{nn}"
            add(_all_sweep(ctx, which, "el_sum", range(nn), "decreasing", f"2.4(i) {tag}: sum elasticities decreasing")[0])
            add(_all_sweep(ctx, which, "rev_sum", range(nn), "increasing", f"2.4(ii) {tag}: sum reversed elasticities increasing")[0])
    if "2.5" in parts:
        _lemma25(ctx, add, min(n, m))
    if "2.6" in parts:
        _lemma26(k, n, l, m, add)
    return LemmaReport(k, n, l, m, tuple(rows))


def _lemma23(ctx, add):
    h1, h2 = _sq(ctx, 1, "h"), _sq(ctx, 2, "h")
    add(ctx.scalar_dominance("2.3(i) h_k:n <= h_l:m", "", h1, h2))
    add(ctx.scalar_monotone("2.3(ii) h_k:n/h_l:m increasing", "", _ratio(h1, h2), "increasing"))
    add(ctx.scalar_monotone("2.3(iii) (1-h_k:n)/(1-h_l:m) increasing", "", _ratio(_sq(ctx, 1, "comp"), _sq(ctx, 2, "comp")), "increasing"))
    add(ctx.scalar_monotone("2.3(iv) h'_k:n/h'_l:m increasing", "", _ratio(_sq(ctx, 1, "d1"), _sq(ctx, 2, "d1")), "increasing"))


def _lemma25(ctx, add, mn):
    add(_dist_le(ctx, "h", "h", key="2.5(i) h_k:n(p) <= h_l:m(p)", text="")[0])
    for c in _dist_le(ctx, "hr", "hr", idx=range(mn), flip=True, key="2.5(ii) (1/h_k:n)dh/dp_i >= (1/h_l:m)dh/dp_i", text=""):
        add(c)
    for c in _dist_le(ctx, "rhr", "rhr", idx=range(mn), key="2.5(iii) (1/(1-h_k:n))dh/dp_i <= (1/(1-h_l:m))dh/dp_i", text=""):
        add(c)
    add(_dist_le(ctx, "el_sum", "el_sum", flip=True, key="2.5(iv) sum elasticities k:n >= l:m", text="")[0])
    add(_dist_le(ctx, "rev_sum", "rev_sum", key="2.5(v) sum reversed elasticities k:n <= l:m", text="")[0])


def _lemma26(k, n, l, m, add):
    # part 2.6 on an lr-ordered family, in a deterministic environment
    z, w = _lemma_marginals(n, m)
    env = Environment("discrete", atoms=((1.0, 1.0),))
    s6 = ComparisonScenario(
        "lemma 2.6",
        SystemSpec(k_out_of_n(k, n), independence(n), z, env),
        SystemSpec(k_out_of_n(l, m), independence(m), w, env),
        GridSpec(0.0, 5.0, 400),
    )
    ctx6 = _Context(s6)
    claims = _lr_ratio_claims(ctx6, np.array([1.0]))
    worst = min(claims, key=lambda c: c.verdict.margin)
    holds = VIOLATED if any(c.verdict.violated for c in claims) else CERTIFIED
    add(Claim("2.6 (dh_l:m/dq_j)/(dh_k:n/dp_i) increasing in x", "", OrderVerdict("monotone", holds, worst.verdict.margin, (worst.key, *worst.verdict.witness))))


def admissible_lemma_indices(max_n: int = 6, max_m: int = 6):
    for n in range(1, max_n + 1):
        for k in range(1, n + 1):
            for m in range(1, max_m + 1):
                for l in range(1, min(k, m) + 1):
                    if n - k <= m - l:
                        yield k, n, l, m
