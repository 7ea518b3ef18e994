"""Grid certification of stochastic orders and of TP2 / RR2 kernels.

A claim such as "``S_Y / S_X`` is increasing" is checked on consecutive grid
nodes with relative margins ``(r[k+1] - r[k]) / max(|r[k]|, |r[k+1]|)``;
increasing always means nondecreasing. The verdict records the worst
margin and where it occurred, so a violation is an explicit counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluatorFailureError, NegativeValueError, OutOfRangeError, RatioUndefinedError

CERTIFIED = "certified-on-grid"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

RATIO_EPS = 1e-9
RATIO_FLOOR = 1e-300
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    x_lo: float = 0.0
    x_hi: float = 5.0
    n_points: int = 200
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not self.x_lo >= 0:
            raise OutOfRangeError(f"x_lo must be >= 0, got {self.x_lo}")
        if not self.x_hi > self.x_lo:
            raise OutOfRangeError(f"x_hi must exceed x_lo, got [{self.x_lo}, {self.x_hi}]")
        if int(self.n_points) < 16:
            raise OutOfRangeError(f"grids need at least 16 points, got {self.n_points}")
        if not self.tol > 0:
            raise OutOfRangeError("tol must be positive")
        object.__setattr__(self, "n_points", int(self.n_points))

    def points(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.n_points)

    def ratio_points(self) -> np.ndarray:
        """Grid with the left end pulled away from zero for ratio checks."""
        return np.linspace(max(self.x_lo, RATIO_EPS), self.x_hi, self.n_points)

    def refined(self) -> "GridSpec":
        return GridSpec(self.x_lo, self.x_hi, 2 * self.n_points, self.tol)


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of one grid check.

    ``margin`` is the worst (smallest) relative margin; ``witness`` the grid
    location where it occurred.
    """

    order: str
    holds: str
    margin: float
    witness: tuple = ()
    note: str = ""
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def certified(self) -> bool:
        return self.holds == CERTIFIED

    @property
    def violated(self) -> bool:
        return self.holds == VIOLATED

    def witness_text(self) -> str:
        if not self.witness:
            return ""
        return " ".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in self.witness)


def _call(fn: Callable, x: np.ndarray, what: str) -> np.ndarray:
    try:
        v = np.asarray(fn(x), dtype=float)
    except (ArithmeticError, ValueError, FloatingPointError) as exc:
        raise EvaluatorFailureError(f"{what} evaluator failed: {exc}") from exc
    if v.shape != x.shape:
        v = np.broadcast_to(v, x.shape)
    if np.any(np.isnan(v)):
        k = int(np.flatnonzero(np.isnan(v))[0])
        raise EvaluatorFailureError(f"{what} evaluator returned NaN at x={x[k]:.6g}")
    return v


def relative_steps(values: np.ndarray) -> np.ndarray:
    """Relative consecutive increments; ``0`` where both values are zero."""
    a, b = values[:-1], values[1:]
    with np.errstate(invalid="ignore"):
        scale = np.maximum(np.abs(a), np.abs(b))
        both_inf = np.isinf(a) & np.isinf(b) & (np.sign(a) == np.sign(b))
        out = np.where(scale > 0, (b - a) / np.where(scale > 0, scale, 1.0), 0.0)
        out = np.where(np.isinf(b) & ~np.isinf(a), np.sign(b), out)
        out = np.where(np.isinf(a) & ~np.isinf(b), -np.sign(a), out)
    return np.where(both_inf, 0.0, out)


def monotone_verdict(
    xs: np.ndarray,
    values: np.ndarray,
    direction: str,
    tol: float = DEFAULT_TOL,
    order: str = "monotone",
    note: str = "",
    relerr: np.ndarray | None = None,
) -> OrderVerdict:
    """Certify ``values`` nondecreasing (``"increasing"``) or nonincreasing in ``xs``.

    ``relerr`` is an optional per-value relative rounding-error bound; a
    step only counts against the claim beyond the noise of its two ends.
    """
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    relerr = np.zeros_like(values) if relerr is None else np.broadcast_to(np.asarray(relerr, dtype=float), values.shape)
    keep = ~np.isnan(values)
    xs, values, relerr = xs[keep], values[keep], relerr[keep]
    if values.size < 2:
        return OrderVerdict(order, INCONCLUSIVE, float("nan"), (), note or "fewer than two usable points")
    steps = relative_steps(values)
    if direction == "decreasing":
        steps = -steps
    elif direction != "increasing":
        raise ValueError(f"direction must be 'increasing' or 'decreasing', got {direction!r}")
    steps = steps + np.minimum(relerr[:-1] + relerr[1:], 1.0)
    k = int(np.argmin(steps))
    worst = float(steps[k])
    holds = CERTIFIED if worst >= -tol else VIOLATED
    return OrderVerdict(order, holds, worst, (float(xs[k]), float(xs[k + 1])), note)


def monotone_rows(values: np.ndarray, direction: str, relerr: np.ndarray | None = None) -> np.ndarray:
    """Noise-adjusted relative steps along the last axis (negative = against ``direction``)."""
    values = np.asarray(values, dtype=float)
    a, b = values[..., :-1], values[..., 1:]
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.maximum(np.abs(a), np.abs(b))
        steps = np.where(scale > 0, (b - a) / np.where(scale > 0, scale, 1.0), 0.0)
    steps = np.where(np.isnan(steps), 0.0, steps)
    if direction == "decreasing":
        steps = -steps
    if relerr is not None:
        r = np.broadcast_to(np.asarray(relerr, dtype=float), values.shape)
        steps = steps + np.minimum(r[..., :-1] + r[..., 1:], 1.0)
    return steps


def dominance_verdict(
    xs: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    tol: float = DEFAULT_TOL,
    order: str = "dominance",
    note: str = "",
    relerr: np.ndarray | None = None,
) -> OrderVerdict:
    """Certify ``lower <= upper`` pointwise with relative slack ``tol``.

    ``xs`` holds the evaluation points (scalars or vectors, first axis).
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    scale = np.maximum(np.maximum(np.abs(lower), np.abs(upper)), np.finfo(float).tiny)
    with np.errstate(invalid="ignore"):
        margins = np.where(lower == upper, 0.0, (upper - lower) / scale)
    if relerr is not None:
        margins = margins + np.minimum(np.asarray(relerr, dtype=float), 1.0)
    undefined = np.isnan(margins)
    if undefined.all():
        return OrderVerdict(order, INCONCLUSIVE, float("nan"), (), note or "undefined at every point")
    if undefined.any():
        note = (note + "; " if note else "") + f"skipped {int(undefined.sum())} points where a side is undefined"
        margins = np.where(undefined, np.inf, margins)
    k = int(np.argmin(margins))
    worst = float(margins[k])
    witness = tuple(float(v) for v in np.atleast_1d(np.asarray(xs)[k]))
    return OrderVerdict(order, CERTIFIED if worst >= -tol else VIOLATED, worst, witness, note)


def _ratio_verdict(num: np.ndarray, den: np.ndarray, xs: np.ndarray, tol: float, order: str) -> OrderVerdict:
    ok = (num >= RATIO_FLOOR) & (den >= RATIO_FLOOR)
    if not np.any(ok):
        raise RatioUndefinedError(f"{order}: both functions underflow below {RATIO_FLOOR:g} on the whole window")
    note = ""
    if not np.all(ok):
        dropped = xs[~ok]
        note = f"excluded {dropped.size} nodes in [{dropped.min():.6g}, {dropped.max():.6g}] with values below {RATIO_FLOOR:g}"
    return monotone_verdict(xs[ok], num[ok] / den[ok], "increasing", tol, order, note)


def check_st(sf_x: Callable, sf_y: Callable, g: GridSpec) -> OrderVerdict:
    """``X <=st Y``: ``S_X(t) <= S_Y(t)`` on the grid."""
    xs = g.points()
    return dominance_verdict(xs, _call(sf_x, xs, "S_X"), _call(sf_y, xs, "S_Y"), g.tol, "st")


def check_hr(sf_x: Callable, sf_y: Callable, g: GridSpec) -> OrderVerdict:
    """``X <=hr Y``: ``S_Y / S_X`` increasing."""
    xs = g.ratio_points()
    return _ratio_verdict(_call(sf_y, xs, "S_Y"), _call(sf_x, xs, "S_X"), xs, g.tol, "hr")


def check_rhr(cdf_x: Callable, cdf_y: Callable, g: GridSpec) -> OrderVerdict:
    """``X <=rhr Y``: ``F_Y / F_X`` increasing."""
    xs = g.ratio_points()
    return _ratio_verdict(_call(cdf_y, xs, "F_Y"), _call(cdf_x, xs, "F_X"), xs, g.tol, "rhr")


def check_lr(pdf_x: Callable, pdf_y: Callable, g: GridSpec) -> OrderVerdict:
    """``X <=lr Y``: ``f_Y / f_X`` increasing."""
    xs = g.ratio_points()
    return _ratio_verdict(_call(pdf_y, xs, "f_Y"), _call(pdf_x, xs, "f_X"), xs, g.tol, "lr")


def check_order(order: str, law_x, law_y, g: GridSpec) -> OrderVerdict:
    """Dispatch on ``order`` for objects exposing survival / cdf / density."""
    if order == "st":
        return check_st(law_x.survival, law_y.survival, g)
    if order == "hr":
        return check_hr(law_x.survival, law_y.survival, g)
    if order == "rhr":
        return check_rhr(law_x.cdf, law_y.cdf, g)
    if order == "lr":
        return check_lr(law_x.density, law_y.density, g)
    raise ValueError(f"unknown order {order!r}")


# -- total positivity ---------------------------------------------------------

TP2 = "TP2"
RR2 = "RR2"
NEITHER = "neither"
BOTH = "both"


@dataclass(frozen=True)
class TP2Verdict:
    result: str
    tp2_margin: float
    rr2_margin: float
    witness: tuple = ()

    @property
    def is_tp2(self) -> bool:
        return self.result in (TP2, BOTH)

    @property
    def is_rr2(self) -> bool:
        return self.result in (RR2, BOTH)


def tp2_matrix_check(K: np.ndarray, xs: Sequence, ys: Sequence, tol: float = DEFAULT_TOL) -> TP2Verdict:
    """Sign of the 2x2 minors on adjacent cells of a nonnegative matrix."""
    K = np.asarray(K, dtype=float)
    if np.any(np.isnan(K)):
        raise EvaluatorFailureError("kernel evaluator returned NaN")
    if np.any(K < 0):
        i, j = np.argwhere(K < 0)[0]
        raise NegativeValueError(f"kernel is negative ({K[i, j]:.3g}) at ({xs[i]:.6g}, {ys[j]:.6g})")
    diag = K[:-1, :-1] * K[1:, 1:]
    anti = K[:-1, 1:] * K[1:, :-1]
    scale = np.maximum(np.maximum(diag, anti), np.finfo(float).tiny)
    rel = np.where(diag == anti, 0.0, (diag - anti) / scale)
    k_tp = np.unravel_index(np.argmin(rel), rel.shape)
    k_rr = np.unravel_index(np.argmax(rel), rel.shape)
    tp_margin, rr_margin = float(rel[k_tp]), float(-rel[k_rr])
    tp, rr = tp_margin >= -tol, rr_margin >= -tol
    result = BOTH if tp and rr else TP2 if tp else RR2 if rr else NEITHER
    bad = k_rr if result == TP2 else k_tp
    i, j = int(bad[0]), int(bad[1])
    return TP2Verdict(result, tp_margin, rr_margin, (float(xs[i]), float(xs[i + 1]), float(ys[j]), float(ys[j + 1])))


def tp2_check(kappa: Callable, x_grid: Sequence, theta_grid: Sequence, tol: float = DEFAULT_TOL) -> TP2Verdict:
    xs = np.asarray(x_grid, dtype=float)
    ts = np.asarray(theta_grid, dtype=float)
    K = np.asarray(kappa(xs[:, None], ts[None, :]), dtype=float) * np.ones((xs.size, ts.size))
    return tp2_matrix_check(K, xs, ts, tol)


# -- TP2 / RR2 preservation under integral transforms -----------------------------------------

_ROWS = {
    1: ("increasing", "increasing", TP2, TP2),
    2: ("increasing", "decreasing", RR2, TP2),
    3: ("decreasing", "decreasing", TP2, RR2),
    4: ("decreasing", "increasing", RR2, RR2),
}


@dataclass(frozen=True)
class TransformVerdict:
    row: int
    conditions: dict
    conclusion: TP2Verdict
    expected: str

    @property
    def conditions_hold(self) -> bool:
        return all(self.conditions.values())

    @property
    def conclusion_holds(self) -> bool:
        return self.conclusion.result in (self.expected, BOTH)


def _weight_rule(weight, theta_grid, nodes: int = 64):
    """Quadrature nodes and weights for ``int . w(theta) dtheta``."""
    from .mixtures import Environment

    if isinstance(weight, Environment):
        return weight.rule()
    w, (lo, hi) = weight
    x, gw = np.polynomial.legendre.leggauss(nodes)
    th = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    wv = np.asarray(w(th), dtype=float) * np.ones_like(th)
    if np.any(wv < 0):
        raise NegativeValueError("transform weight w(theta) must be nonnegative")
    return th, 0.5 * (hi - lo) * gw * wv


def lemma21_transform_check(
    phi1: Callable,
    phi2: Callable,
    weight,
    row: int,
    x_grid: Sequence,
    theta_grid: Sequence,
    tol: float = DEFAULT_TOL,
) -> TransformVerdict:
    """Check the conditions of one row and, separately, the TP2/RR2 conclusion.

    ``weight`` is an :class:`Environment` (its law is the weight) or a pair
    ``(w, (lo, hi))`` integrated by Gauss-Legendre.
    """
    if row not in _ROWS:
        raise OutOfRangeError(f"row must be 1..4, got {row}")
    in_x, in_theta, kernel, expected = _ROWS[row]
    xs = np.asarray(x_grid, dtype=float)
    ts = np.asarray(theta_grid, dtype=float)
    P1 = np.asarray(phi1(xs[:, None], ts[None, :]), dtype=float) * np.ones((xs.size, ts.size))
    P2 = np.asarray(phi2(xs[:, None], ts[None, :]), dtype=float) * np.ones((xs.size, ts.size))
    if np.any(P1 < 0) or np.any(P2 < 0):
        raise NegativeValueError("phi_1 and phi_2 must be nonnegative")
    with np.errstate(divide="ignore", invalid="ignore"):
        R = P2 / P1
    cond_i = all(monotone_verdict(xs, R[:, j], in_x, tol).holds != VIOLATED for j in range(ts.size))
    cond_ii = all(monotone_verdict(ts, R[i, :], in_theta, tol).holds != VIOLATED for i in range(xs.size))
    v1 = tp2_matrix_check(P1, xs, ts, tol)
    v2 = tp2_matrix_check(P2, xs, ts, tol)
    cond_iii = v1.result in (kernel, BOTH) or v2.result in (kernel, BOTH)

    th, w = _weight_rule(weight, ts)
    S = np.stack(
        [np.asarray(phi(xs[:, None], th[None, :]), dtype=float) * np.ones((xs.size, th.size)) @ w for phi in (phi1, phi2)],
        axis=1,
    )
    conclusion = tp2_matrix_check(S, xs, np.array([1.0, 2.0]), tol)
    return TransformVerdict(row, {"i": cond_i, "ii": cond_ii, "iii": cond_iii}, conclusion, expected)


# -- orders between environment laws ------------------------------------------


def _discrete_masses(env1, env2):
    support = np.array(sorted({t for t, _ in env1.atoms} | {t for t, _ in env2.atoms}))
    q1 = np.array([dict(env1.atoms).get(t, 0.0) for t in support])
    q2 = np.array([dict(env2.atoms).get(t, 0.0) for t in support])
    return support, q1, q2


def _extended_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """``num/den`` with ``a/0 = inf`` for ``a > 0`` and ``0/0`` dropped as NaN."""
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num / den
    r = np.where((den == 0) & (num > 0), np.inf, r)
    return np.where((den == 0) & (num == 0), np.nan, r)


def _tail(q: np.ndarray) -> np.ndarray:
    """``P(Theta > t)`` at each support point and just below the first one."""
    above = 1.0 - np.cumsum(q)
    return np.concatenate([[1.0], np.clip(above, 0.0, 1.0)])


def check_environment_order(order: str, env1, env2, tol: float = DEFAULT_TOL, n_points: int = 400) -> OrderVerdict:
    """``Theta_1 <=order Theta_2`` for discrete (exact) or continuous (grid) laws."""
    if env1.is_discrete and env2.is_discrete:
        t, q1, q2 = _discrete_masses(env1, env2)
        if order == "st":
            s1, s2 = _tail(q1), _tail(q2)
            pts = np.concatenate([[t[0] - 1.0], t])
            return dominance_verdict(pts, s1, s2, tol, "st", "exact on atoms")
        if order == "hr":
            pts = np.concatenate([[t[0] - 1.0], t])
            r = _extended_ratio(_tail(q2), _tail(q1))
        elif order == "rhr":
            pts = t
            r = _extended_ratio(np.cumsum(q2), np.cumsum(q1))
        elif order == "lr":
            pts = t
            r = _extended_ratio(q2, q1)
        else:
            raise ValueError(f"unknown order {order!r}")
        return monotone_verdict(pts, r, "increasing", tol, order, "exact on atoms")

    lo = min(env1.truncated_support()[0], env2.truncated_support()[0])
    hi = max(env1.truncated_support()[1], env2.truncated_support()[1])
    g = GridSpec(lo, hi, n_points, tol)
    if order == "lr":
        if env1.is_discrete or env2.is_discrete:
            return OrderVerdict("lr", INCONCLUSIVE, float("nan"), (), "lr between a discrete and a continuous law")
        xs = g.ratio_points()
        return _ratio_verdict(env2.dist().pdf(xs), env1.dist().pdf(xs), xs, tol, "lr")
    sf1, sf2, cdf1, cdf2 = (_law_fn(env1, "sf"), _law_fn(env2, "sf"), _law_fn(env1, "cdf"), _law_fn(env2, "cdf"))
    if order == "st":
        return check_st(sf1, sf2, g)
    if order == "hr":
        return check_hr(sf1, sf2, g)
    if order == "rhr":
        return check_rhr(cdf1, cdf2, g)
    raise ValueError(f"unknown order {order!r}")


def _law_fn(env, which):
    if not env.is_discrete:
        return getattr(env.dist(), which)
    t = np.array([a for a, _ in env.atoms])
    q = np.array([w for _, w in env.atoms])

    def fn(x):
        cum = (np.asarray(x)[..., None] >= t) @ q
        return 1.0 - cum if which == "sf" else cum

    return fn
