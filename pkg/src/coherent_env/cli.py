"""Command-line front end: ``coherent-env {eval,verify,simulate,lemmas,scenarios}``.

Exit codes: 0 success (theorem reports consistent), 2 a sufficient
condition is violated (the expected outcome for a negative control), 3
soundness alarm, 64 usage error, 65 invalid scenario or input data, 70
internal error. ``SCENARIO`` is a path or the name of a bundled scenario.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from . import scenario as scen
from .errors import CoherentEnvError
from .orders import GridSpec
from .theorems import certify_kofn_lemmas, normalize_theorem, reports_to_csv, verify

EXIT_OK = 0
EXIT_VIOLATED = 2
EXIT_ALARM = 3
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_INTERNAL = 70

CURVES = ("survival", "cdf", "density", "hazard", "rhr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _write(path: str | None, text: str) -> None:
    """Write ``text`` to ``path`` atomically, or to stdout for ``None``/``-``."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _plotting():
    try:
        from . import plotting
    except ImportError:
        raise UsageError("--plot needs matplotlib (pip install 'artifact[plot]')") from None
    return plotting


def _load(ref: str) -> scen.Scenario:
    bundled = scen.bundled()
    if not os.path.exists(ref) and ref in bundled:
        return scen.load(bundled[ref])
    return scen.load(ref)


def _fmt(v: float) -> str:
    return repr(float(v))


# -- commands ------------------------------------------------------------------


def cmd_eval(args) -> int:
    sc = _load(args.scenario)
    life = sc.system(args.system).lifetime()
    g = GridSpec(
        sc.grid.x_lo if args.x_lo is None else args.x_lo,
        sc.grid.x_hi if args.x_hi is None else args.x_hi,
        sc.grid.n_points if args.n_points is None else args.n_points,
    )
    xs = g.points()
    fn = {
        "survival": life.survival, "cdf": life.cdf, "density": life.density,
        "hazard": life.hazard, "rhr": life.reversed_hazard,
    }[args.curve]
    with np.errstate(divide="ignore", invalid="ignore"):
        ys = fn(xs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", args.curve])
    for x, y in zip(xs, ys):
        w.writerow([_fmt(x), _fmt(y)])
    _write(args.out, buf.getvalue())
    if args.plot:
        _plotting().plot_curve(xs, ys, args.plot, label=f"{sc.name} {args.system}", ylabel=args.curve)
    return EXIT_OK


def cmd_verify(args) -> int:
    sc = _load(args.scenario)
    ids = args.theorem or list(sc.theorems)
    if not ids:
        raise UsageError("no theorem given and the scenario lists none; pass --theorem ID")
    ids = [normalize_theorem(t) for t in ids]
    comp = sc.comparison()
    reports = [verify(comp, t) for t in ids]
    _write(args.out, reports_to_csv(reports))
    code = EXIT_OK
    for r in reports:
        if not r.consistent:
            print(f"SOUNDNESS ALARM: theorem {r.theorem} conditions certified but conclusion violated "
                  f"({r.conclusion.witness_text()})", file=sys.stderr)
            code = EXIT_ALARM
        elif r.violated_conditions and not r.sufficient:
            labels = ", ".join(f"({l})" for l in r.violated_conditions)
            expected = sc.expect_violated.get(r.theorem)
            tag = f"; expected ({expected})" if expected else ""
            print(f"theorem {r.theorem}: condition(s) {labels} violated{tag}", file=sys.stderr)
            if code == EXIT_OK:
                code = EXIT_VIOLATED
    return code


def cmd_simulate(args) -> int:
    from .simkit import estimate_survival

    sc = _load(args.scenario)
    plan = sc.simulation_plan(args.n, args.seed)
    est = estimate_survival(plan)
    _write(args.out, est.to_csv())
    if args.plot:
        _plotting().plot_simulation(est, args.plot, title=sc.name)
    return EXIT_OK


def cmd_lemmas(args) -> int:
    k, n, l, m = args.kofn
    report = certify_kofn_lemmas(k, n, l, m)
    _write(args.out, report.to_csv())
    if not report.all_certified:
        bad = [r.claim for r in report.rows if not r.verdict.certified]
        print("not certified: " + "; ".join(bad), file=sys.stderr)
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_scenarios(args) -> int:
    for name, path in scen.bundled().items():
        sc = scen.load(path)
        print(f"{name:32s} {','.join(sc.theorems):24s} {sc.description}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coherent-env", description="Coherent systems in random environments: curves, theorem checks, simulation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="evaluate a mixed-lifetime curve on the scenario grid")
    e.add_argument("scenario")
    e.add_argument("--curve", choices=CURVES, default="survival")
    e.add_argument("--system", choices=scen.SYSTEMS, default="system1")
    e.add_argument("--x-lo", type=float)
    e.add_argument("--x-hi", type=float)
    e.add_argument("--n-points", type=int)
    e.add_argument("--out", help="CSV path (default stdout)")
    e.add_argument("--plot", metavar="PNG", help="also render a figure")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="check theorem conditions and conclusion")
    v.add_argument("scenario")
    v.add_argument("--theorem", action="append", help="theorem id such as 3.1 (repeatable; default: the scenario's list)")
    v.add_argument("--out", help="CSV path (default stdout)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="Monte Carlo survival estimate against quadrature")
    s.add_argument("scenario")
    s.add_argument("--n", type=int, help="sample size (>= 1000)")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="CSV path (default stdout)")
    s.add_argument("--plot", metavar="PNG", help="also render a figure")
    s.set_defaults(func=cmd_simulate)

    lm = sub.add_parser("lemmas", help="certify the k-out-of-n lemmas for h_{k:n} against h_{l:m}")
    lm.add_argument("--kofn", nargs=4, type=int, metavar=("K", "N", "L", "M"), required=True)
    lm.add_argument("--out", help="CSV path (default stdout)")
    lm.set_defaults(func=cmd_lemmas)

    ls = sub.add_parser("scenarios", help="list bundled scenarios")
    ls.set_defaults(func=cmd_scenarios)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        if args.command == "verify" and args.theorem:
            for t in args.theorem:
                try:
                    normalize_theorem(t)
                except CoherentEnvError as exc:
                    raise UsageError(str(exc)) from None
        return args.func(args)
    except UsageError as exc:
        print(f"coherent-env: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CoherentEnvError as exc:
        print(f"coherent-env: error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception:  # pragma: no cover - defensive
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
