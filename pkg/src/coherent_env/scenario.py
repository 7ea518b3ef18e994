"""Declarative scenario files (TOML).

A scenario names up to two systems, the environments they run in, the
check grids, the theorems to verify and an optional simulation plan::

    name = "two-atom"
    theorems = ["3.1"]

    [grid]
    x_lo = 0.0
    x_hi = 5.0
    n_points = 200

    [environments.env]
    atoms = [[1.0, 0.5], [2.0, 0.5]]       # or family = "gamma", a = 2, b = 1

    [system1]
    environment = "env"
    kofn = { k = 2, n = 2 }                # or paths = [[1, 2], [1, 3]]
    copula = { family = "independence" }   # fgm / gumbel-barnett / clayton-oakes with param
    marginals = [{ baseline = "exponential", rate = 1.0, link = "mult-frailty" }]

    [simulation]
    system = "system1"
    n = 200000
    seed = 1
    x = [0.0, 0.5, 1.0]

    [expect]
    violated = { "3.2" = "i" }             # negative controls

A single-entry ``marginals`` list is shared by all components. Parsing then
serialising a scenario gives back an equal scenario.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .copulas import SurvivalCopula
from .errors import CoherentEnvError, ParseError, SchemaError
from .lifetimes import Baseline, ConditionalLifetimeModel
from .mixtures import DEFAULT_NODES, DEFAULT_TRUNCATION, Environment
from .orders import GridSpec
from .simkit import SimulationPlan
from .structures import CoherentStructure
from .theorems import ComparisonScenario, SystemSpec

SYSTEMS = ("system1", "system2")
CHECK_KEYS = ("p_points", "sobol_log2", "sweep_bases", "sweep_steps", "theta_probes", "seed", "p_lo")
_BASELINE_KEYS = {"exponential": ("rate",), "weibull": ("shape", "scale"), "gamma": ("a", "b")}
_ENV_KEYS = {"gamma": ("a", "b"), "uniform": ("lo", "hi"), "beta": ("a", "b", "lo", "hi")}


@dataclass(frozen=True)
class Scenario:
    name: str
    environments: dict
    systems: dict
    system_env: dict
    grid: GridSpec = GridSpec()
    checks: dict = field(default_factory=dict)
    theorems: tuple = ()
    simulation: dict | None = None
    expect_violated: dict = field(default_factory=dict)
    description: str = ""

    def system(self, key: str = "system1") -> SystemSpec:
        if key not in self.systems:
            raise SchemaError(f"scenario {self.name!r} has no [{key}] table")
        return self.systems[key]

    def comparison(self) -> ComparisonScenario:
        for key in SYSTEMS:
            self.system(key)
        return ComparisonScenario(
            self.name, self.systems["system1"], self.systems["system2"], self.grid,
            theorems=self.theorems, expect_violated=dict(self.expect_violated), **self.checks,
        )

    def simulation_plan(self, n: int | None = None, seed: int | None = None) -> SimulationPlan:
        sim = self.simulation or {}
        key = sim.get("system", "system1")
        kw = {"x_grid": tuple(sim["x"])} if "x" in sim else {}
        n = n if n is not None else sim.get("n", 200_000)
        seed = seed if seed is not None else sim.get("seed", 0)
        return SimulationPlan(self.system(key), n, seed, **kw)

    # serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        out: dict = {"name": self.name}
        if self.description:
            out["description"] = self.description
        if self.theorems:
            out["theorems"] = list(self.theorems)
        out["grid"] = {"x_lo": self.grid.x_lo, "x_hi": self.grid.x_hi, "n_points": self.grid.n_points, "tol": self.grid.tol}
        if self.checks:
            out["checks"] = dict(self.checks)
        out["environments"] = {k: e.as_dict() for k, e in self.environments.items()}
        for key, s in self.systems.items():
            out[key] = _system_dict(s, self.system_env[key])
        if self.simulation:
            out["simulation"] = dict(self.simulation)
        if self.expect_violated:
            out["expect"] = {"violated": dict(self.expect_violated)}
        return out

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())


def _system_dict(s: SystemSpec, env: str) -> dict:
    st = s.structure
    out: dict = {"environment": env}
    if st.kind == "kofn":
        out["kofn"] = {"k": st.k, "n": st.n}
    else:
        out["n"] = st.n
        out["paths"] = [sorted(p) for p in sorted(st.paths, key=lambda p: (len(p), sorted(p)))]
    cop = {"family": s.copula.family}
    if s.copula.param is not None:
        cop["param"] = s.copula.param
    out["copula"] = cop
    if s.identical:
        out["marginals"] = [s.marginals[0].as_dict()]
    else:
        out["marginals"] = [m.as_dict() for m in s.marginals]
    return out


# -- parsing -------------------------------------------------------------------------


def loads(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{source}: {exc}") from None
    return from_dict(doc, source)


def load(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, str(path))


def _get(d: dict, key: str, where: str, kind=None, default=...):
    if key not in d:
        if default is ...:
            raise SchemaError(f"{where}: missing field {key!r}")
        return default
    v = d[key]
    if kind is not None and (not isinstance(v, kind) or isinstance(v, bool)):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise SchemaError(f"{where}.{key}: expected {names}, got {type(v).__name__}")
    return v


def _wrap(where: str, fn, *args, **kw):
    """Re-raise model validation errors as schema errors naming the field."""
    try:
        return fn(*args, **kw)
    except SchemaError:
        raise
    except (CoherentEnvError, ValueError, TypeError) as exc:
        raise SchemaError(f"{where}: {exc}") from None


def _unknown(d: dict, allowed, where: str):
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise SchemaError(f"{where}: unknown field(s) {', '.join(extra)}")


NUM = (int, float)


def _environment(d: dict, where: str) -> Environment:
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected a table")
    if "atoms" in d:
        _unknown(d, ("atoms",), where)
        atoms = _get(d, "atoms", where, list)
        if not all(isinstance(a, list) and len(a) == 2 for a in atoms):
            raise SchemaError(f"{where}.atoms: expected a list of [theta, weight] pairs")
        return _wrap(where, Environment, "discrete", atoms=tuple(tuple(a) for a in atoms))
    fam = _get(d, "family", where, str)
    if fam not in _ENV_KEYS:
        raise SchemaError(f"{where}.family: unknown environment family {fam!r}")
    names = _ENV_KEYS[fam]
    _unknown(d, ("family", "nodes", "truncation") + names, where)
    params = tuple(_get(d, k, where, NUM) for k in names)
    nodes = _get(d, "nodes", where, int, DEFAULT_NODES)
    trunc = _get(d, "truncation", where, NUM, DEFAULT_TRUNCATION)
    return _wrap(where, Environment, "continuous", family=fam, params=params, nodes=nodes, truncation=trunc)


def _marginal(d: dict, where: str) -> ConditionalLifetimeModel:
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected a table")
    fam = _get(d, "baseline", where, str)
    if fam not in _BASELINE_KEYS:
        raise SchemaError(f"{where}.baseline: unknown baseline {fam!r}")
    names = _BASELINE_KEYS[fam]
    _unknown(d, ("baseline", "link", "theta_power", "orientation") + names, where)
    defaults = {"scale": 1.0, "b": 1.0}
    params = tuple(_get(d, k, where, NUM, defaults.get(k, ...)) for k in names)
    base = _wrap(where, Baseline, fam, params)
    return _wrap(
        where, ConditionalLifetimeModel, base, _get(d, "link", where, str, "none"),
        _get(d, "theta_power", where, NUM, 1.0), _get(d, "orientation", where, str, None),
    )


def _structure(d: dict, where: str) -> CoherentStructure:
    if ("kofn" in d) == ("paths" in d):
        raise SchemaError(f"{where}: give exactly one of 'paths' or 'kofn'")
    if "kofn" in d:
        ko = _get(d, "kofn", where, dict)
        _unknown(ko, ("k", "n"), f"{where}.kofn")
        k, n = _get(ko, "k", f"{where}.kofn", int), _get(ko, "n", f"{where}.kofn", int)
        return _wrap(f"{where}.kofn", CoherentStructure, n=n, kind="kofn", k=k)
    paths = _get(d, "paths", where, list)
    if not all(isinstance(p, list) and all(isinstance(i, int) for i in p) for p in paths):
        raise SchemaError(f"{where}.paths: expected a list of integer lists")
    n = _get(d, "n", where, int, max((max(p) for p in paths if p), default=0))
    return _wrap(f"{where}.paths", CoherentStructure.from_paths, n, paths)


def _system(d: dict, where: str, envs: dict) -> tuple[SystemSpec, str]:
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected a table")
    _unknown(d, ("environment", "kofn", "paths", "n", "copula", "marginals"), where)
    env = _get(d, "environment", where, str)
    if env not in envs:
        raise SchemaError(f"{where}.environment: no environment named {env!r}")
    st = _structure(d, where)
    cop = _get(d, "copula", where, dict, {"family": "independence"})
    _unknown(cop, ("family", "param"), f"{where}.copula")
    copula = _wrap(f"{where}.copula", SurvivalCopula, _get(cop, "family", f"{where}.copula", str), st.n,
                   _get(cop, "param", f"{where}.copula", NUM, None))
    ms = _get(d, "marginals", where, list)
    models = [_marginal(m, f"{where}.marginals[{i}]") for i, m in enumerate(ms)]
    if len(models) == 1:
        models = models * st.n
    spec = _wrap(where, SystemSpec, st, copula, tuple(models), envs[env], where)
    return spec, env


def from_dict(doc: dict, source: str = "<scenario>") -> Scenario:
    allowed = ("name", "description", "theorems", "grid", "checks", "environments", "simulation", "expect") + SYSTEMS
    _unknown(doc, allowed, source)
    name = _get(doc, "name", source, str)
    g = _get(doc, "grid", source, dict, {})
    _unknown(g, ("x_lo", "x_hi", "n_points", "tol"), "grid")
    grid = _wrap("grid", GridSpec, float(_get(g, "x_lo", "grid", NUM, 0.0)), float(_get(g, "x_hi", "grid", NUM, 5.0)),
                 _get(g, "n_points", "grid", int, 200), float(_get(g, "tol", "grid", NUM, 1e-9)))
    checks = _get(doc, "checks", source, dict, {})
    _unknown(checks, CHECK_KEYS, "checks")
    for k, v in checks.items():
        if k == "p_lo":
            if not isinstance(v, NUM) or isinstance(v, bool) or not 0 < v < 1:
                raise SchemaError("checks.p_lo: expected a number in (0, 1)")
        elif not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise SchemaError(f"checks.{k}: expected a positive integer")
    env_tab = _get(doc, "environments", source, dict)
    envs = {k: _environment(v, f"environments.{k}") for k, v in env_tab.items()}
    systems, system_env = {}, {}
    for key in SYSTEMS:
        if key in doc:
            systems[key], system_env[key] = _system(doc[key], key, envs)
    if "system1" not in systems:
        raise SchemaError(f"{source}: missing [system1] table")
    theorems = _get(doc, "theorems", source, list, [])
    if not all(isinstance(t, str) for t in theorems):
        raise SchemaError("theorems: expected a list of strings such as \"3.1\"")
    sim = _get(doc, "simulation", source, dict, None)
    if sim is not None:
        _unknown(sim, ("system", "n", "seed", "x"), "simulation")
        if sim.get("system", "system1") not in systems:
            raise SchemaError(f"simulation.system: no system named {sim.get('system')!r}")
    exp = _get(doc, "expect", source, dict, {})
    _unknown(exp, ("violated",), "expect")
    violated = _get(exp, "violated", "expect", dict, {})
    return Scenario(
        name=name, environments=envs, systems=systems, system_env=system_env, grid=grid, checks=dict(checks),
        theorems=tuple(theorems), simulation=sim, expect_violated=dict(violated),
        description=_get(doc, "description", source, str, ""),
    )


def bundled_dir() -> Path:
    return Path(__file__).with_name("scenarios")


def bundled() -> dict[str, Path]:
    """Bundled scenario files by stem."""
    return {p.stem: p for p in sorted(bundled_dir().glob("*.toml"))}
