import pytest

from coherent_env import scenario as scen
from coherent_env.errors import ParseError, SchemaError

BASE = """
name = "t"
theorems = ["3.1"]

[environments.env]
atoms = [[1.0, 0.5], [2.0, 0.5]]

[system1]
environment = "env"
kofn = { k = 2, n = 2 }
marginals = [{ baseline = "exponential", rate = 1.0, link = "mult-frailty" }]

[system2]
environment = "env"
paths = [[1], [2]]
marginals = [{ baseline = "exponential", rate = 1.0, link = "mult-frailty" }]
"""


def test_minimal_scenario():
    sc = scen.loads(BASE)
    assert sc.system("system1").n == 2 and sc.system("system2").structure.paths == {frozenset({1}), frozenset({2})}
    assert sc.system("system1").copula.family == "independence"
    comp = sc.comparison()
    assert comp.env1 == comp.env2


@pytest.mark.parametrize("name", sorted(scen.bundled()))
def test_bundled_round_trip(name):
    sc = scen.load(scen.bundled()[name])
    assert scen.loads(sc.dumps()) == sc
    assert sc.description


@pytest.mark.parametrize("text,where", [
    (BASE.replace('rate = 1.0, link = "mult-frailty" }]\n\n[system2]', 'rate = -1.0 }]\n\n[system2]'), "system1.marginals[0]"),
    (BASE.replace('environment = "env"\nkofn', 'environment = "nope"\nkofn'), "system1.environment"),
    (BASE.replace("kofn = { k = 2, n = 2 }", "kofn = { k = 3, n = 2 }"), "system1.kofn"),
    (BASE.replace("kofn = { k = 2, n = 2 }", 'kofn = { k = 2, n = 2 }\ncopula = { family = "fgm", param = 3.0 }'), "system1.copula"),
    (BASE.replace("[[1.0, 0.5], [2.0, 0.5]]", "[[1.0, 0.5], [2.0, 0.6]]"), "environments.env"),
    (BASE + "\n[grid]\nx_hi = -1.0\n", "grid"),
    (BASE + "\n[checks]\nsobol_log2 = 0\n", "checks.sobol_log2"),
    (BASE + "\nbogus = 1\n", "unknown field"),
    (BASE.replace('theorems = ["3.1"]', "theorems = [3.1]"), "theorems"),
])
def test_schema_errors_name_the_field(text, where):
    with pytest.raises(SchemaError, match=where.replace("[", r"\[").replace("]", r"\]")):
        scen.loads(text)


def test_parse_errors():
    with pytest.raises(ParseError):
        scen.loads("name = ")
    with pytest.raises(ParseError):
        scen.load("/nonexistent/file.toml")


def test_continuous_environment_and_simulation():
    text = BASE.replace("atoms = [[1.0, 0.5], [2.0, 0.5]]", 'family = "gamma"\na = 2.0\nb = 1.0\nnodes = 32')
    text += '\n[simulation]\nsystem = "system2"\nn = 5000\nseed = 3\nx = [0.0, 0.5]\n'
    sc = scen.loads(text)
    assert sc.environments["env"].nodes == 32
    plan = sc.simulation_plan()
    assert plan.n == 5000 and plan.x_grid == (0.0, 0.5) and plan.system == sc.system("system2")
    assert sc.simulation_plan(n=2000, seed=9).seed == 9
    assert scen.loads(sc.dumps()) == sc
