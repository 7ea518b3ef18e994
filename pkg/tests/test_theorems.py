import csv
import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherent_env import scenario as scen
from coherent_env.copulas import fgm, independence
from coherent_env.errors import DimensionMismatchError, IndexConstraintViolatedError, OutOfRangeError
from coherent_env.lifetimes import ConditionalLifetimeModel as M
from coherent_env.lifetimes import exponential
from coherent_env.mixtures import discrete, point
from coherent_env.orders import GridSpec
from coherent_env.structures import CoherentStructure, k_out_of_n
from coherent_env.theorems import (
    REPORT_FIELDS, THEOREMS, ComparisonScenario, SystemSpec, admissible_lemma_indices,
    certify_kofn_lemmas, check_lemma_indices, normalize_theorem, reports_to_csv, verify,
)

EXP = M(exponential(1.0), "mult-frailty")
TWO = discrete([(1.0, 0.5), (2.0, 0.5)])
EX11 = CoherentStructure.from_paths(3, [[1, 2], [1, 3]])


def comparison(s1, s2, **kw):
    return ComparisonScenario("t", s1, s2, GridSpec(0.0, 4.0, 100), **kw)


def test_theorem_ids():
    assert len(THEOREMS) == 22
    assert normalize_theorem(" 3.1 ") == "3.1"
    assert normalize_theorem("5.12") == "5.6"
    with pytest.raises(OutOfRangeError):
        normalize_theorem("6.1")


def test_group_preconditions():
    s1 = SystemSpec(k_out_of_n(3, 3), fgm(3, 0.5), (EXP,) * 3, TWO)
    s2 = SystemSpec(EX11, fgm(3, 0.5), (EXP,) * 3, discrete([(1.5, 1.0)]))
    with pytest.raises(OutOfRangeError):
        verify(comparison(s1, s2), "3.1")
    s2b = SystemSpec(EX11, fgm(3, 0.5), (EXP,) * 3, TWO)
    with pytest.raises(OutOfRangeError):
        verify(comparison(s1, s2b), "5.1")
    mixed = SystemSpec(EX11, fgm(3, 0.5), (EXP, EXP, M(exponential(2.0), "mult-frailty")), TWO)
    with pytest.raises(DimensionMismatchError):
        verify(comparison(s1, mixed), "3.4")
    with pytest.raises(DimensionMismatchError):
        SystemSpec(EX11, fgm(2, 0.5), (EXP,) * 3, TWO)


def test_window_check_for_p_lo():
    s = SystemSpec(k_out_of_n(2, 2), independence(2), (EXP,) * 2, TWO)
    with pytest.raises(OutOfRangeError, match="shrink the window"):
        verify(comparison(s, s, p_lo=0.05), "3.1")


def test_report_structure_and_csv():
    s1 = SystemSpec(k_out_of_n(3, 3), fgm(3, 0.5), (EXP,) * 3, TWO)
    s2 = SystemSpec(EX11, fgm(3, 0.5), (EXP,) * 3, TWO)
    r = verify(comparison(s1, s2), "3.1")
    assert r.sufficient and r.consistent and r.conclusion.certified
    assert [c.label for c in r.conditions] == ["i", "ii"]
    assert r.condition("i").status == "certified-on-grid"
    rows = list(csv.DictReader(io.StringIO(reports_to_csv([r]))))
    assert tuple(rows[0]) == REPORT_FIELDS
    assert rows[-1]["item"] == "summary" and rows[-1]["verdict"] == "consistent"
    # swapping the systems breaks the distortion dominance
    back = verify(comparison(s2, s1), "3.1")
    assert "i" in back.violated_conditions and back.conclusion.violated


def test_negative_control_names_condition_and_witness():
    sc = scen.load(scen.bundled()["neg_hr_elasticity"])
    r = verify(sc.comparison(), "3.2")
    assert not r.sufficient and "ii" in r.violated_conditions
    w = r.condition("ii").worst()
    assert w.verdict.violated and w.verdict.witness


def test_lemma_indices():
    check_lemma_indices(2, 3, 1, 3)
    for bad in ((3, 2, 1, 2), (1, 2, 2, 3), (2, 3, 1, 1)):
        with pytest.raises(IndexConstraintViolatedError):
            check_lemma_indices(*bad)
    assert len(list(admissible_lemma_indices(6, 6))) == 196
    with pytest.raises(OutOfRangeError):
        certify_kofn_lemmas(2, 3, 1, 3, parts=("9.9",))


def test_full_lemma_report():
    rep = certify_kofn_lemmas(2, 3, 1, 3)
    assert rep.all_certified
    groups = {r.claim.split()[0].split("(")[0] for r in rep.rows}
    assert groups == {"2.2", "2.3", "2.4", "2.5", "2.6"}
    text = rep.to_csv()
    assert text.splitlines()[0].startswith("k,n,l,m,claim,verdict")


@settings(max_examples=12, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n), st.integers(1, n))),
       st.floats(-1, 1))
def test_kofn_pairs_never_raise_an_alarm(args, lam):
    n, k, l = args
    cop = fgm(n, lam) if lam else independence(n)
    s1 = SystemSpec(k_out_of_n(k, n), cop, (EXP,) * n, TWO)
    s2 = SystemSpec(k_out_of_n(l, n), cop, (EXP,) * n, TWO)
    c = comparison(s1, s2, sobol_log2=9, sweep_bases=16, sweep_steps=64, p_points=300)
    for thm in ("3.1", "3.4"):
        r = verify(c, thm)
        assert r.consistent
        # k >= l means system 1 needs more working components: it is st-smaller
        if k >= l:
            assert r.conclusion.certified


def test_deterministic_environment():
    s1 = SystemSpec(k_out_of_n(2, 3), independence(3), (EXP,) * 3, TWO)
    s2 = SystemSpec(k_out_of_n(2, 3), independence(3), (EXP,) * 3, point(2.0))
    r = verify(comparison(s1, s2), "5.1")
    assert r.consistent
