from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherent_env.errors import (
    DegenerateSystemError, IrrelevantComponentError, NonMonotoneError, OutOfRangeError,
)
from coherent_env.structures import (
    CoherentStructure, expand_paths, from_boolean_table, k_out_of_n, parallel, series,
)


def test_series_parallel_kofn_phi():
    assert series(3).phi((1, 1, 1)) == 1 and series(3).phi((1, 0, 1)) == 0
    assert parallel(3).phi((0, 0, 1)) == 1 and parallel(3).phi((0, 0, 0)) == 0
    s = k_out_of_n(2, 3)
    assert [s.phi(x) for x in ((1, 1, 0), (1, 0, 0), (0, 1, 1))] == [1, 0, 1]


def test_expand_kofn_paths():
    assert expand_paths(k_out_of_n(2, 3)) == {frozenset(p) for p in ((1, 2), (1, 3), (2, 3))}


def test_invalid_structures():
    with pytest.raises(OutOfRangeError):
        k_out_of_n(4, 3)
    with pytest.raises(OutOfRangeError):
        CoherentStructure.from_paths(0, [[1]])
    with pytest.raises(DegenerateSystemError):
        CoherentStructure.from_paths(2, [])
    with pytest.raises(IrrelevantComponentError):
        from_boolean_table(3, lambda s: s[0] & s[1])


def test_table_round_trip_example():
    ex = CoherentStructure.from_paths(3, [[1, 2], [1, 3]])
    back = from_boolean_table(3, {s: ex.phi(s) for s in product((0, 1), repeat=3)})
    assert back.paths == ex.paths


def test_non_monotone_table_rejected():
    with pytest.raises(NonMonotoneError):
        from_boolean_table(2, {(0, 0): 0, (1, 0): 1, (0, 1): 1, (1, 1): 0})
    with pytest.raises(DegenerateSystemError):
        from_boolean_table(2, lambda s: 1)


@st.composite
def structures(draw):
    n = draw(st.integers(1, 5))
    k = draw(st.integers(1, n))
    pool = [frozenset(i + 1 for i in range(n) if m >> i & 1) for m in range(1, 1 << n)]
    fam = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=6))
    minimal = {p for p in fam if not any(q < p for q in fam)}
    covered = set().union(*minimal)
    # pad with singleton paths so every component is relevant
    minimal |= {frozenset({i}) for i in range(1, n + 1) if i not in covered}
    minimal = {p for p in minimal if not any(q < p for q in minimal)}
    if set().union(*minimal) != set(range(1, n + 1)):
        return k_out_of_n(k, n)
    return CoherentStructure.from_paths(n, minimal)


@settings(max_examples=60, deadline=None)
@given(structures())
def test_phi_monotone_and_table_round_trip(s):
    table = {x: s.phi(x) for x in product((0, 1), repeat=s.n)}
    for x, v in table.items():
        for i in range(s.n):
            if x[i] == 0:
                up = x[:i] + (1,) + x[i + 1:]
                assert table[up] >= v
    assert table[(0,) * s.n] == 0 and table[(1,) * s.n] == 1
    assert from_boolean_table(s.n, table).paths == expand_paths(s)


@settings(max_examples=40, deadline=None)
@given(structures())
def test_working_table_matches_phi(s):
    tab = s.working_table()
    assert tab.shape == (1 << s.n,)
    for state, v in s.to_boolean_table().items():
        assert s.phi(state) == v
        assert tab[sum(b << i for i, b in enumerate(state))] == v
