import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from coherent_env.copulas import SurvivalCopula, clayton_oakes, fgm, gumbel_barnett, independence
from coherent_env.errors import BoundaryPointError, DimensionMismatchError, OutOfRangeError, OutOfUnitCubeError

unit = st.floats(0.01, 0.99)


def copulas(dim):
    return st.one_of(
        st.just(independence(dim)),
        st.floats(-1, 1).map(lambda t: fgm(dim, t)),
        # above dimension two Gumbel-Barnett stays a distribution function on
        # [0.01, 1]^dim only for small alpha
        st.floats(0.01, 1.0 if dim == 2 else 0.05).map(lambda t: gumbel_barnett(dim, t)),
        st.floats(0.1, 5.0).map(lambda t: clayton_oakes(dim, t)),
    )


def test_aliases_and_validation():
    assert SurvivalCopula("Clayton", 2, 1.0).family == "clayton-oakes"
    assert SurvivalCopula("gb", 2, 0.5).family == "gumbel-barnett"
    with pytest.raises(ValueError):
        SurvivalCopula("frank", 2, 1.0)
    with pytest.raises(OutOfRangeError):
        fgm(2, 1.5)
    with pytest.raises(OutOfRangeError):
        clayton_oakes(2, 0.0)
    with pytest.raises(OutOfRangeError):
        SurvivalCopula("independence", 2, 0.3)


def test_argument_checks():
    c = fgm(3, 0.2)
    with pytest.raises(DimensionMismatchError):
        c([0.5, 0.5])
    with pytest.raises(OutOfUnitCubeError):
        c([0.5, 1.2, 0.3])
    with pytest.raises(BoundaryPointError):
        clayton_oakes(2, 1.0).gradient([0.0, 0.5])


def test_closed_forms():
    u = np.array([0.3, 0.6])
    assert fgm(2, 0.5)(u) == pytest.approx(0.18 * (1 + 0.5 * 0.7 * 0.4), rel=1e-14)
    assert gumbel_barnett(2, 0.4)(u) == pytest.approx(0.18 * np.exp(-0.4 * np.log(0.3) * np.log(0.6)), rel=1e-14)
    assert clayton_oakes(2, 2.0)(u) == pytest.approx((0.3**-2 + 0.6**-2 - 1) ** -0.5, rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4).flatmap(lambda d: st.tuples(copulas(d), arrays(float, d, elements=unit))))
def test_uniform_margins_and_grounding(args):
    c, u = args
    for i in range(c.dim):
        v = np.ones(c.dim)
        v[i] = u[i]
        assert c(v) == pytest.approx(u[i], abs=1e-14)
        v[i] = 0.0
        assert c(v) == 0.0
    assert c(u) + c.complement(u) == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4).flatmap(lambda d: st.tuples(copulas(d), arrays(float, d, elements=unit))))
def test_gradient_matches_finite_differences(args):
    c, u = args
    g = c.gradient(u)
    for i in range(c.dim):
        e = np.zeros(c.dim)
        e[i] = 1e-6
        fd = (c(u + e) - c(u - e)) / 2e-6
        assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-9)
        assert c.partial(u, i + 1) == g[i]


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4).flatmap(lambda d: st.tuples(copulas(d), st.integers(1, d), unit)))
def test_diagonal_section(args):
    c, a, p = args
    v = np.ones(c.dim)
    v[:a] = p
    g, comp, d1, _ = c.diagonal(a, np.array([p]))
    assert g[0] == pytest.approx(c(v), rel=1e-12)
    assert comp[0] == pytest.approx(1 - c(v), rel=1e-12, abs=1e-14)
    fd = (c.diagonal(a, np.array([p + 1e-6]))[0] - c.diagonal(a, np.array([p - 1e-6]))[0]) / 2e-6
    assert d1[0] == pytest.approx(fd[0], rel=1e-5, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(copulas(2), unit, unit, unit, unit)
def test_bivariate_rectangle_inequality(c, a, b, x, y):
    u1, u2 = sorted((a, b))
    v1, v2 = sorted((x, y))
    vol = c([u2, v2]) - c([u1, v2]) - c([u2, v1]) + c([u1, v1])
    assert vol >= -1e-12
