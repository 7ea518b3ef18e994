import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from coherent_env.copulas import fgm, independence
from coherent_env.distortions import build, iid_profile, kofn_closed_form
from coherent_env.errors import OutOfRangeError, QuadratureNotConvergedError
from coherent_env.lifetimes import ConditionalLifetimeModel as M
from coherent_env.lifetimes import exponential
from coherent_env.mixtures import (
    Environment, MixedSystemLifetime, beta_env, discrete, gamma_env, point, uniform_env,
)
from coherent_env.structures import CoherentStructure, series

EX11 = CoherentStructure.from_paths(3, [[1, 2], [1, 3]])
EXP = M(exponential(1.0), "mult-frailty")


def test_environment_validation():
    with pytest.raises(OutOfRangeError):
        discrete([(1.0, 0.3), (2.0, 0.3)])
    with pytest.raises(OutOfRangeError):
        discrete([(1.0, 0.5), (1.0, 0.5)])
    with pytest.raises(OutOfRangeError):
        uniform_env(2.0, 1.0)
    with pytest.raises(ValueError):
        Environment("continuous", family="lognormal", params=(0, 1))


@pytest.mark.parametrize("env", [gamma_env(2, 1), uniform_env(1, 3), beta_env(2, 3, 0.5, 2)])
def test_rule_reproduces_moments(env):
    theta, w = env.rule()
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    assert theta @ w == pytest.approx(env.dist().mean(), rel=1e-7)


def test_gamma_series_closed_form():
    a, b = 2.0, 1.0
    life = MixedSystemLifetime(build(series(3), independence(3)), [EXP] * 3, gamma_env(a, b))
    x = np.linspace(0, 4, 15)
    np.testing.assert_allclose(life.survival(x), (b / (b + 3 * x)) ** a, atol=1e-8)
    np.testing.assert_allclose(life.density(x), a * 3 / b * (b / (b + 3 * x)) ** (a + 1), rtol=1e-6)


def test_scalar_and_vector_paths_agree():
    h = build(EX11, fgm(3, 0.5))
    env = discrete([(1.0, 0.4), (2.5, 0.6)])
    vec = MixedSystemLifetime(h, [EXP] * 3, env)
    sca = MixedSystemLifetime(iid_profile(h), [EXP], env)
    x = np.linspace(0.01, 3, 25)
    for name in ("survival", "cdf", "density", "hazard"):
        np.testing.assert_allclose(getattr(vec, name)(x), getattr(sca, name)(x), rtol=1e-11)


def test_conditional_and_point():
    h = kofn_closed_form(2, 3)
    life = MixedSystemLifetime(h, [EXP], gamma_env(2, 1))
    x = np.array([0.5, 1.0])
    np.testing.assert_allclose(life.conditional(1.5).survival(x), h(np.exp(-1.5 * x)), rtol=1e-14)
    assert point(2.0).is_degenerate


def test_adaptive_fallback_rescues_wide_environments():
    # 64 and 128 nodes disagree here; the adaptive pass recovers the closed form
    env = gamma_env(0.4, 0.05)
    life = MixedSystemLifetime(kofn_closed_form(1, 1), [EXP], env)
    x = np.array([0.5, 5.0, 50.0])
    np.testing.assert_allclose(life.survival(x), (0.05 / (0.05 + x)) ** 0.4, atol=1e-8)


def test_quadrature_failure_is_reported():
    # E[1/Theta] diverges for gamma shape below one
    env = gamma_env(0.5, 1.0)
    with pytest.raises(QuadratureNotConvergedError):
        env.integrate(lambda t: 1.0 / t[None, :])


def test_marginal_count_checked():
    with pytest.raises(OutOfRangeError):
        MixedSystemLifetime(build(EX11, independence(3)), [EXP] * 2, point(1.0))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.5, 4), st.floats(0.5, 3), st.floats(-1, 1))
def test_mixture_is_a_lifetime(a, b, lam):
    life = MixedSystemLifetime(build(EX11, fgm(3, lam)), [EXP] * 3, gamma_env(a, b))
    x = np.linspace(0, 6, 40)
    s = life.survival(x)
    assert s[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(s) <= 1e-12)
    np.testing.assert_allclose(s + life.cdf(x), 1.0, atol=1e-12)
    assert np.all(life.density(x) >= 0)


def test_density_integrates_cdf():
    life = MixedSystemLifetime(build(EX11, fgm(3, -0.4)), [EXP] * 3, uniform_env(1, 2))
    val, _ = integrate.quad(lambda t: float(life.density(t)), 0, 1.5, epsabs=1e-12)
    assert val == pytest.approx(float(life.cdf(1.5)), abs=1e-9)
