"""Coherent systems with dependent components in random environments.

Distortion functions of coherent structures under survival copulas, mixed
lifetimes over an environment law, grid certification of stochastic orders,
numerical checks of the comparison theorems, and a Monte Carlo oracle.
"""

__version__ = "0.1.0"

from .copulas import SurvivalCopula, clayton_oakes, fgm, gumbel_barnett, independence
from .distortions import DistortionFunction, KofnIndependent, ScalarDistortion, build, iid_profile, kofn_closed_form
from .errors import CoherentEnvError
from .lifetimes import Baseline, ConditionalLifetimeModel, exponential, gamma, weibull
from .mixtures import Environment, MixedSystemLifetime, beta_env, discrete, gamma_env, point, uniform_env
from .orders import GridSpec, OrderVerdict, check_hr, check_lr, check_order, check_rhr, check_st
from .structures import CoherentStructure, k_out_of_n, parallel, series
from .theorems import ComparisonScenario, SystemSpec, TheoremReport, certify_kofn_lemmas, verify

__all__ = [
    "Baseline", "CoherentEnvError", "CoherentStructure", "ComparisonScenario", "ConditionalLifetimeModel",
    "DistortionFunction", "Environment", "GridSpec", "KofnIndependent", "MixedSystemLifetime", "OrderVerdict",
    "ScalarDistortion", "SurvivalCopula", "SystemSpec", "TheoremReport", "beta_env", "build", "certify_kofn_lemmas",
    "check_hr", "check_lr", "check_order", "check_rhr", "check_st", "clayton_oakes", "discrete", "exponential",
    "fgm", "gamma", "gamma_env", "gumbel_barnett", "iid_profile", "independence", "k_out_of_n", "kofn_closed_form",
    "parallel", "point", "series", "uniform_env", "verify", "weibull",
]
