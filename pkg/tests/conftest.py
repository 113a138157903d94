import numpy as np
import pytest

from extl import ConstantRate, Exponential, TriangularRamp, Uniform

# independently verified characteristics of the two benchmark scenarios
# (root of the mean discounted infectivity, 30-digit quadrature + root find)
RHO_TRUE = {0.132: -0.06773196485254927, 0.16: -0.03693614983082081}

MARKOV_LAMBDA = 0.13258235294117647
MARKOV_MU = 0.20088235294117647


def ramp_law(peak_a: float, s_bar: float = 1.0) -> TriangularRamp:
    return TriangularRamp(
        peak_a=peak_a,
        tau=Uniform(1.5, 2.5),
        eta=Uniform(7.0, 13.0),
        susceptible_fraction=s_bar,
    )


def matched_markov_law() -> ConstantRate:
    return ConstantRate(lam=MARKOV_LAMBDA, eta=Exponential(MARKOV_MU))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250809)
