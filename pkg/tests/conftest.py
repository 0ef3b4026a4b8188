import warnings

import numpy as np
import pytest

from dimdrop import hidden_markov as HM
from dimdrop import hyperbolic as H
from dimdrop import words as W
from dimdrop.walk import StepDistribution, validate

N2_SUPPORT = ["b", "A", "B", "bb", "bA", "Ab", "AA", "AB", "BA", "BB", "a", "ab", "aB"]


def random_mu(rng, max_support=8, max_len=4, generating=False):
    """Random step distribution; with ``generating`` retry until the BFS check passes."""
    while True:
        k = int(rng.integers(2, max_support + 1))
        support = set()
        while len(support) < k:
            n = int(rng.integers(1, max_len + 1))
            support.add(W.random_reduced_word(rng, n))
        p = rng.dirichlet(np.ones(k)) + 0.02
        p /= p.sum()
        mu = StepDistribution(dict(zip(sorted(support), p)))
        if not generating:
            return mu
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if validate(mu, radius=4).generation_verified:
                return mu


@pytest.fixture(scope="session")
def nn():
    return StepDistribution.nearest_neighbor()


@pytest.fixture(scope="session")
def nn_chain(nn):
    return HM.solve(nn)


@pytest.fixture(scope="session")
def n2_mu():
    return StepDistribution.uniform(N2_SUPPORT)


@pytest.fixture(scope="session")
def n2_chain(n2_mu):
    return HM.solve(n2_mu)


@pytest.fixture(scope="session")
def rep4():
    return H.standard_schottky(4.0)


@pytest.fixture(scope="session")
def generating_mus():
    rng = np.random.default_rng(2024)
    return [random_mu(rng, generating=True) for _ in range(10)]


@pytest.fixture(scope="session")
def generating_chains(generating_mus):
    return [HM.solve(mu) for mu in generating_mus]


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[k])
