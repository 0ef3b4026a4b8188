import numpy as np
import pytest

from dimdrop import prefix_graph as PG
from dimdrop.errors import WordNotInSupport
from dimdrop.walk import StepDistribution

from conftest import random_mu


@pytest.fixture
def aab():
    return StepDistribution({"a": 0.2, "aa": 0.3, "b": 0.5})


def test_build_weights(aab):
    g = PG.build(aab)
    assert g.vertices == ("", "a", "aa", "b")
    expected = {("", "a"): 0.5, ("a", "aa"): 0.3, ("a", ""): 0.2, ("aa", ""): 0.3, ("", "b"): 0.5, ("b", ""): 0.5}
    assert g.weights.keys() == expected.keys()
    for e, w in expected.items():
        assert g.weights[e] == pytest.approx(w, abs=1e-15)


def test_star_and_path():
    g = PG.build(StepDistribution.nearest_neighbor())
    assert all(g.weights[("", x)] == 0.25 and g.weights[(x, "")] == 0.25 for x in "abAB")
    g = PG.build(StepDistribution({"ab": 1.0}))
    assert g.weights == {("", "a"): 1.0, ("a", "ab"): 1.0, ("ab", ""): 1.0}


def test_kernel():
    P = PG.kernel(PG.build(StepDistribution.uniform(["a", "aa", "b"])))
    assert P.prob("a", "aa") == pytest.approx(0.5)
    assert P.prob("a", "") == pytest.approx(0.5)
    P = PG.kernel(PG.build(StepDistribution.nearest_neighbor()))
    assert P.prob("", "b") == 0.25 and P.prob("b", "") == 1.0


def test_kernel_rows_and_support():
    rng = np.random.default_rng(11)
    for _ in range(20):
        g = PG.build(random_mu(rng))
        P = PG.kernel(g)
        assert np.max(np.abs(P.P.sum(axis=1) - 1)) <= 1e-12
        assert np.array_equal(P.P > 0, g.weight_matrix() > 0)


def test_flow(aab):
    assert PG.check_flow(PG.build(aab)) <= 1e-12
    assert PG.check_flow(PG.build(StepDistribution.nearest_neighbor())) == 0.0


def test_flow_fault_injection(aab):
    g = PG.build(aab)
    weights = dict(g.weights)
    weights[("a", "aa")] += 1e-6
    bad = PG.WeightedPrefixGraph(g.mu, g.vertices, weights)
    assert PG.check_flow(bad) == pytest.approx(1e-6, rel=1e-3)


def test_excursions():
    mu = StepDistribution.uniform(["a", "aa", "b"])
    g = PG.build(mu)
    P = PG.kernel(g)
    assert PG.excursion_probability(g, P, "aa") == pytest.approx(1 / 3, abs=1e-15)
    assert sum(PG.excursion_probability(g, P, w) for w in mu.support) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(WordNotInSupport):
        PG.excursion_probability(g, P, "ab")


def test_paths_visit_root():
    rng = np.random.default_rng(12)
    for _ in range(20):
        mu = random_mu(rng)
        assert PG.max_path_avoiding_root(PG.build(mu)) <= mu.max_length


def test_dot_export():
    dot = PG.export_dot(PG.build(StepDistribution({"ab": 1.0})))
    assert dot.count("[label=") == 6  # 3 nodes, 3 edges
    dot = PG.export_dot(PG.build(StepDistribution.uniform(["a", "aa", "b"])))
    assert dot.count("->") == 6 and dot.count("];") - dot.count("->") == 4
    assert dot == PG.export_dot(PG.build(StepDistribution.uniform(["b", "aa", "a"])))


def test_simulate_chain_deterministic_cycle():
    P = PG.kernel(PG.build(StepDistribution({"ab": 1.0})))
    states, word = PG.simulate_chain(P, 6, 0)
    assert word == "ababab"


def test_simulate_chain_excursion_frequencies():
    mu = StepDistribution.uniform(["a", "aa", "b"])
    P = PG.kernel(PG.build(mu))
    states, _ = PG.simulate_chain(P, 250_000, 1)
    exc = PG.excursions(states)[:100_000]
    n = len(exc)
    sigma = np.sqrt((1 / 3) * (2 / 3) / n)
    for w in mu.support:
        assert abs(exc.count(w) / n - 1 / 3) < 3 * sigma


def test_simulate_chain_letter_symmetry():
    P = PG.kernel(PG.build(StepDistribution.nearest_neighbor()))
    states, _ = PG.simulate_chain(P, 100_000, 2)
    exc = PG.excursions(states)
    n = len(exc)
    sigma = np.sqrt(0.25 * 0.75 / n)
    for x in "abAB":
        assert abs(exc.count(x) / n - 0.25) < 3 * sigma
