import warnings

import numpy as np
import pytest

from dimdrop import words as W
from dimdrop.errors import EmptySupport, EpsilonAtom, NonNormalized, NotReducedError
from dimdrop.walk import (
    GenerationUnverified,
    StepDistribution,
    child_seed,
    last_letter_multiplicity,
    letter_marginals,
    sample_walk,
    unique_last_letter,
    validate,
)

from conftest import N2_SUPPORT, random_mu


def test_construction_errors():
    with pytest.raises(EmptySupport):
        StepDistribution({})
    with pytest.raises(EpsilonAtom):
        StepDistribution({"": 0.5, "a": 0.5})
    with pytest.raises(NotReducedError):
        StepDistribution({"aA": 1.0})
    with pytest.raises(NonNormalized):
        StepDistribution({"a": 0.5, "b": 0.499})


def test_rational_probabilities():
    mu = StepDistribution({"a": "1/3", "b": "2/3"})
    assert mu.atoms["a"] == pytest.approx(1 / 3, abs=1e-15)


def test_validate_uniform():
    rep = validate(StepDistribution.nearest_neighbor(), radius=1)
    assert rep.generation_verified
    assert rep.residual < 1e-12


def test_validate_single_atom_warns():
    with pytest.warns(GenerationUnverified):
        rep = validate(StepDistribution({"ab": 1.0}), radius=6)
    assert not rep.generation_verified


def test_validate_products():
    mu = StepDistribution({"ab": "1/3", "A": "1/3", "B": "1/3"})
    assert validate(mu, radius=4).generation_verified


def test_last_letter_multiplicity():
    assert last_letter_multiplicity(StepDistribution.nearest_neighbor(), "a") == (1, ["a"])
    n2 = StepDistribution.uniform(N2_SUPPORT)
    assert last_letter_multiplicity(n2, "a") == (1, ["a"])
    count, wit = last_letter_multiplicity(StepDistribution.uniform(["a", "ba"]), "a")
    assert count == 2 and sorted(wit) == ["a", "ba"]


def test_multiplicities_sum_to_prefix_count():
    rng = np.random.default_rng(1)
    for _ in range(20):
        mu = random_mu(rng)
        total = sum(last_letter_multiplicity(mu, x)[0] for x in W.LETTERS)
        assert total == len(W.prefix_closure(mu.support)) - 1


def test_hypothesis_predicate():
    assert unique_last_letter(StepDistribution.nearest_neighbor())
    assert not unique_last_letter(StepDistribution.uniform(["a", "ba"]))


def test_sample_walk_examples():
    mu = StepDistribution({"ab": 1.0})
    assert sample_walk(mu, 0, 1) == ("", "")
    assert sample_walk(mu, 3, 1) == ("ababab", "ababab")


def test_sample_walk_reproducible():
    mu = StepDistribution.uniform(N2_SUPPORT)
    assert sample_walk(mu, 200, 42) == sample_walk(mu, 200, 42)


def test_simple_walk_drift():
    # 10^3 walks of 10^4 steps through the vectorized reducer
    from dimdrop.hidden_markov import reduced_walk_block

    rng = np.random.default_rng(7)
    _, height = reduced_walk_block(StepDistribution.nearest_neighbor(), 10_000, 1000, rng, keep=1)
    assert abs(height.mean() / 10_000 - 0.5) < 0.02


def test_letter_frequencies_chi_square():
    mu = StepDistribution({"ab": 0.5, "A": 0.25, "bb": 0.25})
    raw, _ = sample_walk(mu, 20_000, 3)
    expected = letter_marginals(mu)
    n = len(raw)
    chi2 = sum((raw.count(x) - n * p) ** 2 / (n * p) for x, p in expected.items() if p > 0)
    # 2 degrees of freedom (B never appears); 0.999 quantile is 13.8
    assert chi2 < 13.8


def test_child_seed_independent_of_order():
    a = np.random.default_rng(child_seed(5, 3)).random(4)
    b = np.random.default_rng(child_seed(5, 3)).random(4)
    c = np.random.default_rng(child_seed(5, 4)).random(4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
