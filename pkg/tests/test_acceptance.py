"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every criterion prints one ``PASS``/``FAIL`` line; the lines are repeated
in the terminal summary. Run directly with ``python tests/test_acceptance.py``.
"""
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import N2_SUPPORT, random_mu  # noqa: E402
from dimdrop import analysis as A  # noqa: E402
from dimdrop import hidden_markov as HM  # noqa: E402
from dimdrop import hyperbolic as H  # noqa: E402
from dimdrop import prefix_graph as PG  # noqa: E402
from dimdrop import thermo as T  # noqa: E402
from dimdrop import words as W  # noqa: E402
from dimdrop.walk import StepDistribution, unique_last_letter  # noqa: E402

RESULTS: dict = {}


def record(num, name, ok, detail, elapsed, budget):
    within = elapsed < budget
    passed = bool(ok and within)
    line = f"[{'PASS' if passed else 'FAIL'}] {num:>2}. {name}: {detail} ({elapsed:.2f} s, budget {budget:g} s)"
    RESULTS[num] = line
    print(line)
    return passed


def battery_mus():
    rng = np.random.default_rng(50)
    return [random_mu(rng, max_support=8, max_len=4) for _ in range(50)]


def criterion_1():
    t = time.perf_counter()
    worst = max(PG.check_flow(PG.build(mu)) for mu in battery_mus())
    return record(1, "flow conservation", worst <= 1e-12, f"max residual {worst:.2e}", time.perf_counter() - t, 1)


def criterion_2():
    t = time.perf_counter()
    worst = 0.0
    for mu in battery_mus():
        g = PG.build(mu)
        P = PG.kernel(g)
        for w, p in mu.atoms.items():
            worst = max(worst, abs(PG.excursion_probability(g, P, w) - p))
    return record(2, "excursion law", worst <= 1e-12, f"max |path product - mu(w)| {worst:.2e}", time.perf_counter() - t, 1)


def _ratios(p1, p2, p3):
    B = HM.solve(StepDistribution({"a": p1, "aa": p2, "b": p3}))
    nu = lambda w: HM.cylinder_probability(B, w).value
    return nu("ab") / nu("a"), nu("aab") / nu("aa")


def criterion_3():
    t = time.perf_counter()
    rng = np.random.default_rng(3)
    err, margin = 0.0, math.inf
    for _ in range(20):
        p1, p2, p3 = rng.dirichlet(np.ones(3)) * 0.94 + 0.02
        r1, r2 = _ratios(p1, p2, p3)
        err = max(err, abs(r1 - p1 * p3 / (p1 + p2)),
                  abs(r2 - (p1 ** 2 * p3 + p2 * p3) / (p1 ** 2 + p1 * p2 + p2)))
        margin = min(margin, r2 - r1)
    r1, r2 = _ratios(1 / 3, 1 / 3, 1 / 3)
    thirds = max(abs(r1 - 1 / 6), abs(r2 - 4 / 15))
    margin = min(margin, r2 - r1)
    ok = err <= 1e-9 and thirds <= 1e-9 and margin > 1e-6
    detail = f"formula error {err:.2e}, error at 1/3 {thirds:.2e}, min margin {margin:.3g}"
    return record(3, "non-Markov example", ok, detail, time.perf_counter() - t, 5)


def criterion_4():
    t = time.perf_counter()
    B = HM.solve(StepDistribution.nearest_neighbor())
    F = B.first_passage
    off = np.array([[0.0 if y == W.inverse(x) else 1 / 3 for y in B.states] for x in B.states])
    err = max(
        max(abs(F.value(x, "", x) - 1 / 3) for x in W.LETTERS),
        float(np.max(np.abs(B.h - 0.75))),
        max(abs(HM.cylinder_probability(B, x).value - 0.25) for x in W.LETTERS),
        float(np.max(np.abs(B.Phat - off))),
    )
    return record(4, "nearest-neighbour closed form", err <= 1e-9, f"max error {err:.2e}", time.perf_counter() - t, 1)


def criterion_5():
    t = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    for k in range(20):
        mu = random_mu(rng, generating=True)
        B = HM.solve(mu)
        w = HM.sample_boundary(B, int(rng.integers(1, 4)), [5, k])
        exact = HM.cylinder_probability(B, w).value
        with warnings.catch_warnings():
            warnings.simplefilter("error", RuntimeWarning)
            est, se = HM.mc_cylinder_oracle(mu, w, 400, 100_000, seed=[5, k])
        worst = max(worst, abs(exact - est) / se if se > 0 else (0.0 if exact == est else math.inf))
    return record(5, "exact vs raw-walk Monte Carlo", worst <= 4, f"worst deviation {worst:.2f} standard errors",
                  time.perf_counter() - t, 120)


def criterion_6():
    t = time.perf_counter()
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(10):
        B = HM.solve(random_mu(rng, generating=True))
        nu = HM.cylinder_masses(B, 7)
        for w in (w for w in nu if len(w) <= 6):
            worst = max(worst, abs(sum(nu[w + x] for x in W.successors(w)) - nu[w]))
    return record(6, "cylinder additivity", worst <= 1e-9, f"max defect {worst:.2e}", time.perf_counter() - t, 10)


def criterion_7():
    t = time.perf_counter()
    rep = H.standard_schottky(4.0)
    rng = np.random.default_rng(7)
    ident, fd = 0.0, 0.0
    for _ in range(100):
        g = H.rep_of_word(rep, W.random_reduced_word(rng, int(rng.integers(1, 7))))
        theta = rng.uniform(-math.pi, math.pi)
        xi = complex(math.cos(theta), math.sin(theta))
        # the identity compared on the log scale, where both sides are O(word length)
        ident = max(ident, abs(math.log(H.boundary_derivative(g.inverse(), xi)) - H.busemann_orbit(xi, g)))
        h = H.rep_of_word(rep, W.random_reduced_word(rng, int(rng.integers(1, 3))))
        exact = H.boundary_derivative(h, xi)
        fd = max(fd, abs(H.boundary_derivative_fd(h, theta) / exact - 1))
    ok = ident <= 1e-9 and fd <= 1e-4
    return record(7, "Busemann/derivative identity", ok, f"identity residual {ident:.2e}, finite-difference rel. error {fd:.2e}",
                  time.perf_counter() - t, 1)


def criterion_8():
    t = time.perf_counter()
    rep = H.standard_schottky(4.0)
    rng = np.random.default_rng(8)
    worst, count = 0.0, 0
    while count < 50:
        w = W.random_reduced_word(rng, int(rng.integers(1, 9)))
        lt = H.word_translation_length(rep, w)
        if lt <= 0:
            continue
        count += 1
        worst = max(worst, abs(lt - H.translation_length_iterate(H.rep_of_word(rep, w))))
    base = abs(H.translation_length(rep["a"]) - 4.0)
    ok = worst <= 1e-6 and base <= 1e-9
    return record(8, "translation length", ok, f"trace vs iterate {worst:.2e}, |l(a) - L| {base:.2e}",
                  time.perf_counter() - t, 5)


def criterion_9():
    t = time.perf_counter()
    rep = H.standard_schottky(4.0)
    est = T.hausdorff_dimension(rep, 7, start=6)
    d6, d7 = est.convergence_table[0][1], est.convergence_table[1][1]
    sys6 = T.refine(rep, 6)
    radii = [T.spectral_radius(sys6, s) for s in np.linspace(0, 1, 11)]
    decreasing = all(a > b for a, b in zip(radii, radii[1:]))
    oracle = T.box_counting_oracle(rep, 6)
    deltas = [T.hausdorff_dimension(H.standard_schottky(L), 6).value for L in (3, 4, 5, 6)]
    in_L = all(a > b for a, b in zip(deltas, deltas[1:]))
    ok = abs(d7 - d6) < 1e-3 and decreasing and abs(oracle - d6) <= 0.05 and in_L
    detail = (f"|d7 - d6| {abs(d7 - d6):.1e}, radius decreasing {decreasing}, "
              f"|oracle - d6| {abs(oracle - d6):.3f}, delta(L=3..6) {[round(d, 4) for d in deltas]}")
    return record(9, "Hausdorff dimension solver", ok, detail, time.perf_counter() - t, 120)


def criterion_10():
    t = time.perf_counter()
    gaps, ok = [], True
    for L in (3, 4, 5, 6):
        r = A.additivity_test(H.standard_schottky(L))
        gaps.append(r.gap)
        ok = ok and abs(r.gap) > 1e-6 and bool(r.sign_consistent)
    return record(10, "additivity obstruction", ok, "gaps " + ", ".join(f"{g:.4f}" for g in gaps),
                  time.perf_counter() - t, 1)


def criterion_11():
    t = time.perf_counter()
    mu = StepDistribution.nearest_neighbor()
    rep = H.standard_schottky(4.0)
    r1 = A.dimension_drop_report(mu, rep, depth=6, ray_length=400, trials=1000, seed=11)
    r2 = A.dimension_drop_report(mu, rep, depth=6, ray_length=400, trials=1000, seed=11)
    reproducible = r1.to_dict() == r2.to_dict()
    ok = r1.dim_nu < r1.delta and r1.margin > 5 and r1.verdict == "drop detected" and reproducible
    detail = (f"delta {r1.delta:.6f}, dim(nu) {r1.dim_nu:.6f} +- {r1.dim_nu_se:.1e}, "
              f"margin {r1.margin:.1f}, reproducible {reproducible}")
    return record(11, "dimension drop end-to-end", ok, detail, time.perf_counter() - t, 300)


def criterion_12():
    t = time.perf_counter()
    a = unique_last_letter(StepDistribution.nearest_neighbor(), "a")
    b = unique_last_letter(StepDistribution.uniform(N2_SUPPORT), "a")
    c = unique_last_letter(StepDistribution.uniform(["a", "ba"]), "a")
    return record(12, "hypothesis predicate", a and b and not c,
                  f"uniform {a}, n=2 support {b}, {{a, ba}} {c}", time.perf_counter() - t, 1)


def criterion_13():
    t = time.perf_counter()
    B = HM.solve(StepDistribution.uniform(N2_SUPPORT))
    rng = np.random.default_rng(13)
    worst, pinned = 0.0, True
    for _ in range(20):
        w1 = A.random_inner_word(rng, int(rng.integers(0, 6)))
        w2 = A.random_inner_word(rng, int(rng.integers(0, 6)))
        w = "a" + w1 + "a" + w2 + "a"
        pinned = pinned and A.paths_pinned_at(B, w)
        worst = max(worst, abs(A.path_sum(B, w) - A.path_sum(B, "a" + w1 + "a") * A.path_sum(B, "a" + w2 + "a")))
    return record(13, "path_sum factorization", worst <= 1e-12 and pinned,
                  f"max residual {worst:.2e}, a-positions pinned {pinned}", time.perf_counter() - t, 5)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(len(CRITERIA))])
def test_acceptance(criterion):
    assert criterion(), RESULTS[int(criterion.__name__.split("_")[1])]


if __name__ == "__main__":
    outcomes = [c() for c in CRITERIA]
    print(f"{sum(outcomes)}/{len(outcomes)} criteria passed")
    sys.exit(0 if all(outcomes) else 1)
