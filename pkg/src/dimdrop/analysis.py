"""Numerical experiments comparing harmonic measure with the limit set.

Everything here composes the exact boundary chain with the geometry of a
Schottky representation. Statements that can only be evidenced numerically
(failure of uniform Gibbs bounds, power-word rates) are reported as such.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import hidden_markov as HM
from . import hyperbolic as H
from . import thermo as T
from . import words as W
from .errors import DegenerateDistribution, NotHyperbolic, ZeroCylinder
from .walk import StepDistribution, unique_last_letter, validate

DROP_THRESHOLD = 5.0


@dataclass
class HarmonicDimension:
    dim: float
    dim_se: float
    entropy: float
    entropy_se: float
    drift: float
    drift_se: float
    ray_length: int
    trials: int

    def to_dict(self) -> dict:
        return asdict(self)


def _ratio_with_error(h: np.ndarray, d: np.ndarray) -> tuple:
    """Mean ratio mean(h)/mean(d) with first-order (delta method) standard error."""
    N = len(h)
    hm, dm = float(h.mean()), float(d.mean())
    vh = float(h.var(ddof=1)) / N
    vd = float(d.var(ddof=1)) / N
    cov = float(np.cov(h, d, ddof=1)[0, 1]) / N
    ratio = hm / dm
    var = vh / dm ** 2 + hm ** 2 * vd / dm ** 4 - 2 * hm * cov / dm ** 3
    return ratio, math.sqrt(max(var, 0.0)), math.sqrt(vh), math.sqrt(vd)


def harmonic_dimension_estimate(B: HM.BoundaryChain, rep: H.SchottkyRep, n: int = 400, trials: int = 1000, seed=0) -> HarmonicDimension:
    """Estimate dim(nu) as entropy / drift along sampled boundary rays.

    For each ray r of length n: entropy -log(nu([r[:n]]))/n from the exact
    forward recursion, drift dist(o, rho(r[:n]) o)/n from the scaled
    matrix product.
    """
    if n < 50:
        raise ValueError("ray length must be at least 50")
    if trials < 100:
        raise ValueError("need at least 100 rays")
    rays = HM.sample_boundary_indices(B, n, seed, trials)
    ent = -HM.log_cylinder_probabilities(B, rays)[:, -1] / n
    drift = H.ray_displacements(rep, rays, [n])[:, 0] / n
    if float(ent.mean()) < 1e-12:
        raise DegenerateDistribution("boundary measure is atomic: zero entropy along every ray")
    dim, dim_se, ent_se, drift_se = _ratio_with_error(ent, drift)
    return HarmonicDimension(dim, dim_se, float(ent.mean()), ent_se, float(drift.mean()), drift_se, n, trials)


@dataclass
class DimensionDropReport:
    delta: float
    delta_bracket: tuple
    delta_uncertainty: float
    delta_convergence: list
    dim_nu: float
    dim_nu_se: float
    entropy: float
    entropy_se: float
    drift: float
    drift_se: float
    ray_length: int
    trials: int
    combined_uncertainty: float
    margin: float
    verdict: str
    hypothesis_unique_last_a: bool
    generation_verified: bool
    degenerate: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delta_bracket"] = list(self.delta_bracket)
        d["delta_convergence"] = [{"depth": k, "delta": v} for k, v in self.delta_convergence]
        return d


def dimension_drop_report(
    mu: StepDistribution,
    rep: H.SchottkyRep,
    depth: int = 6,
    dim_tol: float = 1e-8,
    ray_length: int = 400,
    trials: int = 1000,
    seed=0,
    solver_tol: float = 1e-12,
    max_iter: int = 1_000_000,
    boundary: HM.BoundaryChain | None = None,
    dimension: T.DimensionEstimate | None = None,
) -> DimensionDropReport:
    """Compare the limit-set dimension with the harmonic-measure dimension.

    "drop detected" requires delta - dim(nu) to exceed five combined
    uncertainties; the delta uncertainty is the larger of its bisection
    bracket and the last depth-to-depth change.
    """
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        gen = validate(mu).generation_verified
    hyp = unique_last_letter(mu, "a")
    est = dimension or T.hausdorff_dimension(rep, depth, dim_tol)
    B = boundary or HM.solve(mu, solver_tol, max_iter)
    notes = []
    try:
        hd = harmonic_dimension_estimate(B, rep, ray_length, trials, seed)
        degenerate = False
    except DegenerateDistribution as exc:
        hd = HarmonicDimension(0.0, 0.0, 0.0, 0.0, math.nan, math.nan, ray_length, trials)
        degenerate = True
        notes.append(str(exc))
    combined = math.hypot(est.uncertainty, hd.dim_se)
    gap = est.value - hd.dim
    margin = gap / combined if combined > 0 else math.inf
    if degenerate:
        verdict = "degenerate"
    elif gap < -3 * combined:
        verdict = "violation"
        notes.append("harmonic dimension exceeds limit-set dimension beyond uncertainty")
    elif margin > DROP_THRESHOLD:
        verdict = "drop detected"
    else:
        verdict = "inconclusive"
    if not gen:
        notes.append("semigroup generation not verified")
    return DimensionDropReport(
        est.value, est.bracket, est.uncertainty, est.convergence_table,
        hd.dim, hd.dim_se, hd.entropy, hd.entropy_se, hd.drift, hd.drift_se,
        ray_length, trials, combined, margin, verdict, hyp, gen, degenerate, notes,
    )


@dataclass
class PowerWordRate:
    word: str
    roots: list            # nu([w^n])^(1/n), n = 1..n_max
    ratios: list           # nu([w^(n+1)]) / nu([w^n])
    ratio_limit: float     # exact limit of the ratios (spectral radius of the period matrix)
    reference: float       # exp(-delta * translation length)
    uncertainty: float
    deviation: float

    @property
    def consistent_with_drop(self) -> bool:
        return bool(self.deviation > DROP_THRESHOLD * self.uncertainty)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["consistent_with_drop"] = self.consistent_with_drop
        d["interpretation"] = (
            "rate differs from exp(-delta*l): evidence for dimension drop"
            if self.consistent_with_drop
            else "rate not distinguishable from exp(-delta*l) at this precision"
        )
        return d


def period_matrix(B: HM.BoundaryChain, w: str) -> np.ndarray:
    """Transfer across one period of w^infinity, between consecutive visits to letter w[0]."""
    Q = np.diag(B.mask(w[0]).astype(float))
    for x in w[1:] + w[0]:
        Q = (Q @ B.g) * B.mask(x)[None, :]
    return Q


def power_word_rate(B: HM.BoundaryChain, rep: H.SchottkyRep, w: str, n_max: int = 20, delta=None) -> PowerWordRate:
    """Cylinder masses of powers of ``w`` against the conformal prediction.

    ``delta`` is a float or a DimensionEstimate (whose uncertainty is then
    propagated into the reference value).
    """
    if not w or not W.is_cyclically_reduced(w) or not W.is_reduced(w):
        raise ValueError(f"{w!r} is not a nonempty cyclically reduced word")
    if HM.cylinder_probability(B, w).value <= 0:
        raise ZeroCylinder(f"nu([{w}]) = 0")
    if delta is None:
        delta = T.hausdorff_dimension(rep)
    if isinstance(delta, T.DimensionEstimate):
        d_val, d_unc = delta.value, delta.uncertainty
    else:
        d_val, d_unc = float(delta), 0.0
    k = len(w)
    rays = np.array([W.to_indices(w * n_max)])
    logs = HM.log_cylinder_probabilities(B, rays)[0]
    lognu = np.array([logs[k * m - 1] for m in range(1, n_max + 1)])
    roots = np.exp(lognu / np.arange(1, n_max + 1))
    ratios = np.exp(np.diff(lognu))
    limit = float(np.max(np.abs(np.linalg.eigvals(period_matrix(B, w)))))
    ell = H.translation_length(H.rep_of_word(rep, w))
    ref = math.exp(-d_val * ell)
    unc = ref * ell * d_unc + (abs(float(ratios[-1]) - limit) if len(ratios) else 0.0) + 1e-12
    return PowerWordRate(w, roots.tolist(), ratios.tolist(), limit, ref, float(unc), abs(limit - ref))


def path_sum(B: HM.BoundaryChain, w: str) -> float:
    """Sum over boundary-chain state paths spelling ``w`` of the g-products."""
    if not w:
        return 1.0
    return float(HM.path_weight_vector(B, w).sum())


def random_inner_word(rng, n: int) -> str:
    """Random word u of length ``n`` such that a u a is reduced."""
    while True:
        u = W.random_reduced_word(rng, n, "a")
        if not u or u[-1] != "A":
            return u


def paths_pinned_at(B: HM.BoundaryChain, w: str, x: str = "a") -> bool:
    """True if every weighted path spelling ``w`` sits in one fixed state at each ``x`` position."""
    states = B.states_emitting(x)
    if len(states) != 1:
        return False
    v = B.mask(w[0]).astype(float)
    for i, c in enumerate(w):
        if i:
            v = np.where(B.mask(c), v @ B.g, 0.0)
        if c == x:
            support = [B.states[j] for j in np.nonzero(v > 0)[0]]
            if any(s != states[0] for s in support):
                return False
    return True


@dataclass
class AdditivityResult:
    w1: str
    w2: str
    ell_product: float
    ell_sum: float
    gap: float
    configuration: str
    predicted_sign: int | None
    sign_consistent: bool | None

    def to_dict(self) -> dict:
        return asdict(self)


def additivity_test(rep: H.SchottkyRep, w1: str = "aa", w2: str = "ab", tol: float = 1e-9) -> AdditivityResult:
    """Compare l(rho(w1 w2)) with l(rho(w1)) + l(rho(w2)).

    Crossing axes force the product to translate less than the sum;
    disjoint axes translating toward a common half-plane force it to
    translate more. Coincident axes give equality.
    """
    g1, g2 = H.rep_of_word(rep, w1), H.rep_of_word(rep, w2)
    l1, l2 = H.word_translation_length(rep, w1), H.word_translation_length(rep, w2)
    l12 = H.word_translation_length(rep, W.product(w1, w2))
    if min(l1, l2, l12) <= 0:
        raise NotHyperbolic("additivity test needs w1, w2 and w1 w2 hyperbolic")
    gap = l12 - (l1 + l2)
    e1, e2 = H.axis_endpoints(g1), H.axis_endpoints(g2)
    same = all(abs(a - b) < 1e-9 for a, b in zip(e1, e2))
    if same:
        config, predicted = "coincident", 0
    else:
        config = H.axes_cross(g1, g2)
        predicted = {"intersecting": -1, "disjoint": 1}.get(config)
    if predicted is None:
        consistent = None
    elif predicted == 0:
        consistent = abs(gap) <= tol
    else:
        consistent = (gap > 0) == (predicted > 0) and abs(gap) > tol
    return AdditivityResult(w1, w2, l12, l1 + l2, gap, config, predicted, consistent)


@dataclass
class GibbsDiagnostic:
    delta: float
    by_length: dict        # length -> {min, max, spread, count}
    spread_grows: bool

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "by_length": {str(k): v for k, v in self.by_length.items()},
            "spread_grows": self.spread_grows,
            "interpretation": (
                "ratio spread grows with word length: evidence against uniform Gibbs bounds"
                if self.spread_grows
                else "ratio spread does not grow with word length"
            ),
        }

    def rows(self) -> list:
        return [
            {"length": k, **v} for k, v in sorted(self.by_length.items())
        ]


def gibbs_comparison_diagnostic(B: HM.BoundaryChain | None, rep: H.SchottkyRep, delta: float, words, measure=None, growth_tol: float = 0.05) -> GibbsDiagnostic:
    """Spread of nu([w]) * exp(delta * dist(o, rho(w) o)) grouped by |w|.

    ``measure`` overrides the cylinder measure (a callable word -> mass);
    by default the exact harmonic measure from ``B`` is used. The spread
    counts as growing when the longest length exceeds the shortest by a
    factor above 1 + growth_tol.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if measure is None:
        def measure(w):
            return HM.cylinder_probability(B, w).value
    groups: dict = {}
    for w in words:
        nu = measure(w)
        if nu <= 0:
            continue
        r = nu * math.exp(delta * H.displacement(H.rep_of_word(rep, w)))
        groups.setdefault(len(w), []).append(r)
    table = {}
    for k in sorted(groups):
        vals = groups[k]
        table[k] = {"min": min(vals), "max": max(vals), "spread": max(vals) / min(vals), "count": len(vals)}
    ks = sorted(table)
    grows = len(ks) >= 2 and table[ks[-1]]["spread"] > table[ks[0]]["spread"] * (1 + growth_tol)
    return GibbsDiagnostic(delta, table, grows)


def conformal_control_measure(rep: H.SchottkyRep, delta: float):
    """Control measure w -> |arc of [w]|^delta normalized over words of the same length."""
    cache: dict = {}

    def measure(w):
        n = len(w)
        if n not in cache:
            lengths = {u: H.cylinder_arc(rep, u)[1] ** delta for u in W.reduced_words(n)}
            total = sum(lengths.values())
            cache[n] = {u: v / total for u, v in lengths.items()}
        return cache[n][w]

    return measure
