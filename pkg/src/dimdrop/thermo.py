"""Hausdorff dimension of the limit set from Bowen's equation.

The boundary map acting as the inverse generator on each arc is conjugate to
the shift on reduced rays. We discretize its transfer operator on depth-n
cylinders, one marked point per cylinder, and find the exponent at which the
leading eigenvalue equals 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hyperbolic as H
from . import words as W
from .errors import BracketError, PowerIterationStalled


@dataclass(frozen=True)
class RefinedSystem:
    depth: int
    words: tuple
    successors: np.ndarray     # (N, 3) indices of shift successors
    marked: np.ndarray         # marked boundary point of each cylinder
    potential: np.ndarray      # log |F'| at the marked point (one step of the shift)
    contraction: np.ndarray    # |(F^n)'|^{-1} at the marked point

    def __len__(self):
        return len(self.words)

    def weights(self, s: float) -> np.ndarray:
        """Cylinder contraction weights |(F^n)'|^{-s}."""
        return self.contraction ** s


def continuation_letter(w: str) -> str:
    """Least letter (order a, b, A, B) that may follow ``w``."""
    return W.successors(w)[0]


def refine(rep: H.SchottkyRep, n: int) -> RefinedSystem:
    if not 1 <= n <= 10:
        raise ValueError("depth must lie between 1 and 10")
    words = tuple(W.reduced_words(n))
    index = {w: i for i, w in enumerate(words)}
    succ = np.array([[index[w[1:] + x] for x in W.successors(w)] for w in words], dtype=np.int64)
    fixed = {x: H.attracting_point(rep, x) for x in W.LETTERS}
    marked = np.empty(len(words), dtype=complex)
    pot = np.empty(len(words))
    contr = np.empty(len(words))
    for i, w in enumerate(words):
        # marked point: limit of the lexicographically least ray w x x x ...
        xi = H.rep_of_word(rep, w)(fixed[continuation_letter(w)])
        xi /= abs(xi)
        marked[i] = xi
        pot[i] = math.log(H.boundary_derivative(rep.gens[w[0]].inverse(), xi))
        contr[i] = 1.0 / H.boundary_derivative(H.rep_of_word(rep, w).inverse(), xi)
    return RefinedSystem(n, words, succ, marked, pot, contr)


def spectral_radius(sys: RefinedSystem, s: float, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Leading eigenvalue of the weighted shift matrix at exponent ``s``.

    Entry (w, w') for an admissible shift step carries the one-step weight
    exp(-s * potential) of the target cylinder.
    """
    wts = np.exp(-s * sys.potential)
    v = np.ones(len(sys))
    lam = 0.0
    for _ in range(max_iter):
        u = (wts * v)[sys.successors].sum(axis=1)
        new = float(u.max())
        v = u / new
        if lam and abs(new - lam) <= tol * new:
            return new
        lam = new
    raise PowerIterationStalled(f"power iteration did not settle at s = {s} after {max_iter} iterations")


@dataclass
class DimensionEstimate:
    depth: int
    value: float
    bracket: tuple
    convergence_table: list = field(default_factory=list)   # [(depth, delta), ...]
    trace: list = field(default_factory=list)               # [(s, radius), ...] bisection trace at final depth

    @property
    def cauchy_gap(self) -> float:
        """|delta_n - delta_{n-1}|, the empirical discretization error."""
        if len(self.convergence_table) < 2:
            return math.nan
        return abs(self.convergence_table[-1][1] - self.convergence_table[-2][1])

    @property
    def uncertainty(self) -> float:
        width = self.bracket[1] - self.bracket[0]
        gap = self.cauchy_gap
        return max(width, 0.0 if math.isnan(gap) else gap)

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "delta": self.value,
            "bracket": list(self.bracket),
            "uncertainty": self.uncertainty,
            "convergence_table": [{"depth": d, "delta": v} for d, v in self.convergence_table],
        }


def bowen_root(sys: RefinedSystem, tol: float = 1e-8, trace: list | None = None) -> tuple:
    """Bisection for spectral_radius(s) = 1 on [0, 1]; returns the bracket."""
    lo, hi = 0.0, 1.0
    r_lo = spectral_radius(sys, lo)
    r_hi = spectral_radius(sys, hi)
    if trace is not None:
        trace.extend([(lo, r_lo), (hi, r_hi)])
    if not (r_lo > 1.0 and r_hi < 1.0):
        raise BracketError(f"no sign change on [0, 1]: radius(0) = {r_lo:.6g}, radius(1) = {r_hi:.6g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        r = spectral_radius(sys, mid)
        if trace is not None:
            trace.append((mid, r))
        if r > 1.0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def hausdorff_dimension(rep: H.SchottkyRep, n: int = 6, tol: float = 1e-8, start: int = 2) -> DimensionEstimate:
    if tol < 1e-10:
        raise ValueError("tolerance below 1e-10 is not supported")
    table = []
    trace: list = []
    bracket = (0.0, 1.0)
    for d in range(min(start, n), n + 1):
        sys = refine(rep, d)
        t = [] if d == n else None
        bracket = bowen_root(sys, tol, t)
        table.append((d, 0.5 * (bracket[0] + bracket[1])))
        if t is not None:
            trace = t
    return DimensionEstimate(n, table[-1][1], bracket, table, sorted(trace))


def moran_root(lengths, tol: float = 1e-12) -> float:
    """Solve sum(lengths ** s) = 1 for s by bisection."""
    lengths = np.asarray(lengths, dtype=float)
    if np.any(lengths >= 1.0) or np.any(lengths <= 0):
        raise ValueError("lengths must lie in (0, 1)")

    def excess(s):
        return float(np.sum(lengths ** s)) - 1.0

    lo, hi = 0.0, 1.0
    while excess(hi) > 0:
        hi *= 2.0
        if hi > 1e3:
            raise BracketError("Moran sum does not drop below 1")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cylinder_lengths(rep: H.SchottkyRep, depth: int) -> np.ndarray:
    return np.array([H.cylinder_arc(rep, w)[1] for w in W.reduced_words(depth)])


def box_counting_oracle(rep: H.SchottkyRep, depth: int = 6) -> float:
    """Moran-style estimate from the arc lengths of depth-n cylinders.

    Lengths are measured as fractions of the full circle; the unit shifts
    the estimate by O(1/depth).
    """
    if not 1 <= depth <= 8:
        raise ValueError("depth must lie between 1 and 8")
    return moran_root(cylinder_lengths(rep, depth) / H.TWO_PI)
