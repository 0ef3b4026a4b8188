"""Exact harmonic measure of cylinders as a hidden Markov measure.

The prefix-graph chain, paired with the reduced word it has spelled so far,
moves by at most one tree edge per step. Because the Cayley graph of the free
group is a tree, every hitting event factors through first passages across
single edges. ``F[x][s, t]`` is the probability that, started in chain state
``s`` at some tree vertex ``u``, the walk ever steps onto ``u x`` and does so
for the first time in state ``t``. These satisfy, for each letter ``x``,

    F_x = P D_x + P (E_0 + sum_{y != x} D_y F_{y^-1}) F_x

where ``D_y`` projects onto states whose last letter is ``y`` and ``E_0``
onto the empty state. The minimal nonnegative solution is the one we want.
From it we read off the initial vector ``f``, the hidden transition weights
``g`` and the survival vector ``h`` of the boundary chain.
"""
from __future__ import annotations

import functools

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import words as W
from .errors import NormalizationFailure, NotConverged, SingularSystem
from .prefix_graph import ChainKernel, build, kernel
from .walk import StepDistribution, child_seed

log = logging.getLogger(__name__)

_MONOTONE_SLACK = 1e-12
_POSITIVE = 1e-14


@dataclass(frozen=True)
class FirstPassageFamily:
    vertices: tuple       # vertices[0] == ''
    F: dict               # letter -> (V, V) array
    iterations: int
    residual: float
    tol: float

    @property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def value(self, x: str, source: str, target: str) -> float:
        idx = self.index
        return float(self.F[x][idx[source], idx[target]])


def _letter_masks(vertices) -> dict:
    return {x: np.array([bool(v) and v[-1] == x for v in vertices]) for x in W.LETTERS}


def _kernel_for(P, masks, F, x):
    """Linear operator acting on F_x, built from the other (current) blocks."""
    V = P.shape[0]
    C = np.zeros((V, V))
    C[0, 0] = 1.0
    for y in W.LETTERS:
        if y != x:
            C[masks[y]] = F[W.inverse(y)][masks[y]]
    return P @ C


def fixed_point_residual(P: np.ndarray, vertices, F: dict) -> float:
    masks = _letter_masks(vertices)
    res = 0.0
    for x in W.LETTERS:
        rhs = P * masks[x][None, :] + _kernel_for(P, masks, F, x) @ F[x]
        res = max(res, float(np.max(np.abs(rhs - F[x]))))
    return res


def solve_first_passage(P: ChainKernel, tol: float = 1e-12, max_iter: int = 1_000_000) -> FirstPassageFamily:
    """Minimal nonnegative first-passage family by monotone iteration from zero.

    Each sweep visits the letters in the order a, b, A, B. For letter ``x`` the
    other blocks are frozen at their latest values and the (then linear)
    equation for ``F_x`` is solved exactly; this is a block Gauss-Seidel step
    of the monotone map and keeps the iterates nondecreasing.
    """
    vertices = P.vertices
    Pm = P.P
    V = len(vertices)
    masks = _letter_masks(vertices)
    F = {x: np.zeros((V, V)) for x in W.LETTERS}
    eye = np.eye(V)
    rhs = {x: Pm * masks[x][None, :] for x in W.LETTERS}
    update = np.inf
    it = 0
    while it < max_iter:
        it += 1
        update = 0.0
        for x in W.LETTERS:
            if not masks[x].any():
                continue
            K = _kernel_for(Pm, masks, F, x)
            try:
                new = np.linalg.solve(eye - K, rhs[x])
            except np.linalg.LinAlgError:
                new = rhs[x] + K @ F[x]
            if np.any(new < -_MONOTONE_SLACK):
                # block operator not contracting yet; fall back to one plain step
                new = rhs[x] + K @ F[x]
            new = np.clip(new, 0.0, None)
            drop = float(np.max(F[x] - new))
            if drop > _MONOTONE_SLACK:
                raise AssertionError(f"first-passage iterates decreased by {drop:.3e} at sweep {it}")
            new = np.maximum(new, F[x])
            update = max(update, float(np.max(np.abs(new - F[x]))))
            F[x] = new
        if update < tol:
            break
    residual = fixed_point_residual(Pm, vertices, F)
    if update >= tol:
        raise NotConverged(
            f"first-passage iteration did not converge in {max_iter} sweeps (last update {update:.3e}, residual {residual:.3e})",
            residual=residual,
            iterations=it,
        )
    log.debug("first passage converged: %d sweeps, residual %.3e", it, residual)
    return FirstPassageFamily(vertices, F, it, residual, tol)


@dataclass(frozen=True)
class BoundaryChain:
    """Hidden Markov description of the harmonic measure on reduced rays.

    States are the nonempty prefixes of the support; each emits its last
    letter. ``p`` and ``Phat`` are the initial law and transition matrix.
    """

    states: tuple
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray
    p: np.ndarray
    Phat: np.ndarray
    h_residual: float
    h_spectral_radius: float
    p_residual: float
    row_residual: float
    first_passage: FirstPassageFamily = field(repr=False)
    _emits: np.ndarray = field(init=False, repr=False, compare=False)
    _masks: dict = field(init=False, repr=False, compare=False)
    _gpos: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        emits = np.array([W.letter_index(s[-1]) for s in self.states], dtype=np.int64)
        object.__setattr__(self, "_emits", emits)
        object.__setattr__(self, "_masks", {x: emits == W.letter_index(x) for x in W.LETTERS})
        object.__setattr__(self, "_gpos", (self.g > 0).astype(np.int64))

    @property
    def emits(self) -> np.ndarray:
        """Letter index (a, b, A, B -> 0..3) emitted by each state."""
        return self._emits

    def mask(self, x: str) -> np.ndarray:
        return self._masks[x]

    @property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def states_emitting(self, x: str) -> list:
        return [s for s in self.states if s[-1] == x]

    def summary(self) -> dict:
        return {
            "states": list(self.states),
            "f": self.f.tolist(),
            "h": self.h.tolist(),
            "p": self.p.tolist(),
            "h_residual": self.h_residual,
            "h_spectral_radius": self.h_spectral_radius,
            "p_residual": self.p_residual,
            "row_residual": self.row_residual,
            "first_passage_iterations": self.first_passage.iterations,
            "first_passage_residual": self.first_passage.residual,
        }


def boundary_chain(F: FirstPassageFamily, P: ChainKernel | None = None, norm_tol: float = 1e-9) -> BoundaryChain:
    vertices = F.vertices
    states = vertices[1:]
    n = len(states)
    emits = [s[-1] for s in states]
    f = np.array([F.F[x][0, i + 1] for i, x in enumerate(emits)])
    g = np.zeros((n, n))
    for j, y in enumerate(emits):
        g[:, j] = F.F[y][1:, j + 1]
    for i, x in enumerate(emits):
        for j, y in enumerate(emits):
            if y == W.inverse(x):
                g[i, j] = 0.0
    # survival: return to the parent vertex (F_{x^-1}), then cross back (F_x) and survive
    M = np.zeros((n, n))
    c = np.zeros(n)
    for i, x in enumerate(emits):
        back = F.F[W.inverse(x)][i + 1]          # over V
        c[i] = 1.0 - back.sum()
        M[i] = (back @ F.F[x])[1:]
    rho = float(np.max(np.abs(np.linalg.eigvals(M)))) if n else 0.0
    if rho >= 1.0 - 1e-12:
        raise SingularSystem(f"survival system is singular: spectral radius {rho:.6g}", spectral_radius=rho)
    try:
        h = np.linalg.solve(np.eye(n) - M, c)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"survival system could not be solved: {exc}", spectral_radius=rho) from exc
    h_res = float(np.max(np.abs((np.eye(n) - M) @ h - c))) if n else 0.0
    if h_res > 1e-12:
        # one refinement step against the same factorization
        h = h + np.linalg.solve(np.eye(n) - M, c - (np.eye(n) - M) @ h)
        h_res = float(np.max(np.abs((np.eye(n) - M) @ h - c)))
    h = np.clip(h, 0.0, 1.0)

    p = f * h
    alive = h > _POSITIVE
    Phat = np.zeros((n, n))
    Phat[alive] = g[alive] * h[None, :] / h[alive, None]
    p_res = abs(float(p.sum()) - 1.0)
    # states reachable under the boundary chain
    reach = p > _POSITIVE
    frontier = reach.copy()
    while frontier.any():
        nxt = (g[frontier] > _POSITIVE).any(axis=0) & (~reach)
        reach |= nxt
        frontier = nxt
    dead = reach & ~alive
    rows = Phat[alive].sum(axis=1)
    row_res = float(np.max(np.abs(rows - 1.0))) if alive.any() else 0.0
    if p_res > norm_tol:
        raise NormalizationFailure(f"initial law sums to {p.sum():.12g} (residual {p_res:.3e})")
    if dead.any():
        bad = ", ".join(s for s, d in zip(states, dead) if d)
        raise NormalizationFailure(f"survival probability vanishes on reachable states: {bad}")
    if row_res > norm_tol:
        raise NormalizationFailure(f"boundary transition rows deviate from 1 by {row_res:.3e}")
    return BoundaryChain(states, f, g, h, p, Phat, h_res, rho, p_res, row_res, F)


def solve(mu: StepDistribution, tol: float = 1e-12, max_iter: int = 1_000_000) -> BoundaryChain:
    """Convenience pipeline: prefix graph, kernel, first passage, boundary chain."""
    P = kernel(build(mu))
    return boundary_chain(solve_first_passage(P, tol, max_iter), P)


@dataclass(frozen=True)
class CylinderQuery:
    word: str
    value: float
    path_count: int


def cylinder_probability(B: BoundaryChain, w: str) -> CylinderQuery:
    """Harmonic measure of the cylinder of rays starting with ``w``."""
    if not w:
        return CylinderQuery(w, 1.0, 1)
    m = B.mask(w[0])
    v = np.where(m, B.f, 0.0)
    cnt = (m & (B.f > 0)).astype(np.int64)
    gpos = B._gpos
    for x in w[1:]:
        m = B.mask(x)
        v = np.where(m, v @ B.g, 0.0)
        cnt = np.where(m, cnt @ gpos, 0)
    value = float(v @ B.h)
    count = int(cnt[B.h > 0].sum())
    return CylinderQuery(w, min(max(value, 0.0), 1.0), count)


def cylinder_masses(B: BoundaryChain, max_length: int) -> dict:
    """``nu([w])`` for every reduced ``w`` with ``|w| <= max_length``.

    Forward vectors are extended breadth-first, so each cylinder costs one
    matrix step instead of a full pass from the root.
    """
    out = {"": 1.0}
    frontier = {x: np.where(B.mask(x), B.f, 0.0) for x in W.LETTERS}
    for n in range(1, max_length + 1):
        nxt = {}
        for w, v in frontier.items():
            out[w] = min(max(float(v @ B.h), 0.0), 1.0)
            if n < max_length:
                vg = v @ B.g
                for x in W.successors(w):
                    nxt[w + x] = np.where(B.mask(x), vg, 0.0)
        frontier = nxt
    return out


def path_weight_vector(B: BoundaryChain, w: str) -> np.ndarray:
    """Row vector of summed g-products over state paths spelling ``w``.

    The path may start in any state emitting ``w[0]``; no f or h factor.
    """
    v = B.mask(w[0]).astype(float)
    for x in w[1:]:
        v = np.where(B.mask(x), v @ B.g, 0.0)
    return v


def log_cylinder_probabilities(B: BoundaryChain, rays: np.ndarray) -> np.ndarray:
    """``log nu([r[:k]])`` for every ray and every length ``k = 1..n``.

    ``rays`` is an integer array (trials, n) of letter indices. The forward
    vectors are renormalized at each step, so long rays do not underflow.
    """
    rays = np.asarray(rays)
    T, n = rays.shape
    masks = np.stack([B.mask(x) for x in W.LETTERS])   # (4, S)
    out = np.empty((T, n))
    v = np.where(masks[rays[:, 0]], B.f[None, :], 0.0)
    acc = np.zeros(T)
    with np.errstate(divide="ignore"):
        for k in range(n):
            if k:
                v = np.where(masks[rays[:, k]], v @ B.g, 0.0)
            scale = v.sum(axis=1)
            ok = scale > 0
            v[ok] /= scale[ok, None]
            acc = acc + np.log(scale)
            out[:, k] = acc + np.log(v @ B.h)
    return out


def sample_boundary(B: BoundaryChain, n: int, seed, size: int | None = None):
    """Sample reduced rays of length ``n`` from the boundary chain.

    Returns a single word, or a list of ``size`` words.
    """
    idx = sample_boundary_indices(B, n, seed, 1 if size is None else size)
    letters = np.array(list(W.LETTERS))
    words = ["".join(letters[row]) for row in idx]
    return words[0] if size is None else words


def sample_boundary_indices(B: BoundaryChain, n: int, seed, size: int, return_states: bool = False):
    """Vectorized sampler; returns letter indices of shape (size, n)."""
    if n < 1:
        raise ValueError("ray length must be >= 1")
    rng = np.random.default_rng(seed)
    cum_p = np.cumsum(B.p)
    cum_p /= cum_p[-1]
    cum = np.cumsum(B.Phat, axis=1)
    last = cum[:, -1:].copy()
    last[last == 0] = 1.0
    cum /= last
    S = len(B.states)
    states = np.empty((size, n), dtype=np.int64)
    s = np.minimum(np.searchsorted(cum_p, rng.random(size), side="right"), S - 1)
    states[:, 0] = s
    for k in range(1, n):
        u = rng.random(size)
        s = np.minimum((cum[s] <= u[:, None]).sum(axis=1), S - 1)
        states[:, k] = s
    letters = B.emits[states]
    if return_states:
        return letters, states
    return letters


_MC_BLOCK = 10_000


def _atom_table(mu: StepDistribution):
    L = mu.max_length
    table = np.zeros((len(mu), L), dtype=np.int8)
    lengths = np.zeros(len(mu), dtype=np.int64)
    for i, w in enumerate(mu.support):
        table[i, : len(w)] = W.to_indices(w)
        lengths[i] = len(w)
    return table, lengths


@functools.cache
def _reduce_kernel():
    import numba

    @numba.njit(cache=True, nogil=True)
    def reduce_walks(table, lengths, cdf, u, keep, prefix, height):
        trials, steps = u.shape
        cap = steps * table.shape[1]
        stack = np.empty(cap, dtype=np.int8)
        for i in range(trials):
            top = 0
            for t in range(steps):
                k = np.searchsorted(cdf, u[i, t], side="right")
                if k >= len(lengths):
                    k = len(lengths) - 1
                for j in range(lengths[k]):
                    x = table[k, j]
                    if top > 0 and stack[top - 1] == (x ^ 2):
                        top -= 1
                    else:
                        stack[top] = x
                        top += 1
            height[i] = top
            for j in range(min(top, keep)):
                prefix[i, j] = stack[j]

    return reduce_walks


def reduced_walk_block(mu: StepDistribution, steps: int, size: int, rng, keep: int | None = None):
    """Reduce ``size`` independent walks of ``steps`` steps at once.

    Returns ``(prefix, length)``: the first ``keep`` letters of each reduced
    product (-1 padded) and its length. Letters are encoded 0..3 so that
    the inverse of ``x`` is ``x ^ 2``.
    """
    table, lengths = _atom_table(mu)
    cdf = np.cumsum(mu.probs)
    cdf /= cdf[-1]
    u = rng.random((size, steps))
    keep = steps * table.shape[1] if keep is None else keep
    prefix = np.full((size, keep), -1, dtype=np.int8)
    height = np.zeros(size, dtype=np.int64)
    _reduce_kernel()(table, lengths, cdf, u, keep, prefix, height)
    return prefix, height


def mc_cylinder_oracle(mu: StepDistribution, w: str, steps: int = 400, trials: int = 100_000, seed=0, threads: int = 1):
    """Monte Carlo estimate of ``nu([w])`` from raw walks, independent of the prefix graph.

    Returns ``(estimate, standard_error)``.
    """
    if not w:
        return 1.0, 0.0
    target = np.array(W.to_indices(w), dtype=np.int8)
    k = len(target)
    nblocks = -(-trials // _MC_BLOCK)

    def run(b):
        size = min(_MC_BLOCK, trials - b * _MC_BLOCK)
        rng = np.random.default_rng(child_seed(seed, b))
        prefix, height = reduced_walk_block(mu, steps, size, rng, keep=k)
        hits = int(np.all(prefix == target[None, :], axis=1).sum())
        return hits, int((height <= k).sum())

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, range(nblocks)))
    else:
        results = [run(b) for b in range(nblocks)]
    hits = sum(r[0] for r in results)
    short = sum(r[1] for r in results)
    if short > 0.01 * trials:
        warnings.warn(
            f"{short} of {trials} reduced products have length <= {k}; increase steps",
            RuntimeWarning,
            stacklevel=2,
        )
    est = hits / trials
    se = float(np.sqrt(max(est * (1.0 - est), 0.0) / trials))
    return est, se
