"""Weighted prefix graph of a step distribution and its Markov chain.

Vertices are the prefixes of the support (including the empty word). There
is an edge ``w -> wx`` for each one-letter extension inside the vertex set,
weighted by the total mass of atoms having ``wx`` as a prefix, and a closing
edge ``w -> ''`` of weight ``mu(w)`` for each atom ``w``. Normalizing the
out-weights gives a chain whose projected letters spell the raw walk.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import words as W
from .errors import WordNotInSupport
from .walk import StepDistribution


@dataclass(frozen=True)
class WeightedPrefixGraph:
    mu: StepDistribution
    vertices: tuple          # sorted; vertices[0] == ''
    weights: dict            # (source, target) -> positive weight

    @property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def edges(self) -> list:
        idx = self.index
        return sorted(self.weights, key=lambda e: (idx[e[0]], idx[e[1]]))

    @property
    def states(self) -> tuple:
        """Nonempty vertices."""
        return self.vertices[1:]

    def weight_matrix(self) -> np.ndarray:
        idx = self.index
        M = np.zeros((len(self.vertices), len(self.vertices)))
        for (u, v), w in self.weights.items():
            M[idx[u], idx[v]] = w
        return M

    def in_weight(self, v: str) -> float:
        return sum(w for (s, t), w in self.weights.items() if t == v)

    def out_weight(self, v: str) -> float:
        return sum(w for (s, t), w in self.weights.items() if s == v)


@dataclass(frozen=True)
class ChainKernel:
    vertices: tuple
    P: np.ndarray

    @property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def prob(self, x: str, y: str) -> float:
        idx = self.index
        return float(self.P[idx[x], idx[y]])


def build(mu: StepDistribution) -> WeightedPrefixGraph:
    vertices = tuple(W.sorted_words(W.prefix_closure(mu.support)))
    # mass of atoms extending each vertex
    mass = {v: 0.0 for v in vertices}
    for w, p in mu.atoms.items():
        for u in W.prefixes(w):
            mass[u] += p
    weights = {}
    for v in vertices:
        if v:
            weights[(v[:-1], v)] = mass[v]
    for w, p in mu.atoms.items():
        # a closing edge can never coincide with a prefix edge: '' is no extension of w
        assert (w, W.EMPTY) not in weights
        weights[(w, W.EMPTY)] = p
    return WeightedPrefixGraph(mu, vertices, weights)


def kernel(g: WeightedPrefixGraph) -> ChainKernel:
    M = g.weight_matrix()
    P = M / M.sum(axis=1, keepdims=True)
    return ChainKernel(g.vertices, P)


def check_flow(g: WeightedPrefixGraph) -> float:
    """Largest imbalance between in- and out-weight over all vertices."""
    M = g.weight_matrix()
    return float(np.max(np.abs(M.sum(axis=0) - M.sum(axis=1))))


def excursion_probability(g: WeightedPrefixGraph, P: ChainKernel, w: str) -> float:
    """Probability that an excursion from '' spells exactly the atom ``w``."""
    if w not in g.mu.atoms:
        raise WordNotInSupport(f"{W.format_word(w)} is not an atom of the step distribution")
    prob = 1.0
    path = W.prefixes(w) + [W.EMPTY]
    for u, v in zip(path, path[1:]):
        prob *= P.prob(u, v)
    return prob


def max_path_avoiding_root(g: WeightedPrefixGraph) -> int:
    """Length of the longest directed path that never enters ''.

    Every edge not ending in '' lengthens the word, so this is finite.
    """
    longest = {}
    for v in sorted(g.vertices, key=len, reverse=True):
        best = 0
        for (s, t) in g.weights:
            if s == v and t != W.EMPTY:
                best = max(best, 1 + longest[t])
        longest[v] = best
    return max(longest.values())


def export_dot(g: WeightedPrefixGraph, name: str = "prefix_graph") -> str:
    idx = g.index
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for i, v in enumerate(g.vertices):
        lines.append(f'  n{i} [label="{W.format_word(v)}"];')
    for (s, t) in g.edges:
        lines.append(f'  n{idx[s]} -> n{idx[t]} [label="{g.weights[(s, t)]:.6g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def simulate_chain(P: ChainKernel, n: int, seed) -> tuple[list, str]:
    """Run the chain from '' until it has emitted ``n`` letters.

    Visits to '' emit nothing, so the returned state list also contains
    those returns; the projected word has length exactly ``n``.
    """
    rng = np.random.default_rng(seed)
    cum = np.cumsum(P.P, axis=1)
    cum[:, -1] = 1.0
    i = 0
    states = []
    emitted = 0
    while emitted < n:
        u = rng.random(max(n - emitted, 16))
        for x in u:
            i = int(np.searchsorted(cum[i], x, side="right"))
            states.append(P.vertices[i])
            if i:
                emitted += 1
                if emitted == n:
                    break
    return states, "".join(W.last_letter(s) for s in states)


def excursions(states: list) -> list:
    """Split a state trajectory (started at '') into completed excursions.

    Each excursion is identified by the atom it spelled, i.e. the state just
    before the return to ''.
    """
    out = []
    prev = None
    for s in states:
        if s == W.EMPTY and prev is not None:
            out.append(prev)
        prev = s
    return out
