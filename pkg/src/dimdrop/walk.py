"""Finitely supported step distributions on the free group and raw walks."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import words as W
from .errors import EmptySupport, EpsilonAtom, NonNormalized, NotReducedError

NORMALIZATION_TOL = 1e-12


class GenerationUnverified(UserWarning):
    """Semigroup generation could not be confirmed at the requested radius."""


def parse_probability(value) -> float:
    """Accept floats, ints, decimal strings and rationals written ``"p/q"``."""
    if isinstance(value, bool):
        raise ValueError("probability must be a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    raise ValueError(f"cannot interpret {value!r} as a probability")


@dataclass(frozen=True)
class StepDistribution:
    """Probability measure on nonempty reduced words with finite support.

    ``atoms`` maps words (a/A/b/B strings) to their masses. Atom order is
    canonical (lexicographic), so every derived object is deterministic.
    """

    atoms: Mapping[str, float]
    _words: tuple = field(init=False, repr=False, compare=False)
    _probs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.atoms:
            raise EmptySupport("step distribution has empty support")
        clean = {}
        for w, p in self.atoms.items():
            w = W.parse_word(w)
            if w == W.EMPTY:
                raise EpsilonAtom("the empty word cannot be an atom of the step distribution")
            if not W.is_reduced(w):
                raise NotReducedError(f"atom {w!r} is not a reduced word")
            p = parse_probability(p)
            if not (0.0 < p <= 1.0):
                raise NonNormalized(f"atom {w!r} has mass {p} outside (0, 1]")
            clean[w] = clean.get(w, 0.0) + p
        total = sum(clean.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NonNormalized(f"masses sum to {total!r}, residual {total - 1.0:.3e}")
        ordered = W.sorted_words(clean)
        object.__setattr__(self, "atoms", {w: clean[w] for w in ordered})
        object.__setattr__(self, "_words", tuple(ordered))
        object.__setattr__(self, "_probs", np.array([clean[w] for w in ordered]))

    @classmethod
    def uniform(cls, support) -> "StepDistribution":
        support = list(support)
        return cls({w: 1.0 / len(support) for w in support})

    @classmethod
    def nearest_neighbor(cls) -> "StepDistribution":
        return cls.uniform(W.LETTERS)

    @property
    def support(self) -> tuple:
        return self._words

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def max_length(self) -> int:
        return max(len(w) for w in self._words)

    def __len__(self):
        return len(self._words)


@dataclass
class ValidationReport:
    residual: float
    support_size: int
    radius: int
    letters_reached: dict
    generation_verified: bool
    warnings: list

    @property
    def ok(self) -> bool:
        return self.generation_verified

    def to_dict(self) -> dict:
        return {
            "normalization_residual": self.residual,
            "support_size": self.support_size,
            "radius": self.radius,
            "letters_reached": dict(self.letters_reached),
            "generation_verified": self.generation_verified,
            "warnings": list(self.warnings),
        }


def default_radius(mu: StepDistribution) -> int:
    return 2 * mu.max_length


def validate(mu: StepDistribution, radius: int | None = None) -> ValidationReport:
    """Check normalization and (sufficiently) semigroup generation.

    Generation is confirmed when each of the four letters appears as a
    product of at most ``radius`` support elements. Failure to confirm is a
    warning, not an error: the check is only sufficient.
    """
    if radius is None:
        radius = default_radius(mu)
    if radius < 1:
        raise ValueError("radius must be >= 1")
    residual = abs(float(sum(mu.atoms.values())) - 1.0)
    reached = {x: False for x in W.LETTERS}
    frontier = set(mu.support)
    seen = set(frontier)
    for x in W.LETTERS:
        reached[x] = x in seen
    for _ in range(radius - 1):
        if all(reached.values()):
            break
        nxt = set()
        for u in frontier:
            for v in mu.support:
                uv = W.product(u, v)
                if uv not in seen:
                    seen.add(uv)
                    nxt.add(uv)
        frontier = nxt
        for x in W.LETTERS:
            reached[x] = reached[x] or x in seen
        if not frontier:
            break
    verified = all(reached.values())
    notes = []
    if not verified:
        missing = "".join(x for x in W.LETTERS if not reached[x])
        msg = f"generation unverified at radius {radius}: letters {missing} not reached"
        notes.append(msg)
        warnings.warn(msg, GenerationUnverified, stacklevel=2)
    return ValidationReport(residual, len(mu), radius, reached, verified, notes)


def last_letter_multiplicity(mu: StepDistribution, x: str) -> tuple[int, list[str]]:
    """Number of nonempty prefixes of the support ending in ``x``, with witnesses."""
    witnesses = [w for w in W.sorted_words(W.prefix_closure(mu.support)) if w and w[-1] == x]
    return len(witnesses), witnesses


def unique_last_letter(mu: StepDistribution, x: str = "a") -> bool:
    return last_letter_multiplicity(mu, x)[0] == 1


def sample_walk(mu: StepDistribution, n: int, seed) -> tuple[str, str]:
    """Concatenate ``n`` i.i.d. steps; return the raw word and its reduction."""
    rng = np.random.default_rng(seed)
    if n == 0:
        return W.EMPTY, W.EMPTY
    idx = rng.choice(len(mu), size=n, p=mu.probs)
    raw = "".join(mu.support[i] for i in idx)
    return raw, W.reduce(raw)


def child_seed(seed, index: int) -> np.random.SeedSequence:
    """Seed-splitting rule: block ``index`` of a run seeded with ``seed``.

    Child streams are ``SeedSequence(seed, spawn_key=(index,))``, so results
    never depend on how blocks are scheduled.
    """
    return np.random.SeedSequence(seed, spawn_key=(index,))


def letter_marginals(mu: StepDistribution) -> dict:
    """Long-run letter frequencies of the raw (unreduced) walk."""
    counts = {x: 0.0 for x in W.LETTERS}
    for w, p in mu.atoms.items():
        for c in w:
            counts[c] += p
    mean_len = sum(p * len(w) for w, p in mu.atoms.items())
    return {x: c / mean_len for x, c in counts.items()}
