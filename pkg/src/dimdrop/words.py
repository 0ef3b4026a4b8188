"""Free reduction and combinatorics of words over {a, b, a^-1, b^-1}.

Words are plain Python strings: ``'a'`` and ``'b'`` are the generators,
``'A'`` and ``'B'`` their inverses, and ``''`` is the empty word. Inversion
of a letter is therefore ``str.swapcase``.
"""
from __future__ import annotations

from itertools import product as _cartesian
from typing import Iterable, Iterator

LETTERS = "abAB"
"""Alphabet in canonical order; also the order used for lexicographic sorting."""

EMPTY = ""

_ORDER = {c: i for i, c in enumerate(LETTERS)}


def inverse(x: str) -> str:
    """Inverse of a single letter."""
    if x not in _ORDER:
        raise ValueError(f"not a letter: {x!r}")
    return x.swapcase()


def inverse_word(w: str) -> str:
    return w[::-1].swapcase()


def parse_word(text: str) -> str:
    """Validate a word written in the a/A/b/B syntax and return it.

    The empty string, ``'e'`` and ``'ε'`` all denote the empty word.
    """
    from .errors import WordParseError

    if not isinstance(text, str):
        raise WordParseError(f"word must be a string, got {type(text).__name__}")
    text = text.strip()
    if text in ("e", "ε"):
        return EMPTY
    for i, c in enumerate(text):
        if c not in _ORDER:
            raise WordParseError(f"invalid letter {c!r} at position {i} in word {text!r}")
    return text


def parse_reduced(text: str) -> str:
    from .errors import NotReducedError

    w = parse_word(text)
    if not is_reduced(w):
        raise NotReducedError(f"word {w!r} is not reduced")
    return w


def format_word(w: str) -> str:
    return w if w else "ε"


def is_reduced(w: str) -> bool:
    return all(w[i + 1] != w[i].swapcase() for i in range(len(w) - 1))


def reduce(w: str) -> str:
    """Free reduction with a single left-to-right stack pass."""
    stack: list[str] = []
    for c in w:
        if stack and stack[-1] == c.swapcase():
            stack.pop()
        else:
            stack.append(c)
    return "".join(stack)


def product(u: str, v: str) -> str:
    """Group product of two reduced words.

    Only the junction can cancel, so this is linear in the overlap.
    """
    i = 0
    n = min(len(u), len(v))
    while i < n and u[len(u) - 1 - i] == v[i].swapcase():
        i += 1
    return u[: len(u) - i] + v[i:]


def is_cyclically_reduced(w: str) -> bool:
    if len(w) <= 1:
        return True
    return w[-1] != w[0].swapcase()


def cyclic_reduce(w: str) -> str:
    """Strip cancelling first/last letter pairs from a reduced word."""
    i, j = 0, len(w)
    while j - i > 1 and w[j - 1] == w[i].swapcase():
        i += 1
        j -= 1
    return w[i:j]


def last_letter(w: str) -> str:
    """Projection to the last letter; the empty word projects to itself."""
    return w[-1] if w else EMPTY


def prefixes(w: str) -> list[str]:
    return [w[:k] for k in range(len(w) + 1)]


def prefix_closure(words: Iterable[str]) -> set[str]:
    out = {EMPTY}
    for w in words:
        out.update(prefixes(w))
    return out


def is_prefix(u: str, w: str) -> bool:
    return w.startswith(u)


def word_key(w: str) -> tuple[int, ...]:
    """Sort key: lexicographic in the alphabet order a < b < A < B."""
    return tuple(_ORDER[c] for c in w)


def sorted_words(words: Iterable[str]) -> list[str]:
    return sorted(words, key=word_key)


def successors(w: str) -> list[str]:
    """Letters that may follow ``w`` in a reduced word."""
    if not w:
        return list(LETTERS)
    bad = w[-1].swapcase()
    return [x for x in LETTERS if x != bad]


def reduced_words(n: int) -> Iterator[str]:
    """All reduced words of length exactly ``n`` in lexicographic order."""
    if n == 0:
        yield EMPTY
        return
    for w in reduced_words(n - 1):
        for x in successors(w):
            yield w + x


def all_words(n: int) -> Iterator[str]:
    """All (not necessarily reduced) words of length ``n``."""
    for t in _cartesian(LETTERS, repeat=n):
        yield "".join(t)


def random_reduced_word(rng, n: int, start: str = EMPTY) -> str:
    """Uniformly random reduced word of length ``n`` continuing ``start``.

    Only the appended part is returned.
    """
    out = []
    prev = start[-1] if start else EMPTY
    for _ in range(n):
        choices = successors(prev)
        prev = choices[int(rng.integers(len(choices)))]
        out.append(prev)
    return "".join(out)


def to_indices(w: str) -> list[int]:
    return [_ORDER[c] for c in w]


def letter_index(x: str) -> int:
    return _ORDER[x]
