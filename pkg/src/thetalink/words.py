"""Pair-matched words: enumeration, classification, double-letter reduction.

A word is stored as a tuple of integer letter ids in canonical form (first
occurrences appear in the order 0, 1, 2, ...). Positions inside a word are
1-based (w[1..2k]); circuit vertices run over 0..2k.
"""
from __future__ import annotations

import math
import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Tuple

from thetalink.errors import ConfigError

MAX_K = 6


@dataclass(frozen=True, order=True)
class Word:
    letters: Tuple[int, ...]

    def __post_init__(self):
        if not is_pair_matched(self.letters):
            raise ConfigError(f"not a pair-matched word: {self.letters!r}")
        if canonical(self.letters) != self.letters:
            raise ConfigError(f"word {self.letters!r} is not canonical")

    @property
    def k(self) -> int:
        return len(self.letters) // 2

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, pos: int) -> int:
        """Letter at 1-based position ``pos``."""
        if not 1 <= pos <= len(self.letters):
            raise IndexError(pos)
        return self.letters[pos - 1]

    def __str__(self):
        return render(self.letters)

    def matches(self):
        """(first, second) 1-based positions for letters 0..k-1."""
        first = {}
        out = [None] * self.k
        for pos, c in enumerate(self.letters, start=1):
            if c in first:
                out[c] = (first[c], pos)
            else:
                first[c] = pos
        return out

    def partner(self):
        """partner[p] = first-occurrence position of w[p] if p is a second occurrence, else -1."""
        first = {}
        out = [-1] * (len(self.letters) + 1)
        for pos, c in enumerate(self.letters, start=1):
            if c in first:
                out[pos] = first[c]
            else:
                first[c] = pos
        return out


def is_pair_matched(letters) -> bool:
    if len(letters) == 0 or len(letters) % 2:
        return False
    counts = {}
    for c in letters:
        counts[c] = counts.get(c, 0) + 1
    return all(v == 2 for v in counts.values())


def canonical(letters) -> Tuple[int, ...]:
    relabel = {}
    for c in letters:
        if c not in relabel:
            relabel[c] = len(relabel)
    return tuple(relabel[c] for c in letters)


def render(letters) -> str:
    if max(letters, default=0) < 26:
        return "".join(string.ascii_lowercase[c] for c in letters)
    return "-".join(str(c) for c in letters)


def parse_word(text: str) -> Word:
    """Parse ``"abba"`` (or ``"0-1-1-0"``); the word must already be canonical."""
    text = text.strip()
    if "-" in text or text.isdigit():
        try:
            letters = tuple(int(t) for t in text.split("-"))
        except ValueError:
            raise ConfigError(f"cannot parse word {text!r}") from None
    else:
        if not text or not all(ch in string.ascii_lowercase for ch in text):
            raise ConfigError(f"cannot parse word {text!r}: use lower-case letters")
        letters = tuple(ord(ch) - ord("a") for ch in text)
    if not is_pair_matched(letters):
        raise ConfigError(f"{text!r} is not pair-matched (every letter exactly twice)")
    canon = canonical(letters)
    if canon != letters:
        raise ConfigError(f"{text!r} is not canonical; did you mean {render(canon)!r}?")
    return Word(letters)


def _check_k(k: int):
    if not 1 <= k <= MAX_K:
        raise ConfigError(f"k must be in 1..{MAX_K}, got {k}")


@lru_cache(maxsize=None)
def _enumerate(k: int) -> Tuple[Word, ...]:
    out = []
    buf = [None] * (2 * k)

    def fill(pos, opened, open_letters):
        if pos == 2 * k:
            out.append(Word(tuple(buf)))
            return
        remaining = 2 * k - pos
        # close a letter opened earlier
        for c in sorted(open_letters):
            buf[pos] = c
            open_letters.remove(c)
            fill(pos + 1, opened, open_letters)
            open_letters.add(c)
        # open a new letter if there is room to close everything
        if opened < k and len(open_letters) + 1 <= remaining - 1:
            buf[pos] = opened
            open_letters.add(opened)
            fill(pos + 1, opened + 1, open_letters)
            open_letters.remove(opened)

    fill(0, 0, set())
    return tuple(sorted(out))


def enumerate_pair_matched(k: int) -> Tuple[Word, ...]:
    """All (2k-1)!! canonical pair-matched words of length 2k, sorted."""
    _check_k(k)
    return _enumerate(k)


def is_symmetric(w: Word) -> bool:
    """Each letter sits once at an odd and once at an even position."""
    return all((i + j) % 2 == 1 for i, j in w.matches())


def reduce_double(w: Word):
    """Delete the leftmost double letter; returns (reduced word, its 1-based position).

    Returns ``(None, i0)`` when ``w`` has length 2.
    """
    letters = w.letters
    for i in range(len(letters) - 1):
        if letters[i] == letters[i + 1]:
            rest = letters[:i] + letters[i + 2:]
            return (Word(canonical(rest)) if rest else None), i + 1
    raise ConfigError(f"{w} has no double letter")


def has_double(w: Word) -> bool:
    return any(a == b for a, b in zip(w.letters, w.letters[1:]))


def is_catalan(w: Word) -> bool:
    """Repeatedly deleting double letters empties the word."""
    stack = []
    for c in w.letters:
        if stack and stack[-1] == c:
            stack.pop()
        else:
            stack.append(c)
    return not stack


def generating_vertices(w) -> Tuple[int, ...]:
    """S(w): vertex 0 and every position holding a first occurrence.

    Also accepts any letter string or id sequence, pair-matched or not.
    """
    if isinstance(w, Word):
        letters = w.letters
    elif isinstance(w, str):
        letters = tuple(w)
    else:
        letters = tuple(w)
    seen = set()
    out = [0]
    for pos, c in enumerate(letters, start=1):
        if c not in seen:
            seen.add(c)
            out.append(pos)
    return tuple(out)


@dataclass(frozen=True)
class WordClass:
    symmetric: bool
    catalan: bool
    generating_vertices: Tuple[int, ...]


def classify(w: Word) -> WordClass:
    return WordClass(is_symmetric(w), is_catalan(w), generating_vertices(w))


def count_catalan(k: int) -> int:
    n = sum(1 for w in enumerate_pair_matched(k) if is_catalan(w))
    assert n == math.comb(2 * k, k) // (k + 1)
    return n


def count_symmetric(k: int) -> int:
    n = sum(1 for w in enumerate_pair_matched(k) if is_symmetric(w))
    assert n == math.factorial(k)
    return n


def catalan_words(k: int) -> Iterable[Word]:
    return (w for w in enumerate_pair_matched(k) if is_catalan(w))
