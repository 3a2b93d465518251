"""Words over a finite alphabet, their continuants, and bounded enumeration.

A word (d_1, ..., d_k) stands for the finite continued fraction
1/(d_1 + 1/(d_2 + ...)).  Its continuant <d_1, ..., d_k> is the denominator
of that fraction and the numerator is <d_2, ..., d_k>.  Appending a digit
strictly increases the continuant, so every "continuant <= bound" search can
prune a branch as soon as it overshoots.

Two enumeration paths exist:

* :func:`enumerate_bounded` streams ``(word, ContinuantPair)`` with exact
  Python integers, one word at a time.
* :func:`iter_continuant_levels` walks the same tree in numpy chunks and only
  reports continuant values per word length.  The census and the counting
  function ``F_A`` use it; tests check that both paths agree.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

Word = tuple[int, ...]

#: largest chunk handed around by the vectorised walker
CHUNK = 1 << 19
#: desk-scale cap for the denominator census
CENSUS_MAX = 10**7

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class Alphabet:
    """Sorted set of distinct positive partial quotients."""

    letters: tuple[int, ...]

    def __post_init__(self):
        letters = tuple(sorted(set(int(a) for a in self.letters)))
        if not letters:
            raise ValueError("alphabet must be nonempty")
        if letters[0] < 1:
            raise ValueError(f"letters must be >= 1, got {letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        """Parse "1,2,3", "1-7" or mixes like "1-6,8"."""
        letters: list[int] = []
        for part in text.replace(" ", "").split(","):
            if not part:
                continue
            if "-" in part:
                lo, hi = part.split("-", 1)
                letters.extend(range(int(lo), int(hi) + 1))
            else:
                letters.append(int(part))
        return cls(tuple(letters))

    @classmethod
    def upto(cls, a: int) -> "Alphabet":
        return cls(tuple(range(1, a + 1)))

    @property
    def a_max(self) -> int:
        return self.letters[-1]

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, item) -> bool:
        return item in self.letters

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.letters)

    def require_dimension(self) -> None:
        if len(self.letters) < 2:
            raise ValueError(f"dimension work needs |A| >= 2, got A={{{self}}}")

    def issubset(self, other: "Alphabet") -> bool:
        return set(self.letters) <= set(other.letters)


class ContinuantPair(NamedTuple):
    """Continuant data carried along a word d_1..d_k.

    q = <d_1..d_k>, q_prev = <d_1..d_{k-1}>, p = <d_2..d_k> and
    p_prev = <d_2..d_{k-1}>; the empty word has (q, q_prev, p, p_prev) =
    (1, 0, 0, 1).
    """

    q: int
    q_prev: int
    p: int
    p_prev: int

    def extend(self, digit: int) -> "ContinuantPair":
        return ContinuantPair(
            digit * self.q + self.q_prev, self.q, digit * self.p + self.p_prev, self.p
        )


EMPTY_PAIR = ContinuantPair(1, 0, 0, 1)


def continuant_pair(word: Sequence[int]) -> ContinuantPair:
    pair = EMPTY_PAIR
    for digit in word:
        pair = pair.extend(digit)
    return pair


def continuant(word: Sequence[int]) -> int:
    """<d_1, ..., d_k> with <> = 1."""
    return continuant_pair(word).q


def cf_value(word: Sequence[int]) -> tuple[int, int]:
    """Value of 1/(d_1 + 1/(d_2 + ...)) as (numerator, denominator) in lowest terms."""
    if len(word) == 0:
        raise ValueError("cf_value needs a nonempty word")
    pair = continuant_pair(word)
    return pair.p, pair.q


def _check_parity(parity: str) -> None:
    if parity not in ("any", "even"):
        raise ValueError(f"parity must be 'any' or 'even', got {parity!r}")


def enumerate_bounded(
    alphabet: Alphabet, bound: int, parity: str = "any"
) -> Iterator[tuple[Word, ContinuantPair]]:
    """Yield every word with continuant <= bound, each exactly once.

    parity="any" gives all lengths >= 1, parity="even" only even lengths >= 2.
    Depth-first in lexicographic order.
    """
    _check_parity(parity)
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    letters = alphabet.letters
    stack: list[tuple[Word, ContinuantPair]] = [((), EMPTY_PAIR)]
    while stack:
        word, pair = stack.pop()
        children = []
        for a in letters:
            child = pair.extend(a)
            if child.q > bound:
                # letters ascend, so every later letter overshoots too
                break
            children.append((word + (a,), child))
        for item in reversed(children):
            stack.append(item)
        if word and (parity == "any" or len(word) % 2 == 0):
            yield word, pair


def _walk_levels(
    letters: Sequence[int], bound: int, first: Sequence[int]
) -> Iterator[tuple[int, np.ndarray]]:
    """Chunked depth-first walk of the word tree starting from given first letters."""
    lets = np.asarray(letters, dtype=np.int64)
    start = np.asarray([a for a in first if a <= bound], dtype=np.int64)
    if start.size == 0:
        return
    stack = [(1, start, np.ones_like(start))]
    while stack:
        length, q, q_prev = stack.pop()
        yield length, q
        nq = (lets[:, None] * q[None, :] + q_prev[None, :]).ravel()
        keep = nq <= bound
        if not keep.any():
            continue
        nq = nq[keep]
        nq_prev = np.broadcast_to(q, (lets.size, q.size)).ravel()[keep]
        for i in range(0, nq.size, CHUNK):
            stack.append((length + 1, nq[i : i + CHUNK], nq_prev[i : i + CHUNK]))


def iter_continuant_levels(
    alphabet: Alphabet, bound: int, first: Sequence[int] | None = None
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (word length, int64 array of continuants) chunks covering all words <= bound."""
    bound = int(bound)
    if bound * (alphabet.a_max + 1) >= 2**62:
        raise OverflowError(f"bound {bound} too large for the vectorised walker")
    yield from _walk_levels(alphabet.letters, bound, alphabet.letters if first is None else first)


def count_F(alphabet: Alphabet, x: float) -> int:
    """Number of even-length words with continuant <= x."""
    bound = math.floor(x)
    if bound < 1:
        return 0
    return sum(int(q.size) for length, q in iter_continuant_levels(alphabet, bound) if length % 2 == 0)


def count_words(alphabet: Alphabet, x: float) -> int:
    """Number of words of any length >= 1 with continuant <= x."""
    bound = math.floor(x)
    if bound < 1:
        return 0
    return sum(int(q.size) for _, q in iter_continuant_levels(alphabet, bound))


@dataclass
class Census:
    """Membership table of D_A(n_max) plus summary numbers."""

    alphabet: Alphabet
    n_max: int
    members: np.ndarray  # bool, index d in 0..n_max
    words: int

    @property
    def count(self) -> int:
        return int(self.members[1:].sum())

    @property
    def ratio(self) -> float:
        return self.count / self.n_max

    @property
    def includes_one(self) -> bool:
        return bool(self.members[1]) if self.n_max >= 1 else False

    def count_upto(self, n: int) -> int:
        return int(self.members[1 : n + 1].sum())

    def ladder(self) -> list[tuple[int, int, float]]:
        """(n, #D_A(n), ratio) for n = 1, 2, 4, ... and finally n_max."""
        ns = []
        n = 1
        while n < self.n_max:
            ns.append(n)
            n *= 2
        ns.append(self.n_max)
        cum = np.cumsum(self.members.astype(np.int64))
        return [(n, int(cum[n]), int(cum[n]) / n) for n in ns]

    def missing(self) -> list[int]:
        return [int(d) for d in np.flatnonzero(~self.members[1:]) + 1]


def _census_part(args) -> tuple[np.ndarray, int]:
    letters, n_max, first = args
    members = np.zeros(n_max + 1, dtype=bool)
    words = 0
    for _, q in _walk_levels(letters, n_max, first):
        members[q] = True
        words += q.size
    return members, words


def denominator_census(alphabet: Alphabet, n_max: int, jobs: int = 1) -> Census:
    """Exact D_A(n_max) by enumerating all words with continuant <= n_max.

    d = 1 is a member exactly when 1 is a letter (the word (1) gives 1/1).
    With jobs > 1 the tree is split by first letter across processes; the
    union of the partial tables does not depend on the split.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if n_max > CENSUS_MAX:
        raise ValueError(f"n_max={n_max} exceeds the census budget {CENSUS_MAX}")
    parts = [(alphabet.letters, n_max, (a,)) for a in alphabet.letters]
    if jobs > 1 and len(parts) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_census_part, parts))
    else:
        results = [_census_part(p) for p in parts]
    members = np.zeros(n_max + 1, dtype=bool)
    words = 0
    for part, n in results:
        members |= part
        words += n
    return Census(alphabet, n_max, members, words)


def write_bitmap(path: str | Path, members: np.ndarray) -> None:
    """Raw membership bitmap: bit (d % 8) of byte (d // 8), little-endian bit order."""
    Path(path).write_bytes(np.packbits(members.astype(np.uint8), bitorder="little").tobytes())


def read_bitmap(path: str | Path, n_max: int) -> np.ndarray:
    raw = np.frombuffer(Path(path).read_bytes(), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[: n_max + 1].astype(bool)


def words_of_length(alphabet: Alphabet, k: int) -> Iterable[Word]:
    """All |A|**k words of length k (small k only)."""
    from itertools import product

    return product(alphabet.letters, repeat=k)


def fibonacci_floor(r: int) -> float:
    """Lower bound ((1 + sqrt 5)/2)**(r - 1) for any continuant of a length-r word."""
    return GOLDEN ** (r - 1)
