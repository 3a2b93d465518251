"""Good zeta-function partial sums and certified brackets for delta_A.

zeta_k(s, A) = sum over words D of length k of <D>^(-s).  Because

    2^(-s) zeta_j zeta_k <= zeta_{j+k} <= zeta_j zeta_k,

the per-letter growth rate lambda(s, A) = lim zeta_r^(1/r) satisfies

    | log lambda - (1/r) log(zeta_r / 2) | <= (1/r) log 2          (default)

and, more sharply, (log zeta_r - s log 2)/r <= log lambda <= (log zeta_r)/r
(Fekete's lemma applied to both sides).  lambda is strictly decreasing in s
and lambda(2 delta_A) = 1, so bisection on certified brackets yields a
rigorous interval for delta_A, the abscissa-of-convergence parameter.  That
parameter coincides with the Hausdorff dimension for alphabets {1..A}; for
other alphabets reports label it as the abscissa-based value.

Floating point: each zeta_r is summed in blocks of 4096 with numpy's pairwise
summation and the block sums are added with math.fsum, giving a relative
error of a few ulps.  Brackets are widened by 1e-9 relative to absorb it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterator

import numpy as np

from .continuant import Alphabet, count_F

#: hard cap on |A|^k words summed for one zeta_k
WORD_BUDGET = 10**9
#: above this many words the log-continuants are streamed instead of cached
CACHE_WORDS = 1 << 25
#: relative widening of every lambda bracket
FP_WIDEN = 1e-9
BLOCK = 4096
SUFFIX_WORDS = 1 << 18
LOG2 = math.log(2.0)


class BudgetExceeded(RuntimeError):
    """The requested depth needs more words than the configured budget."""


def _check_budget(alphabet: Alphabet, k: int) -> None:
    if k < 1:
        raise ValueError(f"word length must be >= 1, got {k}")
    if len(alphabet) ** k > WORD_BUDGET:
        raise BudgetExceeded(f"|A|^k = {len(alphabet)}^{k} exceeds the budget {WORD_BUDGET}")


def _check_s(s: float) -> None:
    if not 0.0 <= s <= 2.0:
        raise ValueError(f"s must lie in [0, 2], got {s}")


def _suffix_tables(letters, k: int) -> tuple[np.ndarray, np.ndarray]:
    """For all words S of length k: <S> and <S without its first letter>."""
    lets = np.asarray(letters, dtype=np.float64)
    # reversed build: prepend letters, tracking <S> and <S minus first letter>
    full = np.ones(1)
    tail = np.zeros(1)
    for _ in range(k):
        full, tail = (lets[:, None] * full[None, :] + tail[None, :]).ravel(), np.tile(full, lets.size)
    return full, tail


def iter_log_continuants(alphabet: Alphabet, k: int) -> Iterator[np.ndarray]:
    """Yield log <D> for all words D of length k, in chunks.

    Words are split as prefix + suffix and joined with
    <P, S> = <P><S> + <P minus last><S minus first>.
    """
    _check_budget(alphabet, k)
    n = len(alphabet)
    k2 = k
    while n**k2 > SUFFIX_WORDS and k2 > 1:
        k2 -= 1
    full, tail = _suffix_tables(alphabet.letters, k2)
    for prefix in product(alphabet.letters, repeat=k - k2):
        hi, lo = 1, 0  # <P>, <P minus last letter>
        for digit in prefix:
            hi, lo = digit * hi + lo, hi
        yield np.log(hi * full + lo * tail)


def _zeta_from_logs(chunks, s: float) -> float:
    partials = []
    for logs in chunks:
        terms = np.exp(-s * logs)
        pad = (-terms.size) % BLOCK
        if pad:
            terms = np.concatenate([terms, np.zeros(pad)])
        partials.extend(terms.reshape(-1, BLOCK).sum(axis=1).tolist())
    return math.fsum(partials)


def zeta_k(alphabet: Alphabet, s: float, k: int) -> float:
    """sum over words D of length k of <D>^(-s)."""
    _check_s(s)
    return _zeta_from_logs(iter_log_continuants(alphabet, k), s)


def zeta_k_naive(alphabet: Alphabet, s: float, k: int) -> float:
    """Word-by-word reference evaluation (small k)."""
    from .continuant import continuant

    return math.fsum(continuant(w) ** (-s) for w in product(alphabet.letters, repeat=k))


def g_func(alphabet: Alphabet, s: float, k: int) -> float:
    """log zeta_k(s) - log 2."""
    return math.log(zeta_k(alphabet, s, k)) - LOG2


class ZetaEvaluator:
    """zeta_r(., A) at fixed depth with the log-continuants cached when affordable."""

    def __init__(self, alphabet: Alphabet, r: int):
        _check_budget(alphabet, r)
        self.alphabet = alphabet
        self.r = r
        self._cached = None
        if len(alphabet) ** r <= CACHE_WORDS:
            self._cached = list(iter_log_continuants(alphabet, r))

    def zeta(self, s: float) -> float:
        _check_s(s)
        chunks = self._cached if self._cached is not None else iter_log_continuants(self.alphabet, self.r)
        return _zeta_from_logs(chunks, s)

    def log_lambda_bracket(self, s: float, sharp: bool = False) -> tuple[float, float]:
        lz = math.log(self.zeta(s))
        slack = s * LOG2 if sharp else 2 * LOG2
        return (lz - slack) / self.r, lz / self.r

    def lambda_bracket(self, s: float, sharp: bool = False) -> tuple[float, float]:
        lo, hi = self.log_lambda_bracket(s, sharp)
        return math.exp(lo) * (1 - FP_WIDEN), math.exp(hi) * (1 + FP_WIDEN)


def lambda_bracket(alphabet: Alphabet, s: float, r: int, sharp: bool = False) -> tuple[float, float]:
    """Certified interval for lambda(s, A) from depth-r words.

    Default: [exp((g(r) - log 2)/r), exp((g(r) + log 2)/r)].  ``sharp=True``
    uses [(zeta_r 2^(-s))^(1/r), zeta_r^(1/r)], which is contained in it.
    """
    return ZetaEvaluator(alphabet, r).lambda_bracket(s, sharp)


@dataclass(frozen=True)
class DeltaBracket:
    """Certified interval for the abscissa-based delta_A."""

    alphabet: Alphabet
    r: int
    delta_lo: float
    delta_hi: float
    method: str = "lambda4"

    @property
    def width(self) -> float:
        return self.delta_hi - self.delta_lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.delta_lo + self.delta_hi)

    def contains(self, value: float) -> bool:
        return self.delta_lo <= value <= self.delta_hi

    def to_dict(self) -> dict:
        return {
            "alphabet": list(self.alphabet.letters),
            "r": self.r,
            "delta_lo": self.delta_lo,
            "delta_hi": self.delta_hi,
            "width": self.width,
            "method": self.method,
            "quantity": "abscissa-based delta_A (half the abscissa of convergence of the Good zeta function)",
        }


def _bisect_last_true(pred, lo: float, hi: float, tol: float) -> float:
    """Largest probed point where a decreasing predicate holds; lo assumed true."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _bisect_first_true(pred, lo: float, hi: float, tol: float) -> float:
    """Smallest probed point where an increasing predicate holds; hi assumed true."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def delta_bracket(alphabet: Alphabet, r: int, sharp: bool = False, tol: float = 1e-4) -> DeltaBracket:
    """Bisection on s in [0, 2] for certified lambda(s) >= 1 and lambda(s) <= 1.

    s_minus is the largest probe with lambda_lo(s) >= 1 (so s <= 2 delta),
    s_plus the smallest probe with lambda_hi(s) <= 1 (so s >= 2 delta).
    If even s = 2 is not certified, delta_hi falls back to 1, the known
    upper bound for any finite alphabet.
    """
    alphabet.require_dimension()
    ev = ZetaEvaluator(alphabet, r)

    def certified_above(s):
        return ev.lambda_bracket(s, sharp)[0] >= 1.0

    def certified_below(s):
        return ev.lambda_bracket(s, sharp)[1] <= 1.0

    s_minus = _bisect_last_true(certified_above, 0.0, 2.0, tol) if certified_above(0.0) else 0.0
    s_plus = _bisect_first_true(certified_below, 0.0, 2.0, tol) if certified_below(2.0) else 2.0
    return DeltaBracket(alphabet, r, s_minus / 2, s_plus / 2, "sharp" if sharp else "lambda4")


def hensley_check(alphabet: Alphabet, x: float, bracket: DeltaBracket) -> dict:
    """Check (1/(32 A^4)) x^(2 delta) <= F(x) - F(x/4A^2) <= F(x) <= 8 x^(2 delta).

    delta is only known to lie in the bracket, so an inequality "passes"
    when it holds for every delta in [delta_lo, delta_hi]: the lower bound is
    evaluated at delta_hi and the upper bound at delta_lo.  If it holds only
    at the other end the verdict is "indeterminate", otherwise "fail".
    """
    A = alphabet.a_max
    if bracket.delta_lo <= 0.5:
        raise ValueError(f"need a certified delta_A > 1/2, bracket lower end is {bracket.delta_lo}")
    if x < 4 * A * A:
        raise ValueError(f"need x >= 4 A^2 = {4 * A * A}, got {x}")
    F_x = count_F(alphabet, x)
    F_small = count_F(alphabet, x / (4 * A * A))
    diff = F_x - F_small
    c_low = 1.0 / (32 * A**4)

    def verdict(worst_ok: bool, best_ok: bool) -> str:
        return "pass" if worst_ok else ("indeterminate" if best_ok else "fail")

    lower = verdict(c_low * x ** (2 * bracket.delta_hi) <= diff, c_low * x ** (2 * bracket.delta_lo) <= diff)
    middle = "pass" if diff <= F_x else "fail"
    upper = verdict(F_x <= 8 * x ** (2 * bracket.delta_lo), F_x <= 8 * x ** (2 * bracket.delta_hi))
    return {
        "alphabet": list(alphabet.letters),
        "x": x,
        "F_x": F_x,
        "F_x_over_4A2": F_small,
        "lower_bound_at_delta_hi": c_low * x ** (2 * bracket.delta_hi),
        "upper_bound_at_delta_lo": 8 * x ** (2 * bracket.delta_lo),
        "bracket": [bracket.delta_lo, bracket.delta_hi],
        "verdicts": {"lower": lower, "middle": middle, "upper": upper},
        "passed": lower == middle == upper == "pass",
    }


# --- on-disk bracket cache ---------------------------------------------------
# One record per line, tab separated: alphabet digits (comma list), r,
# delta_lo, delta_hi, method.  Lines starting with '#' are comments.


def read_cache(path: str | Path) -> dict[tuple[tuple[int, ...], int, str], tuple[float, float]]:
    path = Path(path)
    out = {}
    if not path.exists():
        return out
    for line in path.read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        letters = tuple(int(t) for t in fields[0].split(","))
        method = fields[4] if len(fields) > 4 else "lambda4"
        out[(letters, int(fields[1]), method)] = (float(fields[2]), float(fields[3]))
    return out


def write_cache(path: str | Path, bracket: DeltaBracket) -> None:
    """Insert or replace the record for (alphabet, r, method); records stay sorted."""
    path = Path(path)
    table = read_cache(path)
    table[(bracket.alphabet.letters, bracket.r, bracket.method)] = (bracket.delta_lo, bracket.delta_hi)
    lines = ["# alphabet\tr\tdelta_lo\tdelta_hi\tmethod"]
    for (letters, r, method), (lo, hi) in sorted(table.items()):
        lines.append(f"{','.join(map(str, letters))}\t{r}\t{lo!r}\t{hi!r}\t{method}")
    path.write_text("\n".join(lines) + "\n")


def cached_bracket(path: str | Path, alphabet: Alphabet, r: int, sharp: bool = False) -> DeltaBracket | None:
    method = "sharp" if sharp else "lambda4"
    hit = read_cache(path).get((alphabet.letters, r, method))
    return DeltaBracket(alphabet, r, hit[0], hit[1], method) if hit else None
