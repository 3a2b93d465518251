"""Exponential sums over explicit norm multisets.

S_N(theta) = sum over the family of e(theta * n).  The family is any finite
multiset of positive integers bounded by n_cap; by default the denominators
in D_A(N), each counted once.

The mean square over [0, 1] equals the number of ordered coincident pairs,
sum over distinct values of multiplicity^2.  |S|^2 is a trigonometric
polynomial with frequencies in (-n_cap, n_cap), so the equispaced Riemann sum
with M >= 2 n_cap points reproduces the integral up to rounding; the default
M = 4 n_cap leaves a safety factor.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .arith import euler_phi
from .continuant import Alphabet, denominator_census, iter_continuant_levels

MIN_POINTS_FACTOR = 2
DEFAULT_POINTS_FACTOR = 4


@dataclass(frozen=True)
class NormMultiset:
    """Multiset of positive integer norms, stored sorted, with its cap N."""

    norms: tuple[int, ...]
    n_cap: int

    def __post_init__(self):
        norms = tuple(sorted(int(n) for n in self.norms))
        if not norms:
            raise ValueError("norm multiset must be nonempty")
        if norms[0] < 1:
            raise ValueError("norms must be positive")
        if norms[-1] > self.n_cap:
            raise ValueError(f"norm {norms[-1]} exceeds n_cap={self.n_cap}")
        object.__setattr__(self, "norms", norms)

    @classmethod
    def of(cls, norms: Iterable[int], n_cap: int | None = None) -> "NormMultiset":
        norms = tuple(int(n) for n in norms)
        if n_cap is None:
            n_cap = max(norms, default=0)
        return cls(norms, n_cap)

    def __len__(self) -> int:
        return len(self.norms)

    def array(self) -> np.ndarray:
        return np.asarray(self.norms, dtype=np.int64)

    def histogram(self) -> np.ndarray:
        """counts[n] = multiplicity of n, for n = 0..n_cap."""
        return np.bincount(self.array(), minlength=self.n_cap + 1)


def denominator_family(alphabet: Alphabet, n_max: int) -> NormMultiset:
    """D_A(n_max) with multiplicity one."""
    census = denominator_census(alphabet, n_max)
    return NormMultiset(tuple(int(d) for d in np.flatnonzero(census.members)), n_max)


def word_family(alphabet: Alphabet, n_max: int) -> NormMultiset:
    """Continuants of all words with continuant <= n_max, with multiplicity."""
    parts = [q for _, q in iter_continuant_levels(alphabet, n_max)]
    return NormMultiset(tuple(np.concatenate(parts).tolist()), n_max)


def random_family(rng: np.random.Generator, n_cap: int, size: int) -> NormMultiset:
    """Uniform draw with replacement from 1..n_cap (coincidences are likely)."""
    return NormMultiset(tuple(rng.integers(1, n_cap + 1, size=size).tolist()), n_cap)


def s_n(theta: float, family: NormMultiset) -> complex:
    """sum of e(theta * n); phases reduced mod 1, parts summed with fsum."""
    phase = np.mod(theta * family.array().astype(np.float64), 1.0) * (2 * math.pi)
    return complex(math.fsum(np.cos(phase)), math.fsum(np.sin(phase)))


def equispaced_values(family: NormMultiset, points: int) -> np.ndarray:
    """S(j/points) for j = 0..points-1 via one FFT of the histogram."""
    if points <= family.n_cap:
        raise ValueError(f"need more than n_cap={family.n_cap} points, got {points}")
    hist = np.zeros(points)
    hist[: family.n_cap + 1] = family.histogram()
    return np.fft.ifft(hist) * points


def mean_square(family: NormMultiset, points: int | None = None) -> tuple[int, float]:
    """(exact coincidence count, Riemann sum of |S|^2 at equispaced points)."""
    if points is None:
        points = DEFAULT_POINTS_FACTOR * family.n_cap
    if points < MIN_POINTS_FACTOR * family.n_cap:
        raise ValueError(f"quadrature needs at least {MIN_POINTS_FACTOR} * n_cap points, got {points}")
    _, mult = np.unique(family.array(), return_counts=True)
    exact = int(np.sum(mult.astype(np.int64) ** 2))
    values = equispaced_values(family, points)
    quad = math.fsum(np.abs(values) ** 2) / points
    return exact, quad


@dataclass(frozen=True)
class FrequencyDecomposition:
    """theta = a/q + K/N with gcd(a, q) = 1, q <= sqrt N, |K| <= sqrt N / q."""

    a: int
    q: int
    K: float
    N: int

    @property
    def beta(self) -> float:
        return self.K / self.N

    def violations(self, theta: float | Fraction | None = None) -> list[str]:
        bad = []
        if math.gcd(self.a, self.q) != 1:
            bad.append("gcd(a, q) != 1")
        if not (0 <= self.a <= self.q and self.q * self.q <= self.N):
            bad.append("need 0 <= a <= q <= sqrt(N)")
        if self.a in (0, self.q) and self.q != 1:
            bad.append("a in {0, q} only for q = 1")
        if theta is not None:
            K = (Fraction(theta) - Fraction(self.a, self.q)) * self.N
            if K * K * self.q * self.q > self.N:
                bad.append("|K| > sqrt(N)/q")
        elif self.K * self.K * self.q * self.q > self.N * (1 + 1e-12):
            bad.append("|K| > sqrt(N)/q")
        return bad


def convergents(x: Fraction) -> Iterable[tuple[int, int]]:
    """(p_k, q_k) of a nonnegative rational, in order."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    num, den = x.numerator, x.denominator
    while den:
        digit, rem = divmod(num, den)
        p0, q0, p1, q1 = p1, q1, digit * p1 + p0, digit * q1 + q0
        yield p1, q1
        num, den = den, rem


def dirichlet_decompose(theta: float | Fraction, N: int) -> FrequencyDecomposition:
    """First continued-fraction convergent a/q of theta meeting every constraint.

    Comparisons are exact on the binary value of theta.  Scanning convergents
    in order makes the smallest admissible q win.
    """
    if N < 4:
        raise ValueError(f"N must be >= 4, got {N}")
    x = Fraction(theta)
    if not 0 <= x <= 1:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    for a, q in convergents(x):
        if q * q > N:
            break
        K = (x - Fraction(a, q)) * N
        if K * K * q * q <= N:
            return FrequencyDecomposition(a, q, float(K), N)
    # unreachable by Dirichlet's theorem; kept as a guard
    raise ArithmeticError(f"no admissible convergent for theta={theta}, N={N}")


def partition_points(Q1: float, Q: float, beta: float = 0.0) -> list[float]:
    """Sorted {a/q + beta : gcd(a, q) = 1, 0 <= a <= q, Q1 <= q <= Q}; q = 1 gives a in {0, 1}."""
    if Q1 < 1:
        raise ValueError(f"Q1 must be >= 1, got {Q1}")
    if Q1 > Q:
        raise ValueError(f"need Q1 <= Q, got Q1={Q1}, Q={Q}")
    pts = []
    for q in range(math.ceil(Q1), math.floor(Q) + 1):
        for a in range(0, q + 1):
            if math.gcd(a, q) == 1:
                pts.append(Fraction(a, q))
    return [float(p) + beta for p in sorted(pts)]


def partition_size(Q1: float, Q: float) -> int:
    """sum of phi(q) over Q1 <= q <= Q, plus one for the extra point at q = 1."""
    lo, hi = math.ceil(Q1), math.floor(Q)
    return sum(euler_phi(q) for q in range(lo, hi + 1)) + (1 if lo <= 1 <= hi else 0)


def spectrum(family: NormMultiset, points: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(theta_j, |S(theta_j)|^2) on the equispaced grid used by mean_square."""
    if points is None:
        points = DEFAULT_POINTS_FACTOR * family.n_cap
    values = equispaced_values(family, points)
    return np.arange(points) / points, np.abs(values) ** 2


def write_spectrum_csv(path: str | Path, thetas: Sequence[float], power: Sequence[float]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta", "abs_S_squared"])
        for t, p in zip(thetas, power):
            writer.writerow([f"{t:.12g}", f"{p:.12g}"])
