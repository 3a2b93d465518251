"""Elementary modular and multiplicative arithmetic shared by the toolkit."""

from __future__ import annotations

import cmath
import math
from functools import lru_cache, reduce
from typing import Iterable

TWO_PI = 2.0 * math.pi


def e(x: float) -> complex:
    """exp(2*pi*i*x) in double precision."""
    return cmath.exp(TWO_PI * 1j * x)


def e_frac(num: int, den: int) -> complex:
    """e(num/den) with the numerator reduced mod den first.

    Reducing before the float division keeps the phase accurate for large
    integer arguments.
    """
    return e((num % den) / den)


def delta_div(q: int, a: int) -> int:
    """Divisibility indicator: 1 if q divides a, else 0."""
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    return 1 if a % q == 0 else 0


def delta_div_exp(q: int, a: int) -> complex:
    """The same indicator written as the averaged exponential sum over x = 1..q."""
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    return sum(e_frac(a * x, q) for x in range(1, q + 1)) / q


@lru_cache(maxsize=4096)
def factorize(q: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation by trial division, as ((p, k), ...) sorted by p."""
    if q < 1:
        raise ValueError(f"cannot factor {q}")
    out = []
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def divisors(q: int) -> list[int]:
    """All positive divisors of q in increasing order."""
    divs = [1]
    for p, k in factorize(q):
        divs = [d * p**j for d in divs for j in range(k + 1)]
    return sorted(divs)


def euler_phi(q: int) -> int:
    """Number of 1 <= x <= q with gcd(x, q) = 1."""
    result = q
    for p, _ in factorize(q):
        result -= result // p
    return result


def divisor_sigma(alpha: float, q: int) -> float:
    """sum of d**alpha over the divisors d of q.

    Integer alpha >= 0 gives an exact int; alpha = 0 is the divisor count.
    """
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    if float(alpha).is_integer() and alpha >= 0:
        a = int(alpha)
        return sum(d**a for d in divisors(q))
    return math.fsum(d**alpha for d in divisors(q))


def num_divisors(q: int) -> int:
    """sigma_0(q), the divisor count."""
    n = 1
    for _, k in factorize(q):
        n *= k + 1
    return n


def gcd_chain(values: Iterable[int]) -> int:
    """gcd of the absolute values; an all-zero list gives 0."""
    vals = list(values)
    if not vals:
        raise ValueError("gcd_chain needs at least one value")
    return reduce(math.gcd, (abs(v) for v in vals))


def primes_in(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi (simple sieve)."""
    if hi < 2:
        return []
    sieve = bytearray([1]) * (hi + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(hi) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, hi + 1, p)))
    return [p for p in range(max(lo, 2), hi + 1) if sieve[p]]
