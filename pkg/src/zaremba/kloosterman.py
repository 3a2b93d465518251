"""Generalised Kloosterman sums, their published bounds, and incomplete counts.

    K_q(l, m, n) = sum over x, y mod q with xy = l (mod q) of e((m x + n y) / q)

Three evaluation routes are provided and cross-checked in the tests:

* :func:`kloosterman_value` resolves y from x one divisor class at a time,
  O(q log q);
* :func:`kloosterman_naive` is the O(q^2) filtered double loop;
* :func:`kloosterman_table` gets K_q(l, m, n) for every (m, n) at once as a
  2-D inverse FFT of the solution indicator of xy = l.

The incomplete sums Phi0 (boxes and regions under a graph, congruence
uv = -+1 mod q) and Phi1 (uv = -+q mod s with s = qd, q | v, twisted by
e(ku/q)) come with their main terms and the finite error sums R0..R3 summed
over complete ranges.

Sign convention: ``sign=+1`` counts uv + 1 = 0 (resp. uv + q = 0), i.e. the
Kloosterman argument is l = -sign * q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .arith import e_frac, euler_phi, gcd_chain, num_divisors

#: guard for s = q d in the Phi1 routines
S_MAX = 10**6
#: dense FFT tables are only built up to this modulus
TABLE_MAX = 4096


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")


def ustinov_factor(q: int, l: int, m: int, n: int) -> float:
    """f_q(l, m, n) = sigma0(q) sigma0((l, m, n, q)) (lm, ln, mn, q)^(1/2)."""
    return (
        num_divisors(q)
        * num_divisors(gcd_chain([l, m, n, q]))
        * math.sqrt(gcd_chain([l * m, l * n, m * n, q]))
    )


def ustinov_bound(q: int, l: int, m: int, n: int) -> float:
    return ustinov_factor(q, l, m, n) * math.sqrt(q)


def estermann_bound(q: int, m: int, n: int) -> float:
    """sigma0(q) (m, n, q)^(1/2) sqrt(q) for the classical sum K_q(1, m, n)."""
    return num_divisors(q) * math.sqrt(gcd_chain([m, n, q])) * math.sqrt(q)


@dataclass(frozen=True)
class KloostermanEval:
    q: int
    l: int
    m: int
    n: int
    value: float
    ustinov_bound: float
    estermann_bound: float | None

    @property
    def ratio(self) -> float:
        return abs(self.value) / self.ustinov_bound


def kloosterman_naive(q: int, l: int, m: int, n: int) -> complex:
    """Filtered O(q^2) double loop over x, y = 1..q."""
    total = 0j
    for x in range(1, q + 1):
        for y in range(1, q + 1):
            if (x * y - l) % q == 0:
                total += e_frac(m * x + n * y, q)
    return total


def kloosterman_value(q: int, l: int, m: int, n: int) -> complex:
    """K_q(l, m, n) by solving xy = l for y given x.

    With g = gcd(x, q) a solution exists iff g | l, and then the y form one
    class y0 mod q/g; summing e(ny/q) over that class gives
    g * e(n y0 / q) when g | n and 0 otherwise.
    """
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    total = 0j
    for x in range(q):
        g = math.gcd(x, q)
        if l % g or n % g:
            continue
        qg = q // g
        y0 = (l // g) * pow(x // g, -1, qg) % qg if qg > 1 else 0
        total += g * e_frac(m * x + n * y0, q)
    return total


def solution_indicator(q: int, l: int) -> np.ndarray:
    """q x q 0/1 matrix C[x, y] = [xy = l (mod q)], indices taken mod q."""
    r = np.arange(q, dtype=np.int64)
    return ((np.outer(r, r) - l) % q == 0).astype(np.float64)


def kloosterman_table(q: int, l: int) -> np.ndarray:
    """Real q x q array T[m, n] = K_q(l, m, n) for 0 <= m, n < q.

    The imaginary part vanishes (x, y -> -x, -y preserves xy); it is dropped
    after a size check.
    """
    if q > TABLE_MAX:
        raise ValueError(f"q={q} exceeds the dense-table limit {TABLE_MAX}")
    table = np.fft.ifft2(solution_indicator(q, l)) * (q * q)
    if q > 1 and np.abs(table.imag).max() > 1e-6 * q:
        raise ArithmeticError(f"K_{q}({l},.,.) has a non-negligible imaginary part")
    return np.ascontiguousarray(table.real)


def kloosterman_sum(q: int, l: int, m: int, n: int) -> KloostermanEval:
    """Exact K_q(l, m, n) with the Ustinov bound and, for l = 1, Estermann's."""
    value = kloosterman_value(q, l, m, n)
    if abs(value.imag) > 1e-6 * q:
        raise ArithmeticError(f"K_{q}({l},{m},{n}) = {value} is not real")
    est = estermann_bound(q, m, n) if l == 1 else None
    return KloostermanEval(q, l, m, n, value.real, ustinov_bound(q, l, m, n), est)


def _divisor_count_table(q: int) -> np.ndarray:
    out = np.zeros(q + 1, dtype=np.int64)
    for d in range(1, q + 1):
        out[d::d] += 1
    return out


def _worst(ratios: np.ndarray) -> tuple[float, tuple[int, int]]:
    idx = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    return float(ratios[idx]), (int(idx[0]), int(idx[1]))


def estermann_rows(q: int, tol: float = 1e-9) -> dict:
    """Check |K_q(m, n)| <= sigma0(q)(m, n, q)^(1/2) sqrt(q) for all 0 <= m, n < q."""
    table = kloosterman_table(q, 1)
    absval = np.abs(table)
    r = np.arange(q, dtype=np.int64)
    g = np.gcd(np.gcd.outer(r, r), q)
    bound = num_divisors(q) * np.sqrt(g) * math.sqrt(q)
    viol = int(np.count_nonzero(absval > bound + tol * max(q, 1)))
    worst, (m, n) = _worst(absval / bound)
    return {"q": q, "l": 1, "m": m, "n": n, "value": float(table[m, n]),
            "bound": float(bound[m, n]), "ratio": worst, "violations": viol, "checked": q * q}


def ustinov_rows(q: int, tol: float = 1e-9) -> dict:
    """Check |K_q(l, m, n)| <= f_q(l, m, n) sqrt(q) over the full grid l, m, n in [0, q)."""
    r = np.arange(q, dtype=np.int64)
    sig = _divisor_count_table(q)
    best = None
    viol = 0
    for l in range(q):
        table = kloosterman_table(q, l)
        gmn = np.gcd.outer(r, r)
        g4 = np.gcd(np.gcd(gmn, l), q)
        lm = l * r
        g_prod = np.gcd(np.gcd(np.gcd.outer(lm, lm), np.outer(r, r)), q)
        bound = sig[q] * sig[g4] * np.sqrt(g_prod) * math.sqrt(q)
        absval = np.abs(table)
        viol += int(np.count_nonzero(absval > bound + tol * max(q, 1)))
        worst, (m, n) = _worst(absval / bound)
        if best is None or worst > best["ratio"]:
            best = {"q": q, "l": l, "m": m, "n": n, "value": float(table[m, n]),
                    "bound": float(bound[m, n]), "ratio": worst}
    best["violations"] = viol
    best["checked"] = q**3
    return best


def _sweep_summary(rows: list[dict]) -> dict:
    worst = max(rows, key=lambda r: r["ratio"])
    return {
        "worst_ratio": worst["ratio"],
        "argmax": [worst["q"], worst["l"], worst["m"], worst["n"]],
        "violations": sum(r["violations"] for r in rows),
        "checked": sum(r["checked"] for r in rows),
        "rows": rows,
    }


def estermann_check(q_max: int) -> dict:
    """Exhaustive Estermann check for q <= q_max; worst ratio and arg-max (q, l, m, n)."""
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    return _sweep_summary([estermann_rows(q) for q in range(1, q_max + 1)])


def ustinov_check(q_max: int) -> dict:
    """Exhaustive check of the generalised bound for q <= q_max, all l, m, n in [0, q)."""
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    return _sweep_summary([ustinov_rows(q) for q in range(1, q_max + 1)])


# --- incomplete sums ---------------------------------------------------------


def psi1(q: int) -> float:
    """sigma0(q) log^2(q + 1) q^(1/2)."""
    return num_divisors(q) * math.log(q + 1) ** 2 * math.sqrt(q)


@dataclass(frozen=True)
class PhiWindow:
    q: int
    Q1: float
    Q2: float
    P1: float
    P2: float
    sign: int = 1

    def __post_init__(self):
        _check_sign(self.sign)
        if self.q < 1:
            raise ValueError(f"modulus must be >= 1, got {self.q}")
        for name in ("P1", "P2"):
            p = getattr(self, name)
            if not 0 <= p <= self.q:
                raise ValueError(f"{name}={p} outside [0, q={self.q}]")


def _count_in_class(lo: int, hi: int, r: int, q: int) -> int:
    """#{lo < v <= hi : v = r mod q}."""
    return (hi - r) // q - (lo - r) // q


def _count_congruent(q: int, u: int, v_lo: int, v_hi: int, sign: int) -> int:
    """#{v_lo < v <= v_hi : u v + sign = 0 (mod q)}."""
    if math.gcd(u, q) != 1:
        return 0
    v0 = (-sign) * pow(u, -1, q) % q if q > 1 else 0
    return _count_in_class(v_lo, v_hi, v0, q)


def phi0(window: PhiWindow) -> tuple[int, float, float]:
    """(exact count, main term phi(q)/q^2 P1 P2, psi1(q)) for the box count."""
    q = window.q
    u_lo, u_hi = math.floor(window.Q1), math.floor(window.Q1 + window.P1)
    v_lo, v_hi = math.floor(window.Q2), math.floor(window.Q2 + window.P2)
    exact = sum(_count_congruent(q, u, v_lo, v_hi, window.sign) for u in range(u_lo + 1, u_hi + 1))
    main = euler_phi(q) / q**2 * window.P1 * window.P2
    return exact, main, psi1(q)


class Tabulated:
    """Piecewise-linear function given by samples (xs ascending)."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        if self.xs.ndim != 1 or self.xs.shape != self.ys.shape or self.xs.size < 2:
            raise ValueError("tabulation needs matching 1-D arrays of length >= 2")
        if np.any(np.diff(self.xs) <= 0):
            raise ValueError("tabulation abscissae must be strictly increasing")

    @classmethod
    def sample(cls, f: Callable[[float], float], a: float, b: float, per_unit: int = 8) -> "Tabulated":
        """Sample f on [a, b] so that every integer in range is a node."""
        n = max(2, int(math.ceil((b - a) * per_unit)) + 1)
        xs = np.linspace(a, b, n)
        return cls(xs, [f(x) for x in xs])

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)

    def is_nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.ys) <= 0))

    def integral(self, a: float, b: float) -> float:
        """Trapezoid rule on the tabulation restricted to [a, b]."""
        if b <= a:
            return 0.0
        inner = (self.xs > a) & (self.xs < b)
        xs = np.concatenate([[a], self.xs[inner], [b]])
        return float(np.trapezoid(self(xs), xs))


def _as_tabulated(f, lo: float, hi: float) -> Tabulated:
    return f if isinstance(f, Tabulated) else Tabulated.sample(f, lo, hi)


def _floor_guarded(x: float) -> int:
    return math.floor(x + 1e-12 * max(1.0, abs(x)))


def _check_profile(tab: Tabulated, cap: float) -> None:
    if not tab.is_nonincreasing():
        raise ValueError("f must be non-increasing on its tabulation")
    if float(tab(0.0)) > cap * (1 + 1e-12):
        raise ValueError(f"f(0)={float(tab(0.0))} exceeds {cap}")


def hyperbolic_sum(
    q: int, Q1: float, Q2: float, f, sign: int = 1, T: int = 1
) -> tuple[int, float, float]:
    """Count of uv + sign = 0 (mod q) under the graph of a non-increasing f.

    Returns (exact, main, error_budget) where main = phi(q)/q^2 * int f and the
    budget is phi(q)/q^2 (Q2 - Q1)/T (f(Q1) - f(Q2)) + T psi1(q).
    """
    _check_sign(sign)
    if not 0 <= Q1 <= Q2 <= q:
        raise ValueError(f"need 0 <= Q1 <= Q2 <= q, got Q1={Q1}, Q2={Q2}, q={q}")
    if T < 1:
        raise ValueError(f"T must be a positive integer, got {T}")
    tab = _as_tabulated(f, 0.0, float(q))
    _check_profile(tab, q)
    exact = 0
    for u in range(math.floor(Q1) + 1, math.floor(Q2) + 1):
        top = _floor_guarded(float(tab(u)))
        if top >= 1:
            exact += _count_congruent(q, u, 0, top, sign)
    dens = euler_phi(q) / q**2
    main = dens * tab.integral(Q1, Q2)
    budget = dens * (Q2 - Q1) / T * float(tab(Q1) - tab(Q2)) + T * psi1(q)
    return exact, main, budget


@dataclass
class Phi1Data:
    """Kloosterman aggregates for Phi1 at fixed (q, d, k, sign)."""

    q: int
    d: int
    k: int
    sign: int
    H: np.ndarray  # H[r, b] = sum_{l=1..q} K_s(-sign q, r + d l, b), r mod d, b mod s

    @property
    def s(self) -> int:
        return self.q * self.d

    @property
    def central(self) -> float:
        """sum_{l=1..q} K_s(-sign q, d l, d k)."""
        return float(self.H[0, (self.d * self.k) % self.s])

    def r_terms(self) -> list[float]:
        """[R0, R1, R2, R3], full ranges -s/2 < m, n <= s/2, m, n != 0."""
        q, d, s = self.q, self.d, self.s
        dk = (d * self.k) % s
        ms = _centered(s)
        inv = 1.0 / np.abs(ms)
        H = np.abs(self.H)
        r0 = abs(self.central) / (q * s)
        r1 = float(np.sum(H[ms % d, dk] * inv)) / q**2
        cols = (ms + dk) % s
        r2 = float(np.sum(H[0, cols] * inv)) / q
        per_residue = (H[:, cols] * inv[None, :]).sum(axis=1)  # indexed by m mod d
        r3 = float(np.sum(per_residue[ms % d] * inv)) / q
        return [r0, r1, r2, r3]


def _centered(s: int) -> np.ndarray:
    """Nonzero integers m with -s/2 < m <= s/2."""
    ms = np.arange(-((s - 1) // 2), s // 2 + 1, dtype=np.int64)
    return ms[ms != 0]


def phi1_data(q: int, d: int, k: int, sign: int = 1) -> Phi1Data:
    _check_sign(sign)
    if q < 1 or d < 1:
        raise ValueError(f"q and d must be positive, got q={q}, d={d}")
    s = q * d
    if s > S_MAX:
        raise ValueError(f"s = q d = {s} exceeds {S_MAX}")
    table = kloosterman_table(s, -sign * q)
    H = table.reshape(q, d, s).sum(axis=0)
    return Phi1Data(q, d, k, sign, H)


def _check_phi1_window(q, d, P1, P2) -> None:
    s = q * d
    if not 0 <= P1 <= d:
        raise ValueError(f"P1={P1} outside [0, d={d}]")
    if not 0 <= P2 <= s:
        raise ValueError(f"P2={P2} outside [0, s={s}]")


def phi1_exact(q: int, d: int, k: int, Q1: float, Q2: float, P1: float, P2: float, sign: int = 1) -> complex:
    """Direct double loop over the box Q1 < u <= Q1 + P1, Q2 < v <= Q2 + P2."""
    s = q * d
    us = np.arange(math.floor(Q1) + 1, math.floor(Q1 + P1) + 1, dtype=np.int64)
    vs = np.arange(math.floor(Q2) + 1, math.floor(Q2 + P2) + 1, dtype=np.int64)
    vs = vs[vs % q == 0]
    if us.size == 0 or vs.size == 0:
        return 0j
    hit = (np.outer(us, vs) + sign * q) % s == 0
    weights = hit.sum(axis=1)
    phases = np.exp(2j * np.pi * ((k * us) % q) / q)
    return complex(np.sum(weights * phases))


def phi1(
    q: int, d: int, k: int, Q1: float, Q2: float, P1: float, P2: float, sign: int = 1,
    data: Phi1Data | None = None,
) -> tuple[complex, complex, list[float]]:
    """(exact, main, [R0, R1, R2, R3]) for the twisted box count with s = q d."""
    _check_phi1_window(q, d, P1, P2)
    data = data or phi1_data(q, d, k, sign)
    s = q * d
    main = P1 * P2 / (q * s * s) * data.central
    return phi1_exact(q, d, k, Q1, Q2, P1, P2, sign), complex(main), data.r_terms()


def _chi_hat(M: int, N: int, s: int) -> np.ndarray:
    """Fourier coefficients (1/s) sum_{x=M+1..M+N} e(-n x/s), indexed by n mod s."""
    ind = np.zeros(s)
    ind[(np.arange(M + 1, M + N + 1)) % s] = 1.0
    return np.fft.fft(ind) / s


def phi1_fourier(
    q: int, d: int, k: int, Q1: float, Q2: float, P1: float, P2: float, sign: int = 1,
    data: Phi1Data | None = None,
) -> complex:
    """Full finite-Fourier reconstruction of the Phi1 box sum.

    (1/q) sum over all m, n mod s of chi1^(n) chi2^(m) sum_l K_s(-sign q, m + d l, n + d k);
    an identity, so it must match :func:`phi1_exact` to rounding.
    """
    _check_phi1_window(q, d, P1, P2)
    data = data or phi1_data(q, d, k, sign)
    s = q * d
    M1, M2 = math.floor(Q1), math.floor(Q2)
    N1, N2 = math.floor(Q1 + P1) - M1, math.floor(Q2 + P2) - M2
    c1 = _chi_hat(M1, N1, s)
    c2 = _chi_hat(M2, N2, s)
    per_residue = data.H[:, (np.arange(s) + d * k) % s] @ c1  # sum over n, per m mod d
    return complex(np.dot(c2, per_residue[np.arange(s) % d]) / q)


def phi1_hyperbolic(
    q: int, d: int, k: int, Q1: float, Q2: float, f, T: int = 1, sign: int = 1,
    data: Phi1Data | None = None,
) -> tuple[complex, complex, float]:
    """(exact, main, error_budget) for the twisted count under the graph of f."""
    s = q * d
    if not 0 <= Q1 <= Q2 <= d:
        raise ValueError(f"need 0 <= Q1 <= Q2 <= d, got Q1={Q1}, Q2={Q2}, d={d}")
    if T < 1:
        raise ValueError(f"T must be a positive integer, got {T}")
    tab = _as_tabulated(f, 0.0, float(s))
    _check_profile(tab, s)
    data = data or phi1_data(q, d, k, sign)
    exact = 0j
    for u in range(math.floor(Q1) + 1, math.floor(Q2) + 1):
        top = _floor_guarded(float(tab(u)))
        if top >= 1:
            exact += phi1_exact(q, d, k, u - 1, 0, 1, top, sign)
    scale = data.central / (q * s * s)
    main = scale * tab.integral(Q1, Q2)
    budget = abs(scale) * (Q2 - Q1) / T * float(tab(Q1) - tab(Q2)) + T * sum(data.r_terms())
    return exact, complex(main), budget


def korobov_check(q: int, a: int, Q: int, P: int) -> tuple[float, float]:
    """(lhs, rhs) of sum_{n=1..q} |sum_{x=Q+1..Q+P} e(n a x / q)| <= P + q log q."""
    if q < 1 or P < 1:
        raise ValueError(f"need q >= 1 and P >= 1, got q={q}, P={P}")
    if math.gcd(a, q) != 1:
        raise ValueError(f"gcd(a={a}, q={q}) != 1")
    if q > 1 and not 1 <= a < q:
        raise ValueError(f"need 1 <= a < q, got a={a}, q={q}")
    n = np.arange(1, q + 1, dtype=np.int64)
    x = np.arange(Q + 1, Q + P + 1, dtype=np.int64)
    phase = (np.outer(n * a % q, x % q) % q) / q
    inner = np.exp(2j * np.pi * phase).sum(axis=1)
    lhs = math.fsum(np.abs(inner))
    return lhs, P + q * math.log(q)
