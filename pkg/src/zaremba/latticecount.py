"""Exhaustive counting of SL2 matrices that move one vector close to another.

For eta = (x, y), eta' = (u, v) the counted set is

    { gamma = (a b; c d) : ad - bc = 1, 0 <= a <= b, 1 <= c <= d, 1 <= b <= d,
      |a x + b y - u| < X/K, |c x + d y - v| < X/K,
      gamma eta = eta' (mod q), Y/kappa1 <= d <= Y }.

The window inequalities are strict, matching the reduced system that solves
for c in (c1, c2) and b in (b1(c), b2(c)):

    c1, c2 = (v -+ X/K - d y) / x
    b1, b2 = (d (u -+ X/K) - x) / (c x + d y)

All comparisons are made in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from scipy import integrate


@dataclass(frozen=True)
class Mat2:
    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def norm(self) -> int:
        return self.d

    def apply(self, vec: Sequence[int]) -> tuple[int, int]:
        x, y = vec
        return self.a * x + self.b * y, self.c * x + self.d * y

    def in_M(self) -> bool:
        return (
            self.det == 1
            and 0 <= self.a <= self.b
            and 1 <= self.c <= self.d
            and 1 <= self.b <= self.d
        )


class InstanceError(ValueError):
    """A counting instance violates one of its defining constraints."""


def _frac(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True)
class CountingInstance:
    """Vectors eta, eta', modulus q and the scale parameters X, Y, K, kappa1.

    ``A`` is the alphabet maximum used in the ratio constraints
    y/A <= x <= y and v/A <= u <= v.
    """

    eta: tuple[int, int]
    eta_prime: tuple[int, int]
    q: int
    X: float
    Y: float
    K: float
    kappa1: float = 2.0
    A: int = 2
    name: str = ""
    ray: str = ""

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(int(t) for t in self.eta))
        object.__setattr__(self, "eta_prime", tuple(int(t) for t in self.eta_prime))

    @property
    def window(self) -> Fraction:
        """X/K as an exact rational."""
        return _frac(self.X) / _frac(self.K)

    def violations(self) -> list[str]:
        """Names of the violated vector constraints (empty when valid)."""
        x, y = self.eta
        u, v = self.eta_prime
        A = self.A
        out = []
        if self.q < 1:
            out.append(f"q >= 1 (q={self.q})")
        if min(self.X, self.Y, self.K) <= 0 or self.kappa1 < 1:
            out.append("X, Y, K > 0 and kappa1 >= 1")
        if x < 1 or y < 1:
            out.append(f"eta has natural coordinates (eta={self.eta})")
        elif not (Fraction(y, A) <= x <= y):
            out.append(f"eta: y/A <= x <= y (x={x}, y={y}, A={A})")
        elif math.gcd(x, y) != 1:
            out.append(f"eta: gcd(x, y) = 1 (x={x}, y={y})")
        if u < 1 or v < 1:
            out.append(f"eta' has natural coordinates (eta'={self.eta_prime})")
        elif not (Fraction(v, A) <= u <= v):
            out.append(f"eta': v/A <= u <= v (u={u}, v={v}, A={A})")
        elif math.gcd(u, v) != 1:
            out.append(f"eta': gcd(u, v) = 1 (u={u}, v={v})")
        elif min(self.X, self.K) > 0 and 2 * self.window > v:
            out.append(f"eta': 2X/K <= v (2X/K={float(2 * self.window)}, v={v})")
        return out

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            raise InstanceError(f"instance {self.name or self.eta}: violates " + "; ".join(bad))

    def hypothesis_violation(self) -> str | None:
        """Diagnostic if X > Y > K^4 q^3 fails, else None."""
        X, Y, K, q = _frac(self.X), _frac(self.Y), _frac(self.K), self.q
        if not X > Y:
            return f"X > Y fails (X={self.X}, Y={self.Y})"
        if not Y > K**4 * q**3:
            return f"Y > K^4 q^3 fails (Y={self.Y}, K^4 q^3={float(K**4 * q**3)})"
        return None

    def d_range(self) -> range:
        Y, k1 = _frac(self.Y), _frac(self.kappa1)
        return range(max(1, math.ceil(Y / k1)), math.floor(Y) + 1)

    def to_dict(self) -> dict:
        return asdict(self)


def _open_int_range(lo: Fraction, hi: Fraction, floor_: int, ceil_: int) -> range:
    """Integers z with lo < z < hi and floor_ <= z <= ceil_."""
    start = max(math.floor(lo) + 1, floor_)
    stop = min(math.ceil(hi) - 1, ceil_)
    return range(start, stop + 1)


def satisfies_system(g: Mat2, inst: CountingInstance) -> bool:
    """Re-check every condition of the counting system for one matrix."""
    if not g.in_M():
        return False
    x, y = inst.eta
    u, v = inst.eta_prime
    w = inst.window
    top, bot = g.apply(inst.eta)
    if not (abs(top - u) < w and abs(bot - v) < w):
        return False
    if (top - u) % inst.q or (bot - v) % inst.q:
        return False
    Y, k1 = _frac(inst.Y), _frac(inst.kappa1)
    return Y / k1 <= g.d <= Y


def c_interval(inst: CountingInstance, d: int) -> tuple[Fraction, Fraction]:
    x, y = inst.eta
    v = inst.eta_prime[1]
    w = inst.window
    return (v - w - d * y) / x, (v + w - d * y) / x


def b_interval(inst: CountingInstance, d: int, c: int) -> tuple[Fraction, Fraction]:
    x, y = inst.eta
    u = inst.eta_prime[0]
    w = inst.window
    den = c * x + d * y
    return (d * (u - w) - x) / den, (d * (u + w) - x) / den


@dataclass
class CountResult:
    count: int
    witnesses: list[Mat2] = field(default_factory=list)
    max_c_width: Fraction = Fraction(0)


def count_M_set(inst: CountingInstance, keep_witnesses: bool = True) -> CountResult:
    """Exact size of the counting set, walking d, then c in (c1, c2), then b.

    For each (d, c) with gcd(c, d) = 1 the determinant forces
    b = -c^{-1} (mod d); since b <= d this leaves at most one candidate.
    """
    inst.validate()
    x, y = inst.eta
    u, v = inst.eta_prime
    q = inst.q
    res = CountResult(0)
    for d in inst.d_range():
        c1, c2 = c_interval(inst, d)
        res.max_c_width = max(res.max_c_width, c2 - c1)
        for c in _open_int_range(c1, c2, 1, d):
            if (c * x + d * y - v) % q:
                continue
            if math.gcd(c, d) != 1:
                continue
            b = (-pow(c, -1, d)) % d if d > 1 else 0
            if b == 0:
                b = d
            b1, b2 = b_interval(inst, d, c)
            if not (b1 < b < b2):
                continue
            a, rem = divmod(b * c + 1, d)
            if rem or a > b:
                continue
            g = Mat2(a, b, c, d)
            if (a * x + b * y - u) % q:
                continue
            if not satisfies_system(g, inst):
                raise AssertionError(f"enumerated matrix {g} fails the system re-check")
            res.count += 1
            if keep_witnesses:
                res.witnesses.append(g)
    return res


@dataclass(frozen=True)
class ThetaRegion:
    area_exact: float
    area_closed_form: float
    area_bound: float
    width_bound: float
    height_drop_bound: float


def theta_region(inst: CountingInstance, d: int) -> ThetaRegion:
    """Area of the (c, b) region for fixed d and the explicit bounds on it.

    area_exact integrates b2 - b1 over (c1, c2) by quadrature; the closed
    form is 2 d (X/K)(1/x) log((1 + X/(vK)) / (1 - X/(vK))).  Bounds:
    area d Y / K^2, c-width 2X/(K x), height drop 2 d X / (K (v - X/K)).
    """
    lo = inst.Y / inst.kappa1
    if not lo <= d <= inst.Y:
        raise ValueError(f"d={d} outside [Y/kappa1, Y] = [{lo}, {inst.Y}]")
    x, y = inst.eta
    u, v = inst.eta_prime
    w = inst.X / inst.K
    c1 = (v - w - d * y) / x
    c2 = (v + w - d * y) / x
    area, _ = integrate.quad(lambda c: 2 * d * w / (c * x + d * y), c1, c2, epsabs=0, epsrel=1e-12)
    z = w / v
    closed = 2 * d * w / x * math.log((1 + z) / (1 - z)) if z < 1 else math.inf
    return ThetaRegion(
        area_exact=area,
        area_closed_form=closed,
        area_bound=d * inst.Y / inst.K**2,
        width_bound=2 * w / x,
        height_drop_bound=2 * d * w / (v - w) if v > w else math.inf,
    )


def ratio_statistic(count: int, inst: CountingInstance) -> float:
    """count K^2 sqrt(q) / Y^2."""
    return count * inst.K**2 * math.sqrt(inst.q) / inst.Y**2


@dataclass
class SweepRow:
    index: int
    name: str
    ray: str
    count: int
    X: float
    Y: float
    K: float
    q: int
    ratio: float
    error: str = ""


def theorem_f2_sweep(grid: Iterable[CountingInstance], trend_limit: float = 2.0) -> dict:
    """Count every instance and measure the growth of the ratio statistic along rays.

    Instances failing X > Y > K^4 q^3 (or the vector constraints) are
    rejected individually with a diagnostic.  For each ray the per-Y maximum
    ratio is tracked; the trend factor is the largest ratio(Y2)/ratio(Y1)
    over Y1 < Y2 on that ray.
    """
    rows: list[SweepRow] = []
    for i, inst in enumerate(grid):
        problem = inst.hypothesis_violation() or "; ".join(inst.violations())
        if problem:
            rows.append(SweepRow(i, inst.name, inst.ray, 0, inst.X, inst.Y, inst.K, inst.q, math.nan, problem))
            continue
        n = count_M_set(inst, keep_witnesses=False).count
        rows.append(SweepRow(i, inst.name, inst.ray, n, inst.X, inst.Y, inst.K, inst.q, ratio_statistic(n, inst)))
    good = [r for r in rows if not r.error]
    rays: dict[str, dict] = {}
    for ray in sorted({r.ray for r in good if r.ray}):
        per_y: dict[float, float] = {}
        for r in good:
            if r.ray == ray:
                per_y[r.Y] = max(per_y.get(r.Y, 0.0), r.ratio)
        ys = sorted(per_y)
        factor = 0.0
        for i, y1 in enumerate(ys):
            for y2 in ys[i + 1 :]:
                if per_y[y1] > 0:
                    factor = max(factor, per_y[y2] / per_y[y1])
                elif per_y[y2] > 0:
                    factor = math.inf
        rays[ray] = {"Y": ys, "max_ratio": [per_y[y] for y in ys], "trend_factor": factor,
                     "within_limit": factor <= trend_limit}
    return {
        "rows": rows,
        "rejected": [r for r in rows if r.error],
        "max_ratio": max((r.ratio for r in good), default=0.0),
        "rays": rays,
        "trend_limit": trend_limit,
        "fitted_constant": max((r.ratio for r in good), default=0.0),
    }


def ray_instances(
    ray: str,
    eta: tuple[int, int],
    Ys: Sequence[float],
    q: int = 1,
    K: float = 2.0,
    kappa1: float = 2.0,
    A: int = 2,
    rhos: Sequence[float] = (0.5,),
    v_factor: float = 1.5,
) -> list[CountingInstance]:
    """Synthetic instances along a Y-doubling ray.

    X = Y * y so that y sits at the scale X/Y; eta' is the coprime pair
    nearest to (rho v, v) with v = v_factor X, for each rho in ``rhos``.
    """
    x, y = eta
    out = []
    for Y in Ys:
        X = Y * y
        v = int(round(v_factor * X))
        for j, rho in enumerate(rhos):
            u = int(round(rho * v))
            while math.gcd(u, v) != 1:
                u += 1
            out.append(CountingInstance((x, y), (u, v), q, X, Y, K, kappa1, A, name=f"{ray}-Y{Y:g}-{j}", ray=ray))
    return out


def instance_from_word(
    word: Sequence[int], eta_prime: tuple[int, int], q: int, X: float, Y: float, K: float,
    kappa1: float = 2.0, A: int | None = None, name: str = "", ray: str = "",
) -> CountingInstance:
    """Take eta = (<d_1..d_{k-1}>, <d_1..d_k>), two consecutive continued-fraction denominators."""
    from .continuant import continuant_pair

    pair = continuant_pair(word)
    A = A if A is not None else max(word)
    return CountingInstance((pair.q_prev, pair.q), eta_prime, q, X, Y, K, kappa1, A, name, ray)


def instance_from_dict(d: dict) -> CountingInstance:
    return CountingInstance(
        eta=tuple(d["eta"]), eta_prime=tuple(d["eta_prime"]), q=int(d["q"]),
        X=d["X"], Y=d["Y"], K=d["K"], kappa1=d.get("kappa1", 2.0), A=int(d.get("A", 2)),
        name=d.get("name", ""), ray=d.get("ray", ""),
    )


def load_grid(config: dict) -> list[CountingInstance]:
    """Build a grid from {"instances": [...], "rays": [...]}.

    A ray entry carries the keyword arguments of :func:`ray_instances`
    (``name`` becomes the ray label).
    """
    grid = [instance_from_dict(d) for d in config.get("instances", [])]
    for r in config.get("rays", []):
        r = dict(r)
        name = r.pop("name")
        r["eta"] = tuple(r["eta"])
        grid.extend(ray_instances(name, **r))
    return grid
