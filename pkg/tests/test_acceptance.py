"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget.

Every test records a single PASS/FAIL line; the lines are printed in the
"acceptance criteria" section of the pytest terminal summary.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest
from oracles import lattice_quadruple_loop

from zaremba import kloosterman, latticecount
from zaremba.arith import primes_in
from zaremba.continuant import Alphabet, denominator_census
from zaremba.dimension import delta_bracket
from zaremba.expsum import mean_square, random_family
from zaremba.latticecount import CountingInstance, count_M_set
from zaremba.verify import phi0_scan, random_phi1_grid, suite_hensley, suite_korobov

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SEED = 20240601


def elapsed(t0: float) -> float:
    return time.perf_counter() - t0


@pytest.mark.criterion(1)
def test_estermann_bound_exhaustive(criterion):
    t0 = time.perf_counter()
    res = kloosterman.estermann_check(100)
    dt = elapsed(t0)
    ok = res["violations"] == 0 and dt < 300
    assert criterion(ok, f"Estermann q<=100: {res['checked']} sums, {res['violations']} violations, "
                         f"worst ratio {res['worst_ratio']:.4f} at {res['argmax']}, {dt:.1f}s")


@pytest.mark.criterion(2)
def test_ustinov_bound_exhaustive(criterion):
    t0 = time.perf_counter()
    res = kloosterman.ustinov_check(60)
    dt = elapsed(t0)
    ok = res["violations"] == 0 and dt < 600
    assert criterion(ok, f"Ustinov q<=60: {res['checked']} sums, {res['violations']} violations, "
                         f"worst ratio {res['worst_ratio']:.4f} at {res['argmax']}, {dt:.1f}s")


@pytest.mark.criterion(3)
def test_phi0_asymptotic(criterion):
    t0 = time.perf_counter()
    rows = phi0_scan(primes_in(101, 499), 20, np.random.default_rng(SEED))
    dt = elapsed(t0)
    worst = max(rows, key=lambda r: r["ratio"])
    ok = len(rows) == 20 * len(primes_in(101, 499)) and worst["ratio"] <= 1.0 and dt < 300
    assert criterion(ok, f"Phi0 over {len(rows)} windows: max |exact-main|/psi1 = {worst['ratio']:.4f} "
                         f"(q={worst['q']}), {dt:.1f}s")


@pytest.mark.criterion(4)
def test_phi1_fourier_identity(criterion):
    grid = random_phi1_grid(np.random.default_rng(SEED), 50, 2000)
    worst = 0.0
    bad = []
    for inst in grid:
        s = inst["q"] * inst["d"]
        args = (inst["q"], inst["d"], inst["k"], inst["Q1"], inst["Q2"], inst["P1"], inst["P2"], inst["sign"])
        err = abs(kloosterman.phi1_exact(*args) - kloosterman.phi1_fourier(*args))
        worst = max(worst, err / s**2)
        if err > 1e-6 * s**2:
            bad.append(inst)
    ok = len(grid) == 50 and max(i["q"] * i["d"] for i in grid) <= 2000 and not bad
    assert criterion(ok, f"Phi1 identity on 50 instances: worst |exact-fourier|/s^2 = {worst:.2e}, "
                         f"{len(bad)} over 1e-6")


@pytest.mark.criterion(5)
def test_korobov_exhaustive(criterion):
    t0 = time.perf_counter()
    res = suite_korobov({"qmax": 50, "Q_multiples": [0, 1, 3]})
    dt = elapsed(t0)
    check = res["checks"][0]
    ok = res["passed"] and dt < 60
    assert criterion(ok, f"Korobov q<=50: {check['checked']} cases, {len(check['violations'])} violations, "
                         f"worst lhs/rhs {check['worst']['ratio']:.4f}, {dt:.1f}s")


@pytest.mark.criterion(6)
def test_delta_brackets_contain_cited_values(criterion):
    cases = [(Alphabet.upto(7), 8, 0.8889), (Alphabet((1, 2, 3, 4, 5, 6, 8)), 8, 0.8851),
             (Alphabet.upto(13), 6, 0.9445)]
    parts = []
    ok = True
    for alphabet, r, value in cases:
        t0 = time.perf_counter()
        b = delta_bracket(alphabet, r)
        dt = elapsed(t0)
        ok &= b.contains(value) and dt < 600
        parts.append(f"{alphabet} r={r} [{b.delta_lo:.4f}, {b.delta_hi:.4f}] vs {value} ({dt:.1f}s)")
    assert criterion(ok, "; ".join(parts))


@pytest.mark.criterion(7)
def test_hensley_two_sided(criterion):
    t0 = time.perf_counter()
    res = suite_hensley({"cases": [
        {"alphabet": "1,2", "r": 20, "sharp": True, "x": [16, 160, 1600, 16000]},
        {"alphabet": "1,2,3", "r": 10, "sharp": True, "x": [360, 3600]},
    ]})
    dt = elapsed(t0)
    ok = res["passed"] and len(res["checks"]) == 6 and dt < 300
    failed = [c["name"] for c in res["checks"] if not c["passed"]]
    assert criterion(ok, f"Hensley census: {len(res['checks']) - len(failed)}/6 x values pass all three "
                         f"inequalities{' (failed: ' + ', '.join(failed) + ')' if failed else ''}, {dt:.1f}s")


ORACLE_INSTANCES = [
    CountingInstance((1, 2), (35, 44), 1, 11, 20, 2, kappa1=2),
    CountingInstance((2, 3), (34, 57), 1, 14.25, 20, 2, kappa1=2),
    CountingInstance((2, 3), (34, 57), 2, 14.25, 20, 2, kappa1=2),
    CountingInstance((2, 3), (43, 72), 3, 18, 20, 2, kappa1=2),
    CountingInstance((1, 2), (28, 47), 2, 11.75, 20, 2, kappa1=3),
]


@pytest.mark.criterion(8)
def test_lattice_trend_and_oracle(criterion):
    t0 = time.perf_counter()
    config = json.loads((CONFIGS / "lattice_rays.json").read_text())
    grid = latticecount.load_grid(config)
    sweep = latticecount.theorem_f2_sweep(grid, 2.0)
    hypotheses_ok = all(i.X > i.Y > i.K**4 * i.q**3 for i in grid)
    trends = {name: info["trend_factor"] for name, info in sweep["rays"].items()}
    oracle_ok = True
    for inst in ORACLE_INSTANCES:
        got = sorted((g.a, g.b, g.c, g.d) for g in count_M_set(inst).witnesses)
        brute = lattice_quadruple_loop(inst.eta, inst.eta_prime, inst.q, inst.X, inst.Y, inst.K, inst.kappa1)
        oracle_ok &= got == sorted(brute)
    dt = elapsed(t0)
    ok = (len(grid) >= 20 and len(trends) >= 2 and hypotheses_ok and not sweep["rejected"]
          and all(t <= 2.0 for t in trends.values()) and oracle_ok and dt < 900)
    trend_text = ", ".join(f"{k} x{v:.3f}" for k, v in trends.items())
    assert criterion(ok, f"lattice sweep of {len(grid)} instances, trend {trend_text}; "
                         f"oracle agreement on 5 instances: {oracle_ok}, {dt:.1f}s")


@pytest.mark.criterion(9)
def test_parseval_identity(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    mismatches = 0
    for _ in range(100):
        n_cap = int(rng.integers(1, 2001))
        fam = random_family(rng, n_cap, int(rng.integers(1, 4001)))
        exact, quad = mean_square(fam)
        oracle = int(np.sum(np.bincount(np.asarray(fam.norms)).astype(np.int64) ** 2))
        mismatches += exact != oracle
        worst = max(worst, abs(quad - exact) / exact)
    dt = elapsed(t0)
    ok = mismatches == 0 and worst <= 0.01 and dt < 120
    assert criterion(ok, f"Parseval on 100 families: {mismatches} oracle mismatches, "
                         f"worst quadrature error {worst:.2e}, {dt:.1f}s")


@pytest.mark.criterion(10)
def test_census_ratio(criterion):
    t0 = time.perf_counter()
    c = denominator_census(Alphabet.upto(5), 10**5)
    dt = elapsed(t0)
    assert criterion(c.ratio >= 0.99, f"census {{1..5}} N=1e5: #D/N = {c.ratio:.5f} "
                                      f"({len(c.missing())} missing), {dt:.1f}s")
