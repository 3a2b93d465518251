"""Invariant suites driven by ``zaremba verify``.

Every suite takes a parameter dict (missing keys fall back to DEFAULTS) and
a numpy Generator, and returns::

    {"suite": name, "passed": bool, "checks": [{"name", "passed", ...}, ...]}

A failing check carries the offending instance so it can be reproduced.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import dimension, expsum, kloosterman, latticecount
from .arith import primes_in
from .continuant import Alphabet

DEFAULTS = {
    "kloosterman": {"estermann_qmax": 50, "ustinov_qmax": 50},
    "phi": {"prime_lo": 101, "prime_hi": 499, "windows": 20, "psi_limit": 1.0,
            "phi1_instances": 50, "phi1_smax": 2000, "phi1_rtol": 1e-6},
    "korobov": {"qmax": 50, "Q_multiples": [0, 1, 3]},
    "lattice": {"instances": [], "trend_limit": 2.0, "rays": [
        {"name": "q1-eta34", "eta": [3, 4], "Ys": [32, 64, 128, 256], "q": 1, "K": 2.0, "rhos": [0.6]},
    ]},
    "hensley": {"cases": [
        {"alphabet": "1,2", "r": 20, "sharp": True, "x": [16, 160, 1600, 16000]},
        {"alphabet": "1,2,3", "r": 10, "sharp": True, "x": [360, 3600]},
    ]},
    "expsum": {"families": 100, "n_cap_max": 2000, "size_max": 4000, "quad_rtol": 0.01,
               "dirichlet_samples": 2000, "dirichlet_N": [100, 10**4, 10**6]},
}


def suite_params(suite: str, given: dict | None) -> dict:
    out = dict(DEFAULTS[suite])
    given = given or {}
    if suite == "lattice" and ("rays" in given or "instances" in given):
        # a user grid replaces the built-in ray instead of extending it
        out.update(rays=[], instances=[])
    out.update(given)
    return out


def _check(name: str, passed: bool, **info) -> dict:
    return {"name": name, "passed": bool(passed), **info}


def _result(suite: str, params: dict, checks: list[dict]) -> dict:
    return {"suite": suite, "params": params, "passed": all(c["passed"] for c in checks), "checks": checks}


def suite_kloosterman(params: dict | None = None, rng: np.random.Generator | None = None) -> dict:
    p = suite_params("kloosterman", params)
    checks = []
    for label, fn, qmax in (("estermann", kloosterman.estermann_check, p["estermann_qmax"]),
                            ("ustinov", kloosterman.ustinov_check, p["ustinov_qmax"])):
        res = fn(int(qmax))
        checks.append(_check(label, res["violations"] == 0, qmax=qmax, worst_ratio=res["worst_ratio"],
                             argmax=res["argmax"], violations=res["violations"], checked=res["checked"]))
    return _result("kloosterman", p, checks)


def random_phi_windows(rng: np.random.Generator, q: int, count: int) -> list[kloosterman.PhiWindow]:
    """Boxes with offsets in [0, 4q) and side lengths in [0, q], random sign."""
    out = []
    for _ in range(count):
        Q1, Q2 = rng.uniform(0, 4 * q, size=2)
        P1, P2 = rng.uniform(0, q, size=2)
        sign = int(rng.choice([-1, 1]))
        out.append(kloosterman.PhiWindow(q, float(Q1), float(Q2), float(P1), float(P2), sign))
    return out


def phi0_scan(primes, windows: int, rng: np.random.Generator) -> list[dict]:
    rows = []
    for q in primes:
        for w in random_phi_windows(rng, q, windows):
            exact, main, psi = kloosterman.phi0(w)
            rows.append({"q": q, "Q1": w.Q1, "Q2": w.Q2, "P1": w.P1, "P2": w.P2, "sign": w.sign,
                         "exact": exact, "main": main, "psi1": psi, "ratio": abs(exact - main) / psi})
    return rows


def random_phi1_grid(rng: np.random.Generator, count: int, s_max: int) -> list[dict]:
    """Instances (q, d, k, box, sign) with s = q d <= s_max."""
    out = []
    while len(out) < count:
        q = int(rng.integers(1, 41))
        d = int(rng.integers(1, s_max // q + 1))
        s = q * d
        if s > s_max:
            continue
        out.append({"q": q, "d": d, "k": int(rng.integers(0, q)), "sign": int(rng.choice([-1, 1])),
                    "Q1": float(rng.uniform(0, 2 * s)), "Q2": float(rng.uniform(0, 2 * s)),
                    "P1": float(rng.uniform(0, d)), "P2": float(rng.uniform(0, s))})
    return out


def suite_phi(params: dict | None = None, rng: np.random.Generator | None = None) -> dict:
    p = suite_params("phi", params)
    rng = rng if rng is not None else np.random.default_rng(0)
    rows = phi0_scan(primes_in(int(p["prime_lo"]), int(p["prime_hi"])), int(p["windows"]), rng)
    worst = max(rows, key=lambda r: r["ratio"])
    checks = [_check("phi0_error_scale", worst["ratio"] <= p["psi_limit"], worst_ratio=worst["ratio"],
                     worst_instance=worst, windows=len(rows))]
    fourier_worst = None
    for inst in random_phi1_grid(rng, int(p["phi1_instances"]), int(p["phi1_smax"])):
        s = inst["q"] * inst["d"]
        args = (inst["q"], inst["d"], inst["k"], inst["Q1"], inst["Q2"], inst["P1"], inst["P2"], inst["sign"])
        data = kloosterman.phi1_data(inst["q"], inst["d"], inst["k"], inst["sign"])
        err = abs(kloosterman.phi1_exact(*args) - kloosterman.phi1_fourier(*args, data=data)) / s**2
        if fourier_worst is None or err > fourier_worst["scaled_error"]:
            fourier_worst = {**inst, "scaled_error": err}
    checks.append(_check("phi1_fourier_identity", fourier_worst["scaled_error"] <= p["phi1_rtol"],
                         worst_instance=fourier_worst))
    return _result("phi", p, checks)


def suite_korobov(params: dict | None = None, rng: np.random.Generator | None = None) -> dict:
    p = suite_params("korobov", params)
    worst = None
    violations = []
    checked = 0
    for q in range(1, int(p["qmax"]) + 1):
        units = [1] if q == 1 else [a for a in range(1, q) if math.gcd(a, q) == 1]
        for a in units:
            for mult in p["Q_multiples"]:
                for P in range(1, q + 1):
                    lhs, rhs = kloosterman.korobov_check(q, a, mult * q, P)
                    checked += 1
                    slack = lhs / rhs
                    if lhs > rhs * (1 + 1e-12):
                        violations.append({"q": q, "a": a, "Q": mult * q, "P": P, "lhs": lhs, "rhs": rhs})
                    if worst is None or slack > worst["ratio"]:
                        worst = {"q": q, "a": a, "Q": mult * q, "P": P, "ratio": slack}
    return _result("korobov", p, [_check("korobov_inequality", not violations, checked=checked,
                                          worst=worst, violations=violations[:20])])


def suite_lattice(params: dict | None = None, rng: np.random.Generator | None = None) -> dict:
    p = suite_params("lattice", params)
    grid = latticecount.load_grid(p)
    if not grid:
        return _result("lattice", p, [_check("nonempty_grid", False, reason="config defines no instances")])
    sweep = latticecount.theorem_f2_sweep(grid, float(p["trend_limit"]))
    checks = [_check("hypothesis", not sweep["rejected"],
                     rejected=[{"index": r.index, "name": r.name, "diagnostic": r.error} for r in sweep["rejected"]])]
    for name, info in sweep["rays"].items():
        checks.append(_check(f"trend:{name}", info["within_limit"], **info))
    checks.append(_check("fitted_constant", True, value=sweep["fitted_constant"]))
    return _result("lattice", p, checks)


def suite_hensley(params: dict | None = None, rng: np.random.Generator | None = None) -> dict:
    p = suite_params("hensley", params)
    checks = []
    for case in p["cases"]:
        alphabet = Alphabet.parse(case["alphabet"])
        bracket = dimension.delta_bracket(alphabet, int(case["r"]), sharp=bool(case.get("sharp", False)))
        for x in case["x"]:
            try:
                res = dimension.hensley_check(alphabet, x, bracket)
            except ValueError as exc:
                checks.append(_check(f"hensley:{alphabet}:{x}", False, error=str(exc),
                                     bracket=[bracket.delta_lo, bracket.delta_hi]))
                continue
            passed = res.pop("passed")
            checks.append(_check(f"hensley:{alphabet}:{x}", passed, **res))
    return _result("hensley", p, checks)


def suite_expsum(params: dict | None = None, rng: np.random.Generator | None = None) -> dict:
    p = suite_params("expsum", params)
    rng = rng if rng is not None else np.random.default_rng(0)
    worst_quad = 0.0
    bad = []
    for i in range(int(p["families"])):
        n_cap = int(rng.integers(1, int(p["n_cap_max"]) + 1))
        fam = expsum.random_family(rng, n_cap, int(rng.integers(1, int(p["size_max"]) + 1)))
        exact, quad = expsum.mean_square(fam)
        oracle = int(np.sum(np.bincount(fam.array()).astype(np.int64) ** 2))
        rel = abs(exact - quad) / exact
        worst_quad = max(worst_quad, rel)
        if exact != oracle or rel > p["quad_rtol"]:
            bad.append({"family": i, "n_cap": n_cap, "exact": exact, "oracle": oracle, "quadrature": quad})
    checks = [_check("parseval", not bad, worst_relative_quadrature_error=worst_quad, failures=bad[:5])]
    dir_bad = []
    for N in p["dirichlet_N"]:
        for theta in rng.random(int(p["dirichlet_samples"])):
            dec = expsum.dirichlet_decompose(float(theta), int(N))
            problems = dec.violations(float(theta))
            if problems:
                dir_bad.append({"theta": float(theta), "N": N, "problems": problems})
    checks.append(_check("dirichlet_constraints", not dir_bad, failures=dir_bad[:5]))
    return _result("expsum", p, checks)


SUITES: dict[str, Callable[..., dict]] = {
    "kloosterman": suite_kloosterman,
    "phi": suite_phi,
    "korobov": suite_korobov,
    "lattice": suite_lattice,
    "hensley": suite_hensley,
    "expsum": suite_expsum,
}
