"""Command-line entry point: ``zaremba <command> [options]``.

Exit codes: 0 success, 1 a checked assertion failed, 2 usage or budget error.
Reports (JSON summary, CSV table, PNG figure) go to the ``--out`` directory
and embed the effective config, seed and toolkit version.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, dimension, expsum, latticecount, reports, verify
from .arith import primes_in
from .continuant import CENSUS_MAX, Alphabet, denominator_census, write_bitmap

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _alphabet(args) -> Alphabet:
    if not args.alphabet:
        raise UsageError("--alphabet is required")
    try:
        return Alphabet.parse(args.alphabet)
    except ValueError as exc:
        raise UsageError(f"bad --alphabet {args.alphabet!r}: {exc}") from exc


def _load_config(args) -> dict:
    if not args.config:
        return {}
    try:
        return json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _done(msg: str, ok: bool = True) -> int:
    print(msg, file=sys.stdout if ok else sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


# --- commands --------------------------------------------------------------------


def cmd_census(args) -> int:
    alphabet = _alphabet(args)
    n_max = args.nmax
    if n_max is None or n_max < 1:
        raise UsageError(f"--nmax must be a positive integer, got {n_max}")
    if n_max > CENSUS_MAX:
        raise UsageError(f"--nmax {n_max} exceeds the census budget {CENSUS_MAX}")
    config = {"alphabet": list(alphabet.letters), "n_max": n_max, "min_ratio": args.min_ratio}
    meta = reports.meta_block("census", config, args.seed)
    census = denominator_census(alphabet, n_max, jobs=args.jobs)
    ladder = census.ladder()
    out = _out(args)
    reports.write_csv(out / "census.csv", meta, ["N", "count", "ratio"], ladder)
    ok = args.min_ratio is None or census.ratio >= args.min_ratio
    reports.write_json(out / "census.json", meta, {
        "quantity": "#D_A(N)/N, exact enumeration",
        "alphabet": list(alphabet.letters), "n_max": n_max, "count": census.count,
        "ratio": census.ratio, "words_enumerated": census.words, "includes_one": census.includes_one,
        "missing_head": census.missing()[:100], "ladder": ladder, "passed": ok,
    })
    if args.bitmap:
        write_bitmap(out / "census.bits", census.members)
    reports.plot_census(out / "census.png", ladder, f"A={{{alphabet}}}")
    return _done(f"census A={{{alphabet}}} N={n_max}: count={census.count} ratio={census.ratio:.6f}", ok)


def cmd_delta(args) -> int:
    alphabet = _alphabet(args)
    if len(alphabet) < 2:
        raise UsageError("delta needs an alphabet with at least two letters")
    if args.depth is None or args.depth < 1:
        raise UsageError("--depth r >= 1 is required")
    bracket = dimension.delta_bracket(alphabet, args.depth, sharp=args.sharp)
    out = _out(args)
    config = {"alphabet": list(alphabet.letters), "r": args.depth, "sharp": args.sharp, "expect": args.expect}
    meta = reports.meta_block("delta", config, args.seed)
    body = bracket.to_dict()
    ok = args.expect is None or bracket.contains(args.expect)
    body["passed"] = ok
    reports.write_json(out / "delta.json", meta, body)
    dimension.write_cache(args.cache or out / "delta_cache.tsv", bracket)
    ev = dimension.ZetaEvaluator(alphabet, args.depth)
    s_grid = np.linspace(0.05, 2.0, 40)
    brackets = np.array([ev.lambda_bracket(float(s), args.sharp) for s in s_grid])
    reports.plot_lambda(out / "delta.png", s_grid, brackets[:, 0], brackets[:, 1],
                        (bracket.delta_lo, bracket.delta_hi), f"A={{{alphabet}}}, r={args.depth}")
    print(json.dumps(reports._plain(body), sort_keys=True))
    return EXIT_OK if ok else EXIT_FAIL


def _suite_params(suite: str, config: dict, args) -> dict:
    if suite in config:
        params = dict(config[suite])
    elif suite == "lattice" and ("rays" in config or "instances" in config):
        params = dict(config)
    else:
        params = {}
    if args.qmax is not None:
        if suite == "kloosterman":
            params.update(estermann_qmax=args.qmax, ustinov_qmax=args.qmax)
        elif suite == "korobov":
            params["qmax"] = args.qmax
        elif suite == "phi":
            params["prime_hi"] = args.qmax
    return params


def cmd_verify(args) -> int:
    config = _load_config(args)
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    rng = np.random.default_rng(args.seed)
    results = []
    for name in names:
        params = _suite_params(name, config, args)
        if name == "lattice":
            for inst in latticecount.load_grid(verify.suite_params("lattice", params)):
                problem = inst.hypothesis_violation()
                if problem:
                    print(f"lattice instance {inst.name or inst.eta}: hypothesis violated: {problem}", file=sys.stderr)
        results.append(verify.SUITES[name](params, rng))
    out = _out(args)
    meta = reports.meta_block(f"verify {args.suite}", {"config": config, "qmax": args.qmax}, args.seed)
    ok = all(r["passed"] for r in results)
    reports.write_json(out / f"verify_{args.suite}.json", meta, {"passed": ok, "suites": results})
    for r in results:
        for c in r["checks"]:
            line = f"{r['suite']:<12} {c['name']:<28} {'ok' if c['passed'] else 'FAILED'}"
            print(line, file=sys.stdout if c["passed"] else sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_phi_scan(args) -> int:
    config = _load_config(args)
    params = {"prime_lo": 101, "prime_hi": args.qmax or 199, "windows": 20, "psi_limit": 1.0}
    params.update(config.get("phi", config) if isinstance(config, dict) else {})
    rng = np.random.default_rng(args.seed)
    primes = primes_in(int(params["prime_lo"]), int(params["prime_hi"]))
    if not primes:
        raise UsageError(f"no primes in [{params['prime_lo']}, {params['prime_hi']}]")
    rows = verify.phi0_scan(primes, int(params["windows"]), rng)
    out = _out(args)
    meta = reports.meta_block("phi-scan", params, args.seed)
    cols = ["q", "Q1", "Q2", "P1", "P2", "sign", "exact", "main", "psi1", "ratio"]
    reports.write_csv(out / "phi_scan.csv", meta, cols, [[r[c] for c in cols] for r in rows])
    worst = max(rows, key=lambda r: r["ratio"])
    ok = worst["ratio"] <= params["psi_limit"]
    reports.write_json(out / "phi_scan.json", meta, {"worst": worst, "windows": len(rows), "passed": ok})
    reports.plot_ratio_scatter(out / "phi_scan.png", [r["q"] for r in rows], [r["ratio"] for r in rows],
                               "q", "|exact - main| / psi1(q)", params["psi_limit"])
    return _done(f"phi-scan: {len(rows)} windows, worst ratio {worst['ratio']:.4f} at q={worst['q']}", ok)


def cmd_lattice_sweep(args) -> int:
    config = _load_config(args)
    if not config:
        raise UsageError("lattice-sweep needs --config with 'rays' and/or 'instances'")
    grid = latticecount.load_grid(config)
    if not grid:
        raise UsageError("config defines no instances")
    limit = float(config.get("trend_limit", 2.0))
    sweep = latticecount.theorem_f2_sweep(grid, limit)
    out = _out(args)
    meta = reports.meta_block("lattice-sweep", config, args.seed)
    cols = ["index", "name", "ray", "count", "X", "Y", "K", "q", "ratio", "error"]
    reports.write_csv(out / "lattice_sweep.csv", meta, cols,
                      [[getattr(r, c) for c in cols] for r in sweep["rows"]])
    ok = not sweep["rejected"] and all(v["within_limit"] for v in sweep["rays"].values())
    reports.write_json(out / "lattice_sweep.json", meta, {
        "instances": len(grid), "rejected": sweep["rejected"], "rays": sweep["rays"],
        "max_ratio": sweep["max_ratio"], "fitted_constant": sweep["fitted_constant"],
        "trend_limit": limit, "passed": ok,
    })
    reports.plot_rays(out / "lattice_sweep.png", sweep["rays"])
    for r in sweep["rejected"]:
        print(f"instance {r.index} ({r.name}): {r.error}", file=sys.stderr)
    return _done(f"lattice-sweep: {len(grid)} instances, fitted constant {sweep['fitted_constant']:.4f}", ok)


def cmd_expsum(args) -> int:
    alphabet = _alphabet(args)
    n_max = args.nmax
    if n_max is None or not 1 <= n_max <= 10**6:
        raise UsageError(f"--nmax must lie in [1, 10^6], got {n_max}")
    fam = (expsum.word_family if args.family == "words" else expsum.denominator_family)(alphabet, n_max)
    points = args.points or expsum.DEFAULT_POINTS_FACTOR * n_max
    if points < expsum.MIN_POINTS_FACTOR * n_max:
        raise UsageError(f"--points must be >= {expsum.MIN_POINTS_FACTOR} * nmax")
    exact, quad = expsum.mean_square(fam, points)
    thetas, power = expsum.spectrum(fam, points)
    peaks = []
    for j in np.argsort(-power[1:], kind="stable")[:5] + 1:
        theta = float(thetas[j])
        dec = expsum.dirichlet_decompose(theta, max(n_max, 4))
        peaks.append({"theta": theta, "abs_S_squared": float(power[j]), "a": dec.a, "q": dec.q, "K": dec.K})
    out = _out(args)
    config = {"alphabet": list(alphabet.letters), "n_max": n_max, "family": args.family, "points": points}
    meta = reports.meta_block("expsum", config, args.seed)
    expsum.write_spectrum_csv(out / "expsum_spectrum.csv", thetas, power)
    ok = abs(exact - quad) <= 0.01 * exact
    reports.write_json(out / "expsum.json", meta, {
        "family": f"{args.family} of A={{{alphabet}}} up to N", "size": len(fam), "n_cap": n_max,
        "mean_square_exact": exact, "mean_square_quadrature": quad,
        "normalised_mean_square": exact * n_max / len(fam) ** 2, "top_peaks": peaks, "passed": ok,
    })
    reports.plot_spectrum(out / "expsum.png", thetas, power, f"A={{{alphabet}}}, N={n_max}")
    return _done(f"expsum: |family|={len(fam)} mean square {exact} (quadrature {quad:.6g})", ok)


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alphabet", help="letters, e.g. 1,2,3 or 1-7")
    common.add_argument("--depth", type=int, help="word length r for dimension brackets")
    common.add_argument("--qmax", type=int, help="largest modulus for q sweeps")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", default="reports", help="output directory (default: reports)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised sampling")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")

    parser = argparse.ArgumentParser(prog="zaremba", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", parents=[common], help="exact #D_A(N)/N ladder")
    p.add_argument("--nmax", type=int, help="largest denominator N")
    p.add_argument("--min-ratio", type=float, help="fail (exit 1) if #D_A(N)/N is below this")
    p.add_argument("--bitmap", action="store_true", help="also write the membership bitmap")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("delta", parents=[common], help="certified bracket for delta_A")
    p.add_argument("--sharp", action="store_true", help="use the sharper two-sided bracket")
    p.add_argument("--cache", help="bracket cache table (default: <out>/delta_cache.tsv)")
    p.add_argument("--expect", type=float, help="fail (exit 1) if the bracket misses this value")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", choices=[*verify.SUITES, "all"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("phi-scan", parents=[common], help="Phi0 error scan over prime moduli")
    p.set_defaults(func=cmd_phi_scan)

    p = sub.add_parser("lattice-sweep", parents=[common], help="lattice counts along Y-doubling rays")
    p.set_defaults(func=cmd_lattice_sweep)

    p = sub.add_parser("expsum", parents=[common], help="exponential-sum spectrum and mean square")
    p.add_argument("--nmax", type=int, help="norm cap N")
    p.add_argument("--family", choices=["denominators", "words"], default="denominators")
    p.add_argument("--points", type=int, help="quadrature points (default 4 N, minimum 2 N)")
    p.set_defaults(func=cmd_expsum)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.jobs < 1:
        print("zaremba: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, dimension.BudgetExceeded, latticecount.InstanceError, ValueError, OverflowError) as exc:
        print(f"zaremba {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
