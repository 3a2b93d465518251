import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import lattice_quadruple_loop

from zaremba.latticecount import (
    CountingInstance,
    InstanceError,
    Mat2,
    c_interval,
    count_M_set,
    instance_from_word,
    load_grid,
    ratio_statistic,
    ray_instances,
    satisfies_system,
    theorem_f2_sweep,
    theta_region,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = [
    CountingInstance((1, 2), (5, 7), 1, 1.5, 3, 2, kappa1=3),
    CountingInstance((1, 2), (35, 44), 1, 11, 20, 2, kappa1=2),
    CountingInstance((2, 3), (34, 57), 1, 14.25, 20, 2, kappa1=2),
    CountingInstance((2, 3), (34, 57), 2, 14.25, 20, 2, kappa1=2),
    CountingInstance((2, 3), (43, 72), 3, 18, 20, 2, kappa1=2),
    CountingInstance((1, 2), (28, 47), 2, 11.75, 20, 2, kappa1=3),
]


def test_mat2_basics():
    g = Mat2(1, 2, 1, 3)
    assert g.det == 1 and g.norm == 3 and g.in_M()
    assert g.apply((1, 2)) == (5, 7)
    assert not Mat2(2, 1, 1, 1).in_M()


def test_exact_solution_example():
    inst = SMALL[0]
    res = count_M_set(inst)
    assert res.count == 1 and res.witnesses == [Mat2(1, 2, 1, 3)]


def test_huge_modulus_empty_d_window():
    # d in [1, 2] excludes the exact solution (d = 3); q = 10^9 kills every other candidate
    inst = CountingInstance((1, 2), (5, 7), 10**9, 1.5, 2, 2, kappa1=2)
    assert count_M_set(inst).count == 0


def test_huge_modulus_keeps_exact_solution():
    # gamma eta = eta' satisfies every congruence, so the exact solution survives
    inst = CountingInstance((1, 2), (5, 7), 10**9, 1.5, 3, 2, kappa1=3)
    assert count_M_set(inst).count == 1


@pytest.mark.parametrize("inst", SMALL, ids=lambda i: f"{i.eta}-{i.eta_prime}-q{i.q}")
def test_matches_quadruple_loop_oracle(inst):
    res = count_M_set(inst)
    brute = lattice_quadruple_loop(inst.eta, inst.eta_prime, inst.q, inst.X, inst.Y, inst.K, inst.kappa1)
    assert sorted((g.a, g.b, g.c, g.d) for g in res.witnesses) == sorted(brute)


def test_oracle_instances_are_not_all_trivial():
    assert sum(count_M_set(i).count for i in SMALL) >= 10


@pytest.mark.parametrize("inst", SMALL[1:], ids=lambda i: f"q{i.q}-Y{i.Y}")
def test_window_monotonicity(inst):
    wider = CountingInstance(inst.eta, inst.eta_prime, inst.q, inst.X, inst.Y, inst.K / 2, inst.kappa1, inst.A)
    if wider.violations():
        pytest.skip("doubled window breaks 2X/K <= v")
    assert count_M_set(wider).count >= count_M_set(inst).count


@given(st.integers(2, 60), st.integers(1, 6), st.floats(1.0, 3.0))
@settings(max_examples=40, deadline=None)
def test_monotone_in_window_and_modulus(Y, q, kscale):
    eta, eta_p = (3, 4), (40, 53)
    X = 20
    small = CountingInstance(eta, eta_p, q, X, Y, 2 * kscale, kappa1=2)
    large = CountingInstance(eta, eta_p, q, X, Y, kscale, kappa1=2)
    q1 = CountingInstance(eta, eta_p, 1, X, Y, 2 * kscale, kappa1=2)
    n_small = count_M_set(small).count
    assert count_M_set(large).count >= n_small
    assert count_M_set(q1).count >= n_small
    for g in count_M_set(large).witnesses:
        assert satisfies_system(g, large)


def test_c_interval_width_bound():
    for inst in SMALL:
        res = count_M_set(inst)
        x = inst.eta[0]
        assert res.max_c_width <= inst.window * Fraction(2, x)
        for d in inst.d_range():
            lo, hi = c_interval(inst, d)
            assert hi - lo == inst.window * Fraction(2, x)


def test_invalid_instances_rejected_with_named_constraint():
    with pytest.raises(InstanceError, match="eta: y/A"):
        count_M_set(CountingInstance((1, 5), (5, 7), 1, 1, 3, 2))
    with pytest.raises(InstanceError, match="gcd"):
        count_M_set(CountingInstance((2, 4), (5, 7), 1, 1, 3, 2))
    with pytest.raises(InstanceError, match="2X/K"):
        count_M_set(CountingInstance((1, 2), (5, 7), 1, 10, 3, 2))


def test_hypothesis_diagnostics():
    assert CountingInstance((1, 2), (5, 7), 2, 300, 100, 2).hypothesis_violation().startswith("Y > K^4 q^3")
    assert CountingInstance((1, 2), (5, 7), 1, 10, 100, 2).hypothesis_violation().startswith("X > Y")
    assert CountingInstance((1, 2), (5, 7), 1, 300, 100, 2).hypothesis_violation() is None


def test_theta_region_closed_form_and_bounds():
    inst = CountingInstance((1, 1), (100, 100), 1, 40, 10, 4, kappa1=2, A=1)
    for d in (5, 7, 10):
        tr = theta_region(inst, d)
        assert tr.area_exact == pytest.approx(tr.area_closed_form, rel=1e-6)
        assert tr.width_bound == pytest.approx(2 * 10 / 1)
    assert theta_region(inst, 10).area_bound == pytest.approx(2 * theta_region(inst, 5).area_bound)
    shrinking = [theta_region(CountingInstance((1, 1), (100, 100), 1, 40, 10, K, 2, 1), 8).area_exact
                 for K in (4, 40, 400, 4000)]
    assert shrinking == sorted(shrinking, reverse=True) and shrinking[-1] < 1e-2
    with pytest.raises(ValueError):
        theta_region(inst, 11)


def test_sweep_examples():
    # d <= 10 keeps c + 2d far below v - X/K
    empty = CountingInstance((1, 2), (61, 100), 1, 20, 10, 1)
    report = theorem_f2_sweep([empty])
    assert report["max_ratio"] == 0 and not report["rejected"]
    bad = CountingInstance((1, 2), (5, 7), 2, 300, 100, 2)
    report = theorem_f2_sweep([bad])
    assert len(report["rejected"]) == 1 and "K^4 q^3" in report["rejected"][0].error


def test_sweep_ray_trend_recorded():
    grid = ray_instances("r", (3, 4), [32, 64], q=1, K=2.0, rhos=(0.6,))
    report = theorem_f2_sweep(grid)
    info = report["rays"]["r"]
    assert info["Y"] == [32, 64]
    assert info["trend_factor"] == pytest.approx(info["max_ratio"][1] / info["max_ratio"][0])
    assert report["fitted_constant"] == max(r.ratio for r in report["rows"])


def test_ratio_statistic():
    inst = CountingInstance((1, 2), (5, 7), 4, 300, 100, 2)
    assert ratio_statistic(50, inst) == pytest.approx(50 * 4 * 2 / 100**2)


def test_instance_from_word():
    inst = instance_from_word((1, 2, 2), (5, 7), 1, 1, 3, 2)
    assert inst.eta == (3, 7) and inst.A == 2


def test_sample_config_shape():
    config = json.loads((CONFIGS / "lattice_rays.json").read_text())
    grid = load_grid(config)
    assert len(grid) >= 20
    assert len({i.ray for i in grid}) == 2
    for inst in grid:
        assert inst.hypothesis_violation() is None and not inst.violations()
