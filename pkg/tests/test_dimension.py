import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import zeta_bruteforce

from zaremba import dimension
from zaremba.continuant import GOLDEN, Alphabet
from zaremba.dimension import (
    BudgetExceeded,
    DeltaBracket,
    ZetaEvaluator,
    cached_bracket,
    delta_bracket,
    g_func,
    hensley_check,
    lambda_bracket,
    read_cache,
    write_cache,
    zeta_k,
    zeta_k_naive,
)

AB12 = Alphabet((1, 2))
S_GRID = (0.0, 0.5, 1.0, 1.5, 2.0)


@pytest.mark.parametrize("s,k,expected", [(0, 1, 2.0), (2, 1, 1.25), (2, 2, 1 / 4 + 2 / 9 + 1 / 25)])
def test_zeta_examples(s, k, expected):
    assert zeta_k(AB12, s, k) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("alphabet,s,k,expected", [
    (AB12, 0, 1, 0.0),
    (AB12, 2, 1, math.log(1.25) - math.log(2)),
    (Alphabet((1, 2, 3)), 0, 2, math.log(4.5)),
])
def test_g_examples(alphabet, s, k, expected):
    assert g_func(alphabet, s, k) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("letters,k", [((1, 2), 11), ((1, 2, 3), 7), ((2, 5, 7), 6), ((1, 3, 4, 8), 5)])
def test_zeta_matches_bruteforce(letters, k):
    A = Alphabet(letters)
    for s in (0.0, 0.37, 1.0, 1.9):
        ref = zeta_bruteforce(letters, s, k)
        assert zeta_k(A, s, k) == pytest.approx(ref, rel=1e-12)
        assert zeta_k_naive(A, s, k) == pytest.approx(ref, rel=1e-12)


def test_zeta_large_depth_split_path():
    # forces the prefix/suffix join (suffix table capped below |A|^k)
    A = Alphabet((1, 2))
    assert zeta_k(A, 0, 20) == 2**20
    assert zeta_k(A, 1.3, 19) == pytest.approx(zeta_bruteforce((1, 2), 1.3, 19), rel=1e-11)


@given(st.sampled_from([(1, 2), (1, 2, 3), (2, 3)]), st.floats(0, 2), st.integers(1, 8))
@settings(max_examples=60, deadline=None)
def test_zeta_value_range(letters, s, k):
    A = Alphabet(letters)
    z = zeta_k(A, s, k)
    assert 0 < z <= len(A) ** k * (1 + 1e-12)


def test_zeta_budget_and_domain():
    with pytest.raises(BudgetExceeded):
        zeta_k(Alphabet.upto(13), 1.0, 9)
    with pytest.raises(ValueError):
        zeta_k(AB12, 2.5, 3)
    with pytest.raises(ValueError):
        zeta_k(AB12, -0.1, 3)


def test_g_superadditivity_bounds():
    depth = 12
    for letters in ((1, 2), (1, 2, 3)):
        A = Alphabet(letters)
        for s in S_GRID:
            g = {k: g_func(A, s, k) for k in range(1, depth + 1)}
            for j in range(1, depth):
                for k in range(1, depth - j + 1):
                    assert abs(g[j + k] - g[j] - g[k]) <= math.log(2) + 1e-12
            for j in range(1, 5):
                for r in range(1, depth // j + 1):
                    assert abs(g[r * j] - r * g[j]) <= (r - 1) * math.log(2) + 1e-12


def test_zeta_concatenation_sandwich_exact():
    for s in S_GRID:
        z = {k: zeta_k(AB12, s, k) for k in range(1, 13)}
        for j in range(1, 7):
            for k in range(1, 7):
                lo, hi = 2**-s * z[j] * z[k], z[j] * z[k]
                assert lo * (1 - 1e-12) <= z[j + k] <= hi * (1 + 1e-12)


def test_lambda_bracket_examples():
    for r in (1, 5, 10):
        lo, hi = lambda_bracket(AB12, 0.0, r)
        assert lo <= 2.0 <= hi
    lo, hi = lambda_bracket(AB12, 2.0, 10)
    assert hi < 1
    for s in (0.3, 1.0, 1.7):
        lo, hi = lambda_bracket(Alphabet((1,)), s, 20)
        assert lo <= GOLDEN**-s <= hi


def test_sharp_bracket_is_inside_default():
    for s in S_GRID:
        lo, hi = lambda_bracket(AB12, s, 12)
        slo, shi = lambda_bracket(AB12, s, 12, sharp=True)
        assert lo <= slo and shi <= hi
        assert slo <= shi


def test_lambda_bracket_monotone_in_s():
    ev = ZetaEvaluator(Alphabet((1, 2, 3)), 8)
    grid = np.round(np.arange(0, 2.0001, 0.1), 10)
    brackets = [ev.lambda_bracket(float(s)) for s in grid]
    mids = [0.5 * (lo + hi) for lo, hi in brackets]
    assert all(a > b for a, b in zip(mids, mids[1:]))
    separated = [(lo_a, hi_b) for (lo_a, _), (_, hi_b) in zip(brackets, brackets[1:]) if hi_b < lo_a]
    overlapping = len(brackets) - 1 - len(separated)
    print(f"adjacent lambda brackets: {len(separated)} separated, {overlapping} overlapping")


def test_delta_bracket_basic_properties():
    b = delta_bracket(AB12, 2)
    assert 0 <= b.delta_lo <= b.delta_hi <= 1
    with pytest.raises(ValueError):
        delta_bracket(Alphabet((3,)), 5)


def test_delta_bracket_depths_share_the_true_value():
    brackets = [delta_bracket(AB12, r, sharp=True) for r in (6, 10, 14, 18)]
    lo = max(b.delta_lo for b in brackets)
    hi = min(b.delta_hi for b in brackets)
    assert lo <= hi
    assert brackets[-1].width < brackets[0].width


def test_delta_bracket_for_binary_alphabet_straddles_known_value():
    # delta_{1,2} = 0.5312805...
    b = delta_bracket(AB12, 20, sharp=True)
    assert b.contains(0.5312805)
    assert b.delta_lo > 0.5


@pytest.mark.parametrize("letters,r,value", [((1, 2, 3, 4, 5, 6, 7), 8, 0.8889),
                                             ((1, 2, 3, 4, 5, 6, 8), 8, 0.8851)])
def test_delta_bracket_cited_values(letters, r, value):
    b = delta_bracket(Alphabet(letters), r)
    assert b.contains(value)
    assert b.width < 0.15


def test_hensley_examples():
    b = delta_bracket(AB12, 12, sharp=True)
    assert b.delta_lo > 0.5
    with pytest.raises(ValueError):
        hensley_check(AB12, 15, b)
    res = hensley_check(AB12, 160, b)
    assert res["passed"] and set(res["verdicts"].values()) == {"pass"}
    b3 = delta_bracket(Alphabet((1, 2, 3)), 10)
    res = hensley_check(Alphabet((1, 2, 3)), 3600, b3)
    assert res["passed"]


def test_hensley_requires_certified_half():
    weak = delta_bracket(AB12, 12)  # default bracket cannot certify delta > 1/2 here
    assert weak.delta_lo < 0.5
    with pytest.raises(ValueError, match="1/2"):
        hensley_check(AB12, 160, weak)


def test_hensley_verdict_logic():
    A = AB12
    # the lower inequality needs the bracket's top end; an absurdly high top makes it indeterminate
    wide = DeltaBracket(A, 0, 0.51, 2.5)
    res = hensley_check(A, 1600, wide)
    assert res["verdicts"]["lower"] in ("indeterminate", "fail")
    assert res["verdicts"]["upper"] == "pass"
    low = DeltaBracket(A, 0, 0.51, 0.52)
    assert hensley_check(A, 1600, low)["verdicts"]["upper"] == "pass"


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "brackets.tsv"
    b1 = DeltaBracket(Alphabet.upto(7), 8, 0.81, 0.92)
    b2 = DeltaBracket(AB12, 20, 0.51, 0.54, "sharp")
    write_cache(path, b1)
    write_cache(path, b2)
    write_cache(path, b1)
    table = read_cache(path)
    assert table[((1, 2, 3, 4, 5, 6, 7), 8, "lambda4")] == (0.81, 0.92)
    assert cached_bracket(path, AB12, 20, sharp=True) == b2
    assert cached_bracket(path, AB12, 21) is None
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#") and len(lines) == 3
    assert lines[1].split("\t")[:2] == ["1,2", "20"]


def test_fp_widening_constant():
    assert dimension.FP_WIDEN == 1e-9
