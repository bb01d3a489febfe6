"""Scaled tests, the exact weight comparison, and growth-exponent reports."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paritybet import (
    Kind,
    Parity,
    PreconditionError,
    StrategyTable,
    StructuralError,
    TestArray,
    compare_scaled_weight,
    empirical_dim_bound,
    log2_bracket,
    strategies_from_test,
    validate,
    validate_s_test,
    weak_s_random_check,
)
from paritybet import bits


def test_compare_scaled_weight_rational_cases():
    half = Fraction(1, 2)
    # 2^-1 vs 2^0
    assert compare_scaled_weight([2], half, 0) == -1
    # 2^-1 + 2^-1 vs 2^0: equality
    assert compare_scaled_weight([2, 2], half, 0) == 0
    # 2^-(1/3) vs 1: irrational weight below the bound
    assert compare_scaled_weight([1], Fraction(1, 3), 0) == -1
    assert compare_scaled_weight([3], Fraction(1, 3), 0) == -1


def test_compare_scaled_weight_irrational_above():
    # 3 * 2^-(2/3) = 1.88.. vs 2^-1
    assert compare_scaled_weight([1, 1, 1], Fraction(2, 3), 1) == 1


def test_compare_scaled_weight_empty_and_guards():
    assert compare_scaled_weight([], Fraction(1, 2), 0) == -1
    with pytest.raises(PreconditionError):
        compare_scaled_weight([1], Fraction(0), 0)
    with pytest.raises(PreconditionError):
        compare_scaled_weight([1], Fraction(3, 2), 0)


def test_validate_s_test_levels():
    arr = TestArray((("000000",), ("0000000000",), ("00000000000000",)), flavor="free")
    verdicts = validate_s_test(arr, Fraction(1, 2))
    assert [v.strict for v in verdicts] == [True, True, True]
    assert [v.sign for v in verdicts] == [-1, -1, -1]
    assert [v.min_length for v in verdicts] == [6, 10, 14]


def test_validate_s_test_flags_heavy_level():
    # weight 2^-1 at level 1 is equality, not strict
    arr = TestArray((("00",), ("0000", "0010")), flavor="free")
    verdicts = validate_s_test(arr, Fraction(1, 2))
    assert verdicts[1].sign == 0 and not verdicts[1].ok()


def test_weak_s_random_check():
    arr = TestArray((("00",), ("0000", "1100")), flavor="free")
    assert weak_s_random_check("000011", arr) == [0, 1]
    assert weak_s_random_check("1100", arr) == [1]
    assert weak_s_random_check("01", arr) == []


def test_strategies_from_test_unit_value():
    arr = TestArray((("1010",),), flavor="free")
    even_side, odd_side = strategies_from_test(arr)
    prefix_vals = lambda side: [side.eval(5, p) for p in ["", "1", "10", "101", "1010", "10101"]]
    assert prefix_vals(even_side) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 2), 1, 1, 1]
    assert prefix_vals(odd_side) == [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2), Fraction(1, 2), 1, 1]
    # exactly 1 on every extension of the member
    for ext in ["10100", "10101", "101011"]:
        assert even_side.eval(5, ext) == 1
        assert odd_side.eval(5, ext) == 1


def test_strategies_from_test_tags_and_mass():
    arr = TestArray((("0000", "1100"), ("00000000",)), flavor="free")
    even_side, odd_side = strategies_from_test(arr)
    assert validate(even_side.table(2, 4)).holds(Kind.MARTINGALE, Parity.BETS_ON_EVEN, None or even_side.sided)
    assert validate(odd_side.table(2, 4)).holds(Kind.MARTINGALE, Parity.BETS_ON_ODD, odd_side.sided)
    assert even_side.final("") < 2
    assert odd_side.final("") < 2


def test_strategies_from_test_rejects_heavy_test():
    arr = TestArray((("00", "10"),), flavor="free")  # weight 1 at level 0
    with pytest.raises(PreconditionError):
        strategies_from_test(arr)


def test_strategies_from_test_rejects_empty_member():
    arr = TestArray(((("",)),), flavor="free")
    with pytest.raises((PreconditionError, StructuralError)):
        strategies_from_test(arr)


def test_log2_bracket_exact_powers():
    lo, hi = log2_bracket(Fraction(8), 10)
    assert lo == hi == 3
    lo, hi = log2_bracket(Fraction(1, 4), 10)
    assert lo == hi == -2


def test_log2_bracket_traps_irrational():
    lo, hi = log2_bracket(Fraction(3), 30)
    assert lo < hi
    assert hi - lo <= Fraction(1, 2**30)
    # log2(3) = 1.58496...
    assert lo < Fraction(158497, 100000) < hi or lo < Fraction(1585, 1000)
    assert Fraction(1, 1) < lo and hi < Fraction(2, 1)


def test_log2_bracket_large_operand():
    v = Fraction(4, 3) ** 40
    lo, hi = log2_bracket(v, 20)
    want = 40 * (2 - Fraction(1585, 1000))  # 40 * log2(4/3) = 16.6..
    assert lo <= want + 1 and hi >= want - 1
    assert hi - lo <= Fraction(1, 2**20)


def _doubling_table(path):
    vals = {s: (Fraction(2) ** len(s) if path.startswith(s) else Fraction(0))
            for s in bits.all_states(len(path))}
    return StrategyTable(len(path), vals, Kind.MARTINGALE)


def test_empirical_dim_bound_doubling_is_zero():
    rep = empirical_dim_bound(_doubling_table("0110"), "0110")
    assert rep.lower == 0 and rep.upper == 0
    assert all(s.exact == 0 for s in rep.samples)


def test_empirical_dim_bound_flat_is_one():
    flat = StrategyTable(3, {s: Fraction(1) for s in bits.all_states(3)})
    rep = empirical_dim_bound(flat, "010")
    assert rep.lower == 1 and rep.upper == 1


def test_empirical_dim_bound_dead_path_infinite():
    rep = empirical_dim_bound(_doubling_table("0110"), "1111")
    assert rep.upper is None
    assert any(s.infinite for s in rep.samples)


def test_matches_half_log2_symbolic():
    # value (4/3)^n at even n has exponent log2(3)/2 exactly
    rep = empirical_dim_bound(
        _certificate_like(), "0000"
    )
    sample = rep.even_samples()[-1]
    assert sample.matches_half_log2(3)
    assert not sample.matches_half_log2(2)
    assert rep.half_log2_base() == 3


def _certificate_like():
    class FourThirds:
        def value(self, state):
            if set(state) <= {"0"} and len(state) % 2 == 0:
                return Fraction(4, 3) ** (len(state) // 2)
            if set(state) <= {"0"}:
                return Fraction(4, 3) ** ((len(state) - 1) // 2)
            return Fraction(0)

    return FourThirds()


def test_empirical_dim_bound_mixture_stage_dispatch():
    arr = TestArray((("1010",),), flavor="free")
    even_side, _ = strategies_from_test(arr)
    rep = empirical_dim_bound(even_side, "1010")
    assert rep.samples[-1].value == 1
