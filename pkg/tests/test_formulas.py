import math
from fractions import Fraction

import numpy as np
import pytest

from doublewell.analysis.formulas import (
    LogEnergy,
    decoherence_threshold,
    dv_crit,
    log_binomial,
    one_level_max_n,
    resonance_halfwidth_formula,
    resonance_positions,
    splitting_resonant,
    splitting_symmetric,
    u_crit,
    u_max,
)

from oracles import (
    eq_splitting_resonant_log10,
    eq_splitting_symmetric_fraction,
    log10_fraction,
)


def test_log_energy_round_trip():
    for x in (1.0, -3.5e-120, 2.75e200, 1e-300):
        le = LogEnergy.from_linear(x)
        assert le.linear == pytest.approx(x, rel=1e-12)
    zero = LogEnergy.from_linear(0.0)
    assert zero.sign == 0 and zero.linear == 0.0


def test_log_energy_scaling():
    le = LogEnergy.from_linear(4.0).scaled(-0.5)
    assert le.sign == -1
    assert le.linear == pytest.approx(-2.0, rel=1e-12)
    assert LogEnergy.from_linear(5.0).scaled(0.0).sign == 0


def test_log_binomial_exact():
    for n in (5, 30, 100):
        for k in (0, 1, n // 2, n):
            assert log_binomial(n, k) == pytest.approx(
                math.log(math.comb(n, k)), rel=1e-12)


def test_splitting_symmetric_small_cases():
    # N=10, nu=4, J/U=0.1: 4*(1/20)^2*6!/4! = 0.3 exactly
    got = splitting_symmetric(10, 4, 0.1, 1.0)
    assert got.linear == pytest.approx(0.3, rel=1e-12)
    # N=2, nu=0: 4*(1/20)^2*2 = 0.02
    got = splitting_symmetric(2, 0, 0.1, 1.0)
    assert got.linear == pytest.approx(0.02, rel=1e-12)
    # only the ratio J0/U0 matters besides the U0 unit
    assert splitting_symmetric(10, 4, 0.05, 0.5).linear == pytest.approx(
        0.3, rel=1e-12)


def test_splitting_symmetric_against_exact_fractions():
    for N in (5, 9, 14, 29):
        for nu in range(0, N // 2, 2):
            exact = eq_splitting_symmetric_fraction(N, nu, Fraction(1, 10))
            got = splitting_symmetric(N, nu, 0.1, 1.0)
            assert got.sign == 1
            assert got.log10_magnitude == pytest.approx(
                log10_fraction(exact), abs=1e-10)


def test_splitting_symmetric_extreme_cat_n100():
    # frozen via exact rational arithmetic: log10 = -283.4709...
    exact = log10_fraction(
        eq_splitting_symmetric_fraction(100, 0, Fraction(1, 10)))
    got = splitting_symmetric(100, 0, 0.1, 1.0)
    assert exact == pytest.approx(-283.47087, abs=1e-4)
    assert got.log10_magnitude == pytest.approx(exact, abs=1e-9)


def test_splitting_symmetric_domain():
    with pytest.raises(ValueError):
        splitting_symmetric(10, 5, 0.1, 1.0)
    with pytest.raises(ValueError):
        splitting_symmetric(10, -1, 0.1, 1.0)
    with pytest.raises(ValueError):
        splitting_symmetric(10, 0, 0.1, 0.0)


def test_splitting_resonant_values():
    # N=100, p=98: 4*(1/20)^2*2*sqrt(C(100,98)) = 0.02*sqrt(4950)
    got = splitting_resonant(100, 98, 0.1, 1.0)
    assert got.linear == pytest.approx(0.02 * math.sqrt(4950), rel=1e-12)
    # p = N-1 reduces to 2 J0 sqrt(N) / U0
    got = splitting_resonant(7, 6, 0.1, 1.0)
    assert got.linear == pytest.approx(2 * 0.1 * math.sqrt(7), rel=1e-12)
    # N=10, p=8: 0.02*sqrt(45)
    got = splitting_resonant(10, 8, 0.1, 1.0)
    assert got.linear == pytest.approx(0.02 * math.sqrt(45), rel=1e-12)


def test_splitting_resonant_against_exact():
    for N, p in ((6, 3), (11, 7), (40, 35), (100, 98)):
        got = splitting_resonant(N, p, 0.1, 1.0)
        assert got.log10_magnitude == pytest.approx(
            eq_splitting_resonant_log10(N, p, Fraction(1, 10)), abs=1e-9)


def test_splitting_resonant_domain():
    with pytest.raises(ValueError):
        splitting_resonant(10, 0, 0.1, 1.0)
    with pytest.raises(ValueError):
        splitting_resonant(10, 10, 0.1, 1.0)


def test_u_crit_and_u_max():
    assert u_crit(10, 1.0) == pytest.approx(2 / 99, rel=1e-15)
    # Rb example: u_crit/U0 = 0.10 at N=100, hw=36 Er, U0=0.072 Er
    assert u_crit(100, 36.0) / 0.072 == pytest.approx(0.1, rel=1e-3)
    assert u_max(10, 1.0) == pytest.approx((2 / 99) * 11 / 40, rel=1e-15)
    with pytest.raises(ValueError):
        u_crit(1, 1.0)


def test_dv_crit_branches():
    low = dv_crit(10, 0.001, 1.0)
    assert low.branch == "u0_below_max"
    assert low.value == pytest.approx(0.1, rel=1e-15)
    high = dv_crit(10, 0.01, 1.0)
    assert high.branch == "u0_above_max"
    assert high.value == pytest.approx(0.02 * (math.sqrt(201) - 10), rel=1e-12)
    assert not high.already_crossed
    # at U0 = u_crit the threshold closes exactly
    edge = dv_crit(10, u_crit(10, 1.0), 1.0)
    assert edge.value == pytest.approx(0.0, abs=1e-12)
    # beyond u_crit it goes negative and is flagged, not clamped
    beyond = dv_crit(10, 2 * u_crit(10, 1.0), 1.0)
    assert beyond.value < 0 and beyond.already_crossed


def test_one_level_max_n():
    hw = 1.0
    n = one_level_max_n(4e-7 * hw, 3e-5 * hw, hw)
    # the bound 0.5 + (1 - 3e-5)/8e-7 is exactly 1249963; N < bound is strict
    assert n == 1249962
    assert n == pytest.approx(1.25e6, rel=1e-3)
    assert one_level_max_n(0.5, 0.0, 1.0) == 1     # bound 3/2
    assert one_level_max_n(1.0, 1.0, 1.0) == 0     # bound 1/2
    # exactly integer bound: strict inequality admits bound-1
    assert one_level_max_n(0.25, 0.0, 1.0) == 2    # bound 5/2 -> 2
    assert one_level_max_n(0.5, 0.5, 1.0) == 0     # bound 3/2 - 1/2... = 1 -> 0
    with pytest.raises(ValueError):
        one_level_max_n(0.0, 0.0, 1.0)


def test_decoherence_threshold():
    got = decoherence_threshold(10, 4, 0.1, 1.0)
    assert got.linear == pytest.approx(0.3, rel=1e-12)   # 2*0.3/2
    # odd N extreme partial cat: denominator 1
    got = decoherence_threshold(9, 4, 0.1, 1.0)
    assert got.log10_magnitude == pytest.approx(
        splitting_symmetric(9, 4, 0.1, 1.0).scaled(2.0).log10_magnitude,
        abs=1e-12)


def test_decoherence_threshold_rb_exponent():
    # N=100 extreme cat, converted from U0 units to Er with U0 = 0.072 Er
    th = decoherence_threshold(100, 0, 0.1, 1.0).scaled(0.072)
    exact = (log10_fraction(eq_splitting_symmetric_fraction(100, 0, Fraction(1, 10)))
             + math.log10(2 / 100) + math.log10(0.072))
    assert th.log10_magnitude == pytest.approx(exact, abs=1e-9)
    assert th.log10_magnitude == pytest.approx(-286.31, abs=0.01)


def test_threshold_monotone_in_nu():
    hw_prev = None
    for nu in range(7):
        t = decoherence_threshold(15, nu, 0.1, 1.0).log10_magnitude
        if hw_prev is not None:
            assert t > hw_prev
        hw_prev = t


def test_resonance_positions():
    got = resonance_positions(10, 1.0)
    assert np.array_equal(got, np.arange(2, 20, 2, dtype=float))
    # Rb: p=98 at 2*98*0.072 = 14.112 Er
    assert resonance_positions(100, 0.072)[97] == pytest.approx(14.112, rel=1e-12)
    assert len(resonance_positions(100, 0.072)) == 99


def test_resonance_halfwidth():
    # nu=0, p=N-1: width 2*(2 J0 sqrt(N))/1 = 4 J0 sqrt(N)
    got = resonance_halfwidth_formula(9, 8, 0.1, 1.0)
    assert got.linear == pytest.approx(4 * 0.1 * math.sqrt(9), rel=1e-12)
    # Rb-87 headline number: ~0.101 Er, inside the 0.088..0.108 Er band
    w = resonance_halfwidth_formula(100, 98, 0.1, 1.0).scaled(0.072)
    assert w.linear == pytest.approx(0.072 * 0.02 * math.sqrt(4950), rel=1e-12)
    assert 0.088 <= w.linear <= 0.108
