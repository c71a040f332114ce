import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uamm_lab.uamm import swap_out


def rel_err(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


# -- the three regimes ----------------------------------------------------------


def test_surplus_pool_swaps_at_fair_rate():
    # pool well above target: exchange at the price ratio, no slippage
    assert swap_out(10.0, 0.5, 0.5, 20_000.0, 10_000.0) == 10.0


def test_pool_at_target_charges_partial_slippage():
    # r_out == tb: x = tb^2 / r_out, alpha = r_out / (x + delta)
    out = swap_out(10.0, 0.5, 0.5, 10_000.0, 10_000.0)
    assert abs(out - 9.990010) < 1e-6
    assert out == pytest.approx(10.0 * 10_000.0 / 10_010.0, rel=1e-12)


def test_deficit_pool_uses_product_curve():
    out = swap_out(100.0, 0.5, 0.5, 5_000.0, 10_000.0)
    assert abs(out - 24.875622) < 1e-6
    assert out == pytest.approx(5_000.0 - 1e8 / 20_100.0, rel=1e-12)
    assert out < 100.0  # strictly below the fair amount


def test_zero_input_returns_zero_everywhere():
    for r_out, tb in [(20_000.0, 10_000.0), (10_000.0, 10_000.0), (5_000.0, 10_000.0)]:
        assert swap_out(0.0, 0.5, 0.5, r_out, tb) == 0.0


def test_empty_output_pool_returns_zero():
    assert swap_out(10.0, 0.5, 0.5, 0.0, 10_000.0) == 0.0


def test_negative_input_rejected():
    with pytest.raises(ValueError):
        swap_out(-1.0, 0.5, 0.5, 10_000.0, 10_000.0)


# -- exactness properties ---------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(
    d_in=st.floats(0.01, 100.0),
    f_in=st.floats(0.1, 0.9),
    f_out=st.floats(0.1, 0.9),
    r_out=st.floats(1_000.0, 100_000.0),
)
def test_surplus_branch_returns_fair_amount_bitwise(d_in, f_in, f_out, r_out):
    rho = f_in / f_out
    delta = rho * d_in
    tb = min(r_out - delta, r_out) * 0.5  # safely below r_out - delta
    assert tb > 0
    out = swap_out(d_in, f_in, f_out, r_out, tb)
    assert out == rho * d_in  # bitwise, not approximately


@settings(max_examples=300, deadline=None)
@given(
    d_in=st.floats(0.01, 1_000.0),
    f_in=st.floats(0.1, 0.9),
    f_out=st.floats(0.1, 0.9),
    r_out=st.floats(100.0, 50_000.0),
    tb_scale=st.floats(1.01, 10.0),
)
def test_deficit_branch_matches_exact_rational_arithmetic(
    d_in, f_in, f_out, r_out, tb_scale
):
    tb = r_out * tb_scale  # strictly above r_out: deficit regime
    out = swap_out(d_in, f_in, f_out, r_out, tb)
    fr = lambda x: Fraction(x)
    rho = fr(f_in) / fr(f_out)
    delta = rho * fr(d_in)
    x = fr(tb) ** 2 / fr(r_out)
    exact = fr(r_out) - fr(tb) ** 2 / (x + delta)
    # the closed form differences two pool-scale terms, so "relative" is
    # relative to the pool scale, not to the (possibly tiny) output
    assert abs(out - float(exact)) / max(1.0, r_out) < 1e-12
    assert out < float(delta)  # never better than the fair amount
    assert out < r_out  # asymptote: pool never fully drained


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(0.01, 500.0),
    b=st.floats(0.01, 500.0),
    f_in=st.floats(0.2, 0.8),
    f_out=st.floats(0.2, 0.8),
    r_out=st.floats(1_000.0, 50_000.0),
)
def test_deficit_branch_is_path_independent(a, b, f_in, f_out, r_out):
    tb = r_out * 3.0  # deep deficit keeps every evaluation in the same branch
    once = swap_out(a + b, f_in, f_out, r_out, tb)
    first = swap_out(a, f_in, f_out, r_out, tb)
    second = swap_out(b, f_in, f_out, r_out - first, tb)
    assert rel_err(once, first + second) < 1e-9


@settings(max_examples=200, deadline=None)
@given(
    d1=st.floats(0.01, 100.0),
    scale=st.floats(1.0, 10.0),
    f_in=st.floats(0.2, 0.8),
    f_out=st.floats(0.2, 0.8),
    r_out=st.floats(1_000.0, 50_000.0),
    tb_ratio=st.floats(0.1, 3.0),
)
def test_output_nondecreasing_in_input_within_a_branch(
    d1, scale, f_in, f_out, r_out, tb_ratio
):
    tb = r_out * tb_ratio
    d2 = d1 * scale
    rho = f_in / f_out

    def branch(d):
        delta = rho * d
        if r_out - delta <= tb <= r_out:
            return 1
        if tb <= r_out:
            return 2
        return 3

    if branch(d1) == branch(d2):
        assert swap_out(d2, f_in, f_out, r_out, tb) >= swap_out(
            d1, f_in, f_out, r_out, tb
        )


def test_branch_boundary_is_continuous_at_equal_prices():
    # at rho = 1 the straddling branch meets the surplus branch exactly
    d_in, r_out = 10.0, 10_000.0
    tb = r_out - d_in
    at = swap_out(d_in, 0.5, 0.5, r_out, tb)
    below = swap_out(d_in, 0.5, 0.5, r_out, math.nextafter(tb, 0.0))
    assert abs(at - below) < 1e-9


def test_straddle_and_deficit_branches_agree_at_the_target():
    # at tb == r_out both formulas reduce to r_out * delta / (r_out + delta)
    for rho_pair in [(0.5, 0.5), (0.6, 0.4), (0.2, 0.8)]:
        f_in, f_out = rho_pair
        r = 10_000.0
        at = swap_out(25.0, f_in, f_out, r, r)
        above = swap_out(25.0, f_in, f_out, r, math.nextafter(r, math.inf))
        assert rel_err(at, above) < 1e-9
