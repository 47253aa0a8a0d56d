import math

import numpy as np
import pytest

from psivar import arith, zeros
from psivar.errors import FormatError, ParameterError, RangeError

from conftest import DATA, FIXTURES


def test_load_single_ordinate(tmp_path):
    path = tmp_path / "one.txt"
    path.write_text("14.134725142\n")
    zs = zeros.load_zeros(path, 1, 100.0)
    assert len(zs) == 1
    assert zs.complete_up_to == pytest.approx(14.134725142)


def test_load_skips_comments(tmp_path):
    path = tmp_path / "two.txt"
    path.write_text("# header\n14.1\n\n21.0\n")
    assert len(zeros.load_zeros(path, 1, 50.0)) == 2


def test_load_rejects_disorder(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("14.1\n13.9\n")
    with pytest.raises(FormatError, match="bad.txt:2"):
        zeros.load_zeros(path, 1, 50.0)


def test_load_rejects_empty(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("# nothing\n")
    with pytest.raises(FormatError):
        zeros.load_zeros(path, 1, 50.0)


def test_load_rejects_negative(tmp_path):
    path = tmp_path / "neg.txt"
    path.write_text("-3.0\n")
    with pytest.raises(FormatError, match="positive"):
        zeros.load_zeros(path, 1, 50.0)


def test_counting(zeta_fixture):
    assert zeros.counting_function(zeta_fixture, 15.0) == 1
    assert zeros.counting_function(zeta_fixture, 100.0) == 29
    ratio = 29 / zeros.rvm_density(1, 100.0)
    assert 0.3 <= ratio <= 3.0
    with pytest.raises(RangeError):
        zeros.counting_function(zeta_fixture, 1000.0)


def test_rvm_density_value():
    assert zeros.rvm_density(1, 100.0) == pytest.approx(73.29, abs=0.01)


def test_form_factor_single_zero():
    one = zeros.ZeroSet("one", 1, np.array([14.134725]), 20.0)
    assert zeros.form_factor_direct(one, 5.0, 20.0) == 1.0
    assert zeros.form_factor_smoothed(one, 5.0, 20.0) == pytest.approx(1.0, abs=1e-4)


def test_form_factor_two_zeros_quarter_period():
    # off-diagonal term carries cos(u log X) = cos(pi/2) = 0
    pair = zeros.ZeroSet("pair", 1, np.array([30.0, 31.0]), 40.0)
    x = math.exp(math.pi / 2.0)
    assert zeros.form_factor_direct(pair, x, 40.0) == pytest.approx(2.0, abs=1e-12)


def test_form_factor_rejects_degenerate_x(zeta_fixture):
    with pytest.raises(ParameterError):
        zeros.form_factor_direct(zeta_fixture, 1.0, 100.0)


def test_form_factor_realness(zeta_fixture):
    g = zeta_fixture.ordinates
    lx = math.log(12.0)
    w = 4.0 / (4.0 + (g[:, None] - g[None, :]) ** 2)
    complex_sum = np.sum(np.exp(1j * lx * (g[:, None] - g[None, :])) * w)
    assert abs(complex_sum.imag) <= 1e-10 * abs(complex_sum.real)
    direct = zeros.form_factor_direct(zeta_fixture, 12.0, zeta_fixture.complete_up_to)
    assert direct == pytest.approx(complex_sum.real, rel=1e-12)


def test_direct_vs_smoothed_random_windows(zeta_fixture):
    rng = np.random.default_rng(9)
    t_max = zeta_fixture.complete_up_to
    for _ in range(20):
        x = float(rng.uniform(3.0, 80.0))
        t = float(rng.uniform(60.0, t_max))
        direct = zeros.form_factor_direct(zeta_fixture, x, t)
        smoothed = zeros.form_factor_smoothed(zeta_fixture, x, t)
        assert abs(direct - smoothed) <= 1e-3 * abs(direct)


def test_form_factor_bit_stable_roundtrip(zeta_fixture):
    rebuilt = zeros.ZeroSet(
        "copy", 1, zeta_fixture.ordinates.copy(), zeta_fixture.complete_up_to
    )
    t = zeta_fixture.complete_up_to
    assert zeros.form_factor_direct(zeta_fixture, 15.0, t) == zeros.form_factor_direct(
        rebuilt, 15.0, t
    )


def test_form_factor_smoothed_validation(zeta_fixture):
    t = zeta_fixture.complete_up_to
    with pytest.raises(ParameterError, match="grid_step"):
        zeros.form_factor_smoothed(zeta_fixture, 10.0, t, grid_step=0.2)
    with pytest.raises(ParameterError, match="span"):
        zeros.form_factor_smoothed(zeta_fixture, 10.0, t, span=4.0)


def test_curve_small_alpha_limit(zeta_fixture):
    t = zeta_fixture.complete_up_to
    curve = zeros.form_factor_curve(zeta_fixture, [0.01], t)
    alpha, x, f, k = curve.points[0]
    # X -> 1+: all cosines -> 1, so F approaches sum of w over all pairs >= N
    assert f >= curve.n_t
    assert curve.n_t == 100
    with pytest.raises(ParameterError):
        zeros.form_factor_curve(zeta_fixture, [1.5], t)


def test_explicit_formula_x1(zeta_fixture, zeta_series):
    res = zeros.explicit_formula_residual(zeta_fixture, zeta_series, 1.0, 20.0)
    assert abs(res.lhs - res.rhs) <= res.gap_budget


def test_explicit_formula_delta_fixture(delta_fixture, delta_series):
    res = zeros.explicit_formula_residual(delta_fixture, delta_series, 10.0, 20.0)
    assert abs(res.lhs - res.rhs) <= res.gap_budget


def test_explicit_formula_symmetry(delta_fixture, delta_series):
    plus = zeros.explicit_formula_residual(delta_fixture, delta_series, 7.0, 11.0)
    minus = zeros.explicit_formula_residual(delta_fixture, delta_series, 7.0, -11.0)
    assert minus.lhs == pytest.approx(plus.lhs.conjugate(), rel=1e-12)
    assert minus.rhs == pytest.approx(plus.rhs.conjugate(), rel=1e-12)


def test_explicit_formula_requires_height(delta_fixture, delta_series):
    with pytest.raises(RangeError, match="height"):
        zeros.explicit_formula_residual(delta_fixture, delta_series, 10.0, 500.0)


def test_explicit_formula_residual_scan(delta_table, delta_series):
    for t in (5.0, 35.0, 65.0, 95.0, 125.0):
        res = zeros.explicit_formula_residual(delta_table, delta_series, 10.0, t)
        assert abs(res.lhs - res.rhs) <= res.gap_budget


@pytest.fixture(scope="module")
def mv_zeta_50(zeta_series):
    weights = arith.bn_weights(zeta_series, 50.0, 200.0)
    step = 0.1 / math.log(weights.truncation_bound)
    return weights, zeros.mv_meanvalue_check(weights, 1e4, step)


def test_mv_single_term_exact():
    one = arith.BnWeights(2.0, np.array([3]), np.array([0.7]), 10, 0.0, 0.49, 1.47)
    res = zeros.mv_meanvalue_check(one, 100.0, 0.05)
    assert res.integral == pytest.approx(res.main, rel=1e-8)


def test_mv_two_term_closed_form():
    two = arith.BnWeights(2.5, np.array([2, 3]), np.array([1.0, 1.0]), 10, 0.0,
                          2.0, 5.0)
    t_end = 1e4
    res = zeros.mv_meanvalue_check(two, t_end, 0.008)
    closed = 2 * t_end + 2 * math.sin(t_end * math.log(1.5)) / math.log(1.5)
    assert res.integral == pytest.approx(closed, rel=1e-6)


def test_mv_zeta_within_bound(mv_zeta_50):
    weights, res = mv_zeta_50
    assert abs(res.integral - res.main) <= res.error_bound
    assert res.error_bound == 3.0 * weights.s1


def test_mv_lemma54_trend(mv_zeta_50):
    _, res = mv_zeta_50
    ratio = res.integral / (1e4 * math.log(50.0))
    assert 0.8 <= ratio <= 1.2


def test_mv_validation(zeta_series):
    w = arith.bn_weights(zeta_series, 50.0, 200.0)
    with pytest.raises(ParameterError, match="coarse"):
        zeros.mv_meanvalue_check(w, 100.0, 1.0)
    big = arith.BnWeights(
        2.0, np.arange(2, 2503), np.ones(2501), 2502, 0.0, 1.0, 1.0
    )
    with pytest.raises(ParameterError, match="2000"):
        zeros.mv_meanvalue_check(big, 100.0, 0.001)


def test_theorem_chain_delta(delta_table):
    """2 pi F(x,T) vs the t-integral of the squared Lorentzian zero sum."""
    x, t_end = 10.0, 200.0
    f_val = zeros.form_factor_direct(delta_table, x, t_end)
    g = delta_table.ordinates
    signed = np.concatenate([-g[::-1], g])
    phases = np.exp(1j * math.log(x) * signed)
    ts = np.arange(0.0, t_end + 1e-9, 0.05)
    vals = np.empty(len(ts))
    for i, t in enumerate(ts):
        lorentz = 2.0 / (1.0 + (t - signed) ** 2)
        vals[i] = abs(np.sum(phases * lorentz)) ** 2
    integral = float(np.trapezoid(vals, ts))
    assert abs(integral - 2.0 * math.pi * f_val) <= math.log(t_end) ** 3
