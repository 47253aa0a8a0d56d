import math

import numpy as np
import pytest
from scipy.integrate import quad

from psivar import wp_integrals as wp
from psivar.errors import ParameterError, ResourceError


def quad_sinh_sq(a, b):
    val, err = quad(lambda l: (2.0 * math.sinh(l / 2)) ** 2, a, b,
                    epsabs=0.0, epsrel=1e-12, limit=200)
    return val


def quad_moment(a, b):
    val, err = quad(lambda l: l * (2.0 * math.sinh(l / 2)) ** 2, a, b,
                    epsabs=0.0, epsrel=1e-12, limit=200)
    return val


def test_empty_interval():
    assert wp.sinh_sq_integral(2.0, 2.0) == 0.0
    assert wp.sinh_sq_moment_integral(2.0, 2.0) == 0.0


def test_paper_closed_form_value():
    # int over [log 100, log 110] = H - 2 log((x+H)/x) + 1/x - 1/(x+H)
    value = wp.sinh_sq_integral(math.log(100), math.log(110))
    closed = 10 - 2 * math.log(1.1) + 1 / 100 - 1 / 110
    assert value == pytest.approx(closed, abs=1e-9)


def test_unit_interval_against_quadrature():
    assert wp.sinh_sq_integral(0.0, 1.0) == pytest.approx(
        quad_sinh_sq(0.0, 1.0), abs=1e-9
    )


def test_invalid_interval():
    with pytest.raises(ParameterError):
        wp.sinh_sq_integral(2.0, 1.0)
    with pytest.raises(ParameterError):
        wp.sinh_sq_moment_integral(-1.0, 1.0)


def test_moment_derivative_check():
    l, h = 2.0, 1e-6
    numerical = (
        wp.sinh_sq_moment_integral(0.0, l + h) - wp.sinh_sq_moment_integral(0.0, l)
    ) / h
    integrand = l * (2.0 * math.sinh(l / 2)) ** 2
    assert numerical == pytest.approx(integrand, rel=1e-5)


def test_moment_against_quadrature_paper_window():
    a, b = math.log(100), math.log(110)
    assert wp.sinh_sq_moment_integral(a, b) == pytest.approx(
        quad_moment(a, b), rel=1e-9
    )


def test_closed_forms_match_quadrature_randomly():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        a, b = np.sort(rng.uniform(0.0, 30.0, size=2))
        v1 = wp.sinh_sq_integral(a, b)
        q1 = quad_sinh_sq(a, b)
        assert abs(v1 - q1) <= 1e-9 * max(1e-300, abs(q1))
        v2 = wp.sinh_sq_moment_integral(a, b)
        q2 = quad_moment(a, b)
        assert abs(v2 - q2) <= 1e-9 * max(1e-300, abs(q2))


def test_log_inequality_strict():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        x = float(rng.uniform(1.5, 1e9))
        h = float(rng.uniform(0.0, 1.0)) * x
        if h == 0.0:
            continue
        assert math.log1p(h / x) < h / x


def test_disjoint_example():
    fam = wp.IntervalFamily(1000.0, 10.0)
    assert fam.b / 6 == pytest.approx(1.152951, abs=1e-6)
    assert fam.a / 5 == pytest.approx(1.381551, abs=1e-6)
    assert wp.intervals_disjoint(fam, 5, 6)


def test_disjoint_rejects_equal_indices():
    fam = wp.IntervalFamily(1000.0, 10.0)
    with pytest.raises(ParameterError):
        wp.intervals_disjoint(fam, 3, 3)


def test_touching_intervals_not_strictly_disjoint():
    # b = 2a: I(2) ends exactly where I(1) begins
    x = math.e
    h = math.e * (math.e - 1.0)
    fam = wp.IntervalFamily(x, h)
    assert fam.b == pytest.approx(2.0 * fam.a, rel=1e-12)
    assert not wp.intervals_disjoint(fam, 1, 2)


def test_interval_order():
    fam = wp.IntervalFamily(1e6, 100.0)
    bound = fam.x * fam.a / fam.h
    for n in (1, 2, 5, 100, 10 ** 4, int(bound) - 1):
        assert fam.b / (n + 1) < fam.a / n


def test_expectation_main_term():
    result = wp.wp_expectation(100.0, 10.0)
    closed = 10 - 2 * math.log(1.1) + 1 / 100 - 1 / 110
    assert result.main_term == pytest.approx(closed, abs=1e-9)
    assert result.value == pytest.approx(result.main_term + result.tail)


def test_expectation_band_at_desk_scale():
    result = wp.wp_expectation(1e6, 1e3)
    assert abs(result.value / 1e3 - 1.0) <= 2e-3


def test_expectation_tail_bound_grid():
    for x in (1e4, 1e6, 1e8):
        for h in (x ** 0.25, x ** 0.5):
            result = wp.wp_expectation(x, h)
            assert result.tail <= 10.0 * h / math.sqrt(x)
            assert result.budget <= 1e-6 * result.value


def test_expectation_uncertifiable_tail():
    with pytest.raises(ResourceError, match="n_max"):
        wp.wp_expectation(1e8, 1e4, tail_epsilon=1e-30)


def test_diag_main_term_quadrature():
    result = wp.wp_diag_variance(100.0, 10.0)
    assert result.main_term == pytest.approx(
        2.0 * quad_moment(math.log(100), math.log(110)), rel=1e-9
    )


def test_diag_band():
    result = wp.wp_diag_variance(1e8, 1e4)
    assert abs(result.value / (2 * 1e4 * math.log(1e8)) - 1.0) <= 1e-3
    looser = wp.wp_diag_variance(1e6, 1e2)
    assert abs(looser.value / (2 * 1e2 * math.log(1e6)) - 1.0) <= 1e-2


def test_diag_no_offdiagonal_pairs_at_desk_scale():
    result = wp.wp_diag_variance(1e8, 1e4)
    assert all(m == n for m, n, _ in result.breakdown)


def test_diag_tail_bound_grid():
    for x in (1e4, 1e6, 1e8):
        lx = math.log(x)
        for h in (x ** 0.25, x ** 0.5):
            result = wp.wp_diag_variance(x, h)
            cap = 10.0 * (h * lx * lx / math.sqrt(x) + h * h * lx * lx / (x * x))
            assert result.tail <= cap


def test_offdiag_identity():
    for x in (100.0, 1e4, 1e6):
        for h in (1.0, 50.0, 1e3):
            record = wp.wp_offdiag_identity(x, h)
            assert record["abs_diff"] <= 1e-12 * record["expectation_squared"]


def test_offdiag_degenerate_h():
    record = wp.wp_offdiag_identity(1e6, 1e-9)
    assert record["off_diag_limit"] <= 1e-15
    assert record["expectation_squared"] <= 1e-15


def test_genus_corrected_c0_exact():
    base = wp.wp_expectation(1e4, 100.0)
    assert wp.genus_corrected_expectation(1e4, 100.0, 50.0, 0.0) == base.value


def test_genus_corrected_large_genus_limit():
    base = wp.wp_expectation(1e4, 100.0).value
    corrected = wp.genus_corrected_expectation(1e4, 100.0, 1e8, 1.0)
    assert abs(corrected - base) / base <= 1e-6


def test_genus_corrected_excess_bound():
    x, h, g = 1e4, 100.0, 100.0
    base = wp.wp_expectation(x, h).value
    corrected = wp.genus_corrected_expectation(x, h, g, 1.0)
    excess = corrected - base
    assert 0.0 < excess / base <= math.log(x + h) ** 2 / g


def test_genus_validation():
    with pytest.raises(ParameterError):
        wp.genus_corrected_expectation(1e4, 10.0, 2.0, 1.0)
