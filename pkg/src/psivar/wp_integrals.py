"""Closed-form Weil-Petersson moment integrals over the interval family I(n).

The large-genus limit turns geodesic short-interval moments into sums of
integrals of (2 sinh(l/2))^2 (optionally l-weighted) over the shells
I(n) = [log(x)/n, log(x+H)/n]. Everything here is evaluated by exact
antiderivatives with expm1-safe differencing; quadrature appears only as a
test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParameterError, ResourceError

# (2 sinh(l/2))^2 <= _QUAD_BOUND * l^2 on (0, 1]; used in tail certificates
_QUAD_BOUND = (2.0 * math.sinh(0.5)) ** 2
_N_MAX_CAP = 10 ** 7


@dataclass(frozen=True)
class IntervalFamily:
    """The shells I(n) = [A/n, B/n] with A = log x, B = log(x+H).

    delta stores B - A = log1p(H/x) directly so shell endpoints keep full
    relative accuracy even when H/x is tiny.
    """

    x: float
    h: float
    a: float = field(init=False)
    b: float = field(init=False)
    delta: float = field(init=False)

    def __post_init__(self):
        if self.x <= 1:
            raise ParameterError("x must exceed 1")
        if self.h <= 0:
            raise ParameterError("H must be positive")
        object.__setattr__(self, "a", math.log(self.x))
        object.__setattr__(self, "delta", math.log1p(self.h / self.x))
        object.__setattr__(self, "b", self.a + self.delta)

    def interval(self, n: int) -> tuple[float, float]:
        if n < 1:
            raise ParameterError("n must be >= 1")
        return self.a / n, self.b / n

    def length(self, n: int) -> float:
        return self.delta / n


@dataclass(frozen=True)
class WPIntegralResult:
    """Shell-sum value with its main term, tail, and certified budget.

    breakdown holds (m, n, contribution) triples; single integrals use m = n.
    budget bounds both the dropped shells beyond n_max and closed-form
    rounding, so value = main_term + tail within budget.
    """

    value: float
    main_term: float
    tail: float
    breakdown: tuple
    budget: float


def _sinh_sq_antideriv_diff(a: float, d: float) -> float:
    # int_a^{a+d} (e^l - 2 + e^-l) dl, safe for d << 1
    return math.exp(a) * math.expm1(d) - 2.0 * d - math.exp(-a) * math.expm1(-d)


def _moment_antideriv_diff(a: float, d: float) -> float:
    # int_a^{a+d} l (e^l - 2 + e^-l) dl via G(l) = (l-1)e^l - l^2 - (l+1)e^-l
    b = a + d
    t1 = math.exp(a) * ((b - 1.0) * math.expm1(d) + d)
    t2 = -d * (a + b)
    t3 = -math.exp(-a) * ((b + 1.0) * math.expm1(-d) + d)
    return t1 + t2 + t3


def _second_moment_antideriv_diff(a: float, d: float) -> float:
    # int_a^{a+d} l^2 (e^l - 2 + e^-l) dl
    b = a + d
    t1 = math.exp(a) * ((b * b - 2.0 * b + 2.0) * math.expm1(d) + d * (a + b - 2.0))
    t2 = -(2.0 / 3.0) * d * (a * a + a * b + b * b)
    t3 = -math.exp(-a) * ((b * b + 2.0 * b + 2.0) * math.expm1(-d) + d * (a + b + 2.0))
    return t1 + t2 + t3


def sinh_sq_integral(a: float, b: float) -> float:
    """int_a^b (2 sinh(l/2))^2 dl = (e^b - e^a) - 2(b-a) - (e^-b - e^-a)."""
    if a < 0 or b < a:
        raise ParameterError("need 0 <= a <= b")
    return _sinh_sq_antideriv_diff(a, b - a)


def sinh_sq_moment_integral(a: float, b: float) -> float:
    """int_a^b l (2 sinh(l/2))^2 dl by the exact antiderivative."""
    if a < 0 or b < a:
        raise ParameterError("need 0 <= a <= b")
    return _moment_antideriv_diff(a, b - a)


def intervals_disjoint(family: IntervalFamily, m: int, n: int) -> bool:
    """True iff I(n) lies strictly left of I(m), i.e. B/n < A/m (m < n)."""
    if m < 1 or n <= m:
        raise ParameterError("need 1 <= m < n")
    return family.b / n < family.a / m


def _expectation_n_max(family: IntervalFamily, tail_epsilon: float) -> int:
    # dropped shells n > N contribute at most (B^3 - A^3)/(2 N^2)
    a, b = family.a, family.b
    cube = b ** 3 - a ** 3
    n_max = max(math.ceil(b), 10)
    if cube / (2.0 * n_max ** 2) > tail_epsilon:
        n_max = math.ceil(math.sqrt(cube / (2.0 * tail_epsilon)))
    if n_max > _N_MAX_CAP:
        raise ResourceError(
            f"certifying tail <= {tail_epsilon} needs n_max = {n_max},"
            f" over the {_N_MAX_CAP} cap"
        )
    return n_max


def wp_expectation(x: float, h: float, tail_epsilon: float = 1e-9) -> WPIntegralResult:
    """Large-genus expected value of the geodesic short-interval count.

    Sums int_{I(n)} (2 sinh(l/2))^2 dl over shells; the n = 1 shell is the
    main term H + O(H/x), the rest is the tail, and shells beyond n_max are
    certified below tail_epsilon analytically.
    """
    fam = IntervalFamily(x, h)
    n_max = _expectation_n_max(fam, tail_epsilon)
    budget = (fam.b ** 3 - fam.a ** 3) / (2.0 * n_max ** 2)
    breakdown = []
    for n in range(1, n_max + 1):
        contrib = _sinh_sq_antideriv_diff(fam.a / n, fam.delta / n)
        breakdown.append((n, n, contrib))
    main = breakdown[0][2]
    tail = math.fsum(c for _, _, c in breakdown[1:])
    return WPIntegralResult(main + tail, main, tail, tuple(breakdown), budget)


def _diag_budget(family: IntervalFamily, n_max: int) -> float:
    a, b, delta = family.a, family.b, family.delta
    quart = b ** 4 - a ** 4
    # diagonal shells beyond n_max (outer factor 2, sum n^-4 <= 1/(3 N^3))
    diag = 2.0 * _QUAD_BOUND * quart / (4.0 * 3.0 * n_max ** 3)
    # off-diagonal pairs need m >= A/delta; both-beyond-the-cut remainder
    m0 = max(n_max, math.ceil(a / delta))
    pairs = 4.0 * _QUAD_BOUND * (b ** 4 / 4.0) * (
        (delta / a) / (2.0 * m0 ** 2) + 1.0 / (3.0 * m0 ** 3)
    )
    return diag + pairs


def wp_diag_variance(
    x: float, h: float, tail_epsilon: float = 1e-9
) -> WPIntegralResult:
    """Large-genus variance: 2 sum_{m,n} over intersecting shell pairs of
    int l (2 sinh(l/2))^2 dl, with main term 2H log x + o(H).

    Off-diagonal pairs intersect only when m >= A/(B-A) (I(n) and I(m) are
    disjoint below that, which the enumeration exploits instead of assuming:
    intersection demands n <= m B/A).
    """
    fam = IntervalFamily(x, h)
    n_max = max(math.ceil(fam.b), 10)
    while _diag_budget(fam, n_max) > tail_epsilon:
        n_max *= 2
        if n_max > _N_MAX_CAP:
            raise ResourceError(
                f"certifying diagonal tail <= {tail_epsilon} needs n_max >"
                f" {_N_MAX_CAP}"
            )
    budget = _diag_budget(fam, n_max)

    breakdown = []
    for n in range(1, n_max + 1):
        contrib = 2.0 * _moment_antideriv_diff(fam.a / n, fam.delta / n)
        breakdown.append((n, n, contrib))
    main = breakdown[0][2]
    # intersecting off-diagonal pairs: [A/m, B/n] when B/n >= A/m; factor 4
    # counts both orders (m, n) and (n, m)
    m_lo = math.ceil(fam.a / fam.delta)
    for m in range(m_lo, n_max + 1):
        n_hi = math.floor(m * fam.b / fam.a)
        for n in range(m + 1, n_hi + 1):
            lo, hi = fam.a / m, fam.b / n
            if hi <= lo:
                continue
            contrib = 4.0 * _moment_antideriv_diff(lo, hi - lo)
            breakdown.append((m, n, contrib))
    tail = math.fsum(c for _, _, c in breakdown[1:])
    return WPIntegralResult(main + tail, main, tail, tuple(breakdown), budget)


def wp_offdiag_identity(x: float, h: float) -> dict:
    """Off-diagonal limit vs squared expectation.

    The factorized double integral is the product of two identical 1-D shell
    sums, so the difference from expectation^2 is pure algebra and must sit
    at rounding level.
    """
    first = wp_expectation(x, h)
    second = wp_expectation(x, h)
    off = first.value * second.value
    esq = wp_expectation(x, h).value ** 2
    return {
        "off_diag_limit": off,
        "expectation_squared": esq,
        "abs_diff": abs(off - esq),
    }


def genus_corrected_expectation(x: float, h: float, g: float, c: float = 1.0) -> float:
    """Shell sum of (2 sinh(l/2))^2 (1 + c l^2 / g) dl for finite genus g.

    The paper-level error factor has an unspecified constant; c is exposed
    rather than guessed, and c = 0 reproduces wp_expectation exactly.
    """
    if g <= 2:
        raise ParameterError("g must exceed 2")
    if c < 0:
        raise ParameterError("c must be >= 0")
    fam = IntervalFamily(x, h)
    n_max = _expectation_n_max(fam, 1e-9)
    terms = []
    for n in range(1, n_max + 1):
        a, d = fam.a / n, fam.delta / n
        terms.append(
            _sinh_sq_antideriv_diff(a, d)
            + (c / g) * _second_moment_antideriv_diff(a, d)
        )
    return math.fsum(terms)
