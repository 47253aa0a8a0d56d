"""Arithmetic coefficient tables and short-interval statistics.

Builds von Mangoldt and Ramanujan-Delta coefficient series c(n) = Lambda(n)*a(n),
their Chebyshev sums and short-interval sums, empirical short-interval variances,
the b(n) weight vectors feeding the Montgomery-Vaughan mean-value check, and the
higher-prime-power defect sums.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .errors import InsufficientTableError, ParameterError, RangeError, ResourceError

_SIEVE_SEGMENT = 1 << 22
_CACHE_MAGIC = b"PSIVARC1"
_CACHE_VERSION = 1
_TAU_LIMIT = 1_000_000

# primes just under 2^25; their product (~2^150) certifies tau(n) for n <= 10^6,
# where |tau(n)| <= d(n) n^{11/2} < 2^120
_TAU_MODULI = (33554393, 33554383, 33554371, 33554347, 33554341, 33554317)


@dataclass(frozen=True)
class CoefficientSeries:
    """Tabulated c(n) = Lambda(n) * a(n) for n = 1..limit.

    values[n] is c(n); values[0] is an unused sentinel. Entries are nonzero
    only at prime powers. For the poles bookkeeping, m_pi = 1 for the zeta
    series and 0 otherwise.
    """

    label: str
    degree: int
    normalization: str
    limit: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.label == "delta" and self.normalization != "analytic":
            raise ParameterError(
                "delta coefficients are only stored in analytic normalization"
            )
        if self.normalization not in ("arithmetic", "analytic"):
            raise ParameterError(f"unknown normalization {self.normalization!r}")
        if len(self.values) != self.limit + 1:
            raise ParameterError("values must have length limit+1")

    @property
    def m_pi(self) -> int:
        return 1 if self.label == "zeta" else 0


@dataclass(frozen=True)
class BnWeights:
    """Sparse b(n) weights around a cut point x.

    b(n) = Lambda(n) a(n) n^{1/2} / x for n <= x and x Lambda(n) a(n) n^{-3/2}
    for n > x, stored on its prime-power support up to truncation_bound.
    tail_estimate bounds the dropped part of sum n*|b(n)|^2; s0 and s1 are the
    computed sums of |b(n)|^2 and n*|b(n)|^2 over the stored support.
    """

    x: float
    indices: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    truncation_bound: int
    tail_estimate: float
    s0: float
    s1: float


@dataclass(frozen=True)
class VarianceResult:
    """Riemann-sum approximation of the short-interval variance integral.

    The integral (1/X) int_1^X |psi(x;H) - m_pi H|^2 dx is discretized as an
    average over samples x = 1, 1+step, ... <= X; step is recorded rather
    than hidden.
    """

    x_max: float
    H: float
    step: float
    mean: float
    variance: float
    samples: int


@dataclass(frozen=True)
class DefectResult:
    defect: float
    comparator: float


# ----------------------------------------------------------------------------
# sieve


def _primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def _sieve_primes_segmented(n: int) -> np.ndarray:
    """Primes up to n, sieving in fixed segments of disjoint index ranges."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    base = _primes_up_to(math.isqrt(n))
    chunks = [base[base <= n]] if n < 4 else [base]
    lo = math.isqrt(n) + 1
    while lo <= n:
        hi = min(lo + _SIEVE_SEGMENT, n + 1)
        mask = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = ((lo + p - 1) // p) * p
            mask[start - lo :: p] = False
        chunks.append(np.nonzero(mask)[0].astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


def _cache_path(cache_dir, label: str, n: int) -> Path:
    return Path(cache_dir) / f"{label}-{n}.bin"


def _cache_load(cache_dir, label: str, n: int):
    path = _cache_path(cache_dir, label, n)
    if not path.is_file():
        return None
    try:
        raw = path.read_bytes()
    except OSError:
        return None
    if len(raw) != 16 + 8 * n:
        return None
    magic, version, _reserved = struct.unpack("<8sII", raw[:16])
    if magic != _CACHE_MAGIC or version != _CACHE_VERSION:
        return None
    body = np.frombuffer(raw[16:], dtype="<f8")
    values = np.zeros(n + 1)
    values[1:] = body
    return values


def _cache_store(cache_dir, label: str, n: int, values: np.ndarray) -> None:
    path = _cache_path(cache_dir, label, n)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = struct.pack("<8sII", _CACHE_MAGIC, _CACHE_VERSION, 0)
    path.write_bytes(header + values[1:].astype("<f8").tobytes())


def sieve_von_mangoldt(
    n: int, cache_dir=None, memory_budget: int = 2 << 30
) -> CoefficientSeries:
    """von Mangoldt table: c(p^k) = log p, zero elsewhere (label "zeta").

    Sieving runs over disjoint segments of 2^22 so transient memory stays
    bounded; the returned table itself needs 8*(n+1) bytes.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    table_bytes = 8 * (n + 1)
    if table_bytes > memory_budget:
        raise ResourceError(
            f"table of {n} reals needs {table_bytes} bytes, over the"
            f" {memory_budget}-byte budget (sieve segment size {_SIEVE_SEGMENT})"
        )
    if cache_dir is not None:
        cached = _cache_load(cache_dir, "zeta", n)
        if cached is not None:
            return CoefficientSeries("zeta", 1, "analytic", n, cached)

    values = np.zeros(n + 1)
    primes = _sieve_primes_segmented(n)
    values[primes] = np.log(primes.astype(np.float64))
    for p in primes[primes <= math.isqrt(n)]:
        logp = math.log(p)
        q = int(p) * int(p)
        while q <= n:
            values[q] = logp
            q *= int(p)

    if cache_dir is not None:
        _cache_store(cache_dir, "zeta", n, values)
    return CoefficientSeries("zeta", 1, "analytic", n, values)


# ----------------------------------------------------------------------------
# Ramanujan tau


@njit(cache=True)
def _tau_mod(n: int, p: int) -> np.ndarray:
    """f[m] = tau(m+1) mod p for m < n, by the eta-product log-derivative
    recursion m*f[m] = -sum_{k!=0} (-1)^k (m - 25 g_k) f[m - g_k] over
    pentagonal numbers g_k = k(3k-1)/2."""
    f = np.zeros(n, dtype=np.int64)
    f[0] = 1
    for m in range(1, n):
        s = 0
        k = 1
        while True:
            g = k * (3 * k - 1) // 2
            if g > m:
                break
            sign = -1 if (k & 1) else 1
            s += sign * ((m - 25 * g) % p) * f[m - g]
            g = k * (3 * k + 1) // 2
            if g <= m:
                s += sign * ((m - 25 * g) % p) * f[m - g]
            k += 1
        s = (-s) % p
        # modular inverse of m via extended Euclid (p prime, m < p)
        a, b = m % p, p
        x0, x1 = 1, 0
        while b:
            q = a // b
            a, b = b, a - q * b
            x0, x1 = x1, x0 - q * x1
        f[m] = (s * (x0 % p)) % p
    return f


def _tau_residues(n: int) -> list[np.ndarray]:
    if n > _TAU_LIMIT:
        raise ResourceError(
            f"exact tau table capped at {_TAU_LIMIT} (requested {n});"
            " the modulus set certifies no further"
        )
    return [_tau_mod(n, p) for p in _TAU_MODULI]


def _crt(residues, index: int) -> int:
    total, prod = 0, 1
    for r, p in zip(residues, _TAU_MODULI):
        rem = int(r[index])
        inv = pow(prod % p, -1, p)
        total += prod * ((rem - total) * inv % p)
        prod *= p
    if total > prod // 2:
        total -= prod
    return total


def ramanujan_tau(n: int) -> list[int]:
    """Exact tau(m) for m = 1..n (index 0 is a zero sentinel).

    Computed by CRT over six 25-bit prime moduli of the pentagonal-number
    recursion; exact for n <= 10^6 where |tau| stays far below the modulus
    product.
    """
    if n < 1:
        return [0]
    residues = _tau_residues(n)
    return [0] + [_crt(residues, m) for m in range(n)]


def delta_coefficients(n: int, cache_dir=None) -> CoefficientSeries:
    """Coefficients c(p^k) = log(p) * s_k for the Delta L-function (degree 2).

    a(p) = tau(p)/p^{11/2} (analytic normalization), extended to prime powers
    by the power-sum recursion s_k = a(p) s_{k-1} - s_{k-2}, s_0 = 2,
    s_1 = a(p). Deligne's bound |a(p)| <= 2 is asserted on the computed data.
    """
    if n < 1:
        return CoefficientSeries("delta", 2, "analytic", 0, np.zeros(1))
    if cache_dir is not None:
        cached = _cache_load(cache_dir, "delta", n)
        if cached is not None:
            return CoefficientSeries("delta", 2, "analytic", n, cached)

    residues = _tau_residues(n)
    values = np.zeros(n + 1)
    for p in _sieve_primes_segmented(n):
        p = int(p)
        tau_p = _crt(residues, p - 1)
        a_p = tau_p / p ** 5.5
        if abs(a_p) > 2.0:
            raise AssertionError(f"Deligne bound violated at p={p}: a={a_p}")
        logp = math.log(p)
        s_prev, s_cur = 2.0, a_p
        q = p
        while q <= n:
            values[q] = logp * s_cur
            s_prev, s_cur = s_cur, a_p * s_cur - s_prev
            q *= p

    if cache_dir is not None:
        _cache_store(cache_dir, "delta", n, values)
    return CoefficientSeries("delta", 2, "analytic", n, values)


# ----------------------------------------------------------------------------
# Chebyshev sums and windows


def chebyshev_psi(series: CoefficientSeries, x: float) -> float:
    """psi(x) = sum_{n <= x} c(n), summed with exact (Shewchuk) accumulation."""
    if x > series.limit:
        raise RangeError(f"x={x} exceeds table limit {series.limit}")
    if x < 1:
        return 0.0
    return math.fsum(series.values[1 : math.floor(x) + 1])


def short_interval_sum(series: CoefficientSeries, x: float, h: float) -> float:
    """psi(x+H) - psi(x) as a single pass over (x, x+H]."""
    if h <= 0:
        raise ParameterError("H must be positive")
    if x + h > series.limit:
        raise RangeError(f"x+H={x + h} exceeds table limit {series.limit}")
    lo = math.floor(x) + 1
    hi = math.floor(x + h)
    if hi < lo:
        return 0.0
    return math.fsum(series.values[lo : hi + 1])


def _prefix_sums(series: CoefficientSeries) -> np.ndarray:
    # extended-precision running sums keep the drift around 1e-13 relative
    # even at 10^8 terms
    return np.cumsum(series.values, dtype=np.longdouble)


def empirical_variance(
    series: CoefficientSeries, x_max: float, h: float, step: float
) -> VarianceResult:
    """Sample mean and variance of psi(x;H) - m_pi*H over x = 1, 1+step, ...

    Discretizes (1/X) int_1^X |psi(x;H) - m_pi H|^2 dx as a plain average
    over the sample grid.
    """
    if step <= 0:
        raise ParameterError("step must be positive")
    if h <= 0:
        raise ParameterError("H must be positive")
    if x_max + h > series.limit:
        raise RangeError(f"X+H={x_max + h} exceeds table limit {series.limit}")
    count = int(math.floor((x_max - 1) / step)) + 1
    xs = 1.0 + step * np.arange(count)
    prefix = _prefix_sums(series)
    window = prefix[np.floor(xs + h).astype(np.int64)] - prefix[
        np.floor(xs).astype(np.int64)
    ]
    window = window.astype(np.float64)
    dev = window - series.m_pi * h
    mean = float(np.sum(window, dtype=np.longdouble) / count)
    variance = float(np.sum(dev * dev, dtype=np.longdouble) / count)
    return VarianceResult(x_max, h, step, mean, variance, count)


def lambda_sq_window_average(
    series: CoefficientSeries, x_max: float, h: float
) -> float:
    """(1/X) sum_{x=1..X} sum_{x<n<=x+H} c(n)^2 in one pass.

    Each n lands in the windows with x in [n-H, n-1], so the double sum
    collapses to sum_n w(n) c(n)^2 with exact integer window counts at the
    boundaries.
    """
    if h <= 0:
        raise ParameterError("H must be positive")
    if x_max + h > series.limit:
        raise RangeError(f"X+H={x_max + h} exceeds table limit {series.limit}")
    m = int(math.floor(x_max))
    if m < 1:
        return 0.0
    n_hi = int(math.floor(m + h))
    n = np.arange(2, n_hi + 1)
    upper = np.minimum(n - 1, m)
    lower = np.maximum(np.ceil(n - h).astype(np.int64), 1)
    w = np.clip(upper - lower + 1, 0, None).astype(np.float64)
    c = series.values[2 : n_hi + 1]
    return float(np.sum(w * c * c, dtype=np.longdouble) / m)


def prime_power_defect(series: CoefficientSeries, x: float) -> DefectResult:
    """Defect sum over higher prime powers p^k <= x, k >= 2.

    For degree 1 this is sum log p = psi(x) - theta(x); for degree 2 the
    Rankin-Selberg surrogate |a(p^k)|^2 log p is used (Delta has no ramified
    primes). The comparator x^{1 - 1/(d^2+1)} is returned for ratio reports.
    """
    if x > series.limit:
        raise RangeError(f"x={x} exceeds table limit {series.limit}")
    d = series.degree
    comparator = x ** (1.0 - 1.0 / (d * d + 1.0))
    if x < 4:
        return DefectResult(0.0, comparator)
    terms = []
    for p in _primes_up_to(math.isqrt(int(x))):
        p = int(p)
        logp = math.log(p)
        q = p * p
        while q <= x:
            if d == 1:
                terms.append(logp)
            else:
                a = series.values[q] / logp
                terms.append(a * a * logp)
            q *= p
    return DefectResult(math.fsum(terms), comparator)


# ----------------------------------------------------------------------------
# b(n) weights


def _bn_tail_bound(series: CoefficientSeries, x: float, m: int) -> float:
    """Analytic bound on sum_{n>M} n |b(n)|^2 = x^2 sum_{n>M} (Lambda a)^2 / n^2.

    Uses Lambda(n)|a(n)| <= C log n with C = 1 for zeta and C = 2 for delta
    (Deligne: |a(p^k)| <= k+1 and (k+1)/k <= 2), then integral comparison.
    """
    c = 1.0 if series.degree == 1 else 2.0
    lm = math.log(m)
    return c * c * x * x * (lm * lm + 2 * lm + 2) / m


def bn_weights(
    series: CoefficientSeries, x: float, tail_epsilon: float
) -> BnWeights:
    """b(n) weight vector with certified truncation of sum n |b(n)|^2.

    The truncation bound M > x grows until the analytic tail bound drops
    below tail_epsilon; if the coefficient table cannot certify that, an
    InsufficientTableError names the required M.
    """
    if x < 1:
        raise ParameterError("x must be >= 1")
    if tail_epsilon <= 0:
        raise ParameterError("tail_epsilon must be positive")
    m = int(max(2 * x, x + 1000))
    while _bn_tail_bound(series, x, m) > tail_epsilon:
        m *= 2
        if m > 2 ** 62:
            raise ParameterError("tail_epsilon unattainably small")
    if m > series.limit:
        # the doubling may overshoot a feasible limit; take the table edge
        # when it already certifies the tail
        if _bn_tail_bound(series, x, series.limit) <= tail_epsilon:
            m = series.limit
        else:
            raise InsufficientTableError(
                f"table limit {series.limit} cannot certify the b(n) tail at"
                f" x={x}, tail_epsilon={tail_epsilon}; need limit >= {m}"
            )
    tail = _bn_tail_bound(series, x, m)

    support = np.nonzero(series.values[: m + 1])[0]
    c = series.values[support]
    n = support.astype(np.float64)
    b = np.where(n <= x, c * np.sqrt(n) / x, x * c * n ** -1.5)
    bsq = b * b
    s0 = math.fsum(bsq)
    s1 = math.fsum(n * bsq)
    return BnWeights(x, support, b, m, tail, s0, s1)
