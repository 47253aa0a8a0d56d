"""Zero-table ingestion, counting, form factors, and mean-value identities.

Zero ordinates come from user-supplied ASCII tables (one positive ordinate per
line, # comments); nothing here computes zeros. The form factor
F(X,T) = sum_{0<=g,g'<=T} X^{i(g-g')} w(g-g') with w(u) = 4/(4+u^2) has a
direct O(N^2) path and a smoothed path through the Fourier side
w(u) = int e^{-2|tau|} e^{iu tau} dtau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .arith import BnWeights, CoefficientSeries
from .errors import FormatError, ParameterError, RangeError

_DIRECT_BLOCK = 1024
_SMOOTH_BLOCK = 128


@dataclass(frozen=True)
class ZeroSet:
    """Sorted positive ordinates of critical-line zeros.

    complete_up_to is the certified completeness height: counting and pair
    sums refuse to run above it.
    """

    label: str
    degree: int
    ordinates: np.ndarray = field(repr=False)
    complete_up_to: float

    def __post_init__(self):
        g = self.ordinates
        if len(g) == 0:
            raise ParameterError("empty zero set")
        if g[0] <= 0 or np.any(np.diff(g) <= 0):
            raise ParameterError("ordinates must be positive, strictly increasing")

    def __len__(self) -> int:
        return len(self.ordinates)


@dataclass(frozen=True)
class FormFactorCurve:
    """K-hat(alpha) = F(T^{d alpha}, T) / N(T) on an alpha grid.

    points rows are (alpha, X, F, K); stderr entries accompany ensemble
    averages and are zero for single-spectrum curves.
    """

    label: str
    degree: int
    T: float
    n_t: int
    points: tuple
    stderr: tuple = ()


def load_zeros(path, degree: int, completeness: float) -> ZeroSet:
    """Parse a one-ordinate-per-line ASCII zero table.

    Lines starting with # are ignored. Ordinates must be positive and
    strictly increasing; violations name the offending line.
    """
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"zero table not found: {path}")
    ordinates = []
    prev = 0.0
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            value = float(text)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: not a number: {text!r}") from None
        if value <= 0:
            raise FormatError(f"{path}:{lineno}: ordinate must be positive")
        if value <= prev:
            raise FormatError(
                f"{path}:{lineno}: ordinates not strictly increasing"
                f" ({value} after {prev})"
            )
        ordinates.append(value)
        prev = value
    if not ordinates:
        raise FormatError(f"{path}: no ordinates found")
    arr = np.asarray(ordinates)
    return ZeroSet(path.stem, degree, arr, min(completeness, float(arr[-1])))


def counting_function(zeros: ZeroSet, t: float) -> int:
    """N(T) = #{gamma <= T}; refuses T above the certified completeness."""
    if t > zeros.complete_up_to:
        raise RangeError(
            f"T={t} exceeds certified completeness {zeros.complete_up_to}"
        )
    return int(np.searchsorted(zeros.ordinates, t, side="right"))


def rvm_density(degree: int, t: float) -> float:
    """Riemann-von Mangoldt main term d*T*log(T)/(2 pi)."""
    if t <= 1:
        raise ParameterError("T must exceed 1")
    return degree * t * math.log(t) / (2.0 * math.pi)


def _select(zeros: ZeroSet, t: float) -> np.ndarray:
    if t > zeros.complete_up_to:
        raise RangeError(
            f"T={t} exceeds certified completeness {zeros.complete_up_to}"
        )
    g = zeros.ordinates[zeros.ordinates <= t]
    if len(g) == 0:
        raise ParameterError(f"no zeros at or below T={t}")
    return g


def form_factor_direct(zeros: ZeroSet, x: float, t: float) -> float:
    """F(X,T) by the explicit pair sum, in fixed deterministic blocks.

    Diagonal pairs contribute exactly N (w(0) = 1); each off-diagonal pair
    enters as 2 cos((g-g') log X) w(g-g').
    """
    if x <= 1:
        raise ParameterError("X must exceed 1 (alpha <= 0 is degenerate)")
    g = _select(zeros, t)
    lx = math.log(x)
    block_sums = []
    for lo in range(0, len(g), _DIRECT_BLOCK):
        rows = g[lo : lo + _DIRECT_BLOCK, None] - g[None, :]
        block_sums.append(float(np.sum(np.cos(rows * lx) * 4.0 / (4.0 + rows * rows))))
    return math.fsum(block_sums)


def form_factor_smoothed(
    zeros: ZeroSet, x: float, t: float, grid_step: float = 0.01, span: float = 9.0
) -> float:
    """F(X,T) through F = int e^{-2|tau|} |sum_g e^{i g (log X + tau)}|^2 dtau.

    Trapezoid on a symmetric grid with a node at tau = 0 (the kink), so the
    quadrature error scales like (2/3) grid_step^2 relative; the dropped
    tail is below e^{-2 span} * N^2.
    """
    if x <= 1:
        raise ParameterError("X must exceed 1")
    if grid_step > 0.05:
        raise ParameterError("grid_step must be <= 0.05; refine the grid")
    if span < 8.0:
        raise ParameterError("span must be >= 8 to make the dropped tail negligible")
    g = _select(zeros, t)
    k = int(math.ceil(span / grid_step))
    tau = grid_step * np.arange(-k, k + 1)
    weights = np.exp(-2.0 * np.abs(tau)) * grid_step
    weights[0] *= 0.5
    weights[-1] *= 0.5
    theta = math.log(x) + tau
    total = 0.0
    for lo in range(0, len(theta), _SMOOTH_BLOCK):
        th = theta[lo : lo + _SMOOTH_BLOCK]
        s = np.exp(1j * th[:, None] * g[None, :]).sum(axis=1)
        total += float(np.sum(weights[lo : lo + _SMOOTH_BLOCK] * np.abs(s) ** 2))
    return total


def form_factor_curve(zeros: ZeroSet, alphas, t: float) -> FormFactorCurve:
    """K-hat(alpha) = F(T^{d alpha}, T)/N(T) over an alpha grid in (0, 1)."""
    n_t = counting_function(zeros, t)
    points = []
    for alpha in alphas:
        if not 0.0 < alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0,1), got {alpha}")
        x = t ** (zeros.degree * alpha)
        f = form_factor_direct(zeros, x, t)
        points.append((float(alpha), x, f, f / n_t))
    return FormFactorCurve(zeros.label, zeros.degree, t, n_t, tuple(points))


# ----------------------------------------------------------------------------
# explicit formula


@dataclass(frozen=True)
class ExplicitFormulaResidual:
    lhs: complex
    rhs: complex
    gap_budget: float


def _dirichlet_tail_bound(series: CoefficientSeries, x: float, n_stop: int,
                          sigma: float) -> float:
    # Lambda(n)|a(n)| <= C log n on prime powers; integral comparison for the
    # (x/n)^sigma tail beyond n_stop
    c = 1.0 if series.degree == 1 else 2.0
    s1 = sigma - 1.0
    ln = math.log(n_stop)
    return c * (x ** sigma) * math.exp(-s1 * ln) * (ln / s1 + 1.0 / (s1 * s1)) * x ** -0.5


def explicit_formula_residual(
    zeros: ZeroSet,
    series: CoefficientSeries,
    x: float,
    t: float,
    sigma: float = 1.5,
) -> ExplicitFormulaResidual:
    """Both sides of the Lorentzian-weighted explicit formula at height t.

    lhs sums (2s-1) x^{ig} / ((s-1/2)^2 + (t-g)^2) over zeros (mirrored to
    negative ordinates), truncated at |g - t| <= complete_up_to - |t|; rhs is
    the split Dirichlet sum -x^{-1/2}(sum_{n<=x} + sum_{n>x}). For degree 1
    the zeta pole adds an explicit correction to the rhs; that case is
    reported, not asserted, so gap_budget only certifies degree >= 2.
    """
    if not 1.0 < sigma < 2.0:
        raise ParameterError("sigma must lie in (1, 2)")
    if x < 1.0:
        raise ParameterError("x must be >= 1")
    gamma_cut = zeros.complete_up_to - abs(t)
    if gamma_cut < 2.0:
        raise RangeError(
            f"zero table too short: need completeness above |t| + 2 ="
            f" {abs(t) + 2.0}, have {zeros.complete_up_to}"
        )
    half = sigma - 0.5
    lx = math.log(x)

    g = zeros.ordinates
    signed = np.concatenate([-g[::-1], g])
    window = signed[np.abs(signed - t) <= gamma_cut]
    lorentz = (2.0 * sigma - 1.0) / (half * half + (t - window) ** 2)
    lhs = complex(np.sum(np.exp(1j * lx * window) * lorentz))
    density = zeros.degree * math.log(zeros.complete_up_to + 2.0) / math.pi
    zero_tail = (2.0 * sigma - 1.0) * 2.0 * density / gamma_cut

    n_stop = min(series.limit, int(math.ceil(x * 10.0 ** (10.0 / sigma))))
    if n_stop < 2:
        raise ParameterError("coefficient table too short")
    n = np.arange(1, n_stop + 1, dtype=np.float64)
    c = series.values[1 : n_stop + 1]
    ratio = x / n
    expo = np.where(n <= x, 1.0 - sigma, sigma)
    terms = c * ratio ** expo * np.exp(1j * t * np.log(ratio))
    rhs = -complex(np.sum(terms)) * x ** -0.5
    dirichlet_tail = _dirichlet_tail_bound(series, x, n_stop, sigma)

    if series.m_pi == 1:
        # pole of -zeta'/zeta at s=1 enters like a zero at rho = 1 with
        # opposite sign: gamma -> -i/2 in the Lorentzian kernel
        pole = (
            (2.0 * sigma - 1.0)
            * math.sqrt(x)
            / (half * half + (t + 0.5j) ** 2)
        )
        rhs = rhs + pole

    o_term = x ** (0.5 - sigma) * math.log(abs(t) + 2.0) + math.sqrt(x) / (abs(t) + 2.0)
    budget = 10.0 * o_term + zero_tail + dirichlet_tail
    return ExplicitFormulaResidual(lhs, rhs, budget)


# ----------------------------------------------------------------------------
# Montgomery-Vaughan mean value


@njit(cache=True)
def _dirichlet_sq_trapezoid(b, logn, t_end: float, steps: int) -> float:
    """Trapezoid of |sum_n b_n n^{-it}|^2 over [0, t_end] with 'steps' panels.

    Phases advance by a fixed rotation per step and are re-seeded from exact
    exponentials every 512 steps to keep drift at rounding level.
    """
    h = t_end / steps
    m = len(b)
    z = np.empty(m, dtype=np.complex128)
    rot = np.empty(m, dtype=np.complex128)
    for i in range(m):
        z[i] = 1.0 + 0.0j
        rot[i] = np.exp(-1j * h * logn[i])
    total = 0.0
    for j in range(steps + 1):
        if j % 512 == 0:
            for i in range(m):
                z[i] = np.exp(-1j * (h * j) * logn[i])
        s = 0.0 + 0.0j
        for i in range(m):
            s += b[i] * z[i]
        val = s.real * s.real + s.imag * s.imag
        if j == 0 or j == steps:
            total += 0.5 * val
        else:
            total += val
        for i in range(m):
            z[i] *= rot[i]
    return total * h


@dataclass(frozen=True)
class MeanValueResult:
    integral: float
    main: float
    error_bound: float


def mv_meanvalue_check(
    weights: BnWeights, t_end: float, quad_step: float
) -> MeanValueResult:
    """int_0^T |sum b(n) n^{-it}|^2 dt vs the Montgomery-Vaughan prediction.

    main = T * sum|b|^2; error_bound = 3 * sum n|b|^2 (the reported C = 3).
    quad_step must resolve the fastest oscillation scale log(max n).
    """
    support = len(weights.indices)
    if support > 2000:
        raise ParameterError(f"support {support} exceeds the 2000 cap")
    if support == 0:
        raise ParameterError("empty weight vector")
    max_log = math.log(float(weights.indices[-1]))
    if quad_step > 0.1 / max_log:
        raise ParameterError(
            f"quad_step {quad_step} too coarse; need <= {0.1 / max_log:.6f}"
        )
    if t_end <= 0:
        raise ParameterError("T must be positive")
    steps = int(math.ceil(t_end / quad_step))
    logn = np.log(weights.indices.astype(np.float64))
    integral = float(
        _dirichlet_sq_trapezoid(weights.values.astype(np.float64), logn, t_end, steps)
    )
    return MeanValueResult(integral, t_end * weights.s0, 3.0 * weights.s1)
