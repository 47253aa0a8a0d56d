"""Random-matrix spectra and ensemble-averaged spectral form factors.

Circular ensembles are sampled through their Verblunsky coefficients
(Killip-Nenciu): the eigenphase law of CUE/COE equals the root set of the
paraorthogonal Szego polynomial with independent rotationally-invariant
coefficients, which costs O(n^2) per spectrum instead of an O(n^3)
eigendecomposition. The dense constructions (QR-corrected Ginibre for CUE,
U U^T for COE) are kept as cross-validation oracles. Gaussian ensembles use
the tridiagonal-equivalent models and semicircle unfolding.

Every sample draws from a counter-based Philox stream keyed by
(seed, sample_index), so parallel sampling is order-independent and
bit-reproducible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.linalg import eigvalsh_tridiagonal

from .errors import ParameterError
from .zeros import FormFactorCurve

_KINDS = ("CUE", "COE", "GUE", "GOE", "Poisson")


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    dimension: int
    samples: int
    seed: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"kind must be one of {_KINDS}")
        if self.dimension < 2:
            raise ParameterError("dimension must be >= 2")
        if self.samples < 1:
            raise ParameterError("samples must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ParameterError("seed must fit in 64 bits")


@dataclass(frozen=True)
class SpectrumSample:
    """Unfolded spectrum: increasing points with unit mean spacing on [0, n)."""

    points: np.ndarray = field(repr=False)
    count: int


def _rng(spec: EnsembleSpec, sample_index: int) -> np.random.Generator:
    key = np.array([spec.seed, sample_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ----------------------------------------------------------------------------
# circular ensembles via Verblunsky coefficients


def _verblunsky(n: int, beta: float, rng: np.random.Generator) -> np.ndarray:
    ks = np.arange(n - 1)
    shape = beta * (n - 1 - ks) / 2.0
    radii = np.sqrt(1.0 - rng.random(n - 1) ** (1.0 / shape))
    alphas = np.empty(n, dtype=np.complex128)
    alphas[: n - 1] = radii * np.exp(2j * np.pi * rng.random(n - 1))
    alphas[n - 1] = np.exp(2j * np.pi * rng.random())
    return alphas


def _paraorthogonal_coeffs(alphas: np.ndarray) -> np.ndarray:
    """Szego recursion phi_{k+1} = z phi_k - conj(alpha_k) phi_k^*, rescaled
    each step so coefficients stay O(1); roots are unaffected."""
    n = len(alphas)
    phi = np.zeros(n + 1, dtype=np.complex128)
    phi[0] = 1.0
    for k, a in enumerate(alphas):
        head = phi[: k + 1]
        new = np.empty(k + 2, dtype=np.complex128)
        new[0] = 0.0
        new[1:] = head
        new[: k + 1] -= np.conj(a) * np.conj(head[::-1])
        scale = np.abs(new).max()
        phi[: k + 2] = new / scale
    return phi


@njit(cache=True)
def _bisect_circle_roots(coeffs, lo, hi, f_lo, half_phase, iters):
    """Refine bracketed roots of f(t) = Re[e^{-i(n t + mu)/2} p(e^{it})]."""
    m = len(lo)
    n = len(coeffs) - 1
    out = np.empty(m)
    for j in range(m):
        a = lo[j]
        b = hi[j]
        fa = f_lo[j]
        for _ in range(iters):
            c = 0.5 * (a + b)
            z = complex(math.cos(c), math.sin(c))
            p = coeffs[n]
            for i in range(n - 1, -1, -1):
                p = p * z + coeffs[i]
            rot = -0.5 * (n * c) - half_phase
            fc = (p * complex(math.cos(rot), math.sin(rot))).real
            if (fa < 0.0) != (fc < 0.0):
                b = c
            else:
                a = c
                fa = fc
        out[j] = 0.5 * (a + b)
    return out


def _roots_on_circle(coeffs: np.ndarray) -> np.ndarray:
    """Phases in [0, 2pi) of all roots of a self-inversive polynomial whose
    roots lie on the unit circle (paraorthogonal case: simple roots)."""
    n = len(coeffs) - 1
    rev = np.conj(coeffs[::-1])
    pivot = int(np.argmax(np.abs(coeffs)))
    mu = np.angle(rev[pivot] / coeffs[pivot])
    grid = 16 * n
    while True:
        vals = np.fft.fft(coeffs, grid)  # p at z = e^{-2 pi i j / grid}
        theta = (-2.0 * np.pi / grid) * np.arange(grid)
        f = np.real(np.exp(-0.5j * (n * theta + mu)) * vals)
        sign = np.signbit(f)
        # theta decreases; the wrap neighbor of the last node is theta_0 - 2pi,
        # where f picks up a factor (-1)^n
        neighbor = np.roll(sign, -1)
        if n % 2 == 1:
            neighbor[-1] = ~neighbor[-1]
        changes = np.nonzero(sign != neighbor)[0]
        if len(changes) == n:
            break
        grid *= 2
        if grid > 2 ** 22:
            raise ParameterError("root localization failed to converge")
    hi = theta[changes]
    lo = np.empty(len(changes))
    f_lo = np.empty(len(changes))
    for idx, j in enumerate(changes):
        if j == grid - 1:
            lo[idx] = -2.0 * np.pi
            f_lo[idx] = f[0] * (1.0 if n % 2 == 0 else -1.0)
        else:
            lo[idx] = theta[j + 1]
            f_lo[idx] = f[j + 1]
    roots = _bisect_circle_roots(
        np.ascontiguousarray(coeffs), lo, hi, f_lo, 0.5 * mu, 45
    )
    return np.sort(np.mod(roots, 2.0 * np.pi))


def _sample_circular(n: int, beta: float, rng: np.random.Generator) -> np.ndarray:
    return _roots_on_circle(_paraorthogonal_coeffs(_verblunsky(n, beta, rng)))


def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _sample_circular_dense(n: int, beta: float, rng: np.random.Generator):
    u = _haar_unitary(n, rng)
    if beta == 1.0:
        u = u @ u.T
    return np.sort(np.mod(np.angle(np.linalg.eigvals(u)), 2.0 * np.pi))


# ----------------------------------------------------------------------------
# Gaussian ensembles (tridiagonal models) and Poisson control


def _semicircle_cdf(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, -1.0, 1.0)
    return 0.5 + (x * np.sqrt(1.0 - x * x) + np.arcsin(x)) / np.pi


def _sample_gaussian(n: int, beta: float, rng: np.random.Generator) -> np.ndarray:
    """Tridiagonal model matching (A + A^H)/2 with unit-variance diagonal;
    eigenvalues are unfolded by the semicircle law on [-sqrt(2n), sqrt(2n)]."""
    diag = rng.standard_normal(n)
    dof = beta * np.arange(n - 1, 0, -1)
    off = np.sqrt(rng.chisquare(dof) / 2.0)
    eigs = eigvalsh_tridiagonal(diag, off)
    return n * _semicircle_cdf(np.sort(eigs) / math.sqrt(2.0 * n))


def sample_spectrum(
    spec: EnsembleSpec, sample_index: int, method: str = "auto"
) -> SpectrumSample:
    """One unfolded spectrum, deterministic given (seed, sample_index).

    method "auto" uses the Verblunsky sampler for CUE/COE; method "dense"
    forces the defining matrix constructions (slow, used as an oracle).
    """
    if sample_index < 0:
        raise ParameterError("sample_index must be >= 0")
    n = spec.dimension
    rng = _rng(spec, sample_index)
    if spec.kind in ("CUE", "COE"):
        beta = 2.0 if spec.kind == "CUE" else 1.0
        if method == "dense":
            phases = _sample_circular_dense(n, beta, rng)
        else:
            phases = _sample_circular(n, beta, rng)
        points = phases * (n / (2.0 * np.pi))
    elif spec.kind in ("GUE", "GOE"):
        beta = 2.0 if spec.kind == "GUE" else 1.0
        points = _sample_gaussian(n, beta, rng)
    else:
        points = np.sort(rng.random(n) * n)
    return SpectrumSample(points, n)


# ----------------------------------------------------------------------------
# ensemble form factor


def _harmonics(n: int, alphas) -> np.ndarray:
    ms = []
    for alpha in alphas:
        if not 0.0 < alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0,1), got {alpha}")
        ms.append(max(1, round(alpha * n)))
    return np.asarray(ms, dtype=np.int64)


def ensemble_form_factor(
    spec: EnsembleSpec, alphas, threads: int = 1, method: str = "auto"
) -> FormFactorCurve:
    """K-hat(alpha) = <|sum_j exp(2 pi i m u_j / n)|^2> / n with m = round(alpha n).

    Unfolded points act as the spectrum at unit density; alpha maps to the
    integer harmonic m (alpha is recorded as m/n), which kills the uniform
    density leakage term exactly, and the short-range weight of the zero-side
    form factor degenerates to 1 in this high-density scaling. The ensemble
    mean over samples is returned with its standard error per grid point.
    """
    n = spec.dimension
    ms = _harmonics(n, alphas)
    results = np.empty((spec.samples, len(ms)))

    def one(i: int):
        pts = sample_spectrum(spec, i, method=method).points
        phases = 2.0 * np.pi * pts / n
        for j, m in enumerate(ms):
            s = np.exp(1j * m * phases).sum()
            results[i, j] = (s * s.conjugate()).real

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(one, range(spec.samples)))
    else:
        for i in range(spec.samples):
            one(i)

    mean = results.mean(axis=0) / n
    if spec.samples > 1:
        stderr = results.std(axis=0, ddof=1) / (n * math.sqrt(spec.samples))
    else:
        stderr = np.zeros(len(ms))
    points = tuple(
        (m / n, math.exp(2.0 * np.pi * m / n), float(f * n), float(f))
        for m, f in zip(ms, mean)
    )
    return FormFactorCurve(
        spec.kind, 1, float(n), n, points, tuple(float(s) for s in stderr)
    )


def early_slope(curve: FormFactorCurve, alpha_max: float) -> float:
    """Least-squares slope through the origin of K(alpha) over alpha <= alpha_max."""
    pts = [(a, k) for a, _, _, k in curve.points if a <= alpha_max]
    if len(pts) < 3:
        raise ParameterError(
            f"need at least 3 grid points at or below alpha_max={alpha_max}"
        )
    num = math.fsum(a * k for a, k in pts)
    den = math.fsum(a * a for a, k in pts)
    return num / den
