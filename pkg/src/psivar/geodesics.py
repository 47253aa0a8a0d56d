"""Closed-geodesic length spectra of matrix-presented Fuchsian groups.

Conjugacy classes are enumerated as cyclically reduced words over the
generators and their inverses, canonicalized at the free-group level (least
rotation among the word and its inverse), and keyed by that canonical word.
Words equal in the surface group only through the defining relation therefore
count separately; on the Bolza group the first such twins appear at geodesic
length 2*arccosh(3 + 2*sqrt(2)) ~ 4.897, and relator respellings of short
elements keep adding word classes at every larger word cutoff. Stability
certification therefore compares the set of length values below the cutoff,
which does stabilize, rather than word-class sets, which provably do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ParameterError, RangeError, ResourceError

_WORD_BUDGET = 10 ** 9
_RELATION_TOL = 1e-9
# identity words (relator rotations) evaluate to trace +-2 up to rounding;
# genuine hyperbolic classes sit far above the margin (Bolza: |tr| >= 4.82)
_HYPERBOLIC_MARGIN = 1e-6


@dataclass(frozen=True)
class FuchsianGroup:
    """Generators of a cocompact Fuchsian group as det-1 real 2x2 matrices.

    relation_words hold letter tuples (generator i, inverse i + k) that must
    evaluate to +-identity; they are checked at construction.
    """

    generators: tuple
    relation_words: tuple
    genus: int

    def __post_init__(self):
        for i, g in enumerate(self.generators):
            if abs(np.linalg.det(g) - 1.0) > 1e-9:
                raise ParameterError(f"generator {i} is not unimodular")
            if abs(np.trace(g)) <= 2.0:
                raise ParameterError(f"generator {i} is not hyperbolic")
        for word in self.relation_words:
            m = word_matrix(self, word)
            err = min(
                np.abs(m - np.eye(2)).max(), np.abs(m + np.eye(2)).max()
            )
            if err > _RELATION_TOL:
                raise ParameterError(
                    f"relation word {word} misses +-identity by {err:.3e}"
                )

    @property
    def n_letters(self) -> int:
        return 2 * len(self.generators)

    def letter_matrix(self, letter: int) -> np.ndarray:
        k = len(self.generators)
        if letter < k:
            return self.generators[letter]
        return np.linalg.inv(self.generators[letter - k])


@dataclass(frozen=True)
class GeodesicClass:
    """One unoriented conjugacy class keyed by its canonical word.

    length = 2*arccosh(|trace|/2); norm e^length matches the prime-geodesic
    bookkeeping. For w = u^k the root word u and the power k are recorded.
    """

    word: tuple
    trace: float
    length: float
    primitive: bool
    power: int
    root: tuple

    @property
    def norm(self) -> float:
        return math.exp(self.length)


@dataclass(frozen=True)
class LengthSpectrum:
    """Deduplicated classes sorted by (length, word), plus certification.

    stability_certified records that re-enumeration at word_cutoff - 1 yields
    the same classes below length_cutoff, the desk-scale completeness
    surrogate carried into every downstream count.
    """

    classes: tuple
    length_cutoff: float
    word_cutoff: int
    stability_certified: bool

    def primitive_classes(self):
        return [c for c in self.classes if c.primitive]

    def systole(self) -> float:
        if not self.classes:
            raise ParameterError("empty spectrum")
        return self.classes[0].length

    def multiplicity(self, length: float, tol: float = 1e-9) -> int:
        return sum(1 for c in self.classes if abs(c.length - length) <= tol)


def word_matrix(group: FuchsianGroup, word) -> np.ndarray:
    """Product of letter matrices, renormalized to det 1 every 16 factors."""
    m = np.eye(2)
    for i, letter in enumerate(word):
        m = m @ group.letter_matrix(int(letter))
        if (i + 1) % 16 == 0:
            m /= math.sqrt(abs(np.linalg.det(m)))
    return m


def trace_length(trace: float) -> float:
    if abs(trace) <= 2.0:
        raise ParameterError(f"trace {trace} is not hyperbolic")
    return 2.0 * math.acosh(abs(trace) / 2.0)


def bolza_group() -> FuchsianGroup:
    """Genus-2 Bolza surface group from the regular-octagon translations.

    a_k = R(k pi/4) T R(k pi/4)^{-1} where T translates by 2*arccosh(1+sqrt 2)
    along the imaginary axis and R rotates about i; the octagon side pairing
    satisfies a0 a1^-1 a2 a3^-1 a0^-1 a1 a2^-1 a3 = 1.
    """
    cosh_half = 1.0 + math.sqrt(2.0)
    sinh_half = math.sqrt(cosh_half * cosh_half - 1.0)
    t_mat = np.array([[cosh_half + sinh_half, 0.0], [0.0, cosh_half - sinh_half]])
    gens = []
    for k in range(4):
        half = k * math.pi / 8.0
        c, s = math.cos(half), math.sin(half)
        rot = np.array([[c, s], [-s, c]])
        gens.append(rot @ t_mat @ rot.T)
    relation = (0, 5, 2, 7, 4, 1, 6, 3)
    return FuchsianGroup(tuple(gens), (relation,), 2)


# ----------------------------------------------------------------------------
# enumeration


@njit(cache=True)
def _dfs_words(gens, n_letters, depth_max, tr_max, words, lengths, traces):
    """Emit cyclically reduced hyperbolic words with |trace| in (2, tr_max].

    Iterative DFS over freely reduced words; matrix products are carried
    along the path and renormalized to det 1 every 16 letters. Returns the
    number of candidates, or -1 if the output arrays are full.
    """
    cap = words.shape[0]
    half = n_letters // 2
    path = np.empty(depth_max, dtype=np.int8)
    nxt = np.zeros(depth_max, dtype=np.int8)
    mats = np.empty((depth_max + 1, 2, 2), dtype=np.float64)
    mats[0, 0, 0] = 1.0
    mats[0, 0, 1] = 0.0
    mats[0, 1, 0] = 0.0
    mats[0, 1, 1] = 1.0
    count = 0
    depth = 0
    while depth >= 0:
        if nxt[depth] >= n_letters:
            nxt[depth] = 0
            depth -= 1
            continue
        letter = nxt[depth]
        nxt[depth] += 1
        if depth > 0 and letter == (path[depth - 1] + half) % n_letters:
            continue
        path[depth] = letter
        a = mats[depth]
        g = gens[letter]
        b = mats[depth + 1]
        b[0, 0] = a[0, 0] * g[0, 0] + a[0, 1] * g[1, 0]
        b[0, 1] = a[0, 0] * g[0, 1] + a[0, 1] * g[1, 1]
        b[1, 0] = a[1, 0] * g[0, 0] + a[1, 1] * g[1, 0]
        b[1, 1] = a[1, 0] * g[0, 1] + a[1, 1] * g[1, 1]
        if (depth + 1) % 16 == 0:
            det = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
            scale = 1.0 / math.sqrt(abs(det))
            b[0, 0] *= scale
            b[0, 1] *= scale
            b[1, 0] *= scale
            b[1, 1] *= scale
        tr = b[0, 0] + b[1, 1]
        cyc_reduced = depth == 0 or path[0] != (letter + half) % n_letters
        if cyc_reduced and 2.0 + 1e-6 < abs(tr) <= tr_max:
            if count >= cap:
                return -1
            for i in range(depth + 1):
                words[count, i] = path[i]
            lengths[count] = depth + 1
            traces[count] = tr
            count += 1
        if depth + 1 < depth_max:
            depth += 1
            nxt[depth] = 0
    return count


def _canonical(word: tuple, n_letters: int) -> tuple:
    """Least rotation among the word and its inverse word (unoriented)."""
    half = n_letters // 2
    inverse = tuple((letter + half) % n_letters for letter in reversed(word))
    best = None
    for w in (word, inverse):
        for r in range(len(w)):
            rot = w[r:] + w[:r]
            if best is None or rot < best:
                best = rot
    return best


def _root_and_power(word: tuple) -> tuple:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word == word[p:] + word[:p]:
            return word[:p], n // p
    return word, 1


def _word_count(n_letters: int, w_max: int) -> int:
    total = 0
    for w in range(1, w_max + 1):
        total += n_letters * (n_letters - 1) ** (w - 1)
    return total


def _collect_classes(group: FuchsianGroup, w_max: int, l_max: float) -> dict:
    if _word_count(group.n_letters, w_max) > _WORD_BUDGET:
        raise ResourceError(
            f"word budget exceeded at W={w_max}"
            f" ({_word_count(group.n_letters, w_max):.2e} words); reduce W"
        )
    gens = np.stack(
        [group.letter_matrix(letter) for letter in range(group.n_letters)]
    )
    tr_max = 2.0 * math.cosh(l_max / 2.0)
    cap = 1 << 16
    while True:
        words = np.full((cap, w_max), -1, dtype=np.int8)
        lens = np.empty(cap, dtype=np.int8)
        traces = np.empty(cap, dtype=np.float64)
        count = _dfs_words(gens, group.n_letters, w_max, tr_max, words, lens, traces)
        if count >= 0:
            break
        cap *= 4
    classes = {}
    for i in range(count):
        word = tuple(int(v) for v in words[i, : lens[i]])
        key = _canonical(word, group.n_letters)
        if key not in classes:
            classes[key] = float(traces[i])
    return classes


def _length_set(classes: dict) -> set:
    return {round(trace_length(tr), 9) for tr in classes.values()}


def enumerate_classes(
    group: FuchsianGroup, w_max: int, l_max: float
) -> LengthSpectrum:
    """All unoriented conjugacy classes of word length <= w_max and geodesic
    length <= l_max, with stability certified against w_max - 1.

    Classes are keyed by canonical cyclically reduced word; equal lengths
    from distinct words are kept as separate classes. Certification compares
    the sets of length values (1e-9 grid) at w_max - 1 and w_max.
    """
    if w_max < 1:
        raise ParameterError("W must be >= 1")
    if l_max <= 0:
        raise ParameterError("l_max must be positive")
    classes = _collect_classes(group, w_max, l_max)
    certified = False
    if w_max > 1:
        previous = _collect_classes(group, w_max - 1, l_max)
        certified = _length_set(previous) == _length_set(classes)

    out = []
    for key, trace in classes.items():
        root, power = _root_and_power(key)
        out.append(
            GeodesicClass(
                word=key,
                trace=trace,
                length=trace_length(trace),
                primitive=power == 1,
                power=power,
                root=_canonical(root, group.n_letters),
            )
        )
    out.sort(key=lambda c: (c.length, c.word))
    return LengthSpectrum(tuple(out), l_max, w_max, certified)


# ----------------------------------------------------------------------------
# counting functions


def _require_range(spectrum: LengthSpectrum, log_x: float) -> None:
    if log_x > spectrum.length_cutoff:
        raise RangeError(
            f"log x = {log_x:.4f} exceeds the certified cutoff"
            f" {spectrum.length_cutoff}"
        )
    if not spectrum.stability_certified:
        raise RangeError("spectrum is not stability-certified; increase W")


def psi_geodesic(spectrum: LengthSpectrum, x: float) -> float:
    """Psi(x) = 2 sum over primitive unoriented classes of l * floor(log x / l).

    The factor 2 restores oriented counting; prime powers enter through the
    floor, so only primitive classes are summed.
    """
    if x <= 1:
        return 0.0
    log_x = math.log(x)
    _require_range(spectrum, log_x)
    return 2.0 * math.fsum(
        c.length * math.floor(log_x / c.length)
        for c in spectrum.primitive_classes()
    )


def psi_short_interval(spectrum: LengthSpectrum, x: float, h: float) -> float:
    """Psi(x;H) = sum of f(l) = 2 l (floor(B/l) - floor(A/l)) over primitives."""
    if h <= 0:
        raise ParameterError("H must be positive")
    if x <= 0:
        raise ParameterError("x must be positive")
    log_b = math.log(x + h)
    _require_range(spectrum, log_b)
    log_a = math.log(x) if x > 1 else 0.0
    return 2.0 * math.fsum(
        c.length * (math.floor(log_b / c.length) - math.floor(log_a / c.length))
        for c in spectrum.primitive_classes()
    )


def pi_geodesic(spectrum: LengthSpectrum, x: float) -> int:
    """Pi(x) = 2 * #{primitive unoriented classes with norm e^l <= x}."""
    if x <= 1:
        return 0
    log_x = math.log(x)
    _require_range(spectrum, log_x)
    return 2 * sum(1 for c in spectrum.primitive_classes() if c.length <= log_x)
