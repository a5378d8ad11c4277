"""Intervals ``B_l``, the cover of the exceptional set, and its measure.

``B_1 = (phi_-(5), phi_+(5))`` is the gap in the middle of [0, 5]; the rest
are generated as ``B_{2i} = phi_-(B_i)`` and ``B_{2i+1} = phi_+(B_i)``. The
complement of ``B_1, ..., B_{2**m - 1}`` in [0, 5] is the union of the
``2**m`` intervals ``phi_w([0, 5])`` with ``|w| = m``. Their intersection
over all ``m`` is the Julia set of ``z(5 - z)``.

Interval lengths are propagated with

    |phi_s(x) - phi_s(y)| = 2 |x - y| / (sqrt(25 - 4x) + sqrt(25 - 4y))

rather than by subtracting endpoints, which would lose all relative
precision once intervals shrink to ~1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import decimation as dec
from .decimation import SignWord

COVER_CAP = 40
LIST_CAP = 22
ARRAY_CAP = 26
_CHUNK_DEPTH = 16

B1 = (0.5 * (5.0 - math.sqrt(5.0)), 0.5 * (5.0 + math.sqrt(5.0)))


@dataclass(frozen=True)
class CoverInterval:
    word: SignWord
    lo: float
    hi: float
    length: float


def _step(lo, hi, length):
    """Images of a batch of intervals under ``phi_-`` and ``phi_+``.

    ``phi_+ = 5 - phi_-``, so both images share one length.
    """
    slo = np.sqrt(25.0 - 4.0 * lo)
    shi = np.sqrt(25.0 - 4.0 * hi)
    mlo = 2.0 * lo / (5.0 + slo)
    mhi = 2.0 * hi / (5.0 + shi)
    new_len = 2.0 * length / (slo + shi)
    return (mlo, mhi), (5.0 - mhi, 5.0 - mlo), new_len


def b_word(ell: int) -> SignWord:
    """Prefix ``e`` with ``B_l = phi_e(B_1)``."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    bits = bin(ell)[3:]
    # the last bit is the outermost map
    return SignWord(tuple("+" if b == "1" else "-" for b in reversed(bits)))


def b_interval(ell: int) -> tuple:
    """Open interval ``B_l`` as ``(lo, hi)``."""
    word = b_word(ell)
    a = dec.phi_word(word, B1[0])
    b = dec.phi_word(word, B1[1])
    return (min(a, b), max(a, b))


def b_intervals(depth: int):
    """``B_1 .. B_{2**depth - 1}`` in tree order as ``(lo, hi, length)`` arrays."""
    if depth < 0 or depth > ARRAY_CAP:
        raise ValueError(f"depth must lie in 0..{ARRAY_CAP}")
    los = [np.array([B1[0]])]
    his = [np.array([B1[1]])]
    lens = [np.array([math.sqrt(5.0)])]
    for _ in range(1, depth):
        (alo, ahi), (blo, bhi), ln = _step(los[-1], his[-1], lens[-1])
        # children 2i (phi_-) and 2i + 1 (phi_+) interleave
        los.append(np.column_stack([alo, blo]).ravel())
        his.append(np.column_stack([ahi, bhi]).ravel())
        lens.append(np.repeat(ln, 2))
    if depth == 0:
        return np.empty(0), np.empty(0), np.empty(0)
    return np.concatenate(los), np.concatenate(his), np.concatenate(lens)


def cover_arrays(m: int):
    """``phi_w([0, 5])`` for all ``|w| = m`` as ``(lo, hi, length, codes)``.

    Words are encoded as in :class:`SignWord.from_code`.
    """
    if m < 0 or m > ARRAY_CAP:
        raise ValueError(f"array cover depth must lie in 0..{ARRAY_CAP}")
    lo = np.array([0.0])
    hi = np.array([5.0])
    ln = np.array([5.0])
    codes = np.array([0], dtype=np.int64)
    for r in range(m):
        (alo, ahi), (blo, bhi), new_len = _step(lo, hi, ln)
        lo = np.concatenate([alo, blo])
        hi = np.concatenate([ahi, bhi])
        ln = np.concatenate([new_len, new_len])
        codes = np.concatenate([codes, codes | (1 << r)])
    return lo, hi, ln, codes


def cover(m: int, cap: int = LIST_CAP) -> list:
    """The ``2**m`` intervals ``phi_w([0, 5])``, sorted by position."""
    if m < 0 or m > min(cap, COVER_CAP):
        raise ValueError(f"cover depth must lie in 0..{min(cap, COVER_CAP)}")
    lo, hi, ln, codes = cover_arrays(m)
    order = np.argsort(lo, kind="stable")
    return [
        CoverInterval(SignWord.from_code(int(codes[i]), m), float(lo[i]), float(hi[i]), float(ln[i]))
        for i in order
    ]


def _expand_numpy(lo, hi, ln, a_lo, a_hi, b_lo, b_hi, out_ln):
    (alo, ahi), (blo, bhi), nl = _step(lo, hi, ln)
    a_lo[:] = alo
    a_hi[:] = ahi
    b_lo[:] = blo
    b_hi[:] = bhi
    out_ln[:] = nl
    return 2.0 * float(np.sum(nl))


def _leaf_numpy(lo, hi, ln):
    s = np.sqrt(25.0 - 4.0 * lo) + np.sqrt(25.0 - 4.0 * hi)
    return 4.0 * float(np.sum(ln / s))


try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _expand, _leaf = _expand_numpy, _leaf_numpy
else:

    @njit(cache=True, fastmath=True)
    def _expand(lo, hi, ln, a_lo, a_hi, b_lo, b_hi, out_ln):
        s = 0.0
        for i in range(lo.shape[0]):
            slo = math.sqrt(25.0 - 4.0 * lo[i])
            shi = math.sqrt(25.0 - 4.0 * hi[i])
            mlo = 2.0 * lo[i] / (5.0 + slo)
            mhi = 2.0 * hi[i] / (5.0 + shi)
            nl = 2.0 * ln[i] / (slo + shi)
            a_lo[i] = mlo
            a_hi[i] = mhi
            b_lo[i] = 5.0 - mhi
            b_hi[i] = 5.0 - mlo
            out_ln[i] = nl
            s += nl
        return 2.0 * s

    @njit(cache=True, fastmath=True)
    def _leaf(lo, hi, ln):
        s = 0.0
        for i in range(lo.shape[0]):
            s += ln[i] / (math.sqrt(25.0 - 4.0 * lo[i]) + math.sqrt(25.0 - 4.0 * hi[i]))
        return 4.0 * s


def cover_measures(m_max: int, cap: int = COVER_CAP) -> np.ndarray:
    """``cover_measure(m)`` for every ``m`` in ``0..m_max`` from one pass.

    Depth ``_CHUNK_DEPTH`` is materialized once. Deeper levels come from a
    depth-first walk over outer maps applied to that whole chunk, with one
    set of buffers per tree level. The last level only needs lengths, and
    both children of an interval have the same length. Cost is about
    ``2**m_max`` interval updates (~10 s at depth 30 on one slow core).
    """
    if m_max < 0 or m_max > cap:
        raise ValueError(f"depth must lie in 0..{cap}")
    out = np.zeros(m_max + 1)
    base = min(m_max, _CHUNK_DEPTH)
    lo = np.array([0.0])
    hi = np.array([5.0])
    ln = np.array([5.0])
    out[0] = 5.0
    for r in range(1, base + 1):
        (alo, ahi), (blo, bhi), new_len = _step(lo, hi, ln)
        lo = np.concatenate([alo, blo])
        hi = np.concatenate([ahi, bhi])
        ln = np.concatenate([new_len, new_len])
        out[r] = float(np.sum(ln))
    if m_max == base:
        return out
    sums = [[] for _ in range(m_max + 1)]
    bufs = [[np.empty(lo.size) for _ in range(5)] for _ in range(m_max - base)]

    def walk(lo, hi, ln, d):
        if d + 1 == m_max:
            sums[d + 1].append(_leaf(lo, hi, ln))
            return
        a_lo, a_hi, b_lo, b_hi, nl = bufs[d - base]
        sums[d + 1].append(_expand(lo, hi, ln, a_lo, a_hi, b_lo, b_hi, nl))
        walk(a_lo, a_hi, nl, d + 1)
        walk(b_lo, b_hi, nl, d + 1)

    walk(lo, hi, ln, base)
    for d in range(base + 1, m_max + 1):
        out[d] = math.fsum(sums[d])
    return out


def cover_measure(m: int, cap: int = COVER_CAP) -> float:
    """Total length of the depth-``m`` cover."""
    return float(cover_measures(m, cap)[m])


def measure_bound(m: int) -> float:
    """``5 * (2 / sqrt 5)**m`` from ``|phi_s'| <= 1 / sqrt 5`` on [0, 5]."""
    return 5.0 * (2.0 / math.sqrt(5.0)) ** m


def exhaustion_residual(m: int) -> float:
    """``cover_measure(m) + sum_{l < 2**m} |B_l| - 5``; zero up to roundoff."""
    _, _, blen = b_intervals(m)
    return cover_measure(m) + math.fsum(blen) - 5.0


@dataclass(frozen=True)
class Classification:
    t: float
    depth: int
    ell: Optional[int]
    word: SignWord
    lo: float
    hi: float

    @property
    def in_b(self) -> bool:
        return self.ell is not None

    @property
    def residual(self) -> bool:
        return self.ell is None


def _index_of_prefix(prefix: tuple) -> int:
    ell = 1
    for s in reversed(prefix):
        ell = 2 * ell + (s == "+")
    return ell


def classify(t: float, depth: int) -> Classification:
    """Find ``B_l`` (``l < 2**depth``) containing ``t``, or the depth cover interval that does.

    Descends ``[0, 5] -> phi_e([0, 5])`` by appending inner signs and only
    ever evaluates the contracting maps.
    """
    t = float(t)
    if not 0.0 <= t <= 5.0:
        raise ValueError("t must lie in [0, 5]")
    if depth < 1 or depth > COVER_CAP:
        raise ValueError(f"depth must lie in 1..{COVER_CAP}")
    prefix: tuple = ()
    for _ in range(depth):
        word = SignWord(prefix)
        b_lo, b_hi = sorted((dec.phi_word(word, B1[0]), dec.phi_word(word, B1[1])))
        if b_lo < t < b_hi:
            return Classification(t, depth, _index_of_prefix(prefix), word, b_lo, b_hi)
        left = SignWord(prefix + ("-",))
        c_lo, c_hi = sorted((dec.phi_word(left, 0.0), dec.phi_word(left, 5.0)))
        prefix = prefix + (("-",) if c_lo <= t <= c_hi else ("+",))
    word = SignWord(prefix)
    lo, hi = sorted((dec.phi_word(word, 0.0), dec.phi_word(word, 5.0)))
    return Classification(t, depth, None, word, lo, hi)


@dataclass(frozen=True)
class Correspondence:
    """``A''_l = 5**(r+2) * (psi(phi_d(5)), psi(phi_d'(5)))`` and the matching ``B`` index."""

    ell: int
    word_lo: SignWord
    word_hi: SignWord
    b_index: int
    rel_error: float


def a_double_prime_correspondence(ell: int, catalog=None) -> Correspondence:
    """Express ``A''_l`` through ``psi`` and identify the ``B`` interval it maps to.

    ``A''_l = (5 lambda^(5)_{2l-1}, 5 lambda^(5)_{2l})``. The two endpoint
    words are padded with leading ``-`` signs to equal length ``r`` (using
    ``5 psi(phi_-(x)) = psi(x)``); they then differ only in their last sign,
    and ``(phi_d(5), phi_d'(5))`` is ``phi_e(B_1)`` for the shared prefix ``e``.
    """
    from .catalog import default_catalog

    cat = default_catalog() if catalog is None else catalog
    vals, codes, lens = dec.family_arrays(5, 2 * ell, cat.psi_tol)
    w1 = SignWord.from_code(int(codes[2 * ell - 2]), int(lens[2 * ell - 2]))
    w2 = SignWord.from_code(int(codes[2 * ell - 1]), int(lens[2 * ell - 1]))
    r = max(len(w1), len(w2))
    d1 = SignWord(("-",) * (r - len(w1)) + w1.signs)
    d2 = SignWord(("-",) * (r - len(w2)) + w2.signs)
    if d1.signs[:-1] != d2.signs[:-1] or d1.signs[-1] == d2.signs[-1]:
        raise ValueError(f"A''_{ell} endpoints {d1}, {d2} are not siblings")
    lo = 5.0 ** (r + 2) * dec.psi(dec.phi_word(d1, 5.0), cat.psi_tol)
    hi = 5.0 ** (r + 2) * dec.psi(dec.phi_word(d2, 5.0), cat.psi_tol)
    want_lo = 5.0 * float(vals[2 * ell - 2])
    want_hi = 5.0 * float(vals[2 * ell - 1])
    err = max(abs(lo - want_lo) / want_lo, abs(hi - want_hi) / want_hi)
    prefix = d1.signs[:-1]
    b_idx = _index_of_prefix(prefix)
    b_lo, b_hi = b_interval(b_idx)
    p_lo, p_hi = sorted((dec.phi_word(d1, 5.0), dec.phi_word(d2, 5.0)))
    err = max(err, abs(p_lo - b_lo) / b_lo, abs(p_hi - b_hi) / b_hi)
    return Correspondence(ell, d1, d2, b_idx, err)
