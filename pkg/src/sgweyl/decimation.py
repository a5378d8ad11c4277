"""Decimation maps and the three primitive eigenvalue families.

The inverse branches of ``z -> z(5 - z)`` are

    phi_plus(t)  = (5 + sqrt(25 - 4t)) / 2
    phi_minus(t) = (5 - sqrt(25 - 4t)) / 2 = 2t / (5 + sqrt(25 - 4t))

and the renormalized limit ``psi(t) = 1.5 * lim 5**k phi_minus^k(t)`` turns a
graph eigenvalue into a Laplacian eigenvalue on the gasket. ``phi_minus`` is
always evaluated in the conjugate form: the textbook form cancels
catastrophically near 0 and drives the ``psi`` iteration to exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ConvergenceError, DomainError, OrderingError

PHI_DOMAIN_MAX = 25.0 / 4.0
PSI_TOL = 1e-14
PSI_MAX_ITER = 200
TIE_RTOL = 1e-12
GENERATORS = (2, 3, 5)

ArrayLike = Union[float, np.ndarray]


def _sign(sign) -> str:
    if sign in ("+", 1, "plus"):
        return "+"
    if sign in ("-", -1, "minus", "−"):
        return "-"
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def _check_domain(t: np.ndarray) -> None:
    if np.any(t > PHI_DOMAIN_MAX):
        bad = float(np.max(t))
        raise DomainError(f"phi is real only for t <= 25/4, got t={bad!r}")


def phi(sign, t: ArrayLike) -> ArrayLike:
    """Evaluate the inverse branch ``phi_+`` or ``phi_-`` at ``t``.

    Accepts a scalar or an array; scalars come back as ``float``.
    """
    s = _sign(sign)
    arr = np.asarray(t, dtype=float)
    _check_domain(arr)
    root = np.sqrt(25.0 - 4.0 * arr)
    if s == "+":
        out = 0.5 * (5.0 + root)
    else:
        out = 2.0 * arr / (5.0 + root)
    return float(out) if out.ndim == 0 else out


def phi_minus(t: ArrayLike) -> ArrayLike:
    return phi("-", t)


def phi_plus(t: ArrayLike) -> ArrayLike:
    return phi("+", t)


@dataclass(frozen=True)
class SignWord:
    """Finite word over ``{+, -}``; ``signs[0]`` is the outermost map."""

    signs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "signs", tuple(_sign(s) for s in self.signs))

    @classmethod
    def parse(cls, text: str) -> "SignWord":
        return cls(tuple(text))

    @classmethod
    def from_code(cls, code: int, length: int) -> "SignWord":
        """Decode the bit layout used internally: MSB is the first sign, 1 is ``+``."""
        if length == 0:
            return cls(())
        bits = format(int(code), f"0{length}b")
        return cls(tuple("+" if b == "1" else "-" for b in bits))

    @property
    def length(self) -> int:
        return len(self.signs)

    def __len__(self) -> int:
        return len(self.signs)

    def __iter__(self):
        return iter(self.signs)

    def __str__(self) -> str:
        return "".join(self.signs)

    def code(self) -> int:
        c = 0
        for s in self.signs:
            c = (c << 1) | (s == "+")
        return c


def phi_word(word: Union[SignWord, Sequence, str], t: ArrayLike) -> ArrayLike:
    """Compose ``phi_{d1} o phi_{d2} o ... o phi_{dm}`` and apply it to ``t``.

    The last sign of the word is applied first. The empty word is the identity.
    """
    if not isinstance(word, SignWord):
        word = SignWord(tuple(word))
    x = np.asarray(t, dtype=float)
    _check_domain(x)
    for s in reversed(word.signs):
        x = np.asarray(phi(s, x))
    return float(x) if x.ndim == 0 else x


def psi_array(t: ArrayLike, tol: float = PSI_TOL, max_iter: int = PSI_MAX_ITER) -> np.ndarray:
    """Vectorized ``psi``: iterate ``5**k phi_minus^k(t)`` to relative tolerance ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.array(t, dtype=float, copy=True, ndmin=1)
    _check_domain(x)
    prev = x.copy()
    scale = 1.0
    for _ in range(max_iter):
        x = 2.0 * x / (5.0 + np.sqrt(25.0 - 4.0 * x))
        scale *= 5.0
        cur = scale * x
        if np.all(np.abs(cur - prev) <= tol * np.abs(cur)):
            return 1.5 * cur
        prev = cur
    raise ConvergenceError(
        f"psi iteration did not reach rtol={tol:g} within {max_iter} iterates"
    )


def psi(t: float, tol: float = PSI_TOL, max_iter: int = PSI_MAX_ITER) -> float:
    """Renormalized limit ``1.5 * lim_k 5**k phi_minus^k(t)`` for scalar ``t``.

    Strictly increasing on [0, 5] with ``psi(0) == 0`` and
    ``5 * psi(phi_minus(x)) == psi(x)``.
    """
    return float(psi_array(t, tol, max_iter)[0])


# ---------------------------------------------------------------------------
# primitive families


@dataclass(frozen=True)
class PrimitiveEigenvalue:
    p: int
    n: int
    word: SignWord
    value: float


def _check_generator(p: int) -> int:
    if p not in GENERATORS:
        raise ValueError(f"generator must be one of {GENERATORS}, got {p!r}")
    return int(p)


@lru_cache(maxsize=None)
def _orbit(p: int, r: int):
    """All ``phi_w(p)`` with ``|w| = r`` (first sign unrestricted) and their word codes."""
    if r == 0:
        pts = np.array([float(p)])
        codes = np.array([0], dtype=np.int64)
    else:
        prev_pts, prev_codes = _orbit(p, r - 1)
        root = np.sqrt(25.0 - 4.0 * prev_pts)
        pts = np.concatenate([2.0 * prev_pts / (5.0 + root), 0.5 * (5.0 + root)])
        codes = np.concatenate([prev_codes, prev_codes | (1 << (r - 1))])
    pts.setflags(write=False)
    codes.setflags(write=False)
    return pts, codes


def _assert_strictly_increasing(values: np.ndarray, what: str, rtol: float = TIE_RTOL) -> None:
    if values.size < 2:
        return
    gaps = np.diff(values)
    bad = np.nonzero(gaps <= rtol * np.abs(values[1:]))[0]
    if bad.size:
        i = int(bad[0])
        raise OrderingError(
            f"{what}: values at positions {i} and {i + 1} are not strictly increasing "
            f"({values[i]!r} vs {values[i + 1]!r})"
        )


@lru_cache(maxsize=None)
def level_block(p: int, m: int, tol: float = PSI_TOL):
    """Sorted values ``5**(m+1) psi(phi_w(p))`` over words of length ``m`` starting with ``+``.

    Returns ``(values, codes)``. Level 0 is the single empty word.
    """
    p = _check_generator(p)
    if m < 0:
        raise ValueError("level must be nonnegative")
    if m == 0:
        pts = np.array([float(p)])
        codes = np.array([0], dtype=np.int64)
    else:
        inner, inner_codes = _orbit(p, m - 1)
        pts = 0.5 * (5.0 + np.sqrt(25.0 - 4.0 * inner))
        codes = inner_codes | (1 << (m - 1))
    values = 5.0 ** (m + 1) * psi_array(pts, tol)
    order = np.argsort(values, kind="stable")
    values = values[order]
    codes = codes[order]
    _assert_strictly_increasing(values, f"lambda^({p}) level {m}")
    values.setflags(write=False)
    codes.setflags(write=False)
    return values, codes


def level_of_rank(n: int) -> int:
    """Word length of the ``n``-th member of a family (1-based)."""
    if n < 1:
        raise ValueError("rank must be >= 1")
    return (n - 1).bit_length()


@lru_cache(maxsize=None)
def _family_levels(p: int, levels: int, tol: float):
    vals, codes, lens = [], [], []
    for m in range(levels + 1):
        v, c = level_block(p, m, tol)
        vals.append(v)
        codes.append(c)
        lens.append(np.full(v.size, m, dtype=np.int64))
    values = np.concatenate(vals)
    _assert_strictly_increasing(values, f"lambda^({p}) family")
    out = (values, np.concatenate(codes), np.concatenate(lens))
    for a in out:
        a.setflags(write=False)
    return out


def family_arrays(p: int, count: int, tol: float = PSI_TOL):
    """First ``count`` members of the family as ``(values, word_codes, word_lengths)``."""
    p = _check_generator(p)
    if count < 1:
        raise ValueError("count must be >= 1")
    values, codes, lens = _family_levels(p, level_of_rank(count), tol)
    return values[:count], codes[:count], lens[:count]


def family_values(p: int, count: int, tol: float = PSI_TOL) -> np.ndarray:
    return family_arrays(p, count, tol)[0]


def primitive_value(p: int, n: int, tol: float = PSI_TOL) -> float:
    """The single eigenvalue ``lambda_n^(p)``."""
    return float(family_values(p, n, tol)[n - 1])


def primitive_list(p: int, count: int, tol: float = PSI_TOL) -> list:
    """First ``count`` members of ``{lambda_n^(p)}`` in strictly increasing order.

    Level ``m`` contributes the ``2**(m-1)`` words of length ``m`` beginning
    with ``+`` (one empty word at level 0). Values are sorted within each
    level; levels never interleave, so concatenation preserves order.
    """
    values, codes, lens = family_arrays(p, count, tol)
    return [
        PrimitiveEigenvalue(p, i + 1, SignWord.from_code(int(c), int(m)), float(v))
        for i, (v, c, m) in enumerate(zip(values, codes, lens))
    ]


def primitive_value_from_word(p: int, word: Union[SignWord, Iterable, str], tol: float = PSI_TOL) -> float:
    """Direct evaluation of ``5**(|w|+1) psi(phi_w(p))`` for one word."""
    if not isinstance(word, SignWord):
        word = SignWord(tuple(word))
    return 5.0 ** (len(word) + 1) * psi(phi_word(word, float(p)), tol)


def level_bounds(m: int, tol: float = PSI_TOL) -> tuple:
    """Closed bounds ``(lo, hi)`` on every value emitted at word length ``m``.

    For ``m >= 1`` the first map is ``phi_+``, whose image of [0, 6] lies in
    [3, 5], so values sit in ``[psi(3), psi(5)) * 5**(m+1)``. The empty word
    gives ``5 psi(p)`` for ``p`` in {2, 3, 5}, so level 0 is ``[psi(2), psi(5)] * 5``.
    """
    scale = 5.0 ** (m + 1)
    if m == 0:
        return scale * psi(2.0, tol), scale * psi(5.0, tol)
    return scale * psi(3.0, tol), scale * psi(5.0, tol)


def max_abs_derivative(t: ArrayLike) -> ArrayLike:
    """``|d phi_+/dt| = |d phi_-/dt| = 1 / sqrt(25 - 4t)``."""
    arr = np.asarray(t, dtype=float)
    _check_domain(arr)
    out = 1.0 / np.sqrt(25.0 - 4.0 * arr)
    return float(out) if out.ndim == 0 else out


SQRT5 = math.sqrt(5.0)
