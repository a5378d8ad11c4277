"""Spectrum of the gasket and its double cover, organized into cycles.

After the zero eigenvalue the spectrum splits into cycles ``C_1, C_2, ...``
of ten distinct eigenvalues each. Write ``k = 2**j * (2l - 1)``. Rows 1-7 of
a cycle have fixed multiplicities. Rows 8-10 are

    row 8   5**(j+1) lambda^(5)_{2l-1}
    row 9   5**(j+2) lambda^(3)_l
    row 10  5**(j+1) lambda^(5)_{2l}

The published table prints row 10 with the same label as row 8. The
``lambda^(5)_{2l}`` reading is the one the brute force graph spectra
reproduce (see :mod:`sgweyl.oracle`).

Counts are kept as exact integers. A query at an eigenvalue is inclusive,
with relative tolerance ``compare_rtol``, and raises the ``at_eigenvalue``
flag so callers can tell.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import decimation as dec
from .errors import CatalogExhaustedError, OrderingError

ROWS_PER_CYCLE = 10
COMPARE_RTOL = 1e-9
DEFAULT_K_MAX = 1 << 15

# (M_N, M_D) for rows 1-7; identical in every cycle
FIXED_ROW_MULTS = ((0, 1), (2, 0), (0, 2), (3, 0), (0, 2), (2, 0), (0, 1))
DIFFERENCE_PROFILE = (0, 2, 0, 3, 1, 3, 2, 0, 3, 1)


@dataclass(frozen=True)
class CycleDecomposition:
    k: int
    j: int
    l: int  # noqa: E741


def decompose(k: int) -> CycleDecomposition:
    """Split ``k`` as ``2**j * (2l - 1)``."""
    k = int(k)
    if k < 1:
        raise ValueError("cycle index must be >= 1")
    j = (k & -k).bit_length() - 1
    return CycleDecomposition(k, j, ((k >> j) + 1) // 2)


def row_multiplicities(j: int) -> list:
    """``(M_N, M_D, M_tilde)`` for the ten rows of a cycle with 2-adic order ``j``."""
    a = 3 ** (j + 1)
    b = 3 ** (j + 2)
    rows = list(FIXED_ROW_MULTS)
    rows += [((a - 1) // 2, (a + 3) // 2), ((b + 3) // 2, (b - 3) // 2), ((a - 1) // 2, (a + 3) // 2)]
    return [(n, d, n + d) for n, d in rows]


def cycle_mass(k: int) -> int:
    """Total double cover multiplicity of ``C_k``: ``15 + 5 * 3**(j+1)``."""
    return 15 + 5 * 3 ** (decompose(k).j + 1)


@dataclass(frozen=True)
class EigenLabel:
    """``5**power * lambda^(family)_rank``; family 0 marks the zero eigenvalue."""

    family: int
    rank: int
    power: int

    def __str__(self) -> str:
        if self.family == 0:
            return "0"
        head = f"5^{self.power}*" if self.power else ""
        return f"{head}lambda{self.family}_{self.rank}"


@dataclass(frozen=True)
class SpectralLine:
    value: float
    mult_N: int
    mult_D: int
    mult_tilde: int
    cycle: int
    row: int
    label: EigenLabel


@dataclass(frozen=True)
class CountingResult:
    t: float
    n_neumann: int
    n_dirichlet: int
    n_tilde: int
    at_eigenvalue: bool = False

    @property
    def difference(self) -> int:
        return self.n_neumann - self.n_dirichlet


def _row_labels(k: int) -> list:
    d = decompose(k)
    return [
        EigenLabel(2, 2 * k - 1, 0),
        EigenLabel(3, 2 * k - 1, 0),
        EigenLabel(5, 2 * k - 1, 0),
        EigenLabel(3, k, 1),
        EigenLabel(5, 2 * k, 0),
        EigenLabel(3, 2 * k, 0),
        EigenLabel(2, 2 * k, 0),
        EigenLabel(5, 2 * d.l - 1, d.j + 1),
        EigenLabel(3, d.l, d.j + 2),
        EigenLabel(5, 2 * d.l, d.j + 1),
    ]


class _Tables:
    """Immutable snapshot of the first ``K`` cycles, zero line first."""

    def __init__(self, K: int, psi_tol: float):
        k = np.arange(1, K + 1, dtype=np.int64)
        j = np.log2(k & -k).astype(np.int64)
        ell = ((k >> j) + 1) // 2

        f2 = dec.family_values(2, 2 * K, psi_tol)
        f3 = dec.family_values(3, 2 * K, psi_tol)
        f5 = dec.family_values(5, 2 * K, psi_tol)
        p1 = 5.0 ** (j + 1)
        vals = np.stack(
            [
                f2[2 * k - 2],
                f3[2 * k - 2],
                f5[2 * k - 2],
                5.0 * f3[k - 1],
                f5[2 * k - 1],
                f3[2 * k - 1],
                f2[2 * k - 1],
                p1 * f5[2 * ell - 2],
                5.0 * p1 * f3[ell - 1],
                p1 * f5[2 * ell - 1],
            ],
            axis=1,
        )
        a = 3 ** (j + 1)
        b = 3 * a
        mn = np.empty((K, ROWS_PER_CYCLE), dtype=np.int64)
        md = np.empty((K, ROWS_PER_CYCLE), dtype=np.int64)
        for r, (n, d) in enumerate(FIXED_ROW_MULTS):
            mn[:, r] = n
            md[:, r] = d
        mn[:, 7] = mn[:, 9] = (a - 1) // 2
        md[:, 7] = md[:, 9] = (a + 3) // 2
        mn[:, 8] = (b + 3) // 2
        md[:, 8] = (b - 3) // 2

        self.K = K
        self.j = j
        self.ell = ell
        self.values = np.concatenate([[0.0], vals.ravel()])
        self.mult_N = np.concatenate([[1], mn.ravel()])
        self.mult_D = np.concatenate([[0], md.ravel()])
        self.mult_tilde = self.mult_N + self.mult_D
        self.cum_N = np.cumsum(self.mult_N)
        self.cum_D = np.cumsum(self.mult_D)
        self.cum_tilde = self.cum_N + self.cum_D
        for arr in (self.values, self.mult_N, self.mult_D, self.mult_tilde,
                    self.cum_N, self.cum_D, self.cum_tilde):
            arr.setflags(write=False)
        self._check_order()

    def _check_order(self) -> None:
        v = self.values
        gaps = np.diff(v)
        bad = np.nonzero(gaps <= dec.TIE_RTOL * v[1:])[0]
        if bad.size:
            i = int(bad[0])
            raise OrderingError(
                "catalog is not strictly increasing between "
                f"{_position(i)} ({v[i]!r}) and {_position(i + 1)} ({v[i + 1]!r})"
            )

    @property
    def last_value(self) -> float:
        return float(self.values[-1])


def _position(i: int) -> str:
    if i == 0:
        return "zero line"
    k, r = divmod(i - 1, ROWS_PER_CYCLE)
    return f"C_{k + 1} row {r + 1}"


def _index(k: int, row: int) -> int:
    if k < 1:
        raise ValueError("cycle index must be >= 1")
    if not 1 <= row <= ROWS_PER_CYCLE:
        raise ValueError("row must lie in 1..10")
    return 1 + (k - 1) * ROWS_PER_CYCLE + (row - 1)


class SpectralCatalog:
    """Lazily extended, memoized spectrum.

    Extension builds a new snapshot and swaps it in under a lock; readers
    keep whatever snapshot they grabbed, so concurrent reads are safe.
    """

    def __init__(self, k_max: int = DEFAULT_K_MAX, compare_rtol: float = COMPARE_RTOL,
                 psi_tol: float = dec.PSI_TOL):
        if compare_rtol <= 0 or psi_tol <= 0:
            raise ValueError("tolerances must be positive")
        self.k_max = int(k_max)
        self.compare_rtol = float(compare_rtol)
        self.psi_tol = float(psi_tol)
        self._lock = threading.Lock()
        self._tables: Optional[_Tables] = None

    # -- depth control ------------------------------------------------------

    def _tables_for(self, K: int) -> _Tables:
        tables = self._tables
        if tables is not None and tables.K >= K:
            return tables
        if K > self.k_max:
            raise CatalogExhaustedError(f"need {K} cycles, cap is {self.k_max}")
        with self._lock:
            tables = self._tables
            if tables is None or tables.K < K:
                size = 1
                while size < K:
                    size <<= 1
                tables = _Tables(min(size, self.k_max), self.psi_tol)
                self._tables = tables
        return tables

    @property
    def cycles(self) -> int:
        return 0 if self._tables is None else self._tables.K

    def completeness_bound(self, K: int) -> float:
        """Lower bound on every eigenvalue lying in a cycle beyond ``C_K``.

        For ``k > K`` rows 1-7 of ``C_k`` have rank at least ``2K + 1`` and
        rows 4 and 8-10 carry at least one extra factor of 5, so with
        ``c = ceil(log2(K + 1))`` the level bounds give
        ``psi(3) * 5**(c + 2)`` as a floor.
        """
        c = int(K).bit_length()
        return dec.psi(3.0, self.psi_tol) * 5.0 ** (c + 2)

    def cycles_needed(self, t: float) -> int:
        """Fewest cycles whose completeness bound exceeds ``t``."""
        floor = dec.psi(3.0, self.psi_tol)
        c = 0
        while floor * 5.0 ** (c + 2) <= t * (1.0 + self.compare_rtol):
            c += 1
        return 1 << max(c - 1, 0)

    def ensure_value(self, t: float) -> _Tables:
        """Snapshot guaranteed to hold every eigenvalue ``<= t``."""
        K = self.cycles_needed(t)
        if K > self.k_max:
            raise CatalogExhaustedError(f"t={t!r} needs {K} cycles, cap is {self.k_max}")
        tables = self._tables_for(K)
        assert self.completeness_bound(tables.K) > t * (1.0 + self.compare_rtol)
        return tables

    # -- lines --------------------------------------------------------------

    def _line(self, tables: _Tables, i: int) -> SpectralLine:
        if i == 0:
            return SpectralLine(0.0, 1, 0, 1, 0, 0, EigenLabel(0, 0, 0))
        k, r = divmod(i - 1, ROWS_PER_CYCLE)
        return SpectralLine(
            float(tables.values[i]),
            int(tables.mult_N[i]),
            int(tables.mult_D[i]),
            int(tables.mult_tilde[i]),
            k + 1,
            r + 1,
            _row_labels(k + 1)[r],
        )

    def cycle_rows(self, k: int) -> list:
        tables = self._tables_for(k)
        start = _index(k, 1)
        return [self._line(tables, start + r) for r in range(ROWS_PER_CYCLE)]

    def spectrum(self, K: int) -> list:
        if K < 1:
            raise ValueError("K must be >= 1")
        tables = self._tables_for(K)
        return [self._line(tables, i) for i in range(1 + K * ROWS_PER_CYCLE)]

    def value(self, k: int, row: int) -> float:
        return float(self._tables_for(k).values[_index(k, row)])

    def arrays(self, K: int) -> dict:
        """Read-only numpy views of the first ``K`` cycles (zero line included)."""
        tables = self._tables_for(K)
        n = 1 + K * ROWS_PER_CYCLE
        return {
            "values": tables.values[:n],
            "mult_N": tables.mult_N[:n],
            "mult_D": tables.mult_D[:n],
            "mult_tilde": tables.mult_tilde[:n],
        }

    # -- counting -----------------------------------------------------------

    def count(self, t: float) -> CountingResult:
        """``(N_N(t), N_D(t), N~(t))``, inclusive at eigenvalues."""
        t = float(t)
        if not t >= 0.0:
            raise ValueError("t must be nonnegative")
        tables = self.ensure_value(t)
        upper = t * (1.0 + self.compare_rtol)
        i = int(np.searchsorted(tables.values, upper, side="right")) - 1
        near = tables.values[i] >= t * (1.0 - self.compare_rtol)
        return CountingResult(
            t, int(tables.cum_N[i]), int(tables.cum_D[i]), int(tables.cum_tilde[i]), bool(near)
        )

    def count_through(self, k: int, row: int) -> CountingResult:
        """Counts evaluated exactly at the eigenvalue in row ``row`` of ``C_k``.

        Uses the catalog position, not a float comparison; valid because the
        catalog is asserted strictly increasing.
        """
        tables = self._tables_for(k)
        i = _index(k, row)
        return CountingResult(
            float(tables.values[i]), int(tables.cum_N[i]), int(tables.cum_D[i]),
            int(tables.cum_tilde[i]), True,
        )

    def difference_profile(self, k: int) -> tuple:
        tables = self._tables_for(k)
        i = _index(k, 1)
        diff = tables.cum_N[i:i + ROWS_PER_CYCLE] - tables.cum_D[i:i + ROWS_PER_CYCLE]
        return tuple(int(x) for x in diff)


_default: Optional[SpectralCatalog] = None
_default_lock = threading.Lock()


def default_catalog() -> SpectralCatalog:
    global _default
    if _default is None:
        with _default_lock:
            if _default is None:
                _default = SpectralCatalog()
    return _default


def _cat(catalog: Optional[SpectralCatalog]) -> SpectralCatalog:
    return default_catalog() if catalog is None else catalog


def cycle_rows(k: int, catalog: Optional[SpectralCatalog] = None) -> list:
    return _cat(catalog).cycle_rows(k)


def spectrum(K: int, catalog: Optional[SpectralCatalog] = None) -> list:
    return _cat(catalog).spectrum(K)


def count(t: float, catalog: Optional[SpectralCatalog] = None) -> CountingResult:
    return _cat(catalog).count(t)


def difference_profile(k: int, catalog: Optional[SpectralCatalog] = None) -> tuple:
    return _cat(catalog).difference_profile(k)


# ---------------------------------------------------------------------------
# the key lemma and its induction steps


def row9_cycle(n: int, j: int) -> int:
    """Cycle whose row 9 is ``5**(j+2) lambda^(3)_n``."""
    return (1 << j) * (2 * n - 1)


def lemma_sides(n: int, j: int, catalog: Optional[SpectralCatalog] = None) -> tuple:
    """``(N~(5**(j+2) lambda^(3)_n), 3**j * N~(5**2 lambda^(3)_n))`` as exact integers."""
    cat = _cat(catalog)
    lhs = cat.count_through(row9_cycle(n, j), 9).n_tilde
    rhs = 3 ** j * cat.count_through(row9_cycle(n, 0), 9).n_tilde
    return lhs, rhs


@dataclass(frozen=True)
class InductionStep:
    k: int
    parity: str
    left: int
    right: int
    left_closed_form: int
    right_closed_form: int

    @property
    def passed(self) -> bool:
        return self.left == self.right == self.left_closed_form == self.right_closed_form


def induction_step(k: int, catalog: Optional[SpectralCatalog] = None) -> InductionStep:
    """Block sums of the step from ``k - 1`` to ``k`` (``k >= 2``).

    ``left  = N~(row 9 of C_{2k}) - N~(row 9 of C_{2k-2})``
    ``right = 3 * (N~(row 9 of C_k) - N~(row 9 of C_{k-1}))``

    The closed forms are the totals obtained by listing the multiplicities
    that fall between the two eigenvalues.
    """
    if k < 2:
        raise ValueError("induction steps start at k = 2")
    cat = _cat(catalog)

    def n9(c: int) -> int:
        return cat.count_through(c, 9).n_tilde

    left = n9(2 * k) - n9(2 * k - 2)
    right = 3 * (n9(k) - n9(k - 1))
    if k % 2:
        jp = decompose(k - 1).j
        # row 10 of C_{2k-2}, all of C_{2k-1}, rows 1-9 of C_{2k} (j = 1)
        left_cf = (3 ** (jp + 2) + 1) + 30 + 50
        # row 10 of C_{k-1}, rows 1-9 of C_k (j = 0)
        right_cf = 3 * ((3 ** (jp + 1) + 1) + 26)
        return InductionStep(k, "odd", left, right, left_cf, right_cf)
    j = decompose(k).j
    left_cf = 10 + 30 + (14 + 3 ** (j + 2) + 3 ** (j + 3))
    right_cf = 3 * (4 + 14 + 3 ** (j + 1) + 3 ** (j + 2))
    return InductionStep(k, "even", left, right, left_cf, right_cf)
