"""Exact Weyl formula on the open set A.

For each ``l`` the counting function of the double cover is constant on

    A_l  = (5 lambda^(5)_{2l-1},  25 lambda^(3)_l)
    A'_l = (25 lambda^(3)_l,      5 lambda^(5)_{2l})

which are the gaps either side of row 9 of cycle ``C_{2l-1}``. On
``5**n A_l`` and ``5**n A'_l`` one has, for every ``m >= max(-n, 0)``,

    N~(5**m t)        = 3**(m+n) * g
    N_N - N_D         = 2 * G1,   G1 = 0 on A, 3/2 on A'

where ``g`` is ``N~(25 lambda^(3)_l)`` on ``A'_l`` and that count minus 9
on ``A_l``. Every check here compares integers; ``G`` itself is only
produced as a float for plotting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from . import decimation as dec
from .catalog import SpectralCatalog, default_catalog
from .errors import OrderingError, OutsideSetError

ALPHA = math.log(3.0) / math.log(5.0)
PROBES = (0.25, 0.5, 0.75)
ELL_MAX = 1024
ENDPOINT_RTOL = 1e-12

KIND_A = "A"
KIND_A_PRIME = "A'"


@dataclass(frozen=True)
class WeylInterval:
    kind: str
    ell: int
    scale_n: int
    lo: float
    hi: float
    g_coefficient: int
    g1_value: Fraction
    m0: int

    def probes(self, fractions=PROBES) -> list:
        return [self.lo + f * (self.hi - self.lo) for f in fractions]

    def contains(self, t: float) -> bool:
        return self.lo < t < self.hi

    def scaled(self, n: int) -> "WeylInterval":
        """Translate by ``5**n`` relative to the base interval."""
        f = 5.0 ** n
        base = 5.0 ** (-self.scale_n)
        return replace(self, scale_n=n, lo=self.lo * base * f, hi=self.hi * base * f, m0=max(-n, 0))

    def expected_tilde(self, m: int) -> int:
        """``N~(5**m t)`` for ``t`` in this interval, valid for ``m >= m0``."""
        if m < self.m0:
            raise ValueError(f"identity holds only for m >= {self.m0}")
        return 3 ** (m + self.scale_n) * self.g_coefficient

    def weyl_term(self, m: int) -> Fraction:
        """``G(t) t**alpha 3**m`` as an exact half-integer."""
        return Fraction(self.expected_tilde(m), 2)

    def G(self, t: float) -> float:
        base_t = t * 5.0 ** (-self.scale_n)
        return 0.5 * self.g_coefficient * base_t ** (-ALPHA)


def _cat(catalog: Optional[SpectralCatalog]) -> SpectralCatalog:
    return default_catalog() if catalog is None else catalog


def base_intervals(ell: int, catalog: Optional[SpectralCatalog] = None, check: bool = True) -> tuple:
    """``(A_l, A'_l)`` at scale 0, with ``N~`` verified constant on each.

    Endpoints come straight from the primitive families and are checked
    against rows 8-10 of ``C_{2l-1}`` in the catalog.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    cat = _cat(catalog)
    lo = 5.0 * dec.primitive_value(5, 2 * ell - 1, cat.psi_tol)
    mid = 25.0 * dec.primitive_value(3, ell, cat.psi_tol)
    hi = 5.0 * dec.primitive_value(5, 2 * ell, cat.psi_tol)
    k = 2 * ell - 1
    rows = [cat.value(k, r) for r in (8, 9, 10)]
    for got, want in zip((lo, mid, hi), rows):
        if abs(got - want) > 1e-12 * want:
            raise OrderingError(
                f"interval endpoint {got!r} does not match C_{k} rows 8-10 {rows!r}"
            )
    if not lo < mid < hi:
        raise OrderingError(f"A_{ell} or A'_{ell} is empty: {lo!r}, {mid!r}, {hi!r}")
    n9 = cat.count_through(k, 9).n_tilde
    a = WeylInterval(KIND_A, ell, 0, lo, mid, n9 - 9, Fraction(0), 0)
    ap = WeylInterval(KIND_A_PRIME, ell, 0, mid, hi, n9, Fraction(3, 2), 0)
    if check:
        for iv in (a, ap):
            for t in iv.probes():
                c = cat.count(t)
                if c.n_tilde != iv.g_coefficient or c.at_eigenvalue:
                    raise OrderingError(
                        f"N~ not constant on {iv.kind}_{ell}: {c.n_tilde} at t={t!r}, "
                        f"expected {iv.g_coefficient}"
                    )
    return a, ap


@lru_cache(maxsize=8)
def _base_table(catalog: SpectralCatalog, ell_max: int):
    los, mids, his, pairs = [], [], [], []
    for ell in range(1, ell_max + 1):
        a, ap = base_intervals(ell, catalog, check=False)
        los.append(a.lo)
        mids.append(a.hi)
        his.append(ap.hi)
        pairs.append((a, ap))
    los = np.array(los)
    order = np.argsort(los)
    his_sorted = np.array(his)[order]
    if np.any(his_sorted[:-1] >= los[order][1:]):
        raise OrderingError("base intervals overlap")
    return los[order], np.array(mids)[order], his_sorted, [pairs[i] for i in order]


@dataclass(frozen=True)
class Location:
    t: float
    interval: Optional[WeylInterval] = None
    reason: str = ""

    @property
    def located(self) -> bool:
        return self.interval is not None

    @property
    def membership(self) -> str:
        if self.interval is None:
            return "unlocated"
        iv = self.interval
        return f"{iv.kind}[l={iv.ell},n={iv.scale_n}]"


def locate(t: float, ell_max: int = ELL_MAX, catalog: Optional[SpectralCatalog] = None) -> Location:
    """Find ``(kind, l, n)`` with ``t`` in ``5**n A_l`` or ``5**n A'_l``, searching ``l <= ell_max``.

    ``t`` is first scaled by powers of 5 into ``[w0, 5 w0)`` with ``w0`` the
    smallest base endpoint, then pushed up by further powers of 5 while it
    can still hit a base interval. Points within ``1e-12`` relative of an
    endpoint are reported unlocated, since the set is open.
    """
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    cat = _cat(catalog)
    los, mids, his, pairs = _base_table(cat, int(ell_max))
    w0 = float(los[0])
    q = math.floor(math.log(t / w0, 5.0))
    tc = t * 5.0 ** (-q)
    while tc < w0:
        tc *= 5.0
        q -= 1
    while tc >= 5.0 * w0:
        tc /= 5.0
        q += 1
    top = float(his[-1])
    i = 0
    while tc * 5.0 ** i <= top:
        tp = tc * 5.0 ** i
        idx = int(np.searchsorted(los, tp, side="right")) - 1
        if idx >= 0 and tp <= his[idx] * (1 + ENDPOINT_RTOL):
            edges = (los[idx], mids[idx], his[idx])
            if any(abs(tp - e) <= ENDPOINT_RTOL * e for e in edges):
                return Location(t, None, "endpoint")
            a, ap = pairs[idx]
            base = a if tp < mids[idx] else ap
            return Location(t, base.scaled(q - i))
        i += 1
    return Location(t, None, f"not located with l <= {ell_max}")


def G(t: float, ell_max: int = ELL_MAX, catalog: Optional[SpectralCatalog] = None) -> float:
    loc = locate(t, ell_max, catalog)
    if not loc.located:
        raise OutsideSetError(f"t={t!r} is outside A ({loc.reason})")
    return loc.interval.G(t)


def G1(t: float, ell_max: int = ELL_MAX, catalog: Optional[SpectralCatalog] = None) -> Fraction:
    loc = locate(t, ell_max, catalog)
    if not loc.located:
        raise OutsideSetError(f"t={t!r} is outside A ({loc.reason})")
    return loc.interval.g1_value


@dataclass(frozen=True)
class TheoremCheck:
    m: int
    n_tilde: int
    expected_tilde: int
    n_neumann: int
    n_dirichlet: int
    weyl_term: Fraction
    g1: Fraction

    @property
    def passed(self) -> bool:
        return (
            self.n_tilde == self.expected_tilde
            and self.n_neumann - self.n_dirichlet == 2 * self.g1
            and self.n_neumann - self.weyl_term == self.g1
            and self.n_dirichlet - self.weyl_term == -self.g1
        )


@dataclass(frozen=True)
class TheoremReport:
    t: float
    interval: WeylInterval
    checks: list = field(default_factory=list)

    @property
    def m0(self) -> int:
        return self.interval.m0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)


def verify_theorem(t: float, m_max: int, ell_max: int = ELL_MAX,
                   catalog: Optional[SpectralCatalog] = None) -> TheoremReport:
    """Check the exact formula at ``5**m t`` for ``m0 <= m <= m_max``."""
    cat = _cat(catalog)
    loc = locate(t, ell_max, cat)
    if not loc.located:
        raise OutsideSetError(f"t={t!r} is outside A ({loc.reason})")
    iv = loc.interval
    checks = []
    for m in range(iv.m0, m_max + 1):
        c = cat.count(5.0 ** m * t)
        checks.append(
            TheoremCheck(m, c.n_tilde, iv.expected_tilde(m), c.n_neumann, c.n_dirichlet,
                         iv.weyl_term(m), iv.g1_value)
        )
    return TheoremReport(t, iv, checks)


@dataclass(frozen=True)
class WeylSample:
    t: float
    weyl_ratio: float
    ratio_N: float
    ratio_D: float
    membership: str
    g_value: float
    g1_value: Optional[Fraction]


def weyl_ratio_scan(t_lo: float, t_hi: float, samples: int, ell_max: int = ELL_MAX,
                    catalog: Optional[SpectralCatalog] = None) -> list:
    """Log-spaced samples of ``N(t) / t**alpha`` for all three counting functions."""
    if not 0 < t_lo < t_hi:
        raise ValueError("need 0 < t_lo < t_hi")
    if samples < 2:
        raise ValueError("samples must be >= 2")
    cat = _cat(catalog)
    out = []
    for t in np.geomspace(t_lo, t_hi, samples):
        t = float(t)
        c = cat.count(t)
        scale = t ** (-ALPHA)
        loc = locate(t, ell_max, cat)
        if loc.located:
            g, g1 = loc.interval.G(t), loc.interval.g1_value
        else:
            g, g1 = float("nan"), None
        out.append(WeylSample(t, c.n_tilde * scale, c.n_neumann * scale, c.n_dirichlet * scale,
                              loc.membership, g, g1))
    return out


def g_range(ell_max: int = 64, catalog: Optional[SpectralCatalog] = None) -> tuple:
    """Infimum and supremum of ``G`` over the closures of all base intervals with ``l <= ell_max``.

    ``G`` is a constant times ``t**-alpha`` on each interval, so its extremes
    sit at the endpoints; periodicity makes these the bounds over all of A
    restricted to those ``l``.
    """
    cat = _cat(catalog)
    lo_g, hi_g = math.inf, 0.0
    for ell in range(1, ell_max + 1):
        for iv in base_intervals(ell, cat, check=False):
            lo_g = min(lo_g, iv.G(iv.hi))
            hi_g = max(hi_g, iv.G(iv.lo))
    return lo_g, hi_g
