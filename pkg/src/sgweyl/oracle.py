"""Brute-force check of the spectral catalog through graph approximations.

``Gamma_m`` of the gasket is built by triple replication on the triangular
lattice of side ``2**m``; the double cover glues two copies along the three
corners. The Laplacian used is ``(L u)(x) = sum_{y ~ x} (u(x) - u(y))``,
positive semidefinite with spectrum in [0, 6], so that consecutive levels
satisfy ``mu_{m-1} = mu_m (5 - mu_m)``.

Boundary conditions on the single copy:

``dirichlet``
    delete the three corner rows and columns.
``neumann``
    keep the corners, doubling their rows (the even extension to the
    double cover). The matrix is symmetrized as ``W^1/2 L W^1/2``.
``neumann-plain``
    keep the corners with their degree-2 rows as they are. This is not
    compatible with decimation and is kept only to report that.

Eigenvalues come from LAPACK's dense symmetric solver; each spectrum is
spot-checked by residuals of sampled eigenpairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import decimation as dec
from .errors import ConvergenceError, GraphLevelError, SGWeylError

MAX_LEVEL = 6
GROUP_TOL = 1e-8
GROUP_SPAN_MAX = 1e-6
CLOSURE_TOL = 1e-7
BIRTH_VALUES = (2.0, 5.0, 6.0)

SG = "SG"
DOUBLE = "DoubleCover"
CONDITIONS = ("free", "neumann", "neumann-plain", "dirichlet")


class DecimationError(SGWeylError, ValueError):
    """A sequence of graph eigenvalues is not linked by ``phi_-``."""


@dataclass(frozen=True)
class GraphApprox:
    level: int
    space: str
    n_vertices: int
    edges: np.ndarray
    boundary: tuple

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n_vertices, self.n_vertices))
        np.add.at(A, (self.edges[:, 0], self.edges[:, 1]), 1.0)
        np.add.at(A, (self.edges[:, 1], self.edges[:, 0]), 1.0)
        return A

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def is_connected(self) -> bool:
        A = self.adjacency() > 0
        seen = np.zeros(self.n_vertices, dtype=bool)
        seen[0] = True
        frontier = seen.copy()
        while frontier.any():
            frontier = A[frontier].any(axis=0) & ~seen
            seen |= frontier
        return bool(seen.all())


def _sg_edges(m: int):
    side = 1 << m
    index = {(0, 0): 0, (side, 0): 1, (0, side): 2}
    edges = []

    def vid(p):
        if p not in index:
            index[p] = len(index)
        return index[p]

    cells = [(0, 0)]
    size = side
    for _ in range(m):
        size //= 2
        cells = [(x + dx, y + dy) for x, y in cells for dx, dy in ((0, 0), (size, 0), (0, size))]
    for x, y in cells:
        a, b, c = vid((x, y)), vid((x + size, y)), vid((x, y + size))
        edges += [(a, b), (b, c), (a, c)]
    return len(index), np.array(edges, dtype=np.int64)


def build_gamma(m: int, space: str = DOUBLE, max_level: int = MAX_LEVEL) -> GraphApprox:
    """Level-``m`` graph approximation of the gasket (``SG``) or its double cover."""
    if m < 0 or m > max_level:
        raise GraphLevelError(f"level must lie in 0..{max_level}, got {m}")
    n, edges = _sg_edges(m)
    if space == SG:
        return GraphApprox(m, SG, n, edges, (0, 1, 2))
    if space != DOUBLE:
        raise ValueError(f"space must be {SG!r} or {DOUBLE!r}")
    # second copy: corners shared, other vertices shifted past the first copy
    relabel = np.arange(n) + (n - 3)
    relabel[:3] = np.arange(3)
    edges2 = relabel[edges]
    return GraphApprox(m, DOUBLE, 2 * n - 3, np.vstack([edges, edges2]), ())


def laplacian(g: GraphApprox, condition: str = "free") -> np.ndarray:
    if condition not in CONDITIONS:
        raise ValueError(f"condition must be one of {CONDITIONS}")
    A = g.adjacency()
    L = np.diag(A.sum(axis=1)) - A
    if condition == "free":
        return L
    if g.space != SG:
        raise ValueError(f"{condition!r} applies to the single gasket only")
    if condition == "neumann-plain":
        return L
    if condition == "neumann":
        w = np.ones(g.n_vertices)
        w[list(g.boundary)] = np.sqrt(2.0)
        return w[:, None] * L * w[None, :]
    inner = np.setdiff1d(np.arange(g.n_vertices), g.boundary)
    return L[np.ix_(inner, inner)]


@dataclass(frozen=True)
class GraphSpectrum:
    level: int
    space: str
    condition: str
    eigenvalues: np.ndarray
    groups: list = field(default_factory=list)
    max_residual: float = 0.0

    def count_le(self, t: float) -> int:
        return int(np.searchsorted(self.eigenvalues, t, side="right"))


def _group(values: np.ndarray, tol: float) -> list:
    groups = []
    start = 0
    for i in range(1, values.size + 1):
        if i == values.size or values[i] - values[i - 1] > tol:
            span = values[i - 1] - values[start]
            if span > GROUP_SPAN_MAX:
                raise ConvergenceError(f"eigenvalue group spans {span:.3g} > {GROUP_SPAN_MAX:g}")
            groups.append((float(np.mean(values[start:i])), i - start))
            start = i
    return groups


def graph_spectrum(g: GraphApprox, condition: str = "free", group_tol: float = GROUP_TOL,
                   residual_samples: int = 10, seed: int = 0) -> GraphSpectrum:
    """All eigenvalues of the graph Laplacian, grouped into ``(value, multiplicity)``."""
    L = laplacian(g, condition)
    if L.shape[0] == 0:
        return GraphSpectrum(g.level, g.space, condition, np.zeros(0), [], 0.0)
    try:
        w, V = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed at level {g.level}: {exc}") from exc
    norm = float(np.max(np.abs(w))) or 1.0
    rng = np.random.default_rng(seed)
    picks = rng.choice(w.size, size=min(residual_samples, w.size), replace=False)
    resid = max(float(np.linalg.norm(L @ V[:, i] - w[i] * V[:, i])) for i in picks)
    if resid > 1e-8 * norm:
        raise ConvergenceError(f"eigenpair residual {resid:.3g} exceeds 1e-8 * ||L||")
    w = np.where(np.abs(w) < group_tol, 0.0, w)
    return GraphSpectrum(g.level, g.space, condition, w, _group(w, group_tol), resid / norm)


# ---------------------------------------------------------------------------
# decimation structure


def closure_status(mu: float, previous: Optional[GraphSpectrum], tol: float = CLOSURE_TOL) -> str:
    """Classify one eigenvalue at level ``m`` against the spectrum at level ``m - 1``."""
    if abs(mu) <= tol:
        return "zero"
    for b in BIRTH_VALUES:
        if abs(mu - b) <= tol:
            return f"birth-{int(b)}"
    if previous is None:
        return "unchecked"
    parent = mu * (5.0 - mu)
    vals = np.array([v for v, _ in previous.groups])
    if vals.size and np.min(np.abs(vals - parent)) <= tol:
        return "decimated"
    return "FAIL"


def fractal_limit(mu: float, level: int, tol: float = dec.PSI_TOL) -> float:
    """Laplacian eigenvalue reached by continuing ``mu`` from ``level`` along ``phi_-``.

    ``6`` cannot continue along ``phi_-`` (it would produce the forbidden
    value 2), so it continues once along ``phi_+`` to 3 first.
    """
    if abs(mu - 6.0) <= CLOSURE_TOL:
        return 5.0 ** (level + 1) * dec.psi(3.0, tol)
    return 5.0 ** level * dec.psi(max(mu, 0.0), tol)


def fractal_limit_estimate(mu_sequence: Sequence[float], start_level: int,
                           tol: float = CLOSURE_TOL) -> float:
    """Limit ``1.5 lim 5**m mu_m`` for graph eigenvalues tracked over consecutive levels.

    The sequence must satisfy ``mu_m = mu_{m+1} (5 - mu_{m+1})`` within
    ``tol`` with ``mu_{m+1} < 5/2`` (the ``phi_-`` branch); the tail beyond
    the last level is supplied by ``psi``.
    """
    mus = [float(x) for x in mu_sequence]
    if not mus:
        raise DecimationError("empty sequence")
    for a, b in zip(mus, mus[1:]):
        if abs(b * (5.0 - b) - a) > tol or b > 2.5:
            raise DecimationError(f"{b!r} is not phi_-({a!r})")
    last = start_level + len(mus) - 1
    return 5.0 ** last * dec.psi(mus[-1])


@dataclass(frozen=True)
class LevelReport:
    level: int
    n_vertices: int
    n_eigenvalues: int
    closure_failures: list
    neumann_count: int
    dirichlet_count: int
    max_nd_gap: int
    min_nd_gap: int
    union_matches: bool
    plain_union_matches: bool
    plain_nd_gaps: tuple
    spectrum: GraphSpectrum
    statuses: list

    @property
    def passed(self) -> bool:
        return (
            not self.closure_failures
            and self.n_eigenvalues == self.n_vertices
            and 0 <= self.min_nd_gap <= self.max_nd_gap <= 3
            and self.union_matches
        )


@dataclass(frozen=True)
class ClosureReport:
    levels: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.levels)


def _nd_gaps(neu: GraphSpectrum, dir_: GraphSpectrum) -> tuple:
    thresholds = np.concatenate([neu.eigenvalues, dir_.eigenvalues])
    gaps = [neu.count_le(t + GROUP_TOL) - dir_.count_le(t + GROUP_TOL) for t in thresholds]
    return min(gaps), max(gaps)


def decimation_closure_report(m_max: int, tol: float = CLOSURE_TOL, m_min: int = 1) -> ClosureReport:
    """Closure, counting, and Neumann/Dirichlet split checks for levels ``m_min..m_max``."""
    if m_min < 1 or m_max > MAX_LEVEL:
        raise GraphLevelError(f"levels must lie in 1..{MAX_LEVEL}")
    out = []
    prev = graph_spectrum(build_gamma(m_min - 1, DOUBLE)) if m_min >= 1 else None
    for m in range(m_min, m_max + 1):
        g = build_gamma(m, DOUBLE)
        spec = graph_spectrum(g)
        statuses = [(v, mult, closure_status(v, prev, tol)) for v, mult in spec.groups]
        failures = [v for v, _, s in statuses if s == "FAIL"]
        sg = build_gamma(m, SG)
        neu = graph_spectrum(sg, "neumann")
        dir_ = graph_spectrum(sg, "dirichlet")
        plain = graph_spectrum(sg, "neumann-plain")
        lo_gap, hi_gap = _nd_gaps(neu, dir_)
        union = np.sort(np.concatenate([neu.eigenvalues, dir_.eigenvalues]))
        plain_union = np.sort(np.concatenate([plain.eigenvalues, dir_.eigenvalues]))
        out.append(
            LevelReport(
                m, g.n_vertices, int(spec.eigenvalues.size), failures,
                int(neu.eigenvalues.size), int(dir_.eigenvalues.size), hi_gap, lo_gap,
                bool(np.allclose(union, spec.eigenvalues, atol=tol)),
                bool(np.allclose(plain_union, spec.eigenvalues, atol=tol)),
                _nd_gaps(plain, dir_), spec, statuses,
            )
        )
        prev = spec
    return ClosureReport(out)


def mapped_spectrum(spec: GraphSpectrum) -> list:
    """``(fractal eigenvalue, multiplicity)`` for each graph eigenvalue group, sorted."""
    pairs = [(fractal_limit(v, spec.level), mult) for v, mult in spec.groups]
    merged = []
    for v, mult in sorted(pairs):
        if merged and abs(v - merged[-1][0]) <= 1e-9 * max(v, 1.0):
            merged[-1] = (merged[-1][0], merged[-1][1] + mult)
        else:
            merged.append((v, mult))
    return merged


def compare_with_catalog(spec: GraphSpectrum, catalog=None, rtol: float = 1e-9) -> list:
    """Mismatches between the mapped graph spectrum and catalog lines up to the top limit.

    An empty list means every value and multiplicity agrees. The column
    compared follows the spectrum: double cover, Neumann, or Dirichlet.
    Level 0 has no interior vertices and is not comparable.
    """
    if spec.level < 1:
        raise GraphLevelError("catalog comparison needs level >= 1")
    from .catalog import default_catalog

    cat = default_catalog() if catalog is None else catalog
    column = {"free": "mult_tilde", "neumann": "mult_N", "dirichlet": "mult_D"}[spec.condition]
    if spec.space == DOUBLE and spec.condition != "free":
        raise ValueError("double cover spectra use the free condition")
    top = 5.0 ** (spec.level + 1) * dec.psi(3.0, cat.psi_tol)
    K = cat.ensure_value(top).K
    arr = cat.arrays(K)
    keep = (arr["values"] <= top * (1 + rtol)) & (arr[column] > 0)
    expected = list(zip(arr["values"][keep].tolist(), arr[column][keep].tolist()))
    got = mapped_spectrum(spec)
    problems = []
    if len(got) != len(expected):
        problems.append(f"{len(got)} distinct values from graph, {len(expected)} in catalog")
    for (gv, gm), (ev, em) in zip(got, expected):
        if abs(gv - ev) > rtol * ev or gm != em:
            problems.append(f"graph ({gv!r}, {gm}) vs catalog ({ev!r}, {em})")
    return problems


def counting_agreement(m: int, catalog=None) -> tuple:
    """``(catalog N~ at the top limit of level m, vertex count of the level-m double cover)``."""
    from .catalog import default_catalog

    cat = default_catalog() if catalog is None else catalog
    top = fractal_limit(6.0, m, cat.psi_tol)
    return cat.count(top).n_tilde, build_gamma(m, DOUBLE).n_vertices


def spectrum_rows(level: int, condition: str = "free", group_tol: float = GROUP_TOL) -> list:
    """Dump rows ``(level, space, condition, eigenvalue, multiplicity, closure-status)``."""
    space = DOUBLE if condition == "free" else SG
    spec = graph_spectrum(build_gamma(level, space), condition, group_tol)
    prev = None
    if level >= 1:
        prev = graph_spectrum(build_gamma(level - 1, space), condition, group_tol)
    rows = []
    for v, mult in spec.groups:
        status = closure_status(v, prev) if condition == "free" else "n/a"
        rows.append((level, space, condition, v, mult, status))
    return rows
