"""Verification suites behind ``sgweyl verify``.

Each suite returns a :class:`SuiteReport`. A failure records the identity
that broke and the inputs it broke at, so a report alone is enough to
reproduce the problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import catalog as catmod
from . import decimation as dec
from . import julia as jl
from . import oracle as orc
from . import weyl
from .catalog import SpectralCatalog, default_catalog

SUITES = ("lemma", "theorem", "table", "julia", "oracle")


@dataclass
class SuiteReport:
    suite: str
    params: dict
    checks: int = 0
    failures: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.checks > 0 and not self.failures

    def check(self, ok: bool, identity: str, **inputs) -> bool:
        self.checks += 1
        if not ok:
            self.failures.append({"identity": identity, "inputs": inputs})
        return ok

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "params": self.params,
            "checks": self.checks,
            "failures": self.failures,
            "info": self.info,
        }


def _cat(catalog: Optional[SpectralCatalog]) -> SpectralCatalog:
    return default_catalog() if catalog is None else catalog


def lemma_suite(n_max: int = 64, j_max: int = 6, catalog=None) -> SuiteReport:
    """Scaling of row-9 counts: ``N~(row 9 of C_{2^j(2n-1)}) = 3**j N~(row 9 of C_{2n-1})``."""
    cat = _cat(catalog)
    rep = SuiteReport("lemma", {"n_max": n_max, "j_max": j_max})
    for n in range(1, n_max + 1):
        for j in range(j_max + 1):
            left, right = catmod.lemma_sides(n, j, cat)
            rep.check(left == right, "N~(25*5^j*lambda3_n) = 3^j * N~(25*lambda3_n)",
                      n=n, j=j, left=left, right=right)
    return rep


def theorem_suite(l_max: int = 32, m_max: int = 6, n_range=(-3, 3), catalog=None) -> SuiteReport:
    """Exact Weyl identities at interior probes of every scaled ``A_l`` and ``A'_l``."""
    cat = _cat(catalog)
    rep = SuiteReport("theorem", {"l_max": l_max, "m_max": m_max, "n_range": list(n_range)})
    g1_seen = set()
    for ell in range(1, l_max + 1):
        for base in weyl.base_intervals(ell, cat):
            for n in range(n_range[0], n_range[1] + 1):
                iv = base.scaled(n)
                for t in iv.probes():
                    loc = weyl.locate(t, catalog=cat)
                    where = dict(t=t, kind=iv.kind, ell=ell, n=n)
                    found = loc.interval
                    if not rep.check(
                        found is not None and (found.kind, found.ell, found.scale_n) == (iv.kind, ell, n),
                        "locate recovers (kind, l, n)", found=loc.membership, **where,
                    ):
                        continue
                    report = weyl.verify_theorem(t, m_max, catalog=cat)
                    for c in report.checks:
                        g1_seen.add(c.g1)
                        rep.check(c.n_tilde == c.expected_tilde, "N~(5^m t) = 3^(m+n) g",
                                  m=c.m, got=c.n_tilde, expected=c.expected_tilde, **where)
                        rep.check(c.n_neumann - c.weyl_term == c.g1, "N_N(5^m t) = G t^a 3^m + G1",
                                  m=c.m, n_neumann=c.n_neumann, weyl_term=str(c.weyl_term), **where)
                        rep.check(c.n_dirichlet - c.weyl_term == -c.g1, "N_D(5^m t) = G t^a 3^m - G1",
                                  m=c.m, n_dirichlet=c.n_dirichlet, weyl_term=str(c.weyl_term), **where)
    rep.check(g1_seen <= {Fraction(0), Fraction(3, 2)}, "G1 takes values in {0, 3/2}",
              seen=sorted(str(v) for v in g1_seen))
    rep.info["g1_values"] = sorted(str(v) for v in g1_seen)
    return rep


def table_suite(k_max: int = 64, anchor_j_max: int = 4, catalog=None) -> SuiteReport:
    """Cycle bookkeeping, induction steps, and the counting anchors."""
    cat = _cat(catalog)
    rep = SuiteReport("table", {"k_max": k_max, "anchor_j_max": anchor_j_max})
    arr = cat.arrays(k_max)
    for k in range(1, k_max + 1):
        sl = slice(1 + (k - 1) * catmod.ROWS_PER_CYCLE, 1 + k * catmod.ROWS_PER_CYCLE)
        n_, d_, t_ = arr["mult_N"][sl], arr["mult_D"][sl], arr["mult_tilde"][sl]
        rep.check(bool(np.all(t_ == n_ + d_)), "M~ = M_N + M_D", k=k)
        profile = cat.difference_profile(k)
        rep.check(profile == catmod.DIFFERENCE_PROFILE, "difference profile", k=k, got=list(profile))
        rep.check(all(0 <= x <= 3 for x in profile), "0 <= N_N - N_D <= 3", k=k)
        rep.check(int(t_.sum()) == catmod.cycle_mass(k) == 15 + 5 * 3 ** (catmod.decompose(k).j + 1),
                  "cycle mass = 15 + 5*3^(j+1)", k=k, got=int(t_.sum()))
        if k >= 2:
            step = catmod.induction_step(k, cat)
            rep.check(step.passed, "induction step", k=k, left=step.left, right=step.right)
    lam = dec.primitive_value(3, 1, cat.psi_tol)
    for j in range(anchor_j_max + 1):
        got = cat.count(5.0 ** (j + 2) * lam).n_tilde
        rep.check(got == 3 ** (j + 3), "N~(5^(j+2) lambda3_1) = 3^(j+3)", j=j, got=got)
    return rep


def julia_suite(depth: int = 25, exhaust_depth: int = 20, corr_l_max: int = 32,
                threshold: Optional[float] = None) -> SuiteReport:
    """Cover measure decay, exhaustion of [0, 5], and the A'' to B correspondence."""
    if threshold is None:
        threshold = jl.measure_bound(depth)
    rep = SuiteReport("julia", {"depth": depth, "exhaust_depth": exhaust_depth,
                                "corr_l_max": corr_l_max, "threshold": threshold})
    measures = jl.cover_measures(depth)
    for m, mu in enumerate(measures):
        rep.check(mu <= jl.measure_bound(m), "cover measure <= 5 (2/sqrt 5)^m", m=m, measure=float(mu))
    rep.check(measures[-1] < threshold, "final cover measure below threshold",
              measure=float(measures[-1]), threshold=threshold)
    for m in range(1, min(depth, exhaust_depth) + 1):
        r = jl.exhaustion_residual(m)
        rep.check(r <= 1e-10, "cover + B lengths = 5", m=m, residual=r)
    for ell in range(1, corr_l_max + 1):
        c = jl.a_double_prime_correspondence(ell)
        rep.check(c.rel_error <= 1e-10, "A''_l corresponds to B", ell=ell, rel_error=c.rel_error)
    rep.info["final_measure"] = float(measures[-1])
    rep.info["max_ratio"] = float(np.max(measures[1:] / measures[:-1])) if depth else None
    return rep


def oracle_suite(level: int = 5, catalog=None) -> SuiteReport:
    """Graph spectra against decimation and the catalog."""
    cat = _cat(catalog)
    rep = SuiteReport("oracle", {"level": level})
    closure = orc.decimation_closure_report(level)
    plain = []
    for lv in closure.levels:
        m = lv.level
        rep.check(not lv.closure_failures, "decimation closure", level=m,
                  offending=[float(x) for x in lv.closure_failures])
        rep.check(lv.n_eigenvalues == lv.n_vertices == 3 ** (m + 1), "eigenvalue count = vertex count",
                  level=m, eigenvalues=lv.n_eigenvalues, vertices=lv.n_vertices)
        rep.check(0 <= lv.min_nd_gap <= lv.max_nd_gap <= 3, "0 <= N_N - N_D <= 3 on graphs",
                  level=m, gaps=[lv.min_nd_gap, lv.max_nd_gap])
        rep.check(lv.union_matches, "double cover = Neumann + Dirichlet spectra", level=m)
        got, want = orc.counting_agreement(m, cat)
        rep.check(got == want, "catalog N~ at top limit = vertex count", level=m, got=got, want=want)
        g = orc.build_gamma(m, orc.DOUBLE)
        sg = orc.build_gamma(m, orc.SG)
        for spec in (lv.spectrum, orc.graph_spectrum(sg, "neumann"), orc.graph_spectrum(sg, "dirichlet")):
            problems = orc.compare_with_catalog(spec, cat)
            rep.check(not problems, "mapped graph spectrum = catalog", level=m,
                      condition=spec.condition, problems=problems[:5])
        rep.check(g.is_connected() and bool(np.all(g.degrees() == 4)), "double cover 4-regular, connected",
                  level=m)
        plain.append({"level": m, "union_matches": lv.plain_union_matches,
                      "nd_gaps": list(lv.plain_nd_gaps)})
    lows = [cat.value(1, 1), cat.value(1, 2)]
    for m in range(3, level + 1):
        spec = closure.levels[m - 1].spectrum
        nonzero = [v for v, _ in spec.groups if v > orc.GROUP_TOL][:2]
        for rank, (mu, target) in enumerate(zip(nonzero, lows), start=1):
            est = orc.fractal_limit_estimate([mu], m)
            rel = abs(est - target) / target
            rep.check(rel <= 1e-5, "graph limit matches low catalog eigenvalue", level=m, rank=rank,
                      estimate=est, catalog=target, rel_error=rel)
    rep.info["plain_neumann"] = plain
    return rep


def run_suite(name: str, **kw) -> list:
    """Run one suite, or all of them for ``name == 'all'``."""
    runners = {
        "lemma": lambda: lemma_suite(kw.get("n_max", 64), kw.get("j_max", 6), kw.get("catalog")),
        "theorem": lambda: theorem_suite(kw.get("l_max", 32), kw.get("m_max", 6),
                                         catalog=kw.get("catalog")),
        "table": lambda: table_suite(kw.get("k_max", 64), catalog=kw.get("catalog")),
        "julia": lambda: julia_suite(kw.get("depth", 25)),
        "oracle": lambda: oracle_suite(kw.get("level", 5), kw.get("catalog")),
    }
    if name == "all":
        return [runners[s]() for s in SUITES]
    if name not in runners:
        raise ValueError(f"unknown suite {name!r}")
    return [runners[name]()]
