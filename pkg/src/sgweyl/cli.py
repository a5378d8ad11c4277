"""Command-line front end: ``sgweyl {eigs,count,verify,weyl,julia,oracle}``.

Tables go to stdout, or to ``<output-dir>/<name>.csv|json`` when an output
directory is set. Floats are written with 17 significant digits, so output
is byte-identical across runs with the same configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Optional

from . import __version__
from . import catalog as catmod
from . import decimation as dec
from . import julia as jl
from . import oracle as orc
from . import verify as ver
from . import weyl
from .errors import SGWeylError

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    psi_tol: float = dec.PSI_TOL
    group_tol: float = orc.GROUP_TOL
    compare_rtol: float = catmod.COMPARE_RTOL
    ell_max: int = weyl.ELL_MAX
    k_max: int = catmod.DEFAULT_K_MAX
    cover_depth: int = 25
    oracle_level: int = 5
    output_dir: Optional[str] = None
    format: str = "csv"

    def validate(self) -> "RunConfig":
        for name in ("psi_tol", "group_tol", "compare_rtol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 1 <= self.ell_max <= 1 << 20:
            raise ValueError("ell_max out of range")
        if not 1 <= self.k_max <= catmod.DEFAULT_K_MAX:
            raise ValueError(f"k_max must lie in 1..{catmod.DEFAULT_K_MAX}")
        if not 0 <= self.cover_depth <= jl.COVER_CAP:
            raise ValueError(f"cover_depth must lie in 0..{jl.COVER_CAP}")
        if not 1 <= self.oracle_level <= orc.MAX_LEVEL:
            raise ValueError(f"oracle_level must lie in 1..{orc.MAX_LEVEL}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        return self

    @classmethod
    def load(cls, path: Optional[str]) -> "RunConfig":
        if not path:
            return cls()
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def override(self, args: argparse.Namespace) -> "RunConfig":
        changes = {f.name: getattr(args, f.name) for f in fields(self)
                   if getattr(args, f.name, None) is not None}
        return replace(self, **changes).validate()

    def catalog(self) -> catmod.SpectralCatalog:
        return catmod.SpectralCatalog(self.k_max, self.compare_rtol, self.psi_tol)


# -- formatting -------------------------------------------------------------


def fmt_float(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return "%.17g" % x


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if v is None:
        return ""
    return str(v)


def to_json(obj) -> str:
    """JSON with floats at 17 significant digits and NaN as null."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return "null" if not math.isfinite(obj) else fmt_float(obj)
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return to_json(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render(header: list, rows: list, fmt: str) -> str:
    if fmt == "json":
        return "[\n" + ",\n".join("  " + to_json(dict(zip(header, r))) for r in rows) + "\n]\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([_cell(v) for v in r] for r in rows)
    return buf.getvalue()


def emit(text: str, name: str, cfg: RunConfig, stdout) -> None:
    if cfg.output_dir:
        os.makedirs(cfg.output_dir, exist_ok=True)
        path = os.path.join(cfg.output_dir, f"{name}.{cfg.format}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


CATALOG_HEADER = ["value", "cycle", "row", "mult_N", "mult_D", "mult_tilde", "label"]


def catalog_rows(lines) -> list:
    return [(ln.value, ln.cycle, ln.row, ln.mult_N, ln.mult_D, ln.mult_tilde, str(ln.label))
            for ln in lines]


# -- subcommands ------------------------------------------------------------


def cmd_eigs(args, cfg: RunConfig, out) -> int:
    if args.cycles is not None:
        cat = cfg.catalog()
        emit(render(CATALOG_HEADER, catalog_rows(cat.spectrum(args.cycles)), cfg.format),
             "catalog", cfg, out)
        return 0
    if args.count is None:
        raise ValueError("eigs needs --cycles or --count")
    families = dec.GENERATORS if args.all_families else (args.family,)
    if families == (None,):
        raise ValueError("eigs needs --family or --all-families")
    rows = []
    for p in families:
        for e in dec.primitive_list(p, args.count, cfg.psi_tol):
            rows.append((e.p, e.n, str(e.word) or "()", e.value))
    emit(render(["family", "rank", "word", "value"], rows, cfg.format), "eigs", cfg, out)
    return 0


def _parse_address(text: str) -> tuple:
    try:
        p, n = (int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"--at-eigenvalue expects p,n, got {text!r}") from None
    return p, n


def cmd_count(args, cfg: RunConfig, out) -> int:
    if args.at_eigenvalue:
        p, n = _parse_address(args.at_eigenvalue)
        t = 5.0 ** args.power * dec.primitive_value(p, n, cfg.psi_tol)
    elif args.t is not None:
        t = args.t
    else:
        raise ValueError("count needs t or --at-eigenvalue")
    c = cfg.catalog().count(t)
    header = ["t", "n_neumann", "n_dirichlet", "n_tilde", "at_eigenvalue"]
    emit(render(header, [(c.t, c.n_neumann, c.n_dirichlet, c.n_tilde, c.at_eigenvalue)], cfg.format),
         "count", cfg, out)
    return 0


def cmd_verify(args, cfg: RunConfig, out) -> int:
    cat = cfg.catalog()
    reports = ver.run_suite(
        args.suite, n_max=args.n_max, j_max=args.j_max, l_max=args.l_max, m_max=args.m_max,
        k_max=args.table_k_max, depth=cfg.cover_depth, level=cfg.oracle_level, catalog=cat,
    )
    doc = {"version": __version__, "passed": all(r.passed for r in reports),
           "suites": [r.as_dict() for r in reports]}
    emit(to_json(doc) + "\n", f"verify-{args.suite}", replace(cfg, format="json"), out)
    return 0 if doc["passed"] else 1


def cmd_weyl(args, cfg: RunConfig, out) -> int:
    samples = weyl.weyl_ratio_scan(args.t_lo, args.t_hi, args.samples, cfg.ell_max, cfg.catalog())
    header = ["t", "weyl_ratio_tilde", "ratio_N", "ratio_D", "membership", "G", "G1"]
    rows = [(s.t, s.weyl_ratio, s.ratio_N, s.ratio_D, s.membership, s.g_value,
             None if s.g1_value is None else str(s.g1_value)) for s in samples]
    emit(render(header, rows, cfg.format), "weyl", cfg, out)
    return 0


def cmd_julia(args, cfg: RunConfig, out) -> int:
    depth = cfg.cover_depth
    if args.measures:
        ms = jl.cover_measures(depth)
        rows = [(m, float(mu), jl.measure_bound(m)) for m, mu in enumerate(ms)]
        emit(render(["depth", "measure", "bound"], rows, cfg.format), "measures", cfg, out)
        return 0
    if depth > jl.LIST_CAP:
        raise ValueError(f"listing is capped at depth {jl.LIST_CAP}; use --measures beyond that")
    rows = [(depth, str(iv.word) or "()", iv.lo, iv.hi, iv.length) for iv in jl.cover(depth)]
    emit(render(["depth", "word", "lo", "hi", "length"], rows, cfg.format), "cover", cfg, out)
    return 0


def cmd_oracle(args, cfg: RunConfig, out) -> int:
    rows = []
    for cond in args.condition:
        for m in range(1, cfg.oracle_level + 1):
            rows.extend(orc.spectrum_rows(m, cond, cfg.group_tol))
    header = ["level", "space", "condition", "eigenvalue", "multiplicity", "closure_status"]
    emit(render(header, rows, cfg.format), "oracle", cfg, out)
    failed = any(r[5] == "FAIL" for r in rows)
    return 1 if failed else 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--psi-tol", dest="psi_tol", type=float)
    common.add_argument("--group-tol", dest="group_tol", type=float)
    common.add_argument("--compare-rtol", dest="compare_rtol", type=float)
    common.add_argument("--ell-max", dest="ell_max", type=int)
    common.add_argument("--k-max", dest="k_max", type=int, help="catalog cycle cap")
    common.add_argument("--depth", dest="cover_depth", type=int, help="cover depth")
    common.add_argument("--level", dest="oracle_level", type=int, help="highest oracle graph level")

    ap = argparse.ArgumentParser(prog="sgweyl", description="Spectra and exact Weyl counts on the gasket.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigs", parents=[common], help="primitive families or catalog lines")
    p.add_argument("--family", type=int, choices=dec.GENERATORS)
    p.add_argument("--all-families", action="store_true")
    p.add_argument("--count", type=int)
    p.add_argument("--cycles", type=int, help="zero line plus this many cycles")
    p.set_defaults(func=cmd_eigs)

    p = sub.add_parser("count", parents=[common], help="counting functions at t")
    p.add_argument("t", type=float, nargs="?")
    p.add_argument("--at-eigenvalue", metavar="P,N", help="t = 5**power * lambda^(P)_N")
    p.add_argument("--power", type=int, default=0)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=ver.SUITES + ("all",))
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--j-max", type=int, default=6)
    p.add_argument("--l-max", type=int, default=32)
    p.add_argument("--m-max", type=int, default=6)
    p.add_argument("--table-k-max", type=int, default=64, help="cycles checked by the table suite")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("weyl", parents=[common], help="Weyl ratio plot data")
    p.add_argument("--t-lo", type=float, default=1.0)
    p.add_argument("--t-hi", type=float, default=5.0 ** 6)
    p.add_argument("--samples", type=int, default=512)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("julia", parents=[common], help="cover intervals or measures")
    p.add_argument("--measures", action="store_true", help="measure per depth instead of intervals")
    p.set_defaults(func=cmd_julia)

    p = sub.add_parser("oracle", parents=[common], help="graph spectrum dump")
    p.add_argument("--condition", nargs="+", default=["free"], choices=orc.CONDITIONS)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config).override(args)
        return args.func(args, cfg, stdout)
    except (SGWeylError, ValueError, OSError) as exc:
        print(f"sgweyl: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
