"""Command-line entry point.

Exit status: 0 on success, 1 for invalid input or arguments, 2 when a
certificate fails or window growth does not terminate.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .complex_io import load_complex
from .config_engine import (
    Configuration,
    char_poly,
    configuration,
    max_periods_from_env,
    module_refinement,
)
from .cyclic_cover import NovikovHomology
from .errors import (
    AnglePersistError,
    CertificateError,
    ComplexValidationError,
    InstabilityError,
    NonTerminationError,
)
from .exact_algebra import Field, LaurentMatrix, LaurentPoly
from .hilbert import PointwiseProjector, orthogonality_report, vn_dimension
from .oracle import oracle_delta

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- serialization -----------------------------------------------------------

def rational(x) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def scalar_json(field: Field, v):
    return rational(v) if field.is_rational else int(v)


def poly_json(p: LaurentPoly) -> dict:
    return {
        "terms": [{"exp": e, "coeff": scalar_json(p.field, v)} for e, v in p.items()],
        "text": str(p),
    }


def matrix_json(M: LaurentMatrix) -> list:
    return [[poly_json(e) for e in row] for row in M.entries]


def complex_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def config_json(cfg: Configuration) -> dict:
    return {
        "r": cfg.r,
        "betti": cfg.betti,
        "certificate": {"window": list(cfg.window), "total": cfg.total, "betti": cfg.betti},
        "points": [
            {"a": rational(p.a), "b": rational(p.b), "multiplicity": p.multiplicity, "z": complex_json(p.z)}
            for p in cfg.points
        ],
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit_csv(cfgs: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "a_num", "a_den", "b_num", "b_den", "mult", "re_z", "im_z"])
    for cfg in cfgs:
        for p in cfg.points:
            z = p.z
            w.writerow([cfg.r, p.a.numerator, p.a.denominator, p.b.numerator, p.b.denominator,
                        p.multiplicity, repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def emit_svg(cfgs: list, size: int = 400) -> str:
    """Log-polar picture: angle ``2 pi a``, radial offset from the unit circle proportional to ``b - a``."""
    c = size / 2
    unit = size / 4
    spread = max([1] + [abs(float(p.b - p.a)) for cfg in cfgs for p in cfg.points])
    scale = (size * 0.45 - unit) / spread
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="0" y1="{c:g}" x2="{size}" y2="{c:g}" stroke="#999" stroke-width="1"/>',
        f'<line x1="{c:g}" y1="0" x2="{c:g}" y2="{size}" stroke="#999" stroke-width="1"/>',
        f'<circle cx="{c:g}" cy="{c:g}" r="{unit:g}" fill="none" stroke="#333" stroke-width="1"/>',
    ]
    for k, cfg in enumerate(cfgs):
        color = _COLORS[k % len(_COLORS)]
        for p in cfg.points:
            rad = unit + scale * float(p.b - p.a)
            ang = 2 * math.pi * float(p.a)
            x, y = c + rad * math.cos(ang), c - rad * math.sin(ang)
            m = 4 * math.sqrt(p.multiplicity)
            out.append(
                f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{m:.3f}" fill="{color}" '
                f'data-r="{cfg.r}" data-a="{p.a}" data-b="{p.b}" data-mult="{p.multiplicity}"/>'
            )
        out.append(f'<text x="8" y="{16 + 14 * k}" font-size="12" fill="{color}">r = {cfg.r}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit(results, fmt: str) -> bytes:
    """Serialize command results; ``csv`` and ``svg`` take a list of configurations."""
    if fmt == "json":
        return dumps(results).encode("utf-8")
    if fmt == "csv":
        return emit_csv(results).encode("utf-8")
    if fmt == "svg":
        return emit_svg(results).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


# -- commands ----------------------------------------------------------------

def _degrees(spec: str, dim: int) -> list:
    if spec in (None, "all"):
        return list(range(dim + 1))
    try:
        degs = sorted({int(x) for x in spec.split(",") if x.strip()})
    except ValueError:
        raise UsageError(f"bad degree list {spec!r}") from None
    for r in degs:
        if not 0 <= r <= dim:
            raise UsageError(f"degree {r} outside 0..{dim}")
    return degs


def _configs(args, c, field):
    return [configuration(c, r, field, max_periods=args.max_periods) for r in _degrees(args.deg, c.dim)]


def cmd_validate(args, c, field):
    counts = {str(q): c.n_cells(q) for q in range(c.dim + 1)}
    return {"valid": True, "dim": c.dim, "cells": counts, "euler_characteristic": c.euler_characteristic()}


def cmd_betti(args, c, field):
    out = []
    for r in _degrees(args.deg, c.dim):
        inv = NovikovHomology(c, r, field).invariants
        out.append({
            "r": r,
            "free_rank": inv.free_rank,
            "invariant_factors": [poly_json(p) for p in inv.invariant_factors],
            "torsion_dim": inv.torsion_dim,
        })
    return {"field": field.spec(), "degrees": out}


def cmd_config(args, c, field):
    cfgs = _configs(args, c, field)
    if args.format in ("csv", "svg"):
        return cfgs
    return {"field": field.spec(), "degrees": [config_json(cfg) for cfg in cfgs]}


def cmd_poly(args, c, field):
    out = []
    for cfg in _configs(args, c, field):
        out.append({"r": cfg.r, "coefficients": [complex_json(z) for z in char_poly(cfg)]})
    return {"field": field.spec(), "order": "ascending", "degrees": out}


def _refinements(args, c, field):
    out = []
    for cfg in _configs(args, c, field):
        out.append((cfg, module_refinement(c, cfg.r, field, cfg)))
    return out


def cmd_modules(args, c, field):
    degrees = []
    for cfg, M in _refinements(args, c, field):
        degrees.append({
            "r": M.r,
            "basis_dim": M.basis_dim,
            "direct_sum": M.direct_sum,
            "rank_sum": M.rank_sum,
            "entries": [
                {
                    "a": rational(e.point.a),
                    "b": rational(e.point.b),
                    "multiplicity": e.point.multiplicity,
                    "L_gens": matrix_json(e.L_gens),
                    "Lprime_gens": matrix_json(e.Lprime_gens),
                    "L_split": e.L_split,
                    "Lprime_split": e.Lprime_split,
                    "quotient_rank": e.quotient_rank,
                }
                for e in M.entries
            ],
        })
    return {"field": field.spec(), "degrees": degrees}


def cmd_hilbert(args, c, field):
    if not field.is_rational:
        raise UsageError("hilbert needs --field q")
    degrees = []
    for cfg, M in _refinements(args, c, field):
        entries = []
        pairs = []
        for e in M.entries:
            P = PointwiseProjector(e.L_gens, e.Lprime_gens)
            vn = vn_dimension(P, args.grid)
            single = orthogonality_report([(e.L_gens, e.Lprime_gens)], args.grid)
            entries.append({
                "a": rational(e.point.a),
                "b": rational(e.point.b),
                "multiplicity": e.point.multiplicity,
                "vn_dimension": vn.value,
                "reliable": vn.reliable,
                "idempotence": single.idempotence,
                "self_adjointness": single.self_adjointness,
            })
            pairs.append((e.L_gens, e.Lprime_gens))
        report = orthogonality_report(pairs, args.grid).as_dict() if pairs else None
        degrees.append({"r": M.r, "basis_dim": M.basis_dim, "entries": entries, "report": report})
    return {"field": field.spec(), "grid": args.grid, "degrees": degrees}


class OracleMismatch(AnglePersistError):
    pass


def cmd_oracle_check(args, c, field):
    windows = tuple(int(x) for x in args.windows.split(","))
    out, ok = [], True
    for cfg in _configs(args, c, field):
        rep = oracle_delta(c, cfg.r, windows, field)
        engine = cfg.as_multiset()
        agree = (not rep.diverged) and rep.stabilized == engine
        ok &= agree
        out.append({
            "r": cfg.r,
            "agree": agree,
            "diverged": rep.diverged,
            "engine": [{"a": rational(a), "b": rational(b), "multiplicity": m} for (a, b), m in sorted(engine.items())],
            "oracle": None if rep.stabilized is None else [
                {"a": rational(a), "b": rational(b), "multiplicity": m} for (a, b), m in sorted(rep.stabilized.items())
            ],
        })
    result = {"field": field.spec(), "windows": list(windows), "degrees": out}
    if not ok:
        raise OracleMismatch(dumps(result))
    return result


def cmd_plot(args, c, field):
    args.format = "svg"
    return _configs(args, c, field)


COMMANDS = {
    "validate": cmd_validate,
    "betti": cmd_betti,
    "config": cmd_config,
    "poly": cmd_poly,
    "modules": cmd_modules,
    "hilbert": cmd_hilbert,
    "oracle-check": cmd_oracle_check,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("input", help="complex JSON file")
    common.add_argument("--field", default="fp:2", help="q or fp:PRIME (default fp:2)")
    common.add_argument("--deg", default="all", help="comma-separated degrees or 'all'")
    common.add_argument("--max-periods", type=int, default=None,
                        help="window cap in periods (default from ANGLE_PERSIST_MAX_PERIODS or 64)")
    common.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    common.add_argument("-o", "--output", help="write here instead of stdout")
    parser = _Parser(prog="angle-persist", description="Novikov refinements of a circle-valued map.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "hilbert":
            p.add_argument("--grid", type=int, default=256, help="quadrature nodes (>= 16)")
        if name == "oracle-check":
            p.add_argument("--windows", default="3,4,5", help="oracle window sizes")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        field = Field.parse(args.field)
        if args.max_periods is None:
            args.max_periods = max_periods_from_env()
        if args.max_periods < 4:
            raise UsageError("--max-periods must be at least 4")
        if getattr(args, "grid", 16) < 16:
            raise UsageError("--grid must be at least 16")
        if args.format == "csv" and args.command != "config":
            raise UsageError("csv output is available for 'config' only")
        if args.format == "svg" and args.command not in ("config", "plot"):
            raise UsageError("svg output is available for 'config' and 'plot' only")
        c = load_complex(Path(args.input))
        result = COMMANDS[args.command](args, c, field)
        data = emit(result, args.format)
    except (UsageError, ComplexValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except (CertificateError, NonTerminationError, InstabilityError, OracleMismatch) as exc:
        print(f"failed: {exc}", file=stderr)
        return EXIT_FAILED
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        stdout.write(data.decode("utf-8"))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
