"""Command-line front end.

Exit codes: 0 ok, 2 validation error, 3 I/O error, 4 certified radius falls
short of the proven lower bound.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import domains as dm
from .bounds import equality_flags, evaluate
from .certify import (
    CertifyConfig,
    certify_construction,
    inscribed_radius,
    make_family,
    search_family,
)
from .errors import SqueezeError
from .maps import candidate_embedding

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_MISMATCH = 0, 2, 3, 4
TABLE_MAX = 8
# How far a certified radius may fall below the proven lower bound before exit 4.
MISMATCH_SLACK = 0.02


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return f"{x:.12g}"


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def parse_domain(text: str) -> dm.Domain:
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(f"--domain: cannot read {text[1:]}: {exc}", EXIT_IO) from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"--domain: malformed JSON: {exc}") from None
    try:
        return dm.domain_from_dict(obj)
    except SqueezeError as exc:
        raise CliError(f"--domain: {exc}") from None


def parse_point(text: str, d: dm.Domain) -> np.ndarray:
    """``0`` for the origin, else a JSON list of reals or [re, im] pairs."""
    n = dm.dimension(d)
    if text.strip() == "0":
        return np.zeros(n, dtype=complex)
    try:
        raw = json.loads(text)
        if not isinstance(raw, list):
            raise ValueError("expected a list")
        z = np.array([dm.complex_from_json(c) for c in raw], dtype=complex)
    except (ValueError, SqueezeError) as exc:
        raise CliError(f"--point: {exc}") from None
    if z.shape != (n,):
        raise CliError(f"--point: has {z.size} coordinates, domain dimension is {n}")
    if not dm.contains(d, z):
        raise CliError("--point: point is not inside the domain")
    return z


def config_from_args(args) -> CertifyConfig:
    kwargs = {"rng_seed": args.seed}
    if args.samples is not None:
        kwargs["boundary_samples"] = args.samples
        kwargs["interior_samples"] = max(100, args.samples // 4)
    if args.tol is not None:
        kwargs["bisection_tol"] = args.tol
    try:
        return CertifyConfig(**kwargs)
    except SqueezeError as exc:
        raise CliError(f"certification options: {exc}") from None


def write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(f"--out: cannot write {out}: {exc}", EXIT_IO) from None


def cmd_eval(args) -> int:
    d = parse_domain(args.domain)
    z = parse_point(args.point, d)
    ev = evaluate(d, z)
    report = {"T": ev.T.to_dict(), "S": ev.S.to_dict(), "flags": equality_flags(d, z, ev).to_dict()}
    if args.certify:
        report["certificate"] = certify_construction(d, z, config_from_args(args)).to_dict()
    write_output(dump_json(report) + "\n", args.out)
    return EXIT_OK


def cartan_rows(max_param: int) -> list[dict]:
    if not 1 <= max_param <= TABLE_MAX:
        raise CliError(f"--max must lie in 1..{TABLE_MAX}, got {max_param}")
    domains: list[tuple[str, str, dm.Domain]] = []
    for r in range(1, max_param + 1):
        for s in range(r, max_param + 1):
            domains.append(("I", f"r={r};s={s}", dm.CartanI(r, s)))
    for p in range(1, max_param + 1):
        domains.append(("II", f"p={p}", dm.CartanII(p)))
    for q in range(2, max_param + 1):
        domains.append(("III", f"q={q}", dm.CartanIII(q)))
    # Type IV needs n >= 2 so that its two coordinate directions exist.
    for n in range(2, max_param + 1):
        domains.append(("IV", f"n={n}", dm.CartanIV(n)))
    rows = []
    for kind, params, d in domains:
        n, m = dm.dimension(d), dm.polydisk_direction_count(d)
        rows.append({"type": kind, "params": params, "n": n, "m": m,
                     "lower": 1.0 / (math.sqrt(n) * math.sqrt(m)), "upper": 1.0 / math.sqrt(m)})
    return rows


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else ("" if v is None else v) for v in row])
    return buf.getvalue()


def cmd_table(args) -> int:
    if args.kind != "cartan":
        raise CliError(f"unknown table kind {args.kind!r}")
    rows = cartan_rows(args.max)
    header = ["type", "params", "n", "m", "lower", "upper"]
    write_output(_csv(header, [[r[h] for h in header] for r in rows]), args.out)
    return EXIT_OK


def parse_grid(text: str) -> list[float]:
    """``start:step:stop`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            start, step, stop = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            grid = [round(start + i * step, 12) for i in range(count)]
        else:
            grid = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise CliError(f"--grid: {exc}") from None
    if not grid or not all(0 < g < 1 for g in grid):
        raise CliError("--grid: radii must lie in (0, 1)")
    return grid


def profile_rows(n: int, grid: Sequence[float], cfg: CertifyConfig | None = None) -> list[list]:
    d = dm.Puncture(dm.Ball(n), (tuple([0j] * n),))
    rows = []
    for rho in grid:
        z = np.zeros(n, dtype=complex)
        z[0] = rho
        ev = evaluate(d, z)
        est = None
        if cfg is not None:
            est = inscribed_radius(candidate_embedding(d, z), cfg).radius_estimate
        rows.append([float(np.linalg.norm(z)), ev.T.lower, ev.T.upper, ev.S.lower, est])
    return rows


def cmd_profile(args) -> int:
    if args.n < 1:
        raise CliError("--n must be positive")
    grid = parse_grid(args.grid)
    cfg = config_from_args(args) if args.certify else None
    rows = profile_rows(args.n, grid, cfg)
    header = ["norm", "T_lower", "T_upper", "S_exact", "certified_estimate"]
    write_output(_csv(header, rows), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    d = parse_domain(args.domain)
    z = parse_point(args.point, d)
    cfg = config_from_args(args)
    if args.family:
        rep = search_family(d, z, make_family(args.family, d, z), cfg, budget=args.budget)
    else:
        rep = certify_construction(d, z, cfg)
    write_output(dump_json(rep.to_dict()) + "\n", args.out)
    if rep.radius_estimate < rep.bound_lower - MISMATCH_SLACK:
        print(f"certified radius {rep.radius_estimate:.6g} is below the proven lower bound "
              f"{rep.bound_lower:.6g}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polysqueeze", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, domain=True):
        if domain:
            sp.add_argument("--domain", required=True, help="domain JSON, inline or @file")
            sp.add_argument("--point", default="0", help='"0" or JSON list of reals / [re, im] pairs')
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=None, help="boundary samples per trial radius")
        sp.add_argument("--tol", type=float, default=None, help="bisection tolerance")
        sp.add_argument("--out", default=None, help="output file (default: stdout)")

    ev = sub.add_parser("eval", help="bounds for T and S at a point")
    common(ev)
    ev.add_argument("--certify", action="store_true", help="also run the sampled certificate")
    ev.set_defaults(func=cmd_eval)

    tb = sub.add_parser("table", help="Cartan domain bound table as CSV")
    tb.add_argument("kind", choices=["cartan"])
    tb.add_argument("--max", type=int, default=5, help=f"largest size parameter (<= {TABLE_MAX})")
    tb.add_argument("--out", default=None)
    tb.set_defaults(func=cmd_table)

    pr = sub.add_parser("profile", help="T and S along a ray of the punctured ball, as CSV")
    common(pr, domain=False)
    pr.add_argument("--n", type=int, default=2)
    pr.add_argument("--grid", default="0.1:0.1:0.9")
    pr.add_argument("--certify", action="store_true")
    pr.set_defaults(func=cmd_profile)

    ce = sub.add_parser("certify", help="sampled inscribed-polydisk certificate")
    common(ce)
    ce.add_argument("--family", default=None, help="search a parametric family instead of the fixed construction")
    ce.add_argument("--budget", type=int, default=30)
    ce.set_defaults(func=cmd_certify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SqueezeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
