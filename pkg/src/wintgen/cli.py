"""Command-line interface: ``wintgen eval|classify|verify|family``.

Exit codes: 0 success, 1 a verification suite failed, 2 bad input (parse or
patch-spec error), 3 numeric or domain error at some point.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from . import verify as verify_mod
from .errors import DomainError, ParseError, SpecError
from .geometry import evaluate_point, load_patch, patch_to_dict
from .invariants import (
    DEFAULT_TOL,
    FLAG_NAMES,
    Kind,
    PointClassification,
    classify_point,
    curvature_ellipse,
    curvature_invariants,
)
from .semiparallel import curvature_action_direct
from .vranceanu import FAMILIES, family_patch, family_profile

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3

GRID_INSET = 1e-6

CSV_COLUMNS = ("u", "v", "K", "KN", "KN_signed", "H2", "defect", "circular_residual",
               "semiparallel_norm", "kind", "flags")
CLASSIFY_COLUMNS = ("u", "v", "kind", "flags")


# --------------------------------------------------------------------------
# Reports and serialization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PointReport:
    u: float
    v: float
    K: float
    KN: float
    KN_signed: Optional[float]
    H2: float
    defect: float
    circular_residual: float
    semiparallel_norm: float
    flags: PointClassification

    @property
    def kind(self) -> Kind:
        return self.flags.kind

    def to_dict(self) -> dict:
        c = self.flags
        return {
            "u": self.u, "v": self.v, "K": self.K, "KN": self.KN,
            "KN_signed": self.KN_signed, "H2": self.H2, "defect": self.defect,
            "circular_residual": self.circular_residual,
            "semiparallel_norm": self.semiparallel_norm,
            "kind": c.kind.value,
            "flags": c.flags,
            "h2_equals_3k": c.h2_equals_3k,
            "circular": c.extras.get("circular"),
            "tol": c.tol_used,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PointReport":
        flags = PointClassification(
            **{name: bool(d["flags"][name]) for name in FLAG_NAMES},
            kind=Kind(d["kind"]),
            tol_used=float(d["tol"]),
            h2_equals_3k=d.get("h2_equals_3k"),
            extras={"circular": d.get("circular")},
        )
        ks = d.get("KN_signed")
        return cls(
            u=float(d["u"]), v=float(d["v"]), K=float(d["K"]), KN=float(d["KN"]),
            KN_signed=None if ks is None else float(ks), H2=float(d["H2"]),
            defect=float(d["defect"]), circular_residual=float(d["circular_residual"]),
            semiparallel_norm=float(d["semiparallel_norm"]), flags=flags,
        )

    def csv_row(self, classify_only=False) -> list:
        names = "|".join(self.flags.set_flags())
        if classify_only:
            return [fmt_float(self.u), fmt_float(self.v), self.kind.value, names]
        ks = "" if self.KN_signed is None else fmt_float(self.KN_signed)
        return [fmt_float(x) for x in (self.u, self.v, self.K, self.KN)] + [ks] + [
            fmt_float(x) for x in (self.H2, self.defect, self.circular_residual,
                                   self.semiparallel_norm)
        ] + [self.kind.value, names]


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: insertion-ordered keys, floats to 17 significant digits.

    Non-finite floats are written as null.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return {None: "null", True: "true", False: "false"}[obj]
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_output(text: str, path: Optional[str]) -> None:
    """Write to ``path`` atomically (temp file + rename), or to stdout."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wintgen-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

def report_point(patch, u: float, v: float, tol: float = DEFAULT_TOL) -> PointReport:
    sff = evaluate_point(patch, u, v).sff
    inv = curvature_invariants(sff)
    res = curvature_action_direct(sff, inv.K)
    ell = curvature_ellipse(sff)
    return PointReport(
        u=float(u), v=float(v), K=inv.K, KN=inv.KN, KN_signed=inv.KN_signed, H2=inv.H2,
        defect=inv.defect, circular_residual=ell.circular_residual,
        semiparallel_norm=res.norm, flags=classify_point(sff, res, tol),
    )


def grid_points(domain, nu: int, nv: int) -> list:
    """Row-major (u outer, v inner) grid with endpoints inset by 1e-6 of the span."""
    def axis(lo, hi, k):
        du = GRID_INSET * (hi - lo)
        a, b = lo + du, hi - du
        if k == 1:
            return [0.5 * (lo + hi)]
        return [a + (b - a) * i / (k - 1) for i in range(k)]

    u0, u1, v0, v1 = domain
    return [(u, v) for u in axis(u0, u1, nu) for v in axis(v0, v1, nv)]


def _eval_chunk(args):
    patch, points, tol = args
    out = []
    for u, v in points:
        try:
            out.append(report_point(patch, u, v, tol))
        except DomainError as exc:
            # exceptions are returned, not raised, so they pickle cleanly
            out.append(("domain", u, v, str(exc)))
            break
    return out


def evaluate_grid(patch, points, tol=DEFAULT_TOL, workers: int = 1) -> list:
    """Reports in input order; raises DomainError naming the first bad point."""
    if workers <= 1 or len(points) < 2:
        chunks = [_eval_chunk((patch, points, tol))]
    else:
        size = max(1, math.ceil(len(points) / (4 * workers)))
        jobs = [(patch, points[i:i + size], tol) for i in range(0, len(points), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_eval_chunk, jobs))
    reports = []
    for chunk in chunks:
        for item in chunk:
            if isinstance(item, tuple):
                _, u, v, msg = item
                raise DomainError(f"at (u, v) = ({u!r}, {v!r}): {msg}")
            reports.append(item)
    return reports


def render_reports(reports, fmt: str, classify_only: bool = False) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CLASSIFY_COLUMNS if classify_only else CSV_COLUMNS)
        for r in reports:
            w.writerow(r.csv_row(classify_only))
        return buf.getvalue()
    if classify_only:
        rows = [{"u": r.u, "v": r.v, "kind": r.kind.value, "flags": r.flags.flags}
                for r in reports]
    else:
        rows = [r.to_dict() for r in reports]
    return dumps(rows) + "\n"


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------

class InputError(Exception):
    """Bad command-line value; exit code 2."""


def _pair(text, sep, conv, what):
    parts = text.replace(" ", "").split(sep)
    if len(parts) != 2:
        raise InputError(f"{what} must look like A{sep}B, got {text!r}")
    try:
        return conv(parts[0]), conv(parts[1])
    except ValueError:
        raise InputError(f"invalid {what} {text!r}") from None


def parse_grid(text):
    nu, nv = _pair(text.lower(), "x", int, "--grid")
    if nu < 1 or nv < 1:
        raise InputError("grid resolutions must be >= 1")
    return nu, nv


def parse_point(text):
    return _pair(text, ",", float, "--at")


def _positive(text):
    x = float(text)
    if not x > 0 or not math.isfinite(x):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return x


def _nonneg_int(text):
    k = int(text)
    if k < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wintgen", description=(
        "Curvature invariants, Wintgen ideal and semiparallel tests for surfaces in E^n."))
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("--patch", help="patch spec JSON file")
        sp.add_argument("--family", choices=sorted(FAMILIES), help="generated rotation-surface family")
        sp.add_argument("--c1", type=float, default=None)
        sp.add_argument("--c2", type=float, default=None)
        sp.add_argument("--grid", default="16x16", help="NUxNV grid resolution (default 16x16)")
        sp.add_argument("--at", help="single point U,V (overrides --grid)")
        sp.add_argument("--tol", type=_positive, default=DEFAULT_TOL)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--workers", type=int, default=1)

    source(sub.add_parser("eval", help="evaluate invariants on a grid or at a point"))
    source(sub.add_parser("classify", help="like eval, but only kind and flags"))

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=verify_mod.SUITE_NAMES + ("all",))
    v.add_argument("--seed", type=_nonneg_int, default=0)
    v.add_argument("--count", type=int, default=None, help="cases for randomized suites")
    v.add_argument("--out", help="write the JSON summary here (default stdout)")

    f = sub.add_parser("family", help="write a patch spec for a generated family")
    f.add_argument("name", nargs="?", choices=sorted(FAMILIES))
    f.add_argument("--family", choices=sorted(FAMILIES), dest="family_opt")
    f.add_argument("--c1", type=float, required=True)
    f.add_argument("--c2", type=float, required=True)
    f.add_argument("--out", help="output file (default stdout)")
    return p


def _load_source(args):
    if bool(args.patch) == bool(args.family):
        raise InputError("give exactly one of --patch or --family")
    if args.patch:
        return load_patch(args.patch)
    if args.c1 is None or args.c2 is None:
        raise InputError("--family needs --c1 and --c2")
    return family_patch(args.family, args.c1, args.c2)


def cmd_eval(args, classify_only=False) -> int:
    patch = _load_source(args)
    if args.at:
        points = [parse_point(args.at)]
    else:
        points = grid_points(patch.domain, *parse_grid(args.grid))
    reports = evaluate_grid(patch, points, args.tol, max(1, args.workers))
    write_output(render_reports(reports, args.format, classify_only), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.count is not None and args.count < 1:
        raise InputError("--count must be >= 1")
    results = verify_mod.run(args.suite, seed=args.seed, count=args.count)
    summary = {"seed": args.seed, "suite": args.suite,
               "passed": all(r.passed for r in results),
               "suites": [r.as_dict() for r in results]}
    write_output(dumps(summary) + "\n", args.out)
    for r in results:
        for c in r.checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"{status} {r.name}/{c.name}: {c.count - c.failures}/{c.count} ok, "
                  f"worst {c.worst:.3e} ({c.sense} {c.threshold:g})", file=sys.stderr)
    return EXIT_OK if summary["passed"] else EXIT_VERIFY


def cmd_family(args) -> int:
    name = args.name or args.family_opt
    if name is None:
        raise InputError("family name required")
    fam = family_profile(name, args.c1, args.c2)
    patch = family_patch(name, args.c1, args.c2)
    spec = patch_to_dict(patch)
    write_output(dumps(spec) + "\n", args.out)
    v0, v1 = patch.domain[2:]
    msg = f"r = {fam.text}, v in ({fmt_float(v0)}, {fmt_float(v1)})"
    print(msg, file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "classify":
            return cmd_eval(args, classify_only=True)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_family(args)
    except (InputError, ParseError, SpecError) as exc:
        print(f"wintgen: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"wintgen: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
