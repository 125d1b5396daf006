"""Command line front end.

    knotpot [global options] {complete,fill,scan,trace,selftest} [...]

Global options pick the potential (--spec builtin:5_2 or a spec file),
the output format (table, json, csv) and destination, and tolerances.
Exit codes: 0 success, 1 usage or I/O, 2 complete-structure failure,
3 path obstruction (possibly exceptional slope), 4 selftest failure.

All numeric output is printed with 15 significant digits; scans are
byte-deterministic so repeated runs can be diffed.
"""

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from typing import Optional

from .errors import (
    KnotpotError,
    NoConvergenceError,
    NoGeometricRootError,
    PathObstructionError,
    SpecFormatError,
    ValidationError,
    ZeroDenominatorError,
)
from .invariants import im_v_alpha_parts, report_for, rogers_combo, volume_from_shapes
from .potential import (
    BUILTINS,
    eval_eta,
    eval_v,
    make_point,
    reduced_residual,
    shapes_from_point,
)
from . import selftest as selftest_mod
from .solver import normalize_slope, solve_complete, solve_filling, trace_deformation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPLETE_FAILED = 2
EXIT_OBSTRUCTION = 3
EXIT_SELFTEST = 4

CSV_HEADER = "p,q,r,s,converged,volume,cs_mod_half,length,torsion,residual,steps"


@dataclass
class RunConfig:
    spec_source: str
    command: str
    fmt: str
    output: Optional[str]
    newton_tol: float
    accept_tol: float
    slope: Optional[str] = None
    pmax: int = 8
    qmax: int = 1
    u_end: Optional[str] = None
    samples: int = 8


def _f(x: float) -> str:
    return format(float(x), ".15g")


def _jn(x) -> float:
    # JSON numbers carry 15 significant digits, like the text formats
    return float(format(float(x), ".15g"))


def _jc(z: complex) -> dict:
    return {"re": _jn(z.real), "im": _jn(z.imag)}


def _fc(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return "%s%s%si" % (_f(z.real), sign, _f(abs(z.imag)))


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def build_parser() -> _Parser:
    p = _Parser(prog="knotpot", description=__doc__.splitlines()[0])
    p.add_argument("--spec", default="builtin:5_2", help="builtin:NAME or spec file path")
    p.add_argument("--format", dest="fmt", choices=("table", "json", "csv"), default="table")
    p.add_argument("--output", default=None, help="write to file instead of stdout")
    p.add_argument("--newton-tol", type=float, default=1e-12)
    p.add_argument(
        "--accept-tol",
        type=float,
        default=None,
        help="acceptance residual (default 1e-10, or env KNOTPOT_TOL)",
    )
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("complete", help="solve the complete structure")
    f = sub.add_parser("fill", help="solve one Dehn filling")
    f.add_argument("--slope", required=True, help='p/q, or an integer p for q=1')
    s = sub.add_parser("scan", help="solve all slopes |p| <= pmax, q <= qmax")
    s.add_argument("--pmax", type=int, default=8)
    s.add_argument("--qmax", type=int, default=1)
    t = sub.add_parser("trace", help="trace the deformation space in u = log xi^2")
    t.add_argument("--u-end", dest="u_end", required=True, help="complex, e.g. 0.1i")
    t.add_argument("--samples", type=int, default=8)
    sub.add_parser("selftest", help="run the built-in identity suites")
    return p


def _emit(cfg: RunConfig, text: str):
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_spec(cfg: RunConfig):
    src = cfg.spec_source
    if src.startswith("builtin:"):
        name = src[len("builtin:"):]
        if name not in BUILTINS:
            raise SpecFormatError(
                "unknown builtin %r (have: %s)" % (name, ", ".join(sorted(BUILTINS)))
            )
        return BUILTINS[name]()
    from .potential import load_spec

    with open(src, "rb") as fh:
        return load_spec(fh)


_SLOPE_RE = re.compile(r"^([+-]?\d+)(?:/([+-]?\d+))?$")


def parse_slope(text: str):
    m = _SLOPE_RE.match(text.strip())
    if not m:
        raise ValidationError("slope must be an integer or p/q, got %r" % text)
    p = int(m.group(1))
    q = int(m.group(2)) if m.group(2) is not None else 1
    return normalize_slope(p, q)


def parse_u_end(text: str) -> complex:
    try:
        return complex(text.strip().replace("i", "j"))
    except ValueError:
        raise ValidationError("could not parse u-end %r" % text) from None


# ------------------------------------------------------------ commands


def cmd_complete(cfg: RunConfig, spec) -> int:
    try:
        cp = solve_complete(spec, newton_tol=cfg.newton_tol)
    except (NoConvergenceError, NoGeometricRootError) as e:
        print("complete structure failed: %s" % e, file=sys.stderr)
        return EXIT_COMPLETE_FAILED
    pt = cp.point
    sh = shapes_from_point(pt)
    vol = eval_v(spec, pt).imag
    vfs = volume_from_shapes(sh)
    eta, eta_alt = eval_eta(spec, pt)
    resid = max(abs(r) for r in reduced_residual(pt))
    if cfg.fmt == "json":
        doc = {
            "schema": 1,
            **{v: _jc(pt.values[v]) for v in spec.variables},
            "shapes": {
                k: _jc(z)
                for k, z in zip(("c2", "d4", "a5", "b5", "d5"), sh.as_tuple())
            },
            "volume": _jn(vol),
            "volume_from_shapes": _jn(vfs),
            "eta": _jc(eta),
            "residual": _jn(resid),
            "newton_iters": cp.newton_iters,
        }
        _emit(cfg, json.dumps(doc, indent=2) + "\n")
    else:
        lines = ["spec = %s" % spec.name]
        for v in spec.variables:
            lines.append("%s = %s" % (v, _fc(pt.values[v])))
        for k, z in zip(("c2", "d4", "a5", "b5", "d5"), sh.as_tuple()):
            lines.append("shape %s = %s" % (k, _fc(z)))
        lines.append("volume = %s" % _f(vol))
        lines.append("volume_from_shapes = %s" % _f(vfs))
        lines.append("eta = %s" % _fc(eta))
        if eta_alt is not None:
            lines.append("eta_alternate = %s" % _fc(eta_alt))
        lines.append("residual = %s" % _f(resid))
        sep = "," if cfg.fmt == "csv" else " "
        if cfg.fmt == "csv":
            lines = [ln.replace(" = ", ",", 1).replace(" ", "") for ln in lines]
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_fill(cfg: RunConfig, spec) -> int:
    slope = parse_slope(cfg.slope)
    try:
        complete = solve_complete(spec, newton_tol=cfg.newton_tol)
    except (NoConvergenceError, NoGeometricRootError) as e:
        print("complete structure failed: %s" % e, file=sys.stderr)
        return EXIT_COMPLETE_FAILED
    try:
        sol = solve_filling(
            spec, slope, complete=complete,
            accept_tol=cfg.accept_tol, newton_tol=cfg.newton_tol,
        )
    except (PathObstructionError, NoConvergenceError) as e:
        msg = str(e)
        if "possibly exceptional" not in msg:
            msg += " (possibly exceptional slope)"
        print("slope %s: %s" % (slope, msg), file=sys.stderr)
        return EXIT_OBSTRUCTION
    rep = report_for(spec, slope, sol)
    if cfg.fmt == "json":
        doc = {
            "schema": 1,
            "p": slope.p,
            "q": slope.q,
            "r": slope.r,
            "s": slope.s,
            **{v: _jc(sol.critical.point.values[v]) for v in spec.variables},
            "u": _jc(sol.u.value),
            "v": _jc(sol.v.value),
            "volume": _jn(rep.volume),
            "volume_from_shapes": _jn(rep.volume_from_shapes),
            "cs_mod_half": _jn(rep.cs_value),
            "cs_ambiguity": _jn(rep.cs_ambiguity),
            "length": _jn(rep.geodesic_length),
            "torsion": _jn(rep.geodesic_torsion),
            "residual": _jn(sol.critical.residual_inf_norm),
            "filling_residual": _jn(sol.filling_residual),
            "steps": sol.path_steps,
        }
        _emit(cfg, json.dumps(doc, indent=2) + "\n")
    else:
        rows = [
            ("slope", "%d/%d" % (slope.p, slope.q)),
            ("cocycle_rs", "(%d, %d)" % (slope.r, slope.s)),
            ("volume", _f(rep.volume)),
            ("volume_from_shapes", _f(rep.volume_from_shapes)),
            ("cs_mod_half", _f(rep.cs_value)),
            ("length", _f(rep.geodesic_length)),
            ("torsion", _f(rep.geodesic_torsion)),
            ("u", _fc(sol.u.value)),
            ("v", _fc(sol.v.value)),
            ("residual", _f(sol.critical.residual_inf_norm)),
            ("filling_residual", _f(sol.filling_residual)),
            ("steps", str(sol.path_steps)),
        ]
        if cfg.fmt == "csv":
            _emit(cfg, "\n".join("%s,%s" % (k, v.replace(" ", "")) for k, v in rows) + "\n")
        else:
            _emit(cfg, "\n".join("%s = %s" % (k, v) for k, v in rows) + "\n")
    return EXIT_OK


def _scan_slopes(pmax: int, qmax: int):
    for q in range(1, qmax + 1):
        for p in range(-pmax, pmax + 1):
            if math.gcd(p, q) == 1:
                yield normalize_slope(p, q)


def cmd_scan(cfg: RunConfig, spec) -> int:
    if cfg.pmax < 1 or cfg.qmax < 1:
        print("scan bounds must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        complete = solve_complete(spec, newton_tol=cfg.newton_tol)
    except (NoConvergenceError, NoGeometricRootError) as e:
        print("complete structure failed: %s" % e, file=sys.stderr)
        return EXIT_COMPLETE_FAILED
    rows = []
    for slope in _scan_slopes(cfg.pmax, cfg.qmax):
        try:
            sol = solve_filling(
                spec, slope, complete=complete,
                accept_tol=cfg.accept_tol, newton_tol=cfg.newton_tol,
            )
            rep = report_for(spec, slope, sol)
            rows.append(
                {
                    "p": slope.p,
                    "q": slope.q,
                    "r": slope.r,
                    "s": slope.s,
                    "converged": True,
                    "volume": rep.volume,
                    "cs_mod_half": rep.cs_value,
                    "length": rep.geodesic_length,
                    "torsion": rep.geodesic_torsion,
                    "residual": max(
                        sol.critical.residual_inf_norm, sol.filling_residual
                    ),
                    "steps": sol.path_steps,
                }
            )
        except (PathObstructionError, NoConvergenceError):
            rows.append(
                {
                    "p": slope.p,
                    "q": slope.q,
                    "r": slope.r,
                    "s": slope.s,
                    "converged": False,
                }
            )
    if cfg.fmt == "json":
        jrows = []
        for row in rows:
            jr = {k: row[k] for k in ("p", "q", "r", "s", "converged")}
            for k in ("volume", "cs_mod_half", "length", "torsion", "residual"):
                jr[k] = _jn(row[k]) if row["converged"] else None
            jr["steps"] = row["steps"] if row["converged"] else None
            jrows.append(jr)
        _emit(cfg, json.dumps({"schema": 1, "rows": jrows}, indent=2) + "\n")
    else:
        lines = [CSV_HEADER]
        for row in rows:
            if row["converged"]:
                cells = [
                    str(row["p"]),
                    str(row["q"]),
                    str(row["r"]),
                    str(row["s"]),
                    "true",
                    _f(row["volume"]),
                    _f(row["cs_mod_half"]),
                    _f(row["length"]),
                    _f(row["torsion"]),
                    _f(row["residual"]),
                    str(row["steps"]),
                ]
            else:
                cells = [
                    str(row["p"]), str(row["q"]), str(row["r"]), str(row["s"]),
                    "false", "", "", "", "", "", "",
                ]
            lines.append(",".join(cells))
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


_TRACE_FIELDS = (
    "u_re,u_im,x_re,x_im,y_re,y_im,v_re,v_im,im_v,sum_d,defect_re,defect_im,residual"
)


def cmd_trace(cfg: RunConfig, spec) -> int:
    u_end = parse_u_end(cfg.u_end)
    if cfg.samples < 1:
        print("samples must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        complete = solve_complete(spec, newton_tol=cfg.newton_tol)
    except (NoConvergenceError, NoGeometricRootError) as e:
        print("complete structure failed: %s" % e, file=sys.stderr)
        return EXIT_COMPLETE_FAILED
    status = EXIT_OK
    try:
        samples = trace_deformation(
            spec, u_end, cfg.samples, complete=complete, newton_tol=cfg.newton_tol
        )
    except PathObstructionError as e:
        samples = getattr(e, "partial", [])
        print("trace obstructed: %s" % e, file=sys.stderr)
        status = EXIT_OBSTRUCTION
    recs = []
    for smp in samples:
        pt = smp.point
        vv = eval_v(spec, pt)
        defect = rogers_combo(spec, pt) - (vv + (smp.u / 2) * (smp.v / 2))
        sum_d = im_v_alpha_parts(spec, pt)[0]
        resid = max(abs(r) for r in reduced_residual(pt))
        recs.append((smp, vv, defect, sum_d, resid))
    names = spec.variables[:-1]
    if cfg.fmt == "json":
        jrows = []
        for smp, vv, defect, sum_d, resid in recs:
            jrows.append(
                {
                    "u": _jc(smp.u),
                    **{v: _jc(smp.point.values[v]) for v in names},
                    "v": _jc(smp.v),
                    "im_v": _jn(vv.imag),
                    "sum_d": _jn(sum_d),
                    "rogers_defect": _jc(defect),
                    "residual": _jn(resid),
                }
            )
        _emit(cfg, json.dumps({"schema": 1, "samples": jrows}, indent=2) + "\n")
    else:
        lines = [_TRACE_FIELDS]
        for smp, vv, defect, sum_d, resid in recs:
            x = smp.point.values[names[0]]
            y = smp.point.values[names[1]] if len(names) > 1 else 0j
            cells = [
                _f(smp.u.real), _f(smp.u.imag),
                _f(x.real), _f(x.imag),
                _f(y.real), _f(y.imag),
                _f(smp.v.real), _f(smp.v.imag),
                _f(vv.imag), _f(sum_d),
                _f(defect.real), _f(defect.imag),
                _f(resid),
            ]
            lines.append(",".join(cells))
        _emit(cfg, "\n".join(lines) + "\n")
    return status


def cmd_selftest(cfg: RunConfig) -> int:
    results = selftest_mod.run_selftest()
    ok = all(r.passed for r in results)
    if cfg.fmt == "json":
        doc = {
            "schema": 1,
            "passed": ok,
            "groups": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "worst_over_tol": _jn(r.worst) if math.isfinite(r.worst) else None,
                    "detail": r.detail,
                }
                for r in results
            ],
        }
        _emit(cfg, json.dumps(doc, indent=2) + "\n")
    else:
        lines = []
        for r in results:
            lines.append(
                "%s %s (worst err/tol %.3g; %s)"
                % ("PASS" if r.passed else "FAIL", r.name, r.worst, r.detail)
            )
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_SELFTEST


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    accept_tol = args.accept_tol
    if accept_tol is None:
        try:
            accept_tol = float(os.environ.get("KNOTPOT_TOL", "1e-10"))
        except ValueError:
            print("KNOTPOT_TOL is not a number", file=sys.stderr)
            return EXIT_USAGE
    if accept_tol <= 0 or args.newton_tol <= 0:
        print("tolerances must be positive", file=sys.stderr)
        return EXIT_USAGE
    cfg = RunConfig(
        spec_source=args.spec,
        command=args.command,
        fmt=args.fmt,
        output=args.output,
        newton_tol=args.newton_tol,
        accept_tol=accept_tol,
        slope=getattr(args, "slope", None),
        pmax=getattr(args, "pmax", 8),
        qmax=getattr(args, "qmax", 1),
        u_end=getattr(args, "u_end", None),
        samples=getattr(args, "samples", 8),
    )
    try:
        if cfg.command == "selftest":
            return cmd_selftest(cfg)
        spec = _load_spec(cfg)
        if cfg.command == "complete":
            return cmd_complete(cfg, spec)
        if cfg.command == "fill":
            return cmd_fill(cfg, spec)
        if cfg.command == "scan":
            return cmd_scan(cfg, spec)
        if cfg.command == "trace":
            return cmd_trace(cfg, spec)
        raise AssertionError("unhandled command %r" % cfg.command)
    except (OSError, SpecFormatError, ValidationError, ZeroDenominatorError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except KnotpotError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_COMPLETE_FAILED


if __name__ == "__main__":
    sys.exit(main())
