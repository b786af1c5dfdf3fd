#!/usr/bin/env python3
"""
q-FOURIER TRANSFORM TOOLKIT - Command Line

Commands:
1. transform - F(k, q', q) of a density on a k-grid (CSV or JSON table)
2. scan      - F(k, q', q) at one k over a grid of q'
3. class     - build a Hilhorst equivalence class, check collapse and separation
4. invert    - epsilon-regularised inverse transform and density recovery
5. selftest  - acceptance suite with a pass/fail table

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 numeric failure.
"""

import argparse
import sys
from typing import List, Optional

from artifacts import (
    RECOVERY_COLUMNS,
    SCAN_COLUMNS,
    TRANSFORM_COLUMNS,
    render_report,
    render_table,
    write_text,
)
from densities import (
    DensitySpec,
    HilhorstDensity,
    HilhorstFamily,
    QGaussianDensity,
    load_tabulated,
)
from equivalence import build_class, lambda_probe, verify_collapse, verify_separation
from errors import ParameterError
from inverse import WINDOWS, InverseConfig, roundtrip
from qkernel import DeformationParameter
from quad import QuadratureConfig
from selftest import CHECKS, run_selftest
from transform import default_workers, qprime_scan, transform_grid
from validator import (
    EXIT_OK,
    EXIT_SELFTEST_FAILED,
    ConfigValidator,
    exit_code_guard,
    log_event,
    parse_complex,
    parse_density_string,
    parse_float,
    parse_float_list,
    parse_k_grid,
    require,
)

VERSION = "1.0.0"


def print_banner(stream=sys.stdout):
    """Print the run banner."""
    print("=" * 70, file=stream)
    print("q-FOURIER TRANSFORM TOOLKIT".center(70), file=stream)
    print("=" * 70, file=stream)


def build_density(text: str, qcfg: QuadratureConfig) -> DensitySpec:
    """Turn a `name:key=val,...` string into a density from the catalog."""
    name, params = parse_density_string(text)
    if name == "hilhorst":
        a = parse_float(params["a"], "a")
        b = parse_float(params["b"], "b")
        q = parse_float(params["q"], "q")
        require(ConfigValidator.validate_deformation(q, "q"))
        return HilhorstDensity(HilhorstFamily(a, b, DeformationParameter(q)))
    if name == "qgaussian":
        q = parse_float(params["q"], "q")
        width = parse_float(params["width"], "width")
        require(ConfigValidator.validate_deformation(q, "q"))
        require(ConfigValidator.validate_positive(width, "width"))
        return QGaussianDensity(q, width, qcfg)
    q = parse_float(params["q"], "q") if "q" in params else None
    if q is not None:
        require(ConfigValidator.validate_deformation(q, "q"))
    return load_tabulated(params["path"], q)


def quadrature_config(args) -> QuadratureConfig:
    return QuadratureConfig(
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        max_subdivisions=args.max_subdivisions,
        tail_cutoff=args.tail_cutoff,
    )


def _workers(args) -> int:
    if args.workers is None:
        return default_workers()
    if args.workers < 1:
        raise ParameterError(f"--workers must be >= 1, got {args.workers}")
    return args.workers


def _emit(args, text: str, stream) -> None:
    """Write the artifact once, to --out or to stdout."""
    if args.out:
        write_text(args.out, text)
        print(f"[✓] Wrote {args.out}", file=stream)
    else:
        sys.stdout.write(text)


def _narration(args):
    """Narration goes to stdout when the artifact goes to a file."""
    if args.quiet:
        return None
    return sys.stdout if args.out else sys.stderr


def _say(stream, message: str) -> None:
    if stream is not None:
        print(message, file=stream)


@exit_code_guard
def cmd_transform(args) -> int:
    """Transform table of a density on a k-grid."""
    stream = _narration(args)
    require(ConfigValidator.validate_deformation(args.qp, "qp"))
    require(ConfigValidator.validate_output_format(args.format))
    qcfg = quadrature_config(args)
    d = build_density(args.density, qcfg)
    ks = parse_k_grid(args.k_grid) + 1j * args.k_imag

    _say(stream, f"[*] Density: {d.describe()}")
    _say(stream, f"[*] q'={args.qp}, {len(ks)} k values from {args.k_grid}")
    samples = transform_grid(d, ks, args.qp, qcfg, _workers(args))
    meta = {
        "command": "transform",
        "density": d.describe(),
        "qp": args.qp,
        "k_grid": args.k_grid,
        "k_imag": args.k_imag,
        "quadrature": qcfg.as_dict(),
        "version": VERSION,
    }
    text = render_table(TRANSFORM_COLUMNS, [s.as_record() for s in samples], meta, args.format)
    _emit(args, text, stream)
    return EXIT_OK


@exit_code_guard
def cmd_scan(args) -> int:
    """Transform at one k over a grid of q'."""
    stream = _narration(args)
    require(ConfigValidator.validate_output_format(args.format))
    qcfg = quadrature_config(args)
    d = build_density(args.density, qcfg)
    k = parse_complex(args.k)
    qps = parse_k_grid(args.qp_grid)
    for qp in qps:
        require(ConfigValidator.validate_deformation(float(qp), "qp"))

    _say(stream, f"[*] Scanning {len(qps)} values of q' at k={k}")
    rows = []
    for qp, sample in qprime_scan(d, k, qps, qcfg):
        rows.append({"qp": qp, "F_re": sample.value.real, "F_im": sample.value.imag,
                     "abs_err": sample.abs_err_estimate})
    meta = {
        "command": "scan",
        "density": d.describe(),
        "k": [k.real, k.imag],
        "qp_grid": args.qp_grid,
        "quadrature": qcfg.as_dict(),
        "version": VERSION,
    }
    _emit(args, render_table(SCAN_COLUMNS, rows, meta, args.format), stream)
    return EXIT_OK


@exit_code_guard
def cmd_class(args) -> int:
    """Equivalence class report: collapse within, separation across."""
    stream = _narration(args)
    require(ConfigValidator.validate_deformation(args.q, "q"))
    require(ConfigValidator.validate_positive(args.lam, "lambda"))
    qcfg = quadrature_config(args)
    a_values = parse_float_list(args.a_values, "a-values")
    ks = parse_k_grid(args.k_grid)

    probe = build_class(args.q, args.lam, a_values)
    _say(stream, f"[*] Class q={args.q}, lambda={args.lam}: "
                 + ", ".join(f"({m.a:.6g}, {m.b:.6g})" for m in probe.members))
    report = {"class": probe.describe(), "separation": None, "separation_ok": None}

    if len(probe.members) >= 2:
        collapse = verify_collapse(probe, ks, qcfg, _workers(args))
        report["table"] = [row.as_record() for row in collapse.rows]
        report["max_pairwise_deviation"] = collapse.max_pairwise_deviation
        report["max_closed_deviation"] = collapse.max_closed_deviation
        report["collapse_ok"] = collapse.collapse_ok
        mark = "✓" if collapse.collapse_ok else "!"
        _say(stream, f"[{mark}] Collapse: max pairwise deviation "
                     f"{collapse.max_pairwise_deviation:.3e}")
    else:
        report["table"] = []
        report["collapse_ok"] = None
        _say(stream, "[*] Single member: collapse not checked")

    if args.separate_from is not None:
        require(ConfigValidator.validate_positive(args.separate_from, "separate-from"))
        other = lambda_probe(args.q, args.separate_from)
        separation = verify_separation(probe, other, ks)
        report["separation"] = separation.as_dict()
        report["separation"]["other_class"] = other.describe()
        report["separation_ok"] = separation.separation_ok
        mark = "✓" if separation.separation_ok else "!"
        _say(stream, f"[{mark}] Separation from lambda={args.separate_from}: "
                     f"max |dF| {separation.max_difference:.3e} at k={separation.witness_k:.4g}")

    meta = {
        "command": "class",
        "q": args.q,
        "lambda": args.lam,
        "a_values": a_values,
        "k_grid": args.k_grid,
        "separate_from": args.separate_from,
        "quadrature": qcfg.as_dict(),
        "version": VERSION,
    }
    _emit(args, render_report(report, meta), stream)
    verdicts = [report["collapse_ok"], report["separation_ok"]]
    passed = all(v is not False for v in verdicts)
    return EXIT_OK if passed else EXIT_SELFTEST_FAILED


@exit_code_guard
def cmd_invert(args) -> int:
    """Round trip: transform at q' = 1 + epsilon, invert, compare with the density."""
    stream = _narration(args)
    require(ConfigValidator.validate_output_format(args.format))
    qcfg = quadrature_config(args)
    d = build_density(args.density, qcfg)
    cfg = InverseConfig(
        epsilon=args.epsilon,
        k_max=args.k_max,
        n_k=args.n_k,
        x_points=tuple(parse_float_list(args.x, "x")),
        window=args.window,
    )
    _say(stream, f"[*] Density: {d.describe()}")
    report = roundtrip(d, cfg, qcfg, _workers(args), verbose=stream is not None)
    for row in report.rows:
        flag = "  (jump-adjacent)" if row.flagged else ""
        _say(stream, f"    x={row.x:<8.4g} f={row.f_true:.6f}  recovered={row.f_recovered:.6f}{flag}")
    meta = {
        "command": "invert",
        "density": d.describe(),
        "inverse": cfg.as_dict(),
        "quadrature": qcfg.as_dict(),
        "l1_error": report.l1_error,
        "version": VERSION,
    }
    records = [row.as_record() for row in report.rows]
    _emit(args, render_table(RECOVERY_COLUMNS, records, meta, args.format), stream)
    return EXIT_OK


@exit_code_guard
def cmd_selftest(args) -> int:
    """Run the acceptance suite."""
    if args.list:
        for check in CHECKS:
            tag = " (slow)" if check.slow else ""
            print(f"{check.name:<24} {check.description}{tag}")
        return EXIT_OK
    qcfg = quadrature_config(args)
    if not args.quiet:
        print_banner()
    passed = run_selftest(qcfg, only=args.only, quick=args.quick, verbose=not args.quiet)
    return EXIT_OK if passed else EXIT_SELFTEST_FAILED


def _add_quadrature_flags(parser: argparse.ArgumentParser) -> None:
    defaults = QuadratureConfig()
    parser.add_argument("--rel-tol", type=float, default=defaults.rel_tol)
    parser.add_argument("--abs-tol", type=float, default=defaults.abs_tol)
    parser.add_argument("--max-subdivisions", type=int, default=defaults.max_subdivisions)
    parser.add_argument("--tail-cutoff", type=float, default=defaults.tail_cutoff)
    parser.add_argument("--workers", type=int, default=None,
                        help="process count (default: $QFT_WORKERS or 1)")
    parser.add_argument("--quiet", action="store_true", help="no narration")


def _add_output_flags(parser: argparse.ArgumentParser, formats: bool = True) -> None:
    parser.add_argument("--out", default=None, help="output file (default: stdout)")
    if formats:
        parser.add_argument("--format", default="csv", help="csv or json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qft",
        description="Complex q-Fourier transform toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="transform table on a k-grid")
    p.add_argument("--density", required=True, help="e.g. hilhorst:a=1,b=2,q=1.5")
    p.add_argument("--qp", type=float, required=True, help="transform index q'")
    p.add_argument("--k-grid", default="-5:5:21", help="k_min:k_max:n")
    p.add_argument("--k-imag", type=float, default=0.0, help="imaginary part added to every k")
    _add_output_flags(p)
    _add_quadrature_flags(p)
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser("scan", help="transform at one k over a grid of q'")
    p.add_argument("--density", required=True)
    p.add_argument("--k", default="1j", help="complex k, e.g. 2j or 1+1j")
    p.add_argument("--qp-grid", default="1.05:1.95:19", help="qp_min:qp_max:n")
    _add_output_flags(p)
    _add_quadrature_flags(p)
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("class", help="equivalence class collapse and separation")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--a-values", required=True, help="comma-separated support starts")
    p.add_argument("--k-grid", default="-5:5:21")
    p.add_argument("--separate-from", type=float, default=None,
                   help="lambda of a second class to separate from")
    _add_output_flags(p, formats=False)
    _add_quadrature_flags(p)
    p.set_defaults(handler=cmd_class)

    p = sub.add_parser("invert", help="regularised inverse transform and recovery")
    p.add_argument("--density", required=True)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--k-max", type=float, default=200.0)
    p.add_argument("--n-k", type=int, default=8192)
    p.add_argument("--x", required=True, help="comma-separated evaluation points")
    p.add_argument("--window", choices=WINDOWS, default="none")
    _add_output_flags(p)
    _add_quadrature_flags(p)
    p.set_defaults(handler=cmd_invert)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--list", action="store_true", help="print check names and exit")
    p.add_argument("--quick", action="store_true", help="skip slow checks")
    p.add_argument("--only", action="append", default=None, help="run only this check")
    _add_quadrature_flags(p)
    p.set_defaults(handler=cmd_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command, return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    log_event("RUN", " ".join(argv if argv is not None else sys.argv[1:]))
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
