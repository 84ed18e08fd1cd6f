"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
All output is deterministic for fixed inputs and flags.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from .errors import QHarmError
from .lattice_io import (
    CSVFormatError,
    lattice_function_to_csv,
    load_lattice_function,
    report_to_json,
    save_lattice_function,
)
from .operators import gauss_kernel, qv_membership_probe, convolution
from .positivity import QMeasure, bochner_reconstruct, is_q_positive_type
from .bessel import hahn_exton_jv_stable
from .qlattice import (
    LatticeFunction,
    QLattice,
    QParams,
    q_exponential,
    q_pochhammer_finite,
    q_pochhammer_infinite,
)
from .transform import build_transform_table, fourier_transform
from .verify import run_suite


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=float, default=0.5, help="base, 0 < q < 1")
    p.add_argument("--v", type=float, default=0.0, help="order parameter v > -1")
    p.add_argument("--nmin", type=int, default=-20, help="lowest lattice exponent")
    p.add_argument("--nmax", type=int, default=60, help="highest lattice exponent")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")
    p.add_argument("--output", type=str, default=None, help="output file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qharm",
        description="q-harmonic analysis on the lattice {q^n}: transforms, "
        "operators, positivity checks and the Bochner pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a special function or constant")
    p_eval.add_argument(
        "function",
        choices=["pochhammer", "qexp", "jv", "gauss_kernel", "c_qv", "B_qv"],
    )
    p_eval.add_argument("--a", type=float, help="pochhammer argument")
    p_eval.add_argument("--z", type=float, help="series argument")
    p_eval.add_argument("--n", type=int, help="finite pochhammer length (omit for infinite)")
    p_eval.add_argument("--qbase", type=float, help="series base (defaults to q)")
    p_eval.add_argument("--x", type=float, help="gauss kernel point")
    p_eval.add_argument("--t", type=float, default=1.0, help="gauss kernel width")
    _add_common(p_eval)

    p_tr = sub.add_parser("transform", help="q-Bessel Fourier transform of a CSV")
    p_tr.add_argument("input", help="lattice function CSV")
    _add_common(p_tr)

    p_cv = sub.add_parser("convolve", help="q-convolution of two CSVs")
    p_cv.add_argument("left", help="first lattice function CSV")
    p_cv.add_argument("right", help="second lattice function CSV")
    p_cv.add_argument("--route", choices=["spectral", "direct"], default="spectral")
    _add_common(p_cv)

    p_probe = sub.add_parser("probe-qv", help="window scan of the translation kernel sign")
    _add_common(p_probe)

    p_pos = sub.add_parser("positivity", help="PSD test of the translation Gram matrix")
    p_pos.add_argument("input", help="lattice function CSV")
    p_pos.add_argument(
        "--points",
        type=str,
        default=None,
        help="comma-separated lattice exponents for the Gram grid",
    )
    _add_common(p_pos)

    p_boch = sub.add_parser("bochner", help="constructive Bochner pipeline")
    p_boch.add_argument("input", help="positive-type function CSV")
    p_boch.add_argument("--levels", type=int, default=10, help="cutoff levels 1..N")
    _add_common(p_boch)

    p_ver = sub.add_parser("verify", help="run the full verification suite")
    p_ver.add_argument(
        "--only",
        type=str,
        default=None,
        help="comma-separated statement ids to run (others are skipped)",
    )
    _add_common(p_ver)
    return parser


def _params(args: argparse.Namespace) -> QParams:
    return QParams(q=args.q, v=args.v)


def _lattice(args: argparse.Namespace) -> QLattice:
    return QLattice(args.q, args.nmin, args.nmax)


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _fmt(value) -> str:
    if isinstance(value, complex):
        if value.imag == 0.0:
            return f"{value.real:.15g}"
        return f"{value.real:.15g}{value.imag:+.15g}j"
    return f"{float(value):.15g}"


def _cmd_eval(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params(args)
    name = args.function
    if name == "pochhammer":
        if args.a is None:
            parser.error("eval pochhammer requires --a")
        if args.n is not None:
            val = q_pochhammer_finite(args.a, args.q, args.n)
        else:
            val = q_pochhammer_infinite(args.a, args.q)
    elif name == "qexp":
        if args.z is None:
            parser.error("eval qexp requires --z")
        val = q_exponential(args.z, args.qbase if args.qbase else args.q)
    elif name == "jv":
        if args.z is None:
            parser.error("eval jv requires --z")
        qbase = args.qbase if args.qbase else args.q ** 2
        val = hahn_exton_jv_stable(args.z, qbase, args.v)
    elif name == "gauss_kernel":
        if args.x is None:
            parser.error("eval gauss_kernel requires --x")
        val = gauss_kernel(args.x, args.t, params)
    elif name == "c_qv":
        val = params.c_qv
    else:  # B_qv
        val = params.B_qv
    _emit(_fmt(val) + "\n", args.output)
    return 0


def _cmd_transform(args: argparse.Namespace) -> int:
    f = load_lattice_function(args.input, args.q)
    params = _params(args)
    table = build_transform_table(params, f.lattice)
    out = fourier_transform(f, table)
    _emit(lattice_function_to_csv(out), args.output)
    return 0


def _cmd_convolve(args: argparse.Namespace) -> int:
    f = load_lattice_function(args.left, args.q)
    g = load_lattice_function(args.right, args.q)
    params = _params(args)
    table = build_transform_table(params, f.lattice)
    out = convolution(f, g, table, route=args.route)
    _emit(lattice_function_to_csv(out), args.output)
    return 0


def _cmd_probe(args: argparse.Namespace) -> int:
    params = _params(args)
    # the probe default window is deliberately small; the kernel scan is cubic
    nmin = args.nmin if args.nmin != -20 else -8
    nmax = args.nmax if args.nmax != 60 else 12
    tol = args.tol if args.tol is not None else 1e-10
    report = qv_membership_probe(params, QLattice(args.q, nmin, nmax), tolerance=tol)
    payload = {
        "min_value": report.min_value,
        "witness": list(report.witness) if report.witness else None,
        "verdict": report.verdict,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    return 0 if report.witness is None else 1


def _cmd_positivity(args: argparse.Namespace) -> int:
    f = load_lattice_function(args.input, args.q)
    params = _params(args)
    table = build_transform_table(params, f.lattice)
    points = None
    if args.points:
        points = [int(s) for s in args.points.split(",")]
    tol = args.tol if args.tol is not None else 1e-9
    verdict = is_q_positive_type(f, points, table, tol)
    payload = {
        "verdict": "POSITIVE" if verdict.positive else "NEGATIVE",
        "min_eigenvalue": verdict.min_eigenvalue,
        "tolerance": verdict.tolerance,
        "point_exponents": list(verdict.point_exponents),
        "witness_coefficients": None
        if verdict.witness is None
        else [{"re": z.real, "im": z.imag} for z in np.asarray(verdict.witness, dtype=complex)],
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    return 0 if verdict.positive else 1


def _cmd_bochner(args: argparse.Namespace) -> int:
    f = load_lattice_function(args.input, args.q)
    if f.value_at_zero is None:
        sys.stderr.write("bochner: input CSV must carry the origin row (phi(0))\n")
        return 2
    params = _params(args)
    table = build_transform_table(params, f.lattice)
    tol = args.tol if args.tol is not None else 1e-9
    report = bochner_reconstruct(f, range(1, args.levels + 1), table, tol)
    sys.stdout.write(report_to_json(report))
    if args.output is not None and report.limit_measure is not None:
        # recovered measure written as a lattice function CSV of its weights
        mf = LatticeFunction(report.limit_measure.lattice, report.limit_measure.weights)
        save_lattice_function(mf, args.output)
    return 0 if report.accepted else 1


def _cmd_verify(args: argparse.Namespace) -> int:
    params = _params(args)
    only = args.only.split(",") if args.only else None
    result = run_suite(params, _lattice(args), tol=args.tol, only=only)
    _emit(report_to_json(result), args.output)
    return 0 if result.all_ok else 1


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "eval":
            return _cmd_eval(args, parser)
        if args.command == "transform":
            return _cmd_transform(args)
        if args.command == "convolve":
            return _cmd_convolve(args)
        if args.command == "probe-qv":
            return _cmd_probe(args)
        if args.command == "positivity":
            return _cmd_positivity(args)
        if args.command == "bochner":
            return _cmd_bochner(args)
        if args.command == "verify":
            return _cmd_verify(args)
    except CSVFormatError as exc:
        sys.stderr.write(f"{args.command}: CSV parse error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"{args.command}: {exc}\n")
        return 2
    except (QHarmError, ValueError) as exc:
        sys.stderr.write(f"{args.command}: {exc}\n")
        return 2
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
