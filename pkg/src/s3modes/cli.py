"""Command-line interface.

Subcommands: eval, basis-matrix, rotate, invariants, multiplicity, verify.
All machine output is JSON (schema version 1) or bare CSV, written to
standard output or to ``--out FILE``; identical invocations produce
byte-identical output.  Exit codes: 0 success, 2 invalid parameters
(message on standard error), 1 numerical failure in ``verify``.

The environment variable S3MODES_THREADS caps the linear-algebra thread
pool (0 or unset = automatic).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys

from .algebra import Quaternion, Rotation, ToroidalPoint
from .bases import ModeB2, ModeB3, b2_from_b3_matrix, b3_from_b2_matrix, eval_b2, eval_b3
from .quotients import GroupSpec, invariant_basis, multiplicity, prism_reference_count
from .rotations import rotation_coeffs, rotation_coeffs_lstsq, to_b2_frame
from .verify import FD_STEP_DEFAULT, SUITE_NAMES, TOLERANCE_DEFAULTS, run_verify


def _thread_context():
    raw = os.environ.get("S3MODES_THREADS", "0").strip() or "0"
    try:
        limit = int(raw)
    except ValueError:
        raise ValueError(f"S3MODES_THREADS must be an integer, got {raw!r}")
    if limit > 0:
        from threadpoolctl import threadpool_limits

        return threadpool_limits(limits=limit)
    return contextlib.nullcontext()


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload, args):
    _emit(json.dumps(payload, indent=2) + "\n", args.out)


def _matrix_csv(matrix):
    lines = []
    rows, cols = matrix.shape
    for r in range(rows):
        for c in range(cols):
            z = complex(matrix[r, c])
            lines.append(f"{r},{c},{float(z.real)!r},{float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def _parse_space(text):
    """Group spec from 'lens:p,q', 'prism:P', inline JSON, or a JSON file."""
    if not text.startswith(("lens:", "prism:", "{")) and os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    return GroupSpec.parse(text)


def _resolve_rotation(args):
    if args.pair is not None and args.space is not None:
        raise ValueError("give either --pair or --space, not both")
    if args.pair is not None:
        ql = Quaternion(*args.pair[:4])
        qr = Quaternion(*args.pair[4:])
        return Rotation(ql, qr)
    if args.space is not None:
        gens = _parse_space(args.space).generators()
        if not 0 <= args.generator < len(gens):
            raise ValueError(
                f"generator index {args.generator} out of range (space has {len(gens)})"
            )
        return gens[args.generator]
    raise ValueError("a rotation is required: --pair QL0..QR3 or --space SPEC")


def _cmd_eval(args):
    point = ToroidalPoint(args.chi, args.theta, args.phi)
    payload = {
        "schema": 1,
        "kind": "eval",
        "k": args.k,
        "point": {
            "chi": float(point.chi),
            "theta": float(point.theta),
            "phi": float(point.phi),
        },
    }
    if args.basis == "b2":
        if args.m1 is None or args.m2 is None:
            raise ValueError("basis b2 needs --m1 and --m2")
        mode = ModeB2(args.k, args.m1, args.m2)
        value = complex(eval_b2(mode, point))
        payload["basis"] = "B2"
        payload["m1"] = float(mode.m1)
        payload["m2"] = float(mode.m2)
    else:
        if args.i is None or args.j is None:
            raise ValueError("basis b3 needs --i and --j")
        mode = ModeB3(args.k, args.i, args.j)
        value = complex(eval_b3(mode, point))
        payload["basis"] = "B3"
        payload["I"] = mode.I
        payload["J"] = mode.J
    payload["value"] = [float(value.real), float(value.imag)]
    if args.format == "csv":
        _emit(f"{float(value.real)!r},{float(value.imag)!r}\n", args.out)
    else:
        _emit_json(payload, args)
    return 0


def _cmd_basis_matrix(args):
    if args.direction == "b2-from-b3":
        matrix = b2_from_b3_matrix(args.k)
    else:
        matrix = b3_from_b2_matrix(args.k)
    if args.format == "csv":
        _emit(matrix.to_csv_text(), args.out)
    else:
        _emit_json(matrix.to_json_dict(), args)
    return 0


def _cmd_rotate(args):
    g = _resolve_rotation(args)
    if args.method == "lstsq":
        coeffs = rotation_coeffs_lstsq(g, args.k)
    else:
        coeffs = rotation_coeffs(g, args.k)
    matrix = coeffs.matrix if args.frame == "b3" else to_b2_frame(coeffs)
    if args.format == "csv":
        _emit(_matrix_csv(matrix), args.out)
        return 0
    payload = coeffs.to_json_dict()
    payload["frame"] = args.frame.upper()
    if args.frame == "b2":
        n = matrix.shape[0]
        payload["entries"] = [
            [float(z.real), float(z.imag)] for z in matrix.reshape(n * n)
        ]
    _emit_json(payload, args)
    return 0


def _cmd_invariants(args):
    spec = _parse_space(args.space)
    sub = invariant_basis(spec, args.k, max_order=args.max_order)
    if args.format == "csv":
        _emit(_matrix_csv(sub.basis), args.out)
    else:
        _emit_json(sub.to_json_dict(), args)
    return 0


def _cmd_multiplicity(args):
    spec = _parse_space(args.space)
    if args.k is not None:
        m = multiplicity(spec, args.k)
        payload = {
            "schema": 1,
            "kind": "multiplicity",
            "space": spec.label(),
            "k": args.k,
            "multiplicity": m,
        }
        if spec.kind == "prism":
            ref = prism_reference_count(spec.p, args.k)
            if ref != m:
                payload["reference_formula"] = ref
                payload["note"] = (
                    "closed-form reference disagrees; projector rank is authoritative"
                )
        if args.format == "csv":
            _emit(f"{args.k},{m}\n", args.out)
        else:
            _emit_json(payload, args)
        return 0
    levels = list(range(args.k_max + 1))
    if spec.kind == "custom":
        levels = [k for k in levels if k % 2 == 0]
    rows = [[k, multiplicity(spec, k)] for k in levels]
    payload = {
        "schema": 1,
        "kind": "multiplicity_table",
        "space": spec.label(),
        "k_max": args.k_max,
        "rows": rows,
    }
    if spec.kind == "custom":
        payload["note"] = "odd levels skipped (coefficient action needs even k)"
    if spec.kind == "prism":
        disagreements = []
        for k, m in rows:
            ref = prism_reference_count(spec.p, k)
            if ref != m:
                disagreements.append({"k": k, "reference_formula": ref})
        if disagreements:
            payload["reference_disagreements"] = disagreements
            payload["note"] = (
                "closed-form reference disagrees at the listed levels; "
                "projector rank is authoritative"
            )
    if args.format == "csv":
        _emit("".join(f"{k},{m}\n" for k, m in rows), args.out)
    else:
        _emit_json(payload, args)
    return 0


def _cmd_verify(args):
    suites = None if args.suite == "all" else [args.suite]
    tolerances = {name: getattr(args, f"tol_{name}") for name in TOLERANCE_DEFAULTS}
    report = run_verify(args.k, suites=suites, tolerances=tolerances, fd_step=args.fd_step)
    if args.format == "csv":
        lines = []
        for suite, checks in report["suites"].items():
            for c in checks:
                lines.append(
                    f"{suite},{c['name']},{c['value']!r},{c['tolerance']!r},"
                    f"{'pass' if c['pass'] else 'fail'}"
                )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit_json(report, args)
    return 0 if report["passed"] else 1


def _add_common(sub, fmt=True):
    if fmt:
        sub.add_argument(
            "--format", choices=("json", "csv"), default="json", help="output format"
        )
    sub.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="s3modes",
        description="Laplacian eigenmode bases on the three-sphere and its quotients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one basis function at a point")
    p.add_argument("--basis", choices=("b2", "b3"), required=True)
    p.add_argument("--k", type=int, required=True, help="eigenspace level")
    p.add_argument("--m1", type=float, help="first toroidal index (basis b2)")
    p.add_argument("--m2", type=float, help="second toroidal index (basis b2)")
    p.add_argument("--i", type=int, help="first null-vector index (basis b3)")
    p.add_argument("--j", type=int, help="second null-vector index (basis b3)")
    p.add_argument("--chi", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("basis-matrix", help="change-of-basis matrix between B2 and B3")
    p.add_argument("--k", type=int, required=True, help="eigenspace level (even)")
    p.add_argument(
        "--direction", choices=("b2-from-b3", "b3-from-b2"), required=True
    )
    _add_common(p)
    p.set_defaults(func=_cmd_basis_matrix)

    p = sub.add_parser("rotate", help="coefficient matrix of a rotation on a level")
    p.add_argument("--k", type=int, required=True, help="eigenspace level (even)")
    p.add_argument(
        "--pair",
        type=float,
        nargs=8,
        metavar=("QL0", "QL1", "QL2", "QL3", "QR0", "QR1", "QR2", "QR3"),
        help="left and right unit quaternion coefficients",
    )
    p.add_argument("--space", help="use a generator of lens:p,q / prism:P instead")
    p.add_argument(
        "--generator", type=int, default=0, help="generator index within --space"
    )
    p.add_argument(
        "--frame",
        choices=("b3", "b2"),
        default="b3",
        help="report the matrix in the null-power or the scaled-toroidal frame",
    )
    p.add_argument(
        "--method",
        choices=("formula", "lstsq"),
        default="formula",
        help="closed-form rows with degenerate fallback, or the sampling oracle",
    )
    _add_common(p)
    p.set_defaults(func=_cmd_rotate)

    p = sub.add_parser("invariants", help="basis of the group-invariant subspace")
    p.add_argument("--space", required=True, help="lens:p,q, prism:P, or JSON file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-order", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=_cmd_invariants)

    p = sub.add_parser("multiplicity", help="invariant-subspace dimension(s)")
    p.add_argument("--space", required=True, help="lens:p,q, prism:P, or JSON file")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--k", type=int, help="single level")
    grp.add_argument("--k-max", type=int, help="table for k = 0..k_max")
    _add_common(p)
    p.set_defaults(func=_cmd_multiplicity)

    p = sub.add_parser("verify", help="run the numerical oracle suites")
    p.add_argument("--k", type=int, default=4, help="even level to exercise")
    p.add_argument(
        "--suite", choices=SUITE_NAMES + ("all",), default="all", help="which suite"
    )
    for name, default in sorted(TOLERANCE_DEFAULTS.items()):
        p.add_argument(
            f"--tol-{name}",
            dest=f"tol_{name}",
            type=float,
            default=default,
            help=f"tolerance for {name} checks (default {default:g})",
        )
    p.add_argument(
        "--fd-step",
        type=float,
        default=FD_STEP_DEFAULT,
        help="finite-difference step for harmonicity checks",
    )
    _add_common(p)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _thread_context():
            return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
