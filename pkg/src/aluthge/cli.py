"""Command line interface.

Exit codes: 0 success, 1 verification failure, 2 input or parse error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .errors import InputError, NumericalFailure
from .generators import KINDS
from .koszul import homology_at
from .spectra import compare_taylor_spectra, taylor_spectrum
from .suite import run_verification_suite, truncated_shift_demo
from .transforms import joint_polar_decompose, spherical_aluthge

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _kinds(text: str) -> list[str]:
    kinds = [k.strip() for k in text.split(",") if k.strip()]
    bad = [k for k in kinds if k not in KINDS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown kinds {bad}; choose from {', '.join(KINDS)}")
    return kinds


def _point(text: str) -> list[complex]:
    return [complex(p.strip().replace(" ", "")) for p in text.split(",")]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _comparison_dict(cmp) -> dict:
    return {
        "matched": cmp.matched,
        "hausdorff_distance": cmp.hausdorff_distance,
        "delta": cmp.delta,
        "left": io.spectrum_to_dict(cmp.left),
        "right": io.spectrum_to_dict(cmp.right),
        "unmatched_points": [[[z.real, z.imag] for z in p] for p in cmp.unmatched_points],
    }


def cmd_transform(args) -> int:
    t = io.load_tuple(args.input, args.ctol)
    polar = joint_polar_decompose(t, args.tol)
    hat = spherical_aluthge(t, args.tol, polar)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    io.save_tuple([polar.p], out / "P.json")
    io.save_tuple(polar.isometries, out / "V.json")
    io.save_tuple(hat.operators, out / "transform.json")
    print(f"rank(P) = {polar.rank} of {t.dim}; wrote P.json, V.json, transform.json to {out}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    t = io.load_tuple(args.input, args.ctol)
    spec = taylor_spectrum(t, args.seed, args.tol)
    if args.format == "csv":
        _emit(io.spectrum_to_csv(spec), args.out)
    else:
        _emit(json.dumps(io.spectrum_to_dict(spec), indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    t = io.load_tuple(args.input, args.ctol)
    cmp = compare_taylor_spectra(t, args.seed, args.tol)
    _emit(json.dumps(_comparison_dict(cmp), indent=1) + "\n", args.out)
    return EXIT_OK if cmp.matched else EXIT_FAIL


def cmd_koszul(args) -> int:
    t = io.load_tuple(args.input, args.ctol)
    point = args.point if args.point is not None else [0j] * t.n
    prof = homology_at(t, point, args.tol)
    doc = {
        "point": [[z.real, z.imag] for z in point],
        "homology": list(prof.dims),
        "ranks": list(prof.ranks),
        "tol": prof.tol_used,
        "taylor_invertible": prof.is_exact,
    }
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_verification_suite(
        seed=args.seed,
        count=args.count,
        dims=args.dims or range(2, 9),
        kinds=args.kinds or KINDS,
        n=args.n,
        tol=args.tol,
        ctol=args.ctol,
        jobs=args.jobs,
        timings=args.timings,
    )
    _emit(io.dumps_report(report), args.out)
    for name, row in report["checks"].items():
        status = "PASS" if row["failed"] == 0 else "FAIL"
        print(
            f"{status} {name:24s} passed={row['passed']} failed={row['failed']} "
            f"vacuous={row['vacuous']} max_defect={row['max_defect']:.3e}",
            file=sys.stderr,
        )
    return EXIT_OK if report["all_passed"] else EXIT_FAIL


def cmd_demo(args) -> int:
    report = truncated_shift_demo(args.dims or (3, 4, 8, 16, 32, 64), args.tol)
    _emit(json.dumps(report, indent=1) + "\n", args.out)
    return EXIT_OK if report["monotone"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="random seed (u64)")
    common.add_argument("--tol", type=float, default=None, help="rank tolerance override")
    common.add_argument("--ctol", type=float, default=None, help="commutativity tolerance")
    common.add_argument("--out", default=None, help="output path (directory for transform)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(
        prog="aluthge", description="Spherical Aluthge transforms and Taylor spectra of commuting matrix tuples."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", parents=[common], help="write P, V_i and the transformed tuple")
    p.add_argument("input")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("spectrum", parents=[common], help="certified Taylor spectrum")
    p.add_argument("input")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("compare", parents=[common], help="compare the spectra of T and its transform")
    p.add_argument("input")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("koszul", parents=[common], help="Koszul homology profile at a point")
    p.add_argument("input")
    p.add_argument("--point", type=_point, default=None, help="comma separated complex coordinates, e.g. 1+2j,0")
    p.set_defaults(func=cmd_koszul)

    p = sub.add_parser("verify", parents=[common], help="run the verification sweep")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--dims", type=_int_list, default=None, help="e.g. 2-8 or 2,4,6")
    p.add_argument("--kinds", type=_kinds, default=None)
    p.add_argument("--n", type=int, default=2, help="tuple length")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="include wall-clock times in the report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="demonstrations")
    demo = p.add_subparsers(dest="demo", required=True)
    p = demo.add_parser("shift", parents=[common], help="truncated backward shift corank demo")
    p.add_argument("--dims", type=_int_list, default=None)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
