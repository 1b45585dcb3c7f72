"""Command line front end.

Exit codes: 0 = success / all checks passed, 1 = at least one identity
check failed, 2 = malformed input or unsatisfied precondition.  All
output is a canonical JSON report on stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from .complexes import (
    ComplexError,
    analytic_torsion,
    cohomology,
    zeta_at_zero,
)
from .constructions import (
    ConstructionError,
    cw_cochain_complex,
    morse_smale_complex,
    norm_of_torsion,
    restrict_scalars,
    tensor_power_cyclic,
)
from .documents import (
    DocumentError,
    complex_document,
    load_document,
    serialize,
    validated_complex,
)
from .equivariant import (
    ActionError,
    nrt_sigma,
    rt_sigma,
    tau_sigma_exact_p2,
    tau_sigma_numeric,
)
from .matrices import LinalgError
from .torsionvalue import TorsionValue, TorsionValueError
from .verify import CONVENTIONS_VERSION, CheckError, run_suite, suite_passed

INPUT_ERRORS = (
    DocumentError,
    ComplexError,
    ConstructionError,
    ActionError,
    LinalgError,
    TorsionValueError,
    CheckError,
)


def _report(command: str, name: str, values: dict) -> str:
    return serialize(
        {
            "type": "report",
            "tool": "torsionkit",
            "conventions": CONVENTIONS_VERSION,
            "command": command,
            "name": name,
            "values": values,
        }
    )


def _tv_values(tv: TorsionValue) -> dict:
    return tv.to_json()


def _cmd_cohomology(args) -> int:
    name, C = validated_complex(args.file)
    rep = cohomology(C, with_regulators=C.gram is not None)
    values = {
        "by_degree": [
            {
                "degree": str(e.degree),
                "free_rank": str(e.free_rank),
                "divisors": [str(d) for d in e.divisors],
                "torsion_order": str(e.torsion_order),
                **(
                    {
                        "regulator_sq": (
                            f"{e.regulator_sq.numerator}/{e.regulator_sq.denominator}"
                            if e.regulator_sq.denominator != 1
                            else str(e.regulator_sq.numerator)
                        )
                    }
                    if e.regulator_sq is not None
                    else {}
                ),
            }
            for e in rep.by_degree
        ]
    }
    sys.stdout.write(_report("cohomology", name, values))
    return 0


def _cmd_tau(args) -> int:
    name, C = validated_complex(args.file)
    sys.stdout.write(_report("tau", name, _tv_values(analytic_torsion(C))))
    return 0


def _cmd_tau_sigma(args) -> int:
    name, C = validated_complex(args.file)
    if args.numeric:
        nv = tau_sigma_numeric(C, precision=args.precision)
        values = {
            "log_value": format(nv.value, ".17g"),
            "error_bound": format(nv.error_bound, ".17g"),
            "precision_bits": str(nv.precision_bits),
        }
    else:
        values = _tv_values(tau_sigma_exact_p2(C))
    sys.stdout.write(_report("tau-sigma", name, values))
    return 0


def _cmd_nrt(args) -> int:
    name, C = validated_complex(args.file)
    sys.stdout.write(_report("nrt", name, _tv_values(nrt_sigma(C))))
    return 0


def _cmd_rt_sigma(args) -> int:
    name, C = validated_complex(args.file)
    sys.stdout.write(_report("rt-sigma", name, _tv_values(rt_sigma(C))))
    return 0


def _cmd_zeta0(args) -> int:
    name, C = validated_complex(args.file)
    sys.stdout.write(_report("zeta0", name, {"value": str(zeta_at_zero(C))}))
    return 0


def _emit_complex(args, name: str, C) -> int:
    text = serialize(complex_document(name, C))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_build_tensor_power(args) -> int:
    name, C = validated_complex(args.file)
    out = tensor_power_cyclic(C, args.p)
    return _emit_complex(args, f"{name}-tensor-{args.p}", out)


def _cmd_build_cw(args) -> int:
    kind, name, K = load_document(args.file)
    if kind != "cw":
        raise DocumentError(f"{args.file}: expected a cw document, got {kind!r}")
    return _emit_complex(args, name, cw_cochain_complex(K))


def _cmd_build_morse(args) -> int:
    kind, name, D = load_document(args.file)
    if kind != "morse":
        raise DocumentError(f"{args.file}: expected a morse document, got {kind!r}")
    return _emit_complex(args, name, morse_smale_complex(D))


def _cmd_build_restrict(args) -> int:
    kind, name, P = load_document(args.file)
    if kind != "order_complex":
        raise DocumentError(
            f"{args.file}: expected an order_complex document, got {kind!r}"
        )
    C = restrict_scalars(P)
    if args.with_norm:
        norm = norm_of_torsion(P)
        sys.stderr.write(f"norm of torsion: {norm!r}\n")
    return _emit_complex(args, f"{name}-restricted", C)


def _cmd_verify(args) -> int:
    reports = run_suite(args.suite, seed=args.seed, count=args.count)
    payload = {
        "type": "report",
        "tool": "torsionkit",
        "conventions": CONVENTIONS_VERSION,
        "command": "verify",
        "suite": args.suite,
        "seed": str(args.seed),
        "count": "anchors" if args.count is None else str(args.count),
        "checks": [r.to_json() for r in reports],
        "passed": suite_passed(reports),
    }
    sys.stdout.write(serialize(payload))
    return 0 if suite_passed(reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torsionkit",
        description=(
            "Exact torsion invariants of finite metrized cochain complexes "
            "with cyclic symmetry."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for cmd, fn, doc in (
        ("cohomology", _cmd_cohomology, "integer cohomology with regulators"),
        ("tau", _cmd_tau, "exact analytic torsion"),
        ("nrt", _cmd_nrt, "naive equivariant Reidemeister torsion"),
        ("rt-sigma", _cmd_rt_sigma, "twisted Reidemeister torsion"),
        ("zeta0", _cmd_zeta0, "zeta value Z(0)"),
    ):
        p = sub.add_parser(cmd, help=doc)
        p.add_argument("file", help="complex document")
        p.set_defaults(func=fn)

    p = sub.add_parser("tau-sigma", help="twisted analytic torsion")
    p.add_argument("file", help="complex document")
    p.add_argument("--numeric", action="store_true", help="numeric path (any order)")
    p.add_argument("--precision", type=int, default=128, help="working precision in bits")
    p.set_defaults(func=_cmd_tau_sigma)

    build = sub.add_parser("build", help="construct complexes from documents")
    bsub = build.add_subparsers(dest="builder", required=True)

    p = bsub.add_parser("tensor-power", help="cyclic tensor power of a complex")
    p.add_argument("file", help="complex document")
    p.add_argument("--p", type=int, required=True, help="prime power order")
    p.add_argument("-o", "--output", help="write the complex document here")
    p.set_defaults(func=_cmd_build_tensor_power)

    p = bsub.add_parser("cw", help="cochain complex of cellular data")
    p.add_argument("file", help="cw document")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_build_cw)

    p = bsub.add_parser("morse", help="complex from critical points and flow lines")
    p.add_argument("file", help="morse document")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_build_morse)

    p = bsub.add_parser("restrict", help="restriction of scalars of an order complex")
    p.add_argument("file", help="order_complex document")
    p.add_argument("-o", "--output")
    p.add_argument("--with-norm", action="store_true", help="also check the torsion norm")
    p.set_defaults(func=_cmd_build_restrict)

    p = sub.add_parser("verify", help="run identity check suites")
    p.add_argument("--suite", default="all", help="check name or 'all'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--count",
        type=int,
        default=None,
        help="random instances per check (default: built-in anchors)",
    )
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
