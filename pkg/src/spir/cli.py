"""``spir`` command line: ``spir run|audit|capacity``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .adversary import Strategy
from .audit import BROKEN_MODELS, HONEST
from .errors import InvalidParams
from .harness import RunConfig, capacity_csv, cli_audit, cli_capacity_table, cli_run
from .schemes import SchemeKind


def int_range(text: str) -> list[int]:
    """Parse ``5``, ``5,7,9`` or ``5..7`` (inclusive)."""
    values: list[int] = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            values.extend(range(int(lo), int(hi) + 1))
        else:
            values.append(int(part))
    return values


def modulus(text: str) -> int | str:
    return "auto" if text == "auto" else int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spir", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scheme", choices=[k.value for k in SchemeKind], default="tbspir")
    common.add_argument("--q", type=modulus, default="auto",
                        help="field modulus, or 'auto' for the smallest prime >= N+1")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")

    single = argparse.ArgumentParser(add_help=False, parents=[common])
    single.add_argument("--n", type=int, required=True)
    single.add_argument("--k", type=int, default=2)
    single.add_argument("--t", type=int, default=1)
    single.add_argument("--b", type=int, default=0)
    single.add_argument("--e", type=int, default=0)
    single.add_argument("--seed", type=int, default=0)
    single.add_argument("--timing", action="store_true",
                        help="include wall-clock duration (makes reports non-reproducible)")

    run = sub.add_parser("run", parents=[single], help="Monte-Carlo retrieval trials")
    run.add_argument("--trials", type=int, default=100)
    run.add_argument("--adversary", choices=[s.value for s in Strategy], default="silent")

    aud = sub.add_parser("audit", parents=[single], help="exact privacy audits")
    aud.add_argument("--budget", type=int, default=None,
                     help="enumeration budget (default: $SPIR_AUDIT_BUDGET or 1e7)")
    aud.add_argument("--broken-fixture", choices=sorted(BROKEN_MODELS), help=argparse.SUPPRESS)

    cap = sub.add_parser("capacity", parents=[common], help="capacity / secrecy-rate CSV")
    cap.add_argument("--n", type=int_range, required=True)
    cap.add_argument("--k", type=int, default=2)
    cap.add_argument("--t", type=int_range, default=[1])
    cap.add_argument("--b", type=int_range, default=[0])
    cap.add_argument("--e", type=int_range, default=[0])
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "capacity":
            rows = cli_capacity_table([args.scheme], args.n, args.t, args.b, args.e, args.k, args.q)
            _emit(capacity_csv(rows), args.out)
            return 0
        config = RunConfig(args.scheme, args.n, args.k, args.t, args.b, args.e, args.q,
                           trials=getattr(args, "trials", 0),
                           adversary=getattr(args, "adversary", "silent"),
                           seed=args.seed, out=args.out)
        if args.command == "run":
            report = cli_run(config)
        else:
            model = BROKEN_MODELS[args.broken_fixture] if args.broken_fixture else HONEST
            report = cli_audit(config, args.budget, model)
    except InvalidParams as exc:
        print(f"spir: invalid parameters: {exc}", file=sys.stderr)
        return 2
    _emit(report.to_json(include_timing=args.timing), args.out)
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
