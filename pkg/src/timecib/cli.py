"""Command-line entry point: ``timecib <subcommand> MODEL [flags]``.

Exit status 0 on success, 1 on a domain failure (invalid model on
``validate``, no consistent scenario, unsound aggregation), 2 on usage,
read or parse errors and enumeration-cap refusals.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .consistency import DEFAULT_CAP, CapExceeded, enumerate_consistent
from .io import (
    DEFAULT_PRECISION,
    ModelDocument,
    ModelError,
    load_model,
    render_aggregation,
    render_chain_report,
    render_consistent,
    write_weight_table,
)
from .multilevel import aggregate, validate_split, verify_aggregation
from .succession import SuccessionRule, basin_weights
from .timechain import ChainError, build_chain, validate_series

RULES = [r.value for r in SuccessionRule]


class UsageError(Exception):
    pass


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timecib", description="Cross-impact balance scenarios over multiple timespans."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("model", help="model document (JSON)")
        p.add_argument("--timespan", help="restrict to one timespan label")
        p.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="enumeration cap")
        p.add_argument("--workers", type=_positive, default=1, help="worker threads")
        return p

    add("validate", "validate the model and report every violation")
    p = add("consistent", "list consistent scenarios per timespan")
    p.add_argument("--tolerance", type=_nonneg, default=0)
    p = add("weights", "basin weight table (CSV) per timespan")
    p.add_argument("--rule", choices=RULES, required=True)
    p.add_argument("--precision", type=_nonneg, default=DEFAULT_PRECISION)
    p = add("chain", "highest-weight scenario chain")
    p.add_argument("--rule", choices=RULES, required=True)
    p.add_argument("--weighting", choices=["scenario", "compound"], default="scenario")
    p.add_argument("--precision", type=_nonneg, default=DEFAULT_PRECISION)
    p.add_argument(
        "--filter",
        help="JSON file mapping timespan labels to allowed scenarios (lists of state names)",
    )
    p = add("aggregate", "aggregate subsystem scenarios using the model's split")
    p.add_argument("--verify", action="store_true", help="compare against full enumeration")
    return parser


def _timespans(doc: ModelDocument, label: Optional[str]):
    if label is None:
        return list(doc.model.timespans)
    for item in doc.model.timespans:
        if item[0] == label:
            return [item]
    raise UsageError(f"unknown timespan {label!r}; available: {list(doc.model.labels)}")


def _require_valid(doc: ModelDocument) -> None:
    errors = [v for v in validate_series(doc.model) if v.violation.severity == "error"]
    if errors:
        raise UsageError("invalid model (run 'validate' for details): " + str(errors[0]))


def _load_filter(path: str, doc: ModelDocument) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read filter {path}: {e}") from None
    fw = doc.framework
    if not isinstance(raw, dict):
        raise UsageError("filter must map timespan labels to lists of scenarios")
    allow = {}
    for label, scenarios in raw.items():
        if label not in doc.model.labels:
            raise UsageError(f"filter names unknown timespan {label!r}")
        allowed = set()
        for names in scenarios:
            if not isinstance(names, list) or len(names) != fw.n:
                raise UsageError(f"filter[{label!r}]: each scenario lists one state name per descriptor")
            try:
                allowed.add(tuple(fw.state_index(k, s) for k, s in enumerate(names, start=1)))
            except KeyError as e:
                raise UsageError(f"filter[{label!r}]: unknown state {e.args[0]!r}") from None
        allow[label] = allowed
    return allow


def _validate(doc: ModelDocument, args, out) -> int:
    violations = [str(v) for v in validate_series(doc.model)]
    errors = [v for v in validate_series(doc.model) if v.violation.severity == "error"]
    if doc.split is not None:
        for label, cim in doc.model.timespans:
            for v in validate_split(cim, doc.split):
                violations.append(f"timespan {label!r} split: {v}")
                if v.severity == "error":
                    errors.append(v)
    for line in violations:
        out.write(line + "\n")
    out.write("valid\n" if not errors else f"{len(errors)} error(s)\n")
    return 0 if not errors else 1


def _consistent(doc: ModelDocument, args, out) -> int:
    _require_valid(doc)
    status = 0
    for label, cim in _timespans(doc, args.timespan):
        found = enumerate_consistent(cim, args.tolerance, cap=args.cap, workers=args.workers)
        out.write(render_consistent(doc.framework, label, found, args.tolerance))
        if not found:
            status = 1
    return status


def _weights(doc: ModelDocument, args, out) -> int:
    _require_valid(doc)
    spans = _timespans(doc, args.timespan)
    for n, (label, cim) in enumerate(spans):
        table = basin_weights(cim, args.rule, cap=args.cap, workers=args.workers)
        if len(spans) > 1:
            if n:
                out.write("\n")
            out.write(f"# timespan: {label}\n")
        out.write(write_weight_table(table, args.precision))
    return 0


def _chain(doc: ModelDocument, args, out) -> int:
    _require_valid(doc)
    if args.weighting == "compound" and doc.manual_values is None:
        raise UsageError("--weighting compound requires manual_values in the model")
    allow = _load_filter(args.filter, doc) if args.filter else None
    model = doc.model
    if args.timespan is not None:
        model = type(model)(model.framework, tuple(_timespans(doc, args.timespan)))
    try:
        chain = build_chain(
            model,
            args.rule,
            args.weighting,
            doc.manual_values,
            allow=allow,
            cap=args.cap,
            workers=args.workers,
        )
    except ChainError as e:
        sys.stderr.write(f"chain failed: {e}\n")
        return 1
    out.write(render_chain_report(chain, args.precision))
    return 0


def _aggregate(doc: ModelDocument, args, out) -> int:
    _require_valid(doc)
    if doc.split is None:
        raise UsageError("model has no split; add a 'split' field to use aggregate")
    status = 0
    for n, (label, cim) in enumerate(_timespans(doc, args.timespan)):
        problems = [v for v in validate_split(cim, doc.split) if v.severity == "error"]
        if problems:
            raise UsageError(f"timespan {label!r}: invalid split: {problems[0]}")
        if n:
            out.write("\n")
        result = aggregate(cim, doc.split, cap=args.cap)
        report = verify_aggregation(cim, doc.split, cap=args.cap) if args.verify else None
        out.write(render_aggregation(doc.framework, label, result, report))
        if report is not None and not report.sound:
            status = 1
    return status


COMMANDS = {
    "validate": _validate,
    "consistent": _consistent,
    "weights": _weights,
    "chain": _chain,
    "aggregate": _aggregate,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        doc = load_model(args.model)
        return COMMANDS[args.command](doc, args, out)
    except (ModelError, UsageError, CapExceeded) as e:
        sys.stderr.write(f"timecib: {e}\n")
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
