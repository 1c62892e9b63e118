"""Model documents (strict JSON), weight-table CSV and text reports."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .core import DEFAULT_IMPACT_RANGE, CrossImpactMatrix, Descriptor, Framework, Scenario, scenario_rank
from .multilevel import AggregationResult, SubsystemSplit, VerificationReport
from .succession import WeightTable
from .timechain import ManualValueTable, ScenarioChain, TimeSeriesModel

DEFAULT_PRECISION = 6


class ModelError(ValueError):
    """Malformed model document; ``path`` locates the offending element."""

    def __init__(self, message: str, path: str | None = None) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(frozen=True)
class ModelDocument:
    framework: Framework
    model: TimeSeriesModel
    manual_values: Optional[ManualValueTable] = None
    split: Optional[SubsystemSplit] = None
    impact_range: int = DEFAULT_IMPACT_RANGE


def _no_duplicates(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for k, v in pairs:
        if k in out:
            raise ModelError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _object(value: Any, path: str, required: Sequence[str], optional: Sequence[str] = ()) -> dict:
    if not isinstance(value, dict):
        raise ModelError(f"expected an object, got {type(value).__name__}", path)
    for key in value:
        if key not in required and key not in optional:
            raise ModelError(f"unknown field {key!r}", _join(path, key))
    for key in required:
        if key not in value:
            raise ModelError(f"missing required field {key!r}", path)
    return value


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ModelError(f"expected an array, got {type(value).__name__}", path)
    return value


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise ModelError("expected a non-empty string", path)
    return value


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelError(f"expected an integer, got {value!r}", path)
    return value


def _parse_framework(raw: Any) -> Framework:
    fw = _object(raw, "framework", ["descriptors"])
    descs = []
    for a, d in enumerate(_list(fw["descriptors"], "framework.descriptors")):
        p = f"framework.descriptors[{a}]"
        d = _object(d, p, ["name", "states"])
        states = tuple(
            _string(s, f"{p}.states[{b}]") for b, s in enumerate(_list(d["states"], f"{p}.states"))
        )
        descs.append(Descriptor(_string(d["name"], f"{p}.name"), states))
    try:
        return Framework(tuple(descs))
    except ValueError as e:
        raise ModelError(str(e), "framework.descriptors") from None


def _parse_cells(raw: Any, fw: Framework, path: str) -> dict:
    cells_raw = _object(raw, path, [], list(raw) if isinstance(raw, dict) else [])
    cells = {}
    for key, matrix in cells_raw.items():
        p = _join(path, key)
        src, sep, dst = key.partition("->")
        if not sep:
            raise ModelError("cell key must have the form '<source>-><target>'", p)
        try:
            i, j = fw.descriptor_index(src), fw.descriptor_index(dst)
        except KeyError as e:
            raise ModelError(f"unknown descriptor {e.args[0]!r}", p) from None
        expected = (fw.sizes[i - 1], fw.sizes[j - 1])
        rows = _list(matrix, p)
        if len(rows) != expected[0] or any(
            not isinstance(r, list) or len(r) != expected[1] for r in rows
        ):
            raise ModelError(
                f"dimension mismatch, expected {expected[0]}x{expected[1]} (source states x target states)",
                p,
            )
        cells[(i, j)] = [
            [_integer(v, f"{p}[{a}][{b}]") for b, v in enumerate(r)] for a, r in enumerate(rows)
        ]
    return cells


def _parse_manual(raw: Any, fw: Framework) -> ManualValueTable:
    table = _object(raw, "manual_values", [], list(raw) if isinstance(raw, dict) else [])
    values = {}
    for name, states in table.items():
        p = _join("manual_values", name)
        try:
            k = fw.descriptor_index(name)
        except KeyError:
            raise ModelError(f"unknown descriptor {name!r}", p) from None
        states = _object(states, p, [], list(states) if isinstance(states, dict) else [])
        for sname, v in states.items():
            sp = _join(p, sname)
            try:
                s = fw.state_index(k, sname)
            except KeyError:
                raise ModelError(f"unknown state {sname!r}", sp) from None
            if isinstance(v, bool) or not isinstance(v, Real):
                raise ModelError(f"expected a number, got {v!r}", sp)
            values[(k, s)] = v
    try:
        mvt = ManualValueTable(fw, values)
    except ValueError as e:
        raise ModelError(str(e), "manual_values") from None
    missing = mvt.missing()
    if missing:
        k, s = missing[0]
        d = fw.descriptors[k - 1]
        raise ModelError(f"missing value for state {d.states[s - 1]!r}", _join("manual_values", d.name))
    return mvt


def _parse_split(raw: Any, fw: Framework) -> SubsystemSplit:
    subsets = []
    for a, subset in enumerate(_list(raw, "split")):
        p = f"split[{a}]"
        idx = []
        for b, name in enumerate(_list(subset, p)):
            try:
                idx.append(fw.descriptor_index(_string(name, f"{p}[{b}]")))
            except KeyError:
                raise ModelError(f"unknown descriptor {name!r}", f"{p}[{b}]") from None
        if len(set(idx)) != len(idx):
            raise ModelError("duplicate descriptor in subset", p)
        subsets.append(tuple(idx))
    return SubsystemSplit(tuple(subsets))


def parse_model(text: str) -> ModelDocument:
    """Parse a model document, resolving descriptor and state names to indices.

    Unknown fields, duplicate keys, wrong types and cell dimension mismatches
    raise :class:`ModelError` with a dotted path. Value-range and split
    problems are left to the validators.
    """
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise ModelError(f"syntax error at line {e.lineno} column {e.colno}: {e.msg}") from None
    doc = _object(raw, "", ["framework", "timespans"], ["impact_range", "manual_values", "split"])
    fw = _parse_framework(doc["framework"])
    r = DEFAULT_IMPACT_RANGE
    if "impact_range" in doc:
        r = _integer(doc["impact_range"], "impact_range")
        if r < 1:
            raise ModelError("impact range must be positive", "impact_range")
    spans = []
    labels = set()
    for a, ts in enumerate(_list(doc["timespans"], "timespans")):
        p = f"timespans[{a}]"
        ts = _object(ts, p, ["label"], ["cells"])
        label = _string(ts["label"], f"{p}.label")
        if label in labels:
            raise ModelError(f"duplicate timespan label {label!r}", f"{p}.label")
        labels.add(label)
        cells = _parse_cells(ts.get("cells", {}), fw, f"{p}.cells")
        spans.append((label, CrossImpactMatrix(fw, cells, r)))
    if not spans:
        raise ModelError("at least one timespan is required", "timespans")
    manual = _parse_manual(doc["manual_values"], fw) if "manual_values" in doc else None
    split = _parse_split(doc["split"], fw) if "split" in doc else None
    return ModelDocument(fw, TimeSeriesModel(fw, tuple(spans)), manual, split, r)


def load_model(path: str) -> ModelDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ModelError(f"cannot read {path}: {e.strerror or e}") from None
    return parse_model(text)


def model_to_dict(doc: ModelDocument) -> dict:
    fw = doc.framework
    out: Dict[str, Any] = {
        "framework": {
            "descriptors": [{"name": d.name, "states": list(d.states)} for d in fw.descriptors]
        },
        "impact_range": doc.impact_range,
        "timespans": [
            {
                "label": label,
                "cells": {
                    f"{fw.names[i - 1]}->{fw.names[j - 1]}": v.tolist()
                    for (i, j), v in cim.cells.items()
                },
            }
            for label, cim in doc.model.timespans
        ],
    }
    if doc.manual_values is not None:
        out["manual_values"] = {
            d.name: {s: doc.manual_values.values[(k, b)] for b, s in enumerate(d.states, start=1)}
            for k, d in enumerate(fw.descriptors, start=1)
        }
    if doc.split is not None:
        out["split"] = [[fw.names[k - 1] for k in s] for s in doc.split.subsets]
    return out


def dump_model(doc: ModelDocument) -> str:
    return json.dumps(model_to_dict(doc), indent=2) + "\n"


# -- reports -----------------------------------------------------------------

def format_fraction(value: Fraction, precision: int = DEFAULT_PRECISION) -> str:
    """Decimal rendering of an exact rational, rounded half-to-even."""
    q = round(Fraction(value) * 10**precision)
    sign = "-" if q < 0 else ""
    digits = str(abs(q))
    if precision == 0:
        return sign + digits
    digits = digits.rjust(precision + 1, "0")
    return f"{sign}{digits[:-precision]}.{digits[-precision:]}"


def format_cycle(framework: Framework, scenarios: Sequence[Scenario]) -> str:
    return " > ".join(framework.format_scenario(s) for s in scenarios)


def write_weight_table(table: WeightTable, precision: int = DEFAULT_PRECISION) -> str:
    """CSV rows per weighted scenario (descending weight, then rank), then cycles and cycle mass."""
    fw = table.framework
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario", "rank", "weight_num", "weight_den", "weight_decimal"])
    rows = sorted(
        ((s, scenario_rank(fw, s), wt) for s, wt in table.entries.items()),
        key=lambda t: (-t[2], t[1]),
    )
    for s, r, wt in rows:
        w.writerow([fw.format_scenario(s), r, wt.numerator, wt.denominator, format_fraction(wt, precision)])
    for cyc, count in table.cycles:
        wt = Fraction(count, table.total)
        w.writerow(
            [
                "cycle:" + format_cycle(fw, cyc.scenarios),
                scenario_rank(fw, cyc.scenarios[0]),
                wt.numerator,
                wt.denominator,
                format_fraction(wt, precision),
            ]
        )
    cm = table.cycle_mass
    w.writerow(["cycle_mass", "", cm.numerator, cm.denominator, format_fraction(cm, precision)])
    return buf.getvalue()


def _weight(value: Fraction, precision: int) -> str:
    return f"{value} ({format_fraction(value, precision)})"


def render_chain_report(chain: ScenarioChain, precision: int = DEFAULT_PRECISION) -> str:
    """Markdown report with one section per timespan.

    Compound chains always carry manual and compound weights, since
    ``build_chain`` refuses compound weighting without a value table.
    """
    fw = chain.framework
    lines = [
        "# Scenario chain",
        "",
        f"- rule: {chain.rule.value}",
        f"- weighting: {chain.weighting}",
        f"- timespans: {len(chain.links)}",
        "- chain: " + " -> ".join(fw.format_scenario(l.scenario) for l in chain.links),
        "",
    ]
    for n, link in enumerate(chain.links, start=1):
        lines += [
            f"## {n}. {link.label}",
            "",
            f"- chosen: {fw.format_scenario(link.scenario)} (rank {scenario_rank(fw, link.scenario)})",
            f"- scenario weight: {_weight(link.weight, precision)}",
        ]
        if link.manual is not None:
            lines.append(f"- manual weight: {_weight(link.manual, precision)}")
        if link.compound is not None:
            lines.append(f"- compound weight: {_weight(link.compound, precision)}")
        if link.tie:
            lines.append(f"- tie: yes, {len(link.tied)} scenarios share the maximum")
            lines += [
                f"  - {fw.format_scenario(s)} (rank {scenario_rank(fw, s)})" for s in link.tied
            ]
        else:
            lines.append("- tie: no")
        if link.nonpositive:
            lines.append("- note: the maximal compound weight is not positive")
        lines += ["", "Weight table:", "", "```csv"]
        lines.append(write_weight_table(link.table, precision).rstrip("\n"))
        lines += ["```", ""]
    return "\n".join(lines)


def render_consistent(framework: Framework, label: str, scenarios: Sequence[Scenario], tolerance: int) -> str:
    lines = [f"# timespan: {label} (tolerance {tolerance}, {len(scenarios)} consistent)"]
    lines += [f"{scenario_rank(framework, s)}\t{framework.format_scenario(s)}" for s in scenarios]
    return "\n".join(lines) + "\n"


def render_aggregation(
    framework: Framework,
    label: str,
    result: AggregationResult,
    report: Optional[VerificationReport] = None,
) -> str:
    names = framework.names
    lines = [f"# timespan: {label}", ""]
    for a, sub in enumerate(result.subsystems, start=1):
        members = ",".join(names[k - 1] for k in sub.subset)
        lines.append(f"- subsystem {a} [{members}]: {len(sub.consistent)} consistent")
    lines.append("- transitional: [" + ",".join(names[k - 1] for k in sorted(result.transitional)) + "]")
    lines.append(f"- combinatorials: {result.combinatorials}")
    lines.append(f"- aggregated: {len(result.aggregated)}")
    lines += [f"  - {framework.format_scenario(s)}" for s in result.aggregated]
    if report is not None:
        lines += [
            "",
            "Verification against full enumeration:",
            f"- consistent in full CIM: {len(report.consistent)}",
            f"- common: {report.common}",
            f"- unsound (aggregated but inconsistent): {len(report.unsound)}",
        ]
        lines += [f"  - {framework.format_scenario(s)}" for s in report.unsound]
        lines.append(f"- missing (consistent but not aggregated): {len(report.missing)}")
        lines += [f"  - {framework.format_scenario(s)}" for s in report.missing]
    return "\n".join(lines) + "\n"
