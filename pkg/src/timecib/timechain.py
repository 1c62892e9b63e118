"""Multi-timespan models and highest-weight scenario chains."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .core import CrossImpactMatrix, Framework, Scenario, Violation, scenario_rank, validate_cim
from .succession import SuccessionRule, WeightTable, basin_weights


class ChainError(ValueError):
    """A timespan cannot contribute a link to the chain."""

    def __init__(self, label: str, reason: str) -> None:
        super().__init__(f"timespan {label!r}: {reason}")
        self.label = label


@dataclass(frozen=True)
class TimeSeriesModel:
    framework: Framework
    timespans: Tuple[Tuple[str, CrossImpactMatrix], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "timespans", tuple((str(l), c) for l, c in self.timespans))

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(l for l, _ in self.timespans)

    def cim(self, label: str) -> CrossImpactMatrix:
        for l, c in self.timespans:
            if l == label:
                return c
        raise KeyError(label)


@dataclass(frozen=True)
class SeriesViolation:
    timespan: Optional[str]
    violation: Violation

    def __str__(self) -> str:
        where = f"timespan {self.timespan!r}: " if self.timespan is not None else ""
        return where + str(self.violation)


def validate_series(model: TimeSeriesModel) -> list:
    out = []
    if not model.timespans:
        out.append(SeriesViolation(None, Violation("timespans", "at least one timespan is required")))
    seen = set()
    for label, cim in model.timespans:
        if label in seen:
            out.append(SeriesViolation(label, Violation("timespans", "duplicate timespan label")))
        seen.add(label)
        if cim.framework != model.framework:
            out.append(
                SeriesViolation(
                    label,
                    Violation("framework-mismatch", "CIM framework differs from the model framework"),
                )
            )
            continue
        out.extend(SeriesViolation(label, v) for v in validate_cim(cim))
    return out


@dataclass(frozen=True)
class ManualValueTable:
    """User-assigned value per (descriptor, state), both 1-based."""

    framework: Framework
    values: Mapping[Tuple[int, int], float]

    def __post_init__(self) -> None:
        vals = {}
        for (k, s), v in self.values.items():
            if isinstance(v, bool) or not isinstance(v, Real) or not math.isfinite(v):
                raise ValueError(f"value for descriptor {k} state {s} must be a finite real, got {v!r}")
            vals[(int(k), int(s))] = v
        object.__setattr__(self, "values", dict(sorted(vals.items())))

    @classmethod
    def from_lists(cls, framework: Framework, rows: Sequence[Sequence[float]]) -> "ManualValueTable":
        return cls(
            framework,
            {(k, s): v for k, row in enumerate(rows, start=1) for s, v in enumerate(row, start=1)},
        )

    @classmethod
    def constant(cls, framework: Framework, value: float) -> "ManualValueTable":
        return cls.from_lists(framework, [[value] * n for n in framework.sizes])

    def missing(self) -> list:
        return [
            (k, s)
            for k, n in enumerate(self.framework.sizes, start=1)
            for s in range(1, n + 1)
            if (k, s) not in self.values
        ]


def manual_weight(scenario: Sequence[int], table: ManualValueTable) -> Fraction:
    """Sum of the table values of the chosen states, computed exactly."""
    scenario = table.framework.check_scenario(scenario)
    total = Fraction(0)
    for k, s in enumerate(scenario, start=1):
        if (k, s) not in table.values:
            d = table.framework.descriptors[k - 1]
            raise KeyError(f"no manual value for descriptor {d.name} state {d.states[s - 1]} ({k},{s})")
        total += Fraction(table.values[(k, s)])
    return total


def compound_weight(scenario_weight: Fraction, manual: Real) -> Fraction:
    if not 0 <= scenario_weight <= 1:
        raise ValueError(f"scenario weight {scenario_weight} outside [0, 1]")
    return Fraction(scenario_weight) * Fraction(manual)


@dataclass(frozen=True)
class ChainLink:
    label: str
    scenario: Scenario
    weight: Fraction
    manual: Optional[Fraction]
    compound: Optional[Fraction]
    tie: bool
    tied: Tuple[Scenario, ...]
    table: WeightTable
    nonpositive: bool = False


@dataclass(frozen=True)
class ScenarioChain:
    links: Tuple[ChainLink, ...]
    weighting: str
    rule: SuccessionRule
    framework: Framework = field(repr=False)


def _pick_link(
    label: str,
    table: WeightTable,
    weighting: str,
    values: Optional[ManualValueTable],
    allow: Optional[set],
) -> ChainLink:
    fw = table.framework
    candidates = list(table.entries.items())
    if allow is not None:
        candidates = [(s, w) for s, w in candidates if s in allow]
    if not candidates:
        if allow is not None and table.entries:
            reason = "no weighted consistent scenario passes the filter"
        elif table.cycles:
            reason = "all basin mass ends in cycles; no consistent scenario to choose"
        else:
            reason = "no consistent scenarios"
        raise ChainError(label, reason)
    manual: Dict[Scenario, Fraction] = {}
    compound: Dict[Scenario, Fraction] = {}
    if weighting == "compound":
        for s, w in candidates:
            manual[s] = manual_weight(s, values)
            compound[s] = compound_weight(w, manual[s])
        score = compound
    else:
        score = dict(candidates)
    top = max(score.values())
    tied = tuple(sorted((s for s in score if score[s] == top), key=lambda s: scenario_rank(fw, s)))
    chosen = tied[0]
    return ChainLink(
        label=label,
        scenario=chosen,
        weight=table.entries[chosen],
        manual=manual.get(chosen),
        compound=compound.get(chosen),
        tie=len(tied) > 1,
        tied=tied,
        table=table,
        nonpositive=weighting == "compound" and top <= 0,
    )


def build_chain(
    model: TimeSeriesModel,
    rule: SuccessionRule | str,
    weighting: str = "scenario",
    values: Optional[ManualValueTable] = None,
    allow: Optional[Mapping[str, set]] = None,
    cap: int | None = None,
    workers: int = 1,
) -> ScenarioChain:
    """Highest-weight consistent scenario of every timespan, in model order.

    ``weighting`` is ``"scenario"`` (basin weight) or ``"compound"`` (basin
    weight times the manual weight from ``values``). Ties go to the smallest
    rank and are reported on the link. ``allow`` optionally restricts each
    timespan's candidates to an externally supplied set of scenarios.
    """
    rule = SuccessionRule.parse(rule)
    if weighting not in ("scenario", "compound"):
        raise ValueError(f"weighting must be 'scenario' or 'compound', got {weighting!r}")
    if weighting == "compound":
        if values is None:
            raise ValueError("compound weighting requires a manual value table")
        if values.framework != model.framework:
            raise ValueError("manual value table is over a different framework")
        missing = values.missing()
        if missing:
            raise ValueError(f"manual value table is incomplete, missing {missing}")
    errors = [v for v in validate_series(model) if v.violation.severity == "error"]
    if errors:
        raise ValueError("invalid model: " + "; ".join(str(e) for e in errors))

    def weigh(item):
        return basin_weights(item[1], rule, cap=cap, workers=1)

    if workers > 1 and len(model.timespans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tables = list(pool.map(weigh, model.timespans))
    else:
        tables = [basin_weights(c, rule, cap=cap, workers=workers) for _, c in model.timespans]

    links = []
    for (label, _), table in zip(model.timespans, tables):
        allowed = None
        if allow is not None and label in allow:
            allowed = {tuple(s) for s in allow[label]}
        links.append(_pick_link(label, table, weighting, values, allowed))
    return ScenarioChain(tuple(links), weighting, rule, model.framework)
