"""Deterministic succession rules, attractors and basin weights."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .consistency import (
    CHUNK,
    ImpactBalanceVector,
    balance_block,
    check_cap,
    impact_balance,
    map_chunks,
    scenarios_from_ranks,
)
from .core import CrossImpactMatrix, Framework, Scenario, scenario_rank


class SuccessionRule(enum.Enum):
    GLOBAL = "global"
    INCREMENTAL = "incremental"
    LOCAL = "local"
    ADIABATIC = "adiabatic"

    @classmethod
    def parse(cls, value: "str | SuccessionRule") -> "SuccessionRule":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown succession rule {value!r}; expected one of {[r.value for r in cls]}"
            ) from None


def argmax_states(balance: ImpactBalanceVector | Sequence[int]) -> int:
    """Smallest 1-based state index attaining the maximum balance."""
    values = balance.balances if isinstance(balance, ImpactBalanceVector) else tuple(balance)
    return values.index(max(values)) + 1


def _step(cim: CrossImpactMatrix, scenario: Scenario, rule: SuccessionRule) -> Tuple[Scenario, bool]:
    """One succession step plus whether an argmax tie decided a moved state."""
    n = cim.framework.n
    best, gaps, tied = [], [], []
    for j in range(1, n + 1):
        bal = impact_balance(cim, scenario, j).balances
        top = max(bal)
        best.append(argmax_states(bal))
        gaps.append(top - bal[scenario[j - 1] - 1])
        tied.append(bal.count(top) > 1)
    inconsistent = [k for k in range(n) if gaps[k] > 0]
    if not inconsistent:
        return scenario, False
    new = list(scenario)
    if rule is SuccessionRule.GLOBAL:
        moved = inconsistent
        for k in moved:
            new[k] = best[k]
    elif rule is SuccessionRule.INCREMENTAL:
        moved = inconsistent
        for k in moved:
            new[k] += 1 if best[k] > new[k] else -1
    elif rule is SuccessionRule.LOCAL:
        top_gap = max(gaps)
        moved = [gaps.index(top_gap)]
        new[moved[0]] = best[moved[0]]
    elif rule is SuccessionRule.ADIABATIC:
        moved = [inconsistent[0]]
        new[moved[0]] = best[moved[0]]
    else:  # pragma: no cover
        raise ValueError(rule)
    return tuple(new), any(tied[k] for k in moved)


def successor(cim: CrossImpactMatrix, scenario: Sequence[int], rule: SuccessionRule | str) -> Scenario:
    """Apply one step of ``rule``; consistent scenarios map to themselves.

    Global moves every inconsistent descriptor to its best state,
    incremental moves each of them one state index toward it, local moves
    only the descriptor with the largest gap (lowest index on ties) and
    adiabatic moves the lowest-indexed inconsistent descriptor.
    """
    scenario = cim.framework.check_scenario(scenario)
    return _step(cim, scenario, SuccessionRule.parse(rule))[0]


@dataclass(frozen=True)
class Attractor:
    """A fixed point (one scenario) or a cycle rotated to start at its lowest rank."""

    scenarios: Tuple[Scenario, ...]

    @property
    def is_fixed_point(self) -> bool:
        return len(self.scenarios) == 1

    @property
    def kind(self) -> str:
        return "fixed" if self.is_fixed_point else "cycle"

    @classmethod
    def canonical(cls, framework: Framework, cycle: Sequence[Scenario]) -> "Attractor":
        ranks = [scenario_rank(framework, s) for s in cycle]
        k = ranks.index(min(ranks))
        return cls(tuple(cycle[k:]) + tuple(cycle[:k]))


def trajectory(
    cim: CrossImpactMatrix, start: Sequence[int], rule: SuccessionRule | str
) -> Attractor:
    """Follow succession from ``start`` until a scenario repeats."""
    fw = cim.framework
    rule = SuccessionRule.parse(rule)
    current = fw.check_scenario(start)
    seen: Dict[Scenario, int] = {}
    path: List[Scenario] = []
    steps = 0
    while current not in seen:
        seen[current] = len(path)
        path.append(current)
        current = _step(cim, current, rule)[0]
        steps += 1
        assert steps <= fw.size + 1, "succession did not terminate"
    return Attractor.canonical(fw, path[seen[current]:])


def successor_block(
    cim: CrossImpactMatrix, rule: SuccessionRule, start: int, stop: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Successor ranks and argmax-tie flags for ranks ``start..stop-1``."""
    bb = balance_block(cim, start, stop)
    gaps = bb.gaps
    cur = bb.digits
    arg = np.stack(bb.argmax, axis=1)
    tied = np.stack(bb.tied, axis=1)
    inc = gaps > 0
    rows = np.arange(len(bb.ranks))
    if rule in (SuccessionRule.GLOBAL, SuccessionRule.INCREMENTAL):
        if rule is SuccessionRule.GLOBAL:
            new = np.where(inc, arg, cur)
        else:
            new = cur + np.sign(arg - cur) * inc
        tie = (inc & tied).any(axis=1)
    else:
        if rule is SuccessionRule.LOCAL:
            sel = gaps.argmax(axis=1)
        else:
            sel = inc.argmax(axis=1)
        moving = inc.any(axis=1)
        new = cur.copy()
        r, c = rows[moving], sel[moving]
        new[r, c] = arg[r, c]
        tie = moving & tied[rows, sel]
    return new @ cim.framework.radix_weights(), tie


def successor_map(
    cim: CrossImpactMatrix,
    rule: SuccessionRule | str,
    cap: int | None = None,
    workers: int = 1,
    chunk: int = CHUNK,
) -> Tuple[np.ndarray, np.ndarray]:
    """Successor rank of every rank, plus per-rank argmax-tie flags."""
    rule = SuccessionRule.parse(rule)
    cim.require_valid()
    size = cim.framework.size
    check_cap(size, cap)
    parts = map_chunks(lambda a, b: successor_block(cim, rule, a, b), size, workers, chunk)
    return (
        np.concatenate([p[0] for p in parts]).astype(np.int64),
        np.concatenate([p[1] for p in parts]),
    )


def attractor_labels(succ: Sequence[int]) -> Tuple[List[int], List[List[int]]]:
    """Label every node of a functional graph with its attractor.

    Returns the per-node attractor id and the attractors as rank lists:
    fixed points first in ascending order, then cycles in the order they
    are first reached from ascending starts. Each node is walked once;
    paths stop at already-labelled nodes.
    """
    arr = np.asarray(succ, dtype=np.int64)
    size = len(arr)
    fixed = np.flatnonzero(arr == np.arange(size))
    attractors: List[List[int]] = [[int(x)] for x in fixed]
    label_arr = np.full(size, -1, dtype=np.int64)
    label_arr[fixed] = np.arange(len(fixed))
    label = label_arr.tolist()
    if len(fixed) == size:
        return label, attractors
    succ = arr.tolist()
    stamp = [-1] * size
    for s in range(size):
        if label[s] != -1:
            continue
        path = []
        x = s
        while label[x] == -1 and stamp[x] != s:
            stamp[x] = s
            path.append(x)
            x = succ[x]
        if label[x] == -1:
            lab = len(attractors)
            attractors.append(path[path.index(x):])
        else:
            lab = label[x]
        for y in path:
            label[y] = lab
    return label, attractors


@dataclass(frozen=True)
class WeightTable:
    """Basin weights of one CIM under one succession rule.

    ``entries`` maps each consistent scenario with a non-empty basin to its
    exact weight, in ascending rank order. Cycle basins are kept apart in
    ``cycles`` with their start counts and summed into ``cycle_mass``.
    """

    framework: Framework
    rule: SuccessionRule
    total: int
    counts: Dict[Scenario, int]
    cycles: Tuple[Tuple[Attractor, int], ...]
    argmax_tie: bool = False
    entries: Dict[Scenario, Fraction] = field(init=False)
    cycle_mass: Fraction = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", {s: Fraction(c, self.total) for s, c in self.counts.items()}
        )
        object.__setattr__(
            self, "cycle_mass", Fraction(sum(c for _, c in self.cycles), self.total)
        )

    def weight(self, scenario: Sequence[int]) -> Fraction:
        return self.entries.get(tuple(scenario), Fraction(0))


def basin_weights(
    cim: CrossImpactMatrix,
    rule: SuccessionRule | str,
    cap: int | None = None,
    workers: int = 1,
) -> WeightTable:
    """Fraction of all start scenarios whose trajectory ends at each fixed point."""
    rule = SuccessionRule.parse(rule)
    fw = cim.framework
    succ, tie = successor_map(cim, rule, cap, workers)
    label, attractors = attractor_labels(succ)
    sizes = np.bincount(np.asarray(label, dtype=np.int64), minlength=len(attractors))
    counts: Dict[int, int] = {}
    cycles = []
    for aid, ranks in enumerate(attractors):
        if len(ranks) == 1:
            counts[ranks[0]] = int(sizes[aid])
        else:
            cyc = Attractor.canonical(fw, scenarios_from_ranks(fw, ranks))
            cycles.append((scenario_rank(fw, cyc.scenarios[0]), cyc, int(sizes[aid])))
    fixed = sorted(counts)
    scen = scenarios_from_ranks(fw, fixed)
    return WeightTable(
        framework=fw,
        rule=rule,
        total=fw.size,
        counts={s: counts[r] for s, r in zip(scen, fixed)},
        cycles=tuple((c, n) for _, c, n in sorted(cycles, key=lambda t: t[0])),
        argmax_tie=bool(tie.any()),
    )
