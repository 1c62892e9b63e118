"""Subsystem splits, per-subsystem solving and scenario aggregation."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .consistency import check_cap, enumerate_consistent
from .core import CrossImpactMatrix, Framework, Scenario, Violation, scenario_rank


@dataclass(frozen=True)
class SubsystemSplit:
    """Sub-descriptor sets as 1-based descriptor indices, kept sorted."""

    subsets: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "subsets", tuple(tuple(sorted(set(int(k) for k in s))) for s in self.subsets)
        )

    def members_of(self, k: int) -> List[int]:
        return [a for a, s in enumerate(self.subsets) if k in s]


def split_violations(split: SubsystemSplit, n: int) -> List[Violation]:
    out = []
    subsets = split.subsets
    if len(subsets) < 2:
        out.append(Violation("split", f"a split needs at least 2 subsets, got {len(subsets)}"))
    for a, s in enumerate(subsets, start=1):
        if len(s) < 2:
            out.append(Violation("split", f"subset {a} has {len(s)} descriptor(s), at least 2 are required"))
        bad = [k for k in s if not 1 <= k <= n]
        if bad:
            out.append(Violation("split", f"subset {a} references unknown descriptors {bad}"))
    covered = set(itertools.chain.from_iterable(subsets))
    missing = sorted(set(range(1, n + 1)) - covered)
    if missing:
        out.append(Violation("split", f"descriptors {missing} are not covered by any subset"))
    if subsets and not _connected(subsets):
        out.append(Violation("split", "overlap graph of the subsets is not connected"))
    return out


def _connected(subsets: Sequence[Tuple[int, ...]]) -> bool:
    reached = {0}
    frontier = [0]
    while frontier:
        a = frontier.pop()
        for b, s in enumerate(subsets):
            if b not in reached and set(subsets[a]) & set(s):
                reached.add(b)
                frontier.append(b)
    return len(reached) == len(subsets)


def validate_split(
    cim: CrossImpactMatrix,
    split: SubsystemSplit,
    subsystem_cims: Optional[Sequence[CrossImpactMatrix]] = None,
) -> List[Violation]:
    """Report split-shape problems, impacts crossing non-overlapping subsets,
    and disagreements between declared subsystem CIMs on shared pairs."""
    out = split_violations(split, cim.framework.n)
    together = set()
    for s in split.subsets:
        together.update(itertools.permutations(s, 2))
    for (i, j), values in cim.cells.items():
        if (i, j) not in together and values.any():
            out.append(
                Violation(
                    "cross-subset",
                    "nonzero impact between descriptors that share no subset",
                    (i, j),
                )
            )
    if subsystem_cims is not None:
        views: Dict[Tuple[int, int], Tuple[int, object]] = {}
        for a, (s, sub) in enumerate(zip(split.subsets, subsystem_cims), start=1):
            for (li, lj) in itertools.permutations(range(1, len(s) + 1), 2):
                pair = (s[li - 1], s[lj - 1])
                values = sub.cell(li, lj).values
                if pair in views and views[pair][1].tobytes() != values.tobytes():
                    out.append(
                        Violation(
                            "shared-cell",
                            f"subsystems {views[pair][0]} and {a} disagree on this judgement cell",
                            pair,
                        )
                    )
                views.setdefault(pair, (a, values))
    return out


def project_cim(cim: CrossImpactMatrix, subset: Sequence[int]) -> CrossImpactMatrix:
    """CIM of the subsystem on ``subset``, renumbered 1..len(subset) in parent order."""
    subset = sorted(set(int(k) for k in subset))
    if len(subset) < 2:
        raise ValueError(f"a subsystem needs at least 2 descriptors, got {len(subset)}")
    fw = cim.framework
    if any(not 1 <= k <= fw.n for k in subset):
        raise ValueError(f"subset {subset} references descriptors outside 1..{fw.n}")
    local = {k: a for a, k in enumerate(subset, start=1)}
    sub_fw = Framework(tuple(fw.descriptors[k - 1] for k in subset))
    cells = {
        (local[i], local[j]): v for (i, j), v in cim.cells.items() if i in local and j in local
    }
    return CrossImpactMatrix(sub_fw, cells, cim.impact_range)


def transitional_set(split: SubsystemSplit) -> FrozenSet[int]:
    """Descriptors that belong to two or more subsets."""
    seen: Dict[int, int] = {}
    for s in split.subsets:
        for k in s:
            seen[k] = seen.get(k, 0) + 1
    return frozenset(k for k, c in seen.items() if c >= 2)


@dataclass(frozen=True)
class Combinatorial:
    """One consistent scenario per subsystem, each over that subset's descriptors."""

    members: Tuple[Scenario, ...]


def enumerate_combinatorials(
    consistent_sets: Sequence[Sequence[Scenario]], cap: int | None = None
) -> Iterator[Combinatorial]:
    """Cartesian product of the per-subsystem consistent sets.

    Inputs are expected in ascending rank order, so the stream is
    lexicographic in member ranks.
    """
    total = math.prod(len(s) for s in consistent_sets)
    check_cap(total, cap)
    for members in itertools.product(*consistent_sets):
        yield Combinatorial(tuple(tuple(m) for m in members))


class AggregationConflict(ValueError):
    def __init__(self, descriptor: int, states: Tuple[int, ...]) -> None:
        super().__init__(
            f"members disagree on transitional descriptor {descriptor}: states {list(states)}"
        )
        self.descriptor = descriptor
        self.states = states


def aggregate_combinatorial(
    combo: Combinatorial, split: SubsystemSplit, transitional: FrozenSet[int]
) -> Scenario:
    """Merge members into one full scenario when they agree on every transitional descriptor."""
    if len(combo.members) != len(split.subsets):
        raise ValueError(
            f"combinatorial has {len(combo.members)} members, split has {len(split.subsets)} subsets"
        )
    assigned: Dict[int, List[int]] = {}
    for s, z in zip(split.subsets, combo.members):
        if len(z) != len(s):
            raise ValueError(f"member {z} does not match subset {s}")
        for k, v in zip(s, z):
            assigned.setdefault(k, []).append(v)
    for k in sorted(transitional):
        states = assigned.get(k, [])
        if len(set(states)) > 1:
            raise AggregationConflict(k, tuple(states))
    n = max(assigned)
    return tuple(assigned[k][0] for k in range(1, n + 1))


@dataclass(frozen=True)
class SubsystemResult:
    subset: Tuple[int, ...]
    consistent: Tuple[Scenario, ...]


@dataclass(frozen=True)
class AggregationResult:
    subsystems: Tuple[SubsystemResult, ...]
    transitional: FrozenSet[int]
    combinatorials: int
    aggregated: Tuple[Scenario, ...]


def aggregate(
    cim: CrossImpactMatrix, split: SubsystemSplit, cap: int | None = None
) -> AggregationResult:
    """Solve every subsystem and aggregate all agreeing combinatorials."""
    problems = [v for v in validate_split(cim, split) if v.severity == "error"]
    if problems:
        raise ValueError("invalid split: " + "; ".join(str(v) for v in problems))
    subs = []
    for s in split.subsets:
        subs.append(SubsystemResult(s, tuple(enumerate_consistent(project_cim(cim, s), cap=cap))))
    t = transitional_set(split)
    merged = set()
    count = 0
    for combo in enumerate_combinatorials([r.consistent for r in subs], cap=cap):
        count += 1
        try:
            merged.add(aggregate_combinatorial(combo, split, t))
        except AggregationConflict:
            pass
    fw = cim.framework
    return AggregationResult(
        tuple(subs), t, count, tuple(sorted(merged, key=lambda z: scenario_rank(fw, z)))
    )


@dataclass(frozen=True)
class VerificationReport:
    aggregated: Tuple[Scenario, ...]
    consistent: Tuple[Scenario, ...]
    unsound: Tuple[Scenario, ...]
    missing: Tuple[Scenario, ...]
    common: int

    @property
    def sound(self) -> bool:
        return not self.unsound

    @property
    def complete(self) -> bool:
        return not self.missing


def verify_aggregation(
    cim: CrossImpactMatrix, split: SubsystemSplit, cap: int | None = None
) -> VerificationReport:
    """Compare aggregated scenarios against brute-force enumeration of the full CIM.

    ``unsound`` lists aggregated scenarios that are inconsistent in the full
    CIM; ``missing`` lists fully consistent scenarios aggregation never produces.
    """
    check_cap(cim.framework.size, cap)
    result = aggregate(cim, split, cap)
    fw = cim.framework
    a = set(result.aggregated)
    b = set(enumerate_consistent(cim, cap=cap))
    order = lambda zs: tuple(sorted(zs, key=lambda z: scenario_rank(fw, z)))  # noqa: E731
    return VerificationReport(
        aggregated=result.aggregated,
        consistent=order(b),
        unsound=order(a - b),
        missing=order(b - a),
        common=len(a & b),
    )
