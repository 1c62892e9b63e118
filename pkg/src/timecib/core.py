"""Descriptor/state frameworks, scenarios and cross-impact matrices.

Descriptor and state indices are 1-based everywhere in the public API.
Internally, rank arithmetic and the numpy kernels work with 0-based digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Tuple

import numpy as np

Scenario = Tuple[int, ...]
Pair = Tuple[int, int]

DEFAULT_IMPACT_RANGE = 3
MAX_SCENARIOS = 2**64


@dataclass(frozen=True)
class Descriptor:
    name: str
    states: Tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))


@dataclass(frozen=True)
class Framework:
    """Ordered descriptors with their ordered states; shared by every timespan."""

    descriptors: Tuple[Descriptor, ...]

    def __post_init__(self) -> None:
        descs = tuple(
            d if isinstance(d, Descriptor) else Descriptor(d[0], tuple(d[1]))
            for d in self.descriptors
        )
        object.__setattr__(self, "descriptors", descs)
        if len(descs) < 2:
            raise ValueError(f"a framework needs at least 2 descriptors, got {len(descs)}")
        names = [d.name for d in descs]
        for d in descs:
            if not isinstance(d.name, str) or not d.name:
                raise ValueError("descriptor names must be non-empty strings")
            if len(d.states) < 1:
                raise ValueError(f"descriptor {d.name!r} has no states")
            if any(not isinstance(s, str) or not s for s in d.states):
                raise ValueError(f"descriptor {d.name!r}: state names must be non-empty strings")
            if len(set(d.states)) != len(d.states):
                raise ValueError(f"descriptor {d.name!r} has duplicate state names")
        if len(set(names)) != len(names):
            raise ValueError("descriptor names must be unique")
        if math.prod(len(d.states) for d in descs) >= MAX_SCENARIOS:
            raise ValueError("scenario space does not fit in a 64-bit count")

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "Framework":
        """Framework with descriptors ``D1..DN`` and states ``s1..s_k``."""
        return cls(
            tuple(
                Descriptor(f"D{k + 1}", tuple(f"s{b + 1}" for b in range(n)))
                for k, n in enumerate(sizes)
            )
        )

    @property
    def n(self) -> int:
        return len(self.descriptors)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(d.states) for d in self.descriptors)

    @property
    def size(self) -> int:
        """Number of scenarios, the product of the state counts."""
        return math.prod(self.sizes)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(d.name for d in self.descriptors)

    def descriptor_index(self, name: str) -> int:
        for k, d in enumerate(self.descriptors, start=1):
            if d.name == name:
                return k
        raise KeyError(name)

    def state_index(self, descriptor: int, name: str) -> int:
        states = self.descriptors[descriptor - 1].states
        if name not in states:
            raise KeyError(name)
        return states.index(name) + 1

    def check_scenario(self, scenario: Sequence[int]) -> Scenario:
        scenario = tuple(int(v) for v in scenario)
        if len(scenario) != self.n:
            raise ValueError(f"scenario has {len(scenario)} entries, framework has {self.n} descriptors")
        for k, (v, d) in enumerate(zip(scenario, self.descriptors), start=1):
            if not 1 <= v <= len(d.states):
                raise ValueError(
                    f"descriptor {k} ({d.name}): state index {v} outside 1..{len(d.states)}"
                )
        return scenario

    def format_scenario(self, scenario: Sequence[int]) -> str:
        return ";".join(
            f"{d.name}={d.states[v - 1]}" for d, v in zip(self.descriptors, scenario)
        )

    def radix_weights(self) -> np.ndarray:
        """Place values of the mixed-radix rank, descriptor 1 most significant."""
        sizes = self.sizes
        weights = [1] * len(sizes)
        for k in range(len(sizes) - 2, -1, -1):
            weights[k] = weights[k + 1] * sizes[k + 1]
        return np.array(weights, dtype=np.int64)


def scenario_rank(framework: Framework, scenario: Sequence[int]) -> int:
    scenario = framework.check_scenario(scenario)
    rank = 0
    for v, n in zip(scenario, framework.sizes):
        rank = rank * n + (v - 1)
    return rank


def scenario_unrank(framework: Framework, rank: int) -> Scenario:
    if not 0 <= rank < framework.size:
        raise ValueError(f"rank {rank} outside 0..{framework.size - 1}")
    digits = []
    for n in reversed(framework.sizes):
        rank, r = divmod(rank, n)
        digits.append(r + 1)
    return tuple(reversed(digits))


def iterate_scenarios(framework: Framework) -> Iterator[Scenario]:
    """All scenarios in ascending rank order."""
    sizes = framework.sizes
    state = [1] * len(sizes)
    for _ in range(framework.size):
        yield tuple(state)
        k = len(sizes) - 1
        while k >= 0:
            if state[k] < sizes[k]:
                state[k] += 1
                break
            state[k] = 1
            k -= 1


def decode_ranks(framework: Framework, ranks: np.ndarray) -> np.ndarray:
    """Vectorised unrank: ``(m,)`` ranks to an ``(m, N)`` array of 0-based digits."""
    ranks = np.asarray(ranks, dtype=np.int64)
    out = np.empty((ranks.shape[0], framework.n), dtype=np.int64)
    rest = ranks.copy()
    for k in range(framework.n - 1, -1, -1):
        n = framework.sizes[k]
        out[:, k] = rest % n
        rest //= n
    return out


@dataclass(frozen=True)
class JudgementCell:
    """Impacts of descriptor ``source`` on descriptor ``target``.

    Rows are source states, columns are target states.
    """

    source: int
    target: int
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _freeze(self.values))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JudgementCell):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.values.tobytes()))


def _freeze(values) -> np.ndarray:
    arr = np.array(values, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError(f"judgement cell must be a 2-D integer matrix, got {arr.ndim}-D")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CrossImpactMatrix:
    """Sparse block cross-impact matrix.

    ``cells`` maps an ordered descriptor pair ``(i, j)`` (1-based) to the
    ``s_i x s_j`` impact matrix. Absent pairs are all-zero. Construction
    does not check invariants so that :func:`validate_cim` can report them;
    downstream operations call :meth:`require_valid`.
    """

    framework: Framework
    cells: Mapping[Pair, np.ndarray] = field(default_factory=dict)
    impact_range: int = DEFAULT_IMPACT_RANGE

    def __post_init__(self) -> None:
        frozen = {
            (int(i), int(j)): _freeze(v)
            for (i, j), v in sorted(self.cells.items(), key=lambda kv: (int(kv[0][0]), int(kv[0][1])))
        }
        object.__setattr__(self, "cells", frozen)

    @classmethod
    def zero(cls, framework: Framework, impact_range: int = DEFAULT_IMPACT_RANGE) -> "CrossImpactMatrix":
        return cls(framework, {}, impact_range)

    def cell(self, i: int, j: int) -> JudgementCell:
        if (i, j) in self.cells:
            return JudgementCell(i, j, self.cells[(i, j)])
        sizes = self.framework.sizes
        return JudgementCell(i, j, np.zeros((sizes[i - 1], sizes[j - 1]), dtype=np.int64))

    def nonzero_cells(self) -> dict:
        return {p: v for p, v in self.cells.items() if v.any()}

    def incoming(self, j: int) -> list:
        """Stored cells targeting descriptor ``j`` as ``(source, values)`` pairs."""
        return [(i, v) for (i, t), v in self.cells.items() if t == j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CrossImpactMatrix):
            return NotImplemented
        if self.framework != other.framework or self.impact_range != other.impact_range:
            return False
        a, b = self.nonzero_cells(), other.nonzero_cells()
        return a.keys() == b.keys() and all(
            a[k].shape == b[k].shape and np.array_equal(a[k], b[k]) for k in a
        )

    def __hash__(self) -> int:
        return hash((self.framework, self.impact_range, tuple(self.nonzero_cells())))

    def require_valid(self) -> None:
        errors = [v for v in validate_cim(self) if v.severity == "error"]
        if errors:
            raise ValueError("invalid cross-impact matrix: " + "; ".join(str(e) for e in errors))


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    pair: Pair | None = None
    row: int | None = None
    column: int | None = None
    severity: str = "error"

    def __str__(self) -> str:
        loc = ""
        if self.pair is not None:
            loc = f"cell ({self.pair[0]},{self.pair[1]})"
            if self.row is not None:
                loc += f" row {self.row} column {self.column}"
            loc += ": "
        return f"[{self.kind}] {loc}{self.message}"


def validate_cim(cim: CrossImpactMatrix) -> list:
    """Every invariant violation of ``cim``; an empty list means valid.

    One-state descriptors produce warnings, not errors.
    """
    out: list = []
    fw = cim.framework
    r = cim.impact_range
    if not isinstance(r, int) or isinstance(r, bool) or r < 1:
        out.append(Violation("range", f"impact range must be a positive integer, got {r!r}"))
        r = None
    for k, d in enumerate(fw.descriptors, start=1):
        if len(d.states) == 1:
            out.append(
                Violation(
                    "single-state",
                    f"descriptor {k} ({d.name}) has one state and is always consistent",
                    severity="warning",
                )
            )
    for (i, j), values in cim.cells.items():
        pair = (i, j)
        if not (1 <= i <= fw.n and 1 <= j <= fw.n):
            out.append(Violation("index", f"descriptor index outside 1..{fw.n}", pair))
            continue
        if i == j:
            out.append(Violation("diagonal", "self-impact cells are not allowed", pair))
            continue
        expected = (fw.sizes[i - 1], fw.sizes[j - 1])
        if values.shape != expected:
            out.append(
                Violation("shape", f"shape {values.shape} does not match expected {expected}", pair)
            )
            continue
        if r is not None:
            for a, b in zip(*np.nonzero(np.abs(values) > r)):
                out.append(
                    Violation(
                        "range",
                        f"entry {int(values[a, b])} outside [-{r}, +{r}]",
                        pair,
                        int(a) + 1,
                        int(b) + 1,
                    )
                )
    return out
