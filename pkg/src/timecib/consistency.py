"""Impact balances, consistency checks and exhaustive enumeration."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .core import CrossImpactMatrix, Framework, Scenario, decode_ranks

DEFAULT_CAP = 10**7
CHUNK = 1 << 14


class CapExceeded(ValueError):
    def __init__(self, size: int, cap: int) -> None:
        super().__init__(f"scenario space of {size} exceeds the enumeration cap of {cap}")
        self.size = size
        self.cap = cap


def check_cap(size: int, cap: int | None) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if size > cap:
        raise CapExceeded(size, cap)


@dataclass(frozen=True)
class ImpactBalanceVector:
    descriptor: int
    balances: Tuple[int, ...]


def impact_balance(cim: CrossImpactMatrix, scenario: Sequence[int], j: int) -> ImpactBalanceVector:
    """Balance of every state of descriptor ``j`` given the other chosen states."""
    fw = cim.framework
    scenario = fw.check_scenario(scenario)
    if not 1 <= j <= fw.n:
        raise ValueError(f"descriptor index {j} outside 1..{fw.n}")
    totals = [0] * fw.sizes[j - 1]
    for i, values in cim.incoming(j):
        row = values[scenario[i - 1] - 1]
        for b in range(len(totals)):
            totals[b] += int(row[b])
    return ImpactBalanceVector(j, tuple(totals))


def _gaps(cim: CrossImpactMatrix, scenario: Scenario) -> List[int]:
    gaps = []
    for j in range(1, cim.framework.n + 1):
        bal = impact_balance(cim, scenario, j).balances
        gaps.append(max(bal) - bal[scenario[j - 1] - 1])
    return gaps


def is_consistent(cim: CrossImpactMatrix, scenario: Sequence[int], tolerance: int = 0) -> bool:
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    return max(_gaps(cim, tuple(scenario))) <= tolerance


def inconsistency_score(cim: CrossImpactMatrix, scenario: Sequence[int]) -> int:
    """Largest shortfall of a chosen state against its descriptor's best balance."""
    return max(_gaps(cim, tuple(scenario)))


# -- vectorised kernel -------------------------------------------------------

@dataclass
class BalanceBlock:
    """Balances for a contiguous block of ranks.

    ``digits`` is ``(m, N)`` 0-based; per descriptor ``j`` (0-based) the
    lists hold the current balance, best balance, first argmax (0-based)
    and whether the maximum is attained more than once.
    """

    ranks: np.ndarray
    digits: np.ndarray
    current: List[np.ndarray]
    best: List[np.ndarray]
    argmax: List[np.ndarray]
    tied: List[np.ndarray]

    @property
    def gaps(self) -> np.ndarray:
        return np.stack([b - c for b, c in zip(self.best, self.current)], axis=1)


def balance_block(cim: CrossImpactMatrix, start: int, stop: int) -> BalanceBlock:
    fw = cim.framework
    ranks = np.arange(start, stop, dtype=np.int64)
    digits = decode_ranks(fw, ranks)
    m = len(ranks)
    rows = np.arange(m)
    current, best, argmax, tied = [], [], [], []
    for j in range(1, fw.n + 1):
        bal = np.zeros((m, fw.sizes[j - 1]), dtype=np.int64)
        for i, values in cim.incoming(j):
            bal += values[digits[:, i - 1]]
        top = bal.max(axis=1)
        current.append(bal[rows, digits[:, j - 1]])
        best.append(top)
        argmax.append(bal.argmax(axis=1))
        tied.append((bal == top[:, None]).sum(axis=1) > 1)
    return BalanceBlock(ranks, digits, current, best, argmax, tied)


def chunks(size: int, chunk: int = CHUNK) -> List[Tuple[int, int]]:
    return [(a, min(a + chunk, size)) for a in range(0, size, chunk)]


def map_chunks(fn, size: int, workers: int = 1, chunk: int = CHUNK) -> list:
    """Apply ``fn(start, stop)`` over rank blocks; results in block order."""
    spans = chunks(size, chunk)
    if workers <= 1 or len(spans) <= 1:
        return [fn(a, b) for a, b in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), spans))


def consistent_ranks(
    cim: CrossImpactMatrix,
    tolerance: int = 0,
    cap: int | None = None,
    workers: int = 1,
    chunk: int = CHUNK,
) -> np.ndarray:
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    cim.require_valid()
    size = cim.framework.size
    check_cap(size, cap)

    def block(a: int, b: int) -> np.ndarray:
        bb = balance_block(cim, a, b)
        ok = (bb.gaps <= tolerance).all(axis=1)
        return bb.ranks[ok]

    parts = map_chunks(block, size, workers, chunk)
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def enumerate_consistent(
    cim: CrossImpactMatrix,
    tolerance: int = 0,
    cap: int | None = None,
    workers: int = 1,
) -> List[Scenario]:
    """All scenarios consistent within ``tolerance``, ascending by rank.

    Refuses with :class:`CapExceeded` when the scenario space is larger than
    ``cap`` (default ``DEFAULT_CAP``).
    """
    ranks = consistent_ranks(cim, tolerance, cap, workers)
    return rows_to_scenarios(decode_ranks(cim.framework, ranks))


def rows_to_scenarios(digits: np.ndarray) -> List[Scenario]:
    return list(map(tuple, (np.asarray(digits) + 1).tolist()))


def scenarios_from_ranks(framework: Framework, ranks: Iterable[int]) -> List[Scenario]:
    return rows_to_scenarios(decode_ranks(framework, np.fromiter(ranks, dtype=np.int64)))
