"""Seeded random instances for experiments and property checks."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .core import CrossImpactMatrix, Framework
from .multilevel import SubsystemSplit


def random_cim(
    rng: np.random.Generator,
    max_n: int = 5,
    max_s: int = 3,
    impact_range: int = 3,
    density: float = 1.0,
) -> CrossImpactMatrix:
    """Uniform entries in ``[-R, R]``; each off-diagonal cell present with prob. ``density``."""
    n = int(rng.integers(2, max_n + 1))
    sizes = [int(rng.integers(1, max_s + 1)) for _ in range(n)]
    fw = Framework.from_sizes(sizes)
    cells = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and rng.random() < density:
                cells[(i, j)] = rng.integers(-impact_range, impact_range + 1, (sizes[i - 1], sizes[j - 1]))
    return CrossImpactMatrix(fw, cells, impact_range)


def random_split(rng: np.random.Generator, n: int, max_overlap: int = 1) -> SubsystemSplit:
    """Connected covering split of ``1..n`` with pairwise overlaps of at most ``max_overlap``.

    Subsets are grown one at a time: each new subset reuses between one and
    ``max_overlap`` already covered descriptors and adds at least one new one.
    With ``max_overlap == 1`` an extra two-descriptor subset may bridge
    descriptors that do not yet share a subset.
    """
    if n < 3:
        raise ValueError("a split with two subsets of size >= 2 needs at least 3 descriptors")
    order = [int(k) + 1 for k in rng.permutation(n)]
    first = int(rng.integers(2, n))
    subsets = [order[:first]]
    covered = list(order[:first])
    rest = order[first:]
    while rest:
        take = int(rng.integers(1, len(rest) + 1))
        new, rest = rest[:take], rest[take:]
        shared = int(rng.integers(1, min(max_overlap, len(covered)) + 1))
        old = [int(x) for x in rng.choice(covered, size=shared, replace=False)]
        subsets.append(old + new)
        covered += new
    if max_overlap == 1 and rng.random() < 0.5:
        together = {(a, b) for s in subsets for a in s for b in s}
        candidates = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if (a, b) not in together]
        if candidates:
            a, b = candidates[int(rng.integers(len(candidates)))]
            subsets.append([a, b])
    return SubsystemSplit(tuple(tuple(s) for s in subsets))


def random_split_instance(
    rng: np.random.Generator,
    n_range: Tuple[int, int] = (3, 6),
    max_s: int = 3,
    max_overlap: int = 1,
    impact_range: int = 3,
) -> Tuple[CrossImpactMatrix, SubsystemSplit]:
    """A split and a CIM whose nonzero cells only join descriptors sharing a subset."""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    split = random_split(rng, n, max_overlap)
    sizes = [int(rng.integers(1, max_s + 1)) for _ in range(n)]
    fw = Framework.from_sizes(sizes)
    together = {(a, b) for s in split.subsets for a in s for b in s if a != b}
    cells = {
        (i, j): rng.integers(-impact_range, impact_range + 1, (sizes[i - 1], sizes[j - 1]))
        for i, j in sorted(together)
    }
    return CrossImpactMatrix(fw, cells, impact_range), split
