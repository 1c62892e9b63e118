"""Symmetric cross-impact matrices tie their mirror-image scenarios.

Every timespan couples binary descriptors with cells ``c * [[1, -1], [-1, 1]]``
(``c`` drawn from 1..3), which are invariant under swapping both states.
Basin weighting then cannot separate the all-low and all-high extremes; a
manual value table favouring high states can.

    python scripts/symmetric_ties.py --descriptors 4 --timespans 3
"""

from __future__ import annotations

import argparse

import numpy as np

from timecib.core import CrossImpactMatrix, Framework
from timecib.io import format_fraction
from timecib.timechain import ManualValueTable, TimeSeriesModel, build_chain

REINFORCE = np.array([[1, -1], [-1, 1]])


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--descriptors", type=int, default=4)
    p.add_argument("--timespans", type=int, default=3)
    p.add_argument("--rule", default="local")
    p.add_argument("--density", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=3)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    n = args.descriptors
    fw = Framework.from_sizes([2] * n)
    spans = []
    for t in range(args.timespans):
        cells = {
            (i, j): int(rng.integers(1, 4)) * REINFORCE
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if i != j and rng.random() < args.density
        }
        spans.append((f"T{t + 1}", CrossImpactMatrix(fw, cells)))
    model = TimeSeriesModel(fw, tuple(spans))
    values = ManualValueTable.from_lists(fw, [[0, 1]] * n)
    for weighting in ("scenario", "compound"):
        chain = build_chain(model, args.rule, weighting, values)
        print(f"## weighting = {weighting}")
        for link in chain.links:
            tied = " | ".join(fw.format_scenario(x) for x in link.tied)
            score = link.compound if weighting == "compound" else link.weight
            print(
                f"{link.label}: {fw.format_scenario(link.scenario)} score={format_fraction(score, 4)} "
                f"argmax_tie={link.table.argmax_tie} tied=[{tied}]"
            )
        print()


if __name__ == "__main__":
    main()
