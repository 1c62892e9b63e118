"""How often does subsystem aggregation reproduce full enumeration?

Draws random split instances at each maximum overlap size and tallies
unsound (aggregated but inconsistent) and incomplete (consistent but never
aggregated) instances.

    python scripts/aggregation_study.py --trials 500 --seed 1
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from timecib.generate import random_split_instance
from timecib.multilevel import verify_aggregation


@dataclass
class StudyConfig:
    trials: int = 300
    seed: int = 0
    n_min: int = 4
    n_max: int = 6
    max_states: int = 3
    overlaps: tuple = (1, 2)


def run(cfg: StudyConfig) -> list:
    rows = []
    for overlap in cfg.overlaps:
        rng = np.random.default_rng(cfg.seed)
        unsound = incomplete = extra = missing = 0
        for _ in range(cfg.trials):
            cim, split = random_split_instance(
                rng, (cfg.n_min, cfg.n_max), cfg.max_states, max_overlap=overlap
            )
            r = verify_aggregation(cim, split)
            unsound += bool(r.unsound)
            incomplete += bool(r.missing)
            extra += len(r.unsound)
            missing += len(r.missing)
        rows.append((overlap, cfg.trials, unsound, incomplete, extra, missing))
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=StudyConfig.trials)
    p.add_argument("--seed", type=int, default=StudyConfig.seed)
    p.add_argument("--n-max", type=int, default=StudyConfig.n_max)
    args = p.parse_args()
    cfg = StudyConfig(trials=args.trials, seed=args.seed, n_max=args.n_max)
    print("max_overlap,trials,unsound_instances,incomplete_instances,unsound_scenarios,missing_scenarios")
    for row in run(cfg):
        print(",".join(str(v) for v in row))


if __name__ == "__main__":
    main()
