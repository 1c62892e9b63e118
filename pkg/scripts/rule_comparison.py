"""Compare the chain chosen under each succession rule for one model file.

    python scripts/rule_comparison.py models/energy_transition.json
"""

from __future__ import annotations

import argparse

from timecib.io import format_fraction, load_model
from timecib.succession import SuccessionRule
from timecib.timechain import ChainError, build_chain


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("model")
    p.add_argument("--weighting", choices=["scenario", "compound"], default="scenario")
    args = p.parse_args()
    doc = load_model(args.model)
    fw = doc.framework
    print("rule,timespan,scenario,weight,cycle_mass,tied")
    for rule in SuccessionRule:
        try:
            chain = build_chain(doc.model, rule, args.weighting, doc.manual_values)
        except ChainError as e:
            print(f"{rule.value},,chain failed: {e},,,")
            continue
        for link in chain.links:
            print(
                f"{rule.value},{link.label},{fw.format_scenario(link.scenario)},"
                f"{format_fraction(link.weight, 4)},{format_fraction(link.table.cycle_mass, 4)},{len(link.tied)}"
            )


if __name__ == "__main__":
    main()
