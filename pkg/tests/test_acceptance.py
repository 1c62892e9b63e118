"""Exit criteria, one test per criterion; results are echoed in the summary."""

import copy
import itertools
import json
import time
from fractions import Fraction

import numpy as np
import pytest

from timecib.consistency import enumerate_consistent
from timecib.core import CrossImpactMatrix, Framework, iterate_scenarios, scenario_rank
from timecib.generate import random_cim, random_split_instance
from timecib.io import ModelDocument, ModelError, dump_model, model_to_dict, parse_model, render_chain_report
from timecib.multilevel import SubsystemSplit, verify_aggregation
from timecib.succession import basin_weights, successor, successor_map
from timecib.timechain import ManualValueTable, TimeSeriesModel, build_chain

import oracles
from conftest import ACCEPTANCE, RULES, agg3, model_path, mutual2


def record(number, title, ok, detail):
    ACCEPTANCE.append((number, title, bool(ok), detail))
    assert ok, f"criterion {number} failed: {detail}"


@pytest.fixture(scope="module")
def random_cims():
    rng = np.random.default_rng(2026)
    return [random_cim(rng, max_n=5, max_s=3) for _ in range(200)]


def test_01_zero_cim_baseline():
    frameworks = [(2, 2), (3, 4, 5), (7, 11, 13), (2,) * 16, (10,) * 5]
    failures = []
    slowest = 0.0
    for sizes in frameworks:
        fw = Framework.from_sizes(sizes)
        cim = CrossImpactMatrix.zero(fw)
        start = time.perf_counter()
        if len(enumerate_consistent(cim)) != fw.size:
            failures.append(f"{sizes}: not all consistent")
        expected = Fraction(1, fw.size)
        for rule in RULES:
            t = basin_weights(cim, rule)
            if len(t.entries) != fw.size or set(t.entries.values()) != {expected} or t.cycle_mass != 0:
                failures.append(f"{sizes} {rule}: weights differ from 1/{fw.size}")
        slowest = max(slowest, time.perf_counter() - start)
    ok = not failures and slowest < 5.0
    record(1, "zero-CIM baseline", ok, f"largest 10^5 scenarios, slowest framework {slowest:.2f}s < 5s; {failures or 'exact 1/prod(s)'}")


def test_02_fixed_point_equivalence(random_cims):
    bad = 0
    for cim in random_cims:
        consistent = enumerate_consistent(cim)
        fw = cim.framework
        for rule in RULES:
            fixed = [s for s in iterate_scenarios(fw) if successor(cim, s, rule) == s]
            succ, _ = successor_map(cim, rule)
            fixed_vec = [s for s in iterate_scenarios(fw) if succ[scenario_rank(fw, s)] == scenario_rank(fw, s)]
            bad += fixed != consistent or fixed_vec != consistent
    record(2, "fixed-point equivalence", bad == 0, f"{len(random_cims)} CIMs x 4 rules, {bad} mismatches")


def test_03_weight_normalisation(random_cims):
    bad = 0
    for cim in random_cims:
        for rule in RULES:
            t = basin_weights(cim, rule)
            total = sum(t.entries.values(), Fraction(0)) + t.cycle_mass
            bad += total != 1 or not isinstance(t.cycle_mass, Fraction)
    record(3, "weight normalisation", bad == 0, f"{len(random_cims) * 4} tables, {bad} with sum != 1")


def test_04_mutual2_oracle():
    cim = mutual2()
    g, loc = basin_weights(cim, "global"), basin_weights(cim, "local")
    g_fixed, g_cycles = oracles.basin_oracle(cim, "global")
    l_fixed, l_cycles = oracles.basin_oracle(cim, "local")
    expected_g = {(1, 1): Fraction(1, 4), (2, 2): Fraction(1, 4)}
    expected_l = {(1, 1): Fraction(1, 2), (2, 2): Fraction(1, 2)}
    ok = (
        g.entries == g_fixed == expected_g
        and g.cycle_mass == Fraction(1, 2)
        and [c.scenarios for c, _ in g.cycles] == [((1, 2), (2, 1))]
        and g_cycles == {frozenset({(1, 2), (2, 1)}): Fraction(1, 2)}
        and loc.entries == l_fixed == expected_l
        and loc.cycle_mass == 0
        and l_cycles == {}
    )
    record(4, "MUTUAL2 oracle", ok, f"global {dict(g.entries)} + cycle {g.cycle_mass}; local {dict(loc.entries)}")


def test_05_aggregation_soundness():
    rng = np.random.default_rng(5)
    unsound = 0
    for _ in range(100):
        cim, split = random_split_instance(rng, n_range=(3, 6), max_s=3, max_overlap=1)
        for a, b in itertools.combinations(split.subsets, 2):
            assert len(set(a) & set(b)) <= 1
        unsound += bool(verify_aggregation(cim, split).unsound)
    r = verify_aggregation(agg3(), SubsystemSplit(((1, 2), (2, 3))))
    agg_ok = set(r.aggregated) == set(r.consistent) == {(1, 1, 1), (2, 2, 2)}
    record(5, "aggregation soundness", unsound == 0 and agg_ok, f"100 random splits, {unsound} unsound; AGG3 A=B={r.aggregated}")


def _large_model():
    rng = np.random.default_rng(6)
    fw = Framework.from_sizes([3] * 10)
    spans = []
    for label in ("2030", "2040"):
        cells = {
            (i, j): rng.integers(-3, 4, (3, 3))
            for i in range(1, 11)
            for j in range(1, 11)
            if i != j and rng.random() < 0.4
        }
        spans.append((label, CrossImpactMatrix(fw, cells)))
    return TimeSeriesModel(fw, tuple(spans))


def test_06_chain_determinism():
    from timecib.io import load_model

    energy = load_model(model_path("energy_transition.json"))
    two = load_model(model_path("two_timespan.json"))
    cases = [
        (energy.model, "compound", energy.manual_values),
        (two.model, "scenario", None),
        (_large_model(), "scenario", None),
    ]
    differing = 0
    runs = 0
    for model, weighting, values in cases:
        for rule in RULES:
            base = build_chain(model, rule, weighting, values)
            base_report = render_chain_report(base)
            settings = [1] * 10 + [4, 8]
            for workers in settings:
                chain = build_chain(model, rule, weighting, values, workers=workers)
                runs += 1
                differing += chain != base or render_chain_report(chain) != base_report
    record(6, "chain determinism", differing == 0, f"{runs} runs (10 repeats + workers 4, 8), {differing} differ")


def test_07_tolerance_monotonicity(random_cims):
    broken = 0
    for cim in random_cims:
        sets = [set(enumerate_consistent(cim, t)) for t in (0, 1, 2, 6)]
        broken += any(not a <= b for a, b in zip(sets, sets[1:]))
    record(7, "tolerance monotonicity", broken == 0, f"{len(random_cims)} CIMs, {broken} non-nested")


def test_08_mirror_symmetry():
    cim = mutual2()
    mirror = lambda s: tuple(3 - v for v in s)  # noqa: E731
    problems = []
    for rule in RULES:
        t = basin_weights(cim, rule)
        if t.argmax_tie:
            problems.append(f"{rule}: argmax tie")
        for s in iterate_scenarios(cim.framework):
            if t.weight(s) != t.weight(mirror(s)):
                problems.append(f"{rule}: {s}")
        assert t.weight((1, 1)) == t.weight((2, 2)) > 0
    record(8, "mirror symmetry (MUTUAL2)", not problems, problems or "no ties; (1,1) and (2,2) weigh equally under all rules")


def _random_document(rng):
    n = int(rng.integers(2, 6))
    fw = Framework.from_sizes([int(rng.integers(1, 4)) for _ in range(n)])
    r = int(rng.integers(1, 5))
    spans = tuple(
        (f"span{t}", random_cim_over(rng, fw, r)) for t in range(int(rng.integers(1, 4)))
    )
    manual = None
    if rng.random() < 0.5:
        manual = ManualValueTable(
            fw,
            {(k, s): float(np.round(rng.normal(), 3)) for k in range(1, n + 1) for s in range(1, fw.sizes[k - 1] + 1)},
        )
    split = SubsystemSplit(((1, 2), tuple(range(2, n + 1)))) if n >= 3 and rng.random() < 0.5 else None
    return ModelDocument(fw, TimeSeriesModel(fw, spans), manual, split, r)


def random_cim_over(rng, fw, r):
    cells = {}
    for i in range(1, fw.n + 1):
        for j in range(1, fw.n + 1):
            if i != j and rng.random() < 0.6:
                cells[(i, j)] = rng.integers(-r, r + 1, (fw.sizes[i - 1], fw.sizes[j - 1]))
    return CrossImpactMatrix(fw, cells, r)


def _key_paths(obj, path=()):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield path, k
            yield from _key_paths(v, path + (k,))
    elif isinstance(obj, list):
        for a, v in enumerate(obj):
            yield from _key_paths(v, path + (a,))


def test_09_format_round_trip():
    rng = np.random.default_rng(9)
    mismatches = corruptions = accepted = 0
    for _ in range(100):
        doc = _random_document(rng)
        if parse_model(dump_model(doc)) != doc:
            mismatches += 1
        raw = model_to_dict(doc)
        for path, key in list(_key_paths(raw)):
            pos = int(rng.integers(len(key)))
            bad = copy.deepcopy(raw)
            target = bad
            for p in path:
                target = target[p]
            target[key[:pos] + "#" + key[pos + 1:]] = target.pop(key)
            corruptions += 1
            try:
                parse_model(json.dumps(bad))
                accepted += 1
            except ModelError as e:
                accepted += not e.path
    record(9, "format round-trip", mismatches == 0 and accepted == 0,
           f"100 models, {mismatches} round-trip mismatches; {corruptions} key corruptions, {accepted} accepted or pathless")
