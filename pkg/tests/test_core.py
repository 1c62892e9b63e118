import itertools

import numpy as np
import pytest
from hypothesis import given

from timecib.consistency import enumerate_consistent
from timecib.core import (
    CrossImpactMatrix,
    Framework,
    iterate_scenarios,
    scenario_rank,
    scenario_unrank,
    validate_cim,
)
from timecib.succession import basin_weights

from conftest import M, RULES, mutual2
from strategies import cims, sizes


def test_framework_invariants():
    with pytest.raises(ValueError, match="at least 2"):
        Framework.from_sizes([3])
    with pytest.raises(ValueError, match="unique"):
        Framework((("A", ("x",)), ("A", ("y",))))
    with pytest.raises(ValueError, match="duplicate state"):
        Framework((("A", ("x", "x")), ("B", ("y",))))
    with pytest.raises(ValueError, match="no states"):
        Framework((("A", ()), ("B", ("y",))))
    with pytest.raises(ValueError, match="64-bit"):
        Framework.from_sizes([2] * 64)
    fw = Framework.from_sizes([2, 3, 4])
    assert fw.size == 24 and fw.sizes == (2, 3, 4) and fw.names == ("D1", "D2", "D3")


@pytest.mark.parametrize(
    "sizes,scenario,rank",
    [((2, 2), (1, 1), 0), ((2, 2), (2, 2), 3), ((2, 3), (1, 3), 2)],
)
def test_rank_examples(sizes, scenario, rank):
    fw = Framework.from_sizes(sizes)
    assert scenario_rank(fw, scenario) == rank
    assert scenario_unrank(fw, rank) == scenario


def test_rank_matches_enumeration_oracle():
    fw = Framework.from_sizes([2, 3])
    tuples = list(itertools.product(range(1, 3), range(1, 4)))
    assert [scenario_rank(fw, t) for t in tuples] == list(range(6))


def test_rank_rejections():
    fw = Framework.from_sizes([2, 2])
    with pytest.raises(ValueError, match="descriptor 2"):
        scenario_rank(fw, (1, 3))
    with pytest.raises(ValueError, match="rank"):
        scenario_unrank(fw, 4)
    with pytest.raises(ValueError):
        scenario_unrank(fw, -1)


@given(sizes)
def test_rank_round_trip(s):
    fw = Framework.from_sizes(s)
    for r in range(fw.size):
        assert scenario_rank(fw, scenario_unrank(fw, r)) == r


@given(sizes)
def test_iterate_scenarios_is_rank_order(s):
    fw = Framework.from_sizes(s)
    got = list(iterate_scenarios(fw))
    assert len(got) == len(set(got)) == fw.size
    assert got == sorted(itertools.product(*[range(1, n + 1) for n in s]))
    assert [scenario_rank(fw, x) for x in got] == list(range(fw.size))


def test_iterate_examples():
    assert list(iterate_scenarios(Framework.from_sizes([2, 2]))) == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_validate_mutual2_clean():
    assert validate_cim(mutual2()) == []


def test_validate_range_violation():
    bad = [[4, -3], [-3, 3]]
    cim = CrossImpactMatrix(Framework.from_sizes([2, 2]), {(1, 2): bad, (2, 1): M})
    (v,) = validate_cim(cim)
    assert (v.kind, v.pair, v.row, v.column) == ("range", (1, 2), 1, 1)


def test_validate_diagonal_and_shape():
    fw = Framework.from_sizes([2, 2])
    (v,) = validate_cim(CrossImpactMatrix(fw, {(1, 2): M, (2, 1): M, (1, 1): M}))
    assert v.kind == "diagonal" and v.pair == (1, 1)
    (v,) = validate_cim(CrossImpactMatrix(fw, {(1, 2): [[1, 2, 3], [1, 2, 3]]}))
    assert v.kind == "shape"
    (v,) = validate_cim(CrossImpactMatrix(fw, {(1, 3): M}))
    assert v.kind == "index"


def test_impact_range_is_data():
    cim = CrossImpactMatrix(Framework.from_sizes([2, 2]), {(1, 2): [[5, 0], [0, 5]]}, impact_range=5)
    assert validate_cim(cim) == []
    assert [v.kind for v in validate_cim(CrossImpactMatrix(cim.framework, cim.cells, 3))] == ["range", "range"]


def test_single_state_descriptor_is_a_warning():
    cim = CrossImpactMatrix.zero(Framework.from_sizes([1, 2]))
    (v,) = validate_cim(cim)
    assert v.severity == "warning"
    cim.require_valid()


def test_absent_cell_equals_zero_cell():
    fw = Framework.from_sizes([2, 2])
    assert CrossImpactMatrix(fw, {(1, 2): [[0, 0], [0, 0]]}) == CrossImpactMatrix.zero(fw)
    assert not CrossImpactMatrix.zero(fw).cell(2, 1).values.any()


def test_cells_are_immutable():
    cim = mutual2()
    with pytest.raises(ValueError):
        cim.cells[(1, 2)][0, 0] = 0


@given(cims())
def test_validated_cims_run_downstream(cim):
    assert [v for v in validate_cim(cim) if v.severity == "error"] == []
    enumerate_consistent(cim)
    for rule in RULES:
        basin_weights(cim, rule)


def test_decode_matches_unrank():
    from timecib.core import decode_ranks

    fw = Framework.from_sizes([3, 1, 2, 4])
    digits = decode_ranks(fw, np.arange(fw.size))
    assert [tuple(int(v) + 1 for v in row) for row in digits] == [
        scenario_unrank(fw, r) for r in range(fw.size)
    ]
