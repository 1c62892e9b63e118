"""Cross-impact balance analysis over multiple timespans."""

from .consistency import (
    CapExceeded,
    ImpactBalanceVector,
    enumerate_consistent,
    impact_balance,
    inconsistency_score,
    is_consistent,
)
from .core import (
    CrossImpactMatrix,
    Descriptor,
    Framework,
    JudgementCell,
    Violation,
    iterate_scenarios,
    scenario_rank,
    scenario_unrank,
    validate_cim,
)
from .io import ModelDocument, ModelError, dump_model, parse_model, render_chain_report, write_weight_table
from .multilevel import (
    AggregationConflict,
    Combinatorial,
    SubsystemSplit,
    aggregate,
    aggregate_combinatorial,
    enumerate_combinatorials,
    project_cim,
    transitional_set,
    validate_split,
    verify_aggregation,
)
from .succession import Attractor, SuccessionRule, WeightTable, argmax_states, basin_weights, successor, trajectory
from .timechain import (
    ChainError,
    ManualValueTable,
    ScenarioChain,
    TimeSeriesModel,
    build_chain,
    compound_weight,
    manual_weight,
    validate_series,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CapExceeded",
    "ImpactBalanceVector",
    "enumerate_consistent",
    "impact_balance",
    "inconsistency_score",
    "is_consistent",
    "CrossImpactMatrix",
    "Descriptor",
    "Framework",
    "JudgementCell",
    "Violation",
    "iterate_scenarios",
    "scenario_rank",
    "scenario_unrank",
    "validate_cim",
    "ModelDocument",
    "ModelError",
    "dump_model",
    "parse_model",
    "render_chain_report",
    "write_weight_table",
    "AggregationConflict",
    "Combinatorial",
    "SubsystemSplit",
    "aggregate",
    "aggregate_combinatorial",
    "enumerate_combinatorials",
    "project_cim",
    "transitional_set",
    "validate_split",
    "verify_aggregation",
    "Attractor",
    "SuccessionRule",
    "WeightTable",
    "argmax_states",
    "basin_weights",
    "successor",
    "trajectory",
    "ChainError",
    "ManualValueTable",
    "ScenarioChain",
    "TimeSeriesModel",
    "build_chain",
    "compound_weight",
    "manual_weight",
    "validate_series",
]
