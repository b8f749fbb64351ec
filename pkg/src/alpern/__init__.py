"""Alpern towers of height {N, N+1} whose base is independent of a partition."""

from .construction import (
    ConstructionParams,
    Measures,
    RungSelection,
    TowerResult,
    bottom_staircase,
    build_tower,
    compute_b,
    compute_delta,
    compute_gamma,
    select_A,
    select_column,
    top_staircase,
)
from .ingestion import RotationSpec, build_cyclic, build_rotation, parse_system, serialize_system
from .model import (
    Column,
    ColumnSystem,
    PartitionSpec,
    Ratio,
    SeamEdge,
    SplitColumn,
    cell_measures,
    occurrences,
    split_column,
    validate_system,
)
from .oracle import build_grid, oracle_verify
from .richness import enrich_rotation, is_rich, required_M
from .verification import audit_net_skips, verify_alpern, verify_independence, verify_tower

__version__ = "0.1.0"
