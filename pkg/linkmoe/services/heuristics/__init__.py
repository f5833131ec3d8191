from .common import check_pair, check_pairs
from .local import adamic_adar, common_neighbors, resource_allocation
from .paths import UNREACHABLE, katz, shortest_path, sp_group_distance, sp_score
from .ppr import ppr, ppr_pair
from .features import batch_feature_cosine, batch_pair_features, feature_cosine, pair_feature
from .structural import (
    COLUMN_INDEX,
    DEGREE_COLUMNS,
    GLOBAL_COLUMNS,
    LOCAL_COLUMNS,
    STRUCTURAL_COLUMNS,
    HeuristicCache,
    batch_structural,
    structural_vector,
)
from .scores import HEURISTIC_NAMES, group_values, heuristic_scores

__all__ = [
    "check_pair",
    "check_pairs",
    "common_neighbors",
    "adamic_adar",
    "resource_allocation",
    "shortest_path",
    "sp_score",
    "sp_group_distance",
    "UNREACHABLE",
    "katz",
    "ppr",
    "ppr_pair",
    "feature_cosine",
    "batch_feature_cosine",
    "pair_feature",
    "batch_pair_features",
    "STRUCTURAL_COLUMNS",
    "COLUMN_INDEX",
    "LOCAL_COLUMNS",
    "GLOBAL_COLUMNS",
    "DEGREE_COLUMNS",
    "HeuristicCache",
    "structural_vector",
    "batch_structural",
    "HEURISTIC_NAMES",
    "heuristic_scores",
    "group_values",
]
