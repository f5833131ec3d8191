from .types import ExpertId, ExpertKind, ScoreMatrix, ScoreNormalizer
from .score_table import ScoreTable, from_arrays, load_score_table, write_score_file
from .feature_mlp import (
    FeatureMlpExpert,
    load_feature_mlp,
    sample_non_edges,
    save_feature_mlp,
    train_feature_mlp_expert,
)
from .registry import Expert, ExpertRegistry, parse_declaration, register_experts, score_pairs

__all__ = [
    "ExpertId",
    "ExpertKind",
    "ScoreMatrix",
    "ScoreNormalizer",
    "ScoreTable",
    "from_arrays",
    "load_score_table",
    "write_score_file",
    "FeatureMlpExpert",
    "train_feature_mlp_expert",
    "sample_non_edges",
    "save_feature_mlp",
    "load_feature_mlp",
    "Expert",
    "ExpertRegistry",
    "parse_declaration",
    "register_experts",
    "score_pairs",
]
