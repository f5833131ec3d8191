from .ranking import RankingReport, correct_set, evaluate, mrr, positive_ranks, rank_of_positive, report_from_ranks
from .overlap import OverlapMatrix, jaccard_overlap, overlap_matrix
from .groups import GroupBreakdown, GroupSpec, default_group_spec, group_breakdown
from .combination import CombinationGrid, combination_grid
from .gate_weights import GateWeightTable, avg_gate_weights_per_group

__all__ = [
    "RankingReport",
    "rank_of_positive",
    "positive_ranks",
    "report_from_ranks",
    "evaluate",
    "mrr",
    "correct_set",
    "jaccard_overlap",
    "overlap_matrix",
    "OverlapMatrix",
    "GroupSpec",
    "GroupBreakdown",
    "default_group_spec",
    "group_breakdown",
    "CombinationGrid",
    "combination_grid",
    "GateWeightTable",
    "avg_gate_weights_per_group",
]
