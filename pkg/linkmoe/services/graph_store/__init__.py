from .types import EdgeSplit, FeatureMatrix, Graph, LinkDataset, NegativeMode, NegativeSet
from .csr import build_graph, degree, graph_to_pairs
from .loader import (
    load_dataset,
    load_edge_list,
    load_features,
    load_graph_header,
    load_split,
    write_edge_list,
    write_graph_header,
    write_negative_set,
)

__all__ = [
    "Graph",
    "FeatureMatrix",
    "EdgeSplit",
    "NegativeSet",
    "NegativeMode",
    "LinkDataset",
    "build_graph",
    "degree",
    "graph_to_pairs",
    "load_edge_list",
    "write_edge_list",
    "write_graph_header",
    "write_negative_set",
    "load_features",
    "load_split",
    "load_graph_header",
    "load_dataset",
]
