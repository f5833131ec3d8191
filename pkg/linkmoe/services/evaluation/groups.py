"""Per-group breakdowns keyed by a pair heuristic (CN, SP distance or FCS)."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.evaluation.ranking import positive_ranks

logger = logging.getLogger(__name__)

DEFAULT_EDGES: Dict[str, Tuple[float, ...]] = {
    "cn": (0.0, 1.0, 3.0, 10.0, 30.0, np.inf),
    # raw hop distance; unreachable is recorded as sp_cap + 1 and lands in the last bin
    "sp": (1.0, 2.0, 3.0, 4.0, 5.0, np.inf),
}
N_GROUPS = 5


@dataclass(frozen=True)
class GroupSpec:
    heuristic: str
    bin_edges: Tuple[float, ...]

    def __post_init__(self) -> None:
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        if edges.size < 2 or not np.all(np.diff(edges) > 0):
            raise LinkMoeError(ErrorCode.INVALID_GROUPS, "bin edges must be strictly ascending", edges=self.bin_edges)

    @property
    def n_bins(self) -> int:
        return len(self.bin_edges) - 1

    @property
    def labels(self) -> List[str]:
        e = self.bin_edges
        return [f"[{e[b]:g}, {e[b + 1]:g})" for b in range(self.n_bins)]

    def assign(self, values) -> np.ndarray:
        """Bin index per value; values outside the edges fall into the first / last bin."""
        inner = np.asarray(self.bin_edges[1:-1], dtype=np.float64)
        return np.digitize(np.asarray(values, dtype=np.float64), inner, right=False)


def default_group_spec(heuristic: str, values=None) -> GroupSpec:
    key = heuristic.lower()
    if key in DEFAULT_EDGES:
        return GroupSpec(key, DEFAULT_EDGES[key])
    if key == "fcs":
        if values is None or np.asarray(values).size == 0:
            raise LinkMoeError(ErrorCode.INVALID_GROUPS, "quantile bins need the evaluated values")
        qs = np.quantile(np.asarray(values, dtype=np.float64), np.linspace(0.0, 1.0, N_GROUPS + 1))
        edges = np.unique(qs)
        if edges.size < 2 or qs[-2] == qs[-1]:
            # tied maximum keeps its own top bin
            edges = np.append(edges, np.inf)
        else:
            edges[-1] = np.inf
        spec = GroupSpec(key, tuple(float(e) for e in edges))
        if spec.n_bins < N_GROUPS:
            logger.warning(
                f"Tied fcs values collapse quantile bins: {spec.n_bins} of {N_GROUPS} remain",
                extra={"requested": N_GROUPS, "bins": spec.n_bins},
            )
        return spec
    raise LinkMoeError(ErrorCode.INVALID_GROUPS, "unknown grouping key", key=heuristic)


@dataclass(frozen=True)
class GroupBreakdown:
    spec: GroupSpec
    counts: np.ndarray
    proportions: np.ndarray
    # method -> per-bin Hits@K, None where the bin holds no positives
    hits: Dict[str, List[Optional[float]]]
    k: int

    def rows(self) -> List[dict]:
        out = []
        for b, label in enumerate(self.spec.labels):
            for method, values in self.hits.items():
                if values[b] is None:
                    continue
                out.append({"bin": label, "proportion": float(self.proportions[b]), "method": method,
                            "hits": values[b]})
        return out


def group_breakdown(
    group_values: Sequence[float],
    grouping: GroupSpec,
    methods: Mapping[str, Tuple[np.ndarray, np.ndarray]],
    k: int,
) -> GroupBreakdown:
    """Hits@K per group; ranks are always taken against each positive's full negative set."""
    bins = grouping.assign(group_values)
    total = bins.size
    if total == 0:
        raise LinkMoeError(ErrorCode.EMPTY_POSITIVES)
    counts = np.bincount(bins, minlength=grouping.n_bins).astype(np.int64)
    proportions = counts / float(total)
    hits: Dict[str, List[Optional[float]]] = {}
    for name, (pos, neg) in methods.items():
        ranks = positive_ranks(pos, neg)
        if ranks.size != total:
            raise LinkMoeError(ErrorCode.DIM_MISMATCH, "group values must align with positives", method=name)
        hits[name] = [
            float(np.mean(ranks[bins == b] <= k)) if counts[b] else None for b in range(grouping.n_bins)
        ]
    return GroupBreakdown(spec=grouping, counts=counts, proportions=proportions, hits=hits, k=k)
