from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from linkmoe.services.evaluation.groups import GroupSpec


@dataclass(frozen=True)
class GateWeightTable:
    spec: GroupSpec
    experts: List[str]
    counts: np.ndarray
    # (bins, m) mean weights; NaN rows for empty bins
    weights: np.ndarray

    def rows(self) -> List[dict]:
        out = []
        for b, label in enumerate(self.spec.labels):
            if not self.counts[b]:
                continue
            row = {"bin": label, "count": int(self.counts[b])}
            row.update({name: float(self.weights[b, o]) for o, name in enumerate(self.experts)})
            out.append(row)
        return out


def avg_gate_weights_per_group(gate, inputs, group_values, grouping: GroupSpec, experts=None) -> GateWeightTable:
    """Mean gate weight per expert within each group of pairs."""
    # imported here, gating imports evaluation for its early stopping
    from linkmoe.services.gating.network import gate_forward

    weights = gate_forward(gate, inputs, train_mode=False)
    bins = grouping.assign(group_values)
    counts = np.bincount(bins, minlength=grouping.n_bins).astype(np.int64)
    means = np.full((grouping.n_bins, gate.m), np.nan, dtype=np.float64)
    for b in range(grouping.n_bins):
        if counts[b]:
            means[b] = weights[bins == b].mean(axis=0)
    names = list(experts) if experts is not None else [f"expert_{o}" for o in range(gate.m)]
    return GateWeightTable(spec=grouping, experts=names, counts=counts, weights=means)
