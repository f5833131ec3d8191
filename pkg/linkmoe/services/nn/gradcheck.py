from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from linkmoe.core.rng import Rng

LossClosure = Callable[[List[np.ndarray]], Tuple[float, List[np.ndarray]]]

# gradients smaller than this are compared in absolute terms
_ABS_FLOOR = 1e-6


@dataclass(frozen=True)
class GradCheckResult:
    max_rel_error: float
    checked: int
    passed: bool


def grad_check(
    closure: LossClosure,
    params: Sequence[np.ndarray],
    tol: float = 1e-4,
    rng: Optional[Rng] = None,
    n_coords: int = 50,
    h: float = 1e-5,
) -> GradCheckResult:
    """Central differences on a random subset of coordinates vs the closure's analytic grads."""
    rng = rng or Rng(0)
    base = [np.array(p, dtype=np.float64) for p in params]
    _, analytic = closure(base)
    sizes = [p.size for p in base]
    total = int(sum(sizes))
    picks = rng.permutation(total)[: min(total, max(n_coords, 50))]
    offsets = np.cumsum([0] + sizes)
    worst = 0.0
    for flat in np.sort(picks):
        k = int(np.searchsorted(offsets, flat, side="right") - 1)
        idx = np.unravel_index(int(flat - offsets[k]), base[k].shape)
        plus = [p.copy() for p in base]
        minus = [p.copy() for p in base]
        plus[k][idx] += h
        minus[k][idx] -= h
        numeric = (closure(plus)[0] - closure(minus)[0]) / (2.0 * h)
        exact = float(analytic[k][idx])
        err = abs(exact - numeric) / max(abs(exact), abs(numeric), _ABS_FLOOR)
        worst = max(worst, err)
    return GradCheckResult(max_rel_error=worst, checked=int(picks.size), passed=worst <= tol)
