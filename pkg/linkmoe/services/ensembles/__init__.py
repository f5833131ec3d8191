from .mean import mean_ensemble, mean_ensemble_weights
from .global_weights import (
    GlobalWeights,
    global_ensemble_logits,
    global_ensemble_predict,
    global_ensemble_weights,
    global_loss_and_grad,
    load_weights,
    train_global_ensemble,
    write_weights,
)

__all__ = [
    "mean_ensemble",
    "mean_ensemble_weights",
    "GlobalWeights",
    "train_global_ensemble",
    "global_ensemble_logits",
    "global_ensemble_predict",
    "global_ensemble_weights",
    "global_loss_and_grad",
    "write_weights",
    "load_weights",
]
