from .params import MlpParams, init_mlp, mlp_dims, zeros_mlp
from .mlp import Tape, mlp_backward, mlp_forward
from .ops import bce_loss, sigmoid, softmax, softmax_backward
from .optim import AdamState, adam_init, adam_step
from .gradcheck import GradCheckResult, grad_check
from .checkpoint import Checkpoint, CheckpointKind, load_checkpoint, save_checkpoint

__all__ = [
    "MlpParams",
    "init_mlp",
    "mlp_dims",
    "zeros_mlp",
    "Tape",
    "mlp_forward",
    "mlp_backward",
    "softmax",
    "softmax_backward",
    "sigmoid",
    "bce_loss",
    "AdamState",
    "adam_init",
    "adam_step",
    "GradCheckResult",
    "grad_check",
    "Checkpoint",
    "CheckpointKind",
    "save_checkpoint",
    "load_checkpoint",
]
