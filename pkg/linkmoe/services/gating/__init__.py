from .data import GateInputs, LabeledBatch, RankingBatch
from .standardizer import Standardizer, standardizer_fit
from .network import (
    GateNetwork,
    build_gate,
    gate_backward,
    gate_forward,
    gate_forward_tape,
    gate_loss_and_grads,
    moe_logits,
    moe_predict,
    struct_columns_for,
)
from .split import GateSplit, split_validation
from .trainer import EarlyStopper, EpochRecord, TrainResult, train_gate
from .store import GateBundle, load_gate, save_gate
from .pipeline import (
    FittedMoE,
    Preprocessor,
    SplitData,
    evaluate_link_moe,
    fit_link_moe,
    gate_inputs_for,
    predict_bundle,
    predict_pairs,
    prepare_split_data,
    profile_pairs,
    score_evaluation_set,
)
from .removal import expert_removal_study

__all__ = [
    "GateInputs",
    "LabeledBatch",
    "RankingBatch",
    "Standardizer",
    "standardizer_fit",
    "GateNetwork",
    "build_gate",
    "gate_forward",
    "gate_forward_tape",
    "gate_backward",
    "gate_loss_and_grads",
    "moe_logits",
    "moe_predict",
    "struct_columns_for",
    "GateSplit",
    "split_validation",
    "EarlyStopper",
    "EpochRecord",
    "TrainResult",
    "train_gate",
    "GateBundle",
    "save_gate",
    "load_gate",
    "FittedMoE",
    "Preprocessor",
    "SplitData",
    "profile_pairs",
    "prepare_split_data",
    "fit_link_moe",
    "gate_inputs_for",
    "predict_pairs",
    "predict_bundle",
    "score_evaluation_set",
    "evaluate_link_moe",
    "expert_removal_study",
]
