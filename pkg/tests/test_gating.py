import dataclasses
import logging

import numpy as np
import pytest

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.models.schemas.grid import GRID_PRESETS, expand_grid, load_grid
from linkmoe.models.schemas.heuristics import HeuristicConfig
from linkmoe.models.schemas.training import EnsembleTrainConfig, GateMode, GateTrainConfig
from linkmoe.services.datasets import FEAT_EXPERT, STRUCT_EXPERT, generate_planted_dataset, write_dataset
from linkmoe.services.ensembles import global_ensemble_logits, mean_ensemble, train_global_ensemble
from linkmoe.services.evaluation import evaluate
from linkmoe.services.experts import register_experts, save_feature_mlp, score_pairs
from linkmoe.services.experts.feature_mlp import FeatureMlpExpert
from linkmoe.services.gating import (
    GateInputs,
    LabeledBatch,
    RankingBatch,
    build_gate,
    evaluate_link_moe,
    expert_removal_study,
    fit_link_moe,
    gate_forward,
    gate_inputs_for,
    gate_loss_and_grads,
    load_gate,
    moe_predict,
    predict_bundle,
    prepare_split_data,
    save_gate,
    split_validation,
    standardizer_fit,
    struct_columns_for,
    train_gate,
)
from linkmoe.services.gating.network import STRUCT_DIM, uses_features
from linkmoe.services.graph_store import NegativeSet
from linkmoe.services.nn import grad_check, init_mlp

SMALL = GateTrainConfig(hidden_dim=6, layers=2)
FEAT_DIM = 4


def inputs_for(gn, batch, seed=0):
    gen = np.random.default_rng(seed)
    structural = gen.normal(size=(batch, STRUCT_DIM)) if gn.struct_branch is not None else None
    feature = gen.normal(size=(batch, FEAT_DIM)) if gn.feat_branch is not None else None
    return GateInputs(structural, feature)


@pytest.mark.parametrize("mode", list(GateMode))
def test_gate_gradcheck_every_mode(mode):
    gn = build_gate(mode, 3, SMALL, Rng(1), feat_dim=FEAT_DIM)
    inputs = inputs_for(gn, 12)
    gen = np.random.default_rng(7)
    scores = gen.normal(scale=2.0, size=(12, 3))
    labels = (np.arange(12) % 2).astype(float)

    def closure(arrays):
        return gate_loss_and_grads(gn.with_arrays(arrays), inputs, scores, labels)

    result = grad_check(closure, gn.arrays(), tol=1e-4, n_coords=80)
    assert result.passed, (mode, result.max_rel_error)


def grid_configs(count, seed):
    points = [p for name in GRID_PRESETS for p in expand_grid(GateTrainConfig(), load_grid(f"preset:{name}"))]
    picks = np.random.default_rng(seed).choice(len(points), size=count, replace=False)
    return [points[i] for i in picks]


@pytest.mark.parametrize("index, cfg", list(enumerate(grid_configs(20, seed=3))))
def test_gate_gradcheck_on_grid_configs(index, cfg):
    mode = list(GateMode)[index % len(GateMode)]
    gn = build_gate(mode, 3, cfg, Rng(index), feat_dim=FEAT_DIM)
    inputs = inputs_for(gn, 16, seed=index)
    gen = np.random.default_rng(100 + index)
    scores = gen.normal(scale=2.0, size=(16, 3))
    labels = (np.arange(16) % 2).astype(float)

    def closure(arrays):
        return gate_loss_and_grads(gn.with_arrays(arrays), inputs, scores, labels)

    result = grad_check(closure, gn.arrays(), tol=1e-4, rng=Rng(index), n_coords=60)
    assert result.passed, (mode, cfg.layers, cfg.hidden_dim, result.max_rel_error)


def test_gate_weights_are_a_distribution():
    gn = build_gate(GateMode.ALL, 4, SMALL, Rng(2), feat_dim=FEAT_DIM)
    w = gate_forward(gn, inputs_for(gn, 9))
    assert w.shape == (9, 4)
    assert np.all(w > 0)
    np.testing.assert_allclose(w.sum(axis=1), 1.0)


def test_zero_gate_is_uniform_and_single_expert_is_one():
    gn = build_gate(GateMode.ONLY_STRUCT, 3, SMALL)
    single = GateInputs.of(structural=np.random.default_rng(0).normal(size=STRUCT_DIM))
    np.testing.assert_allclose(gate_forward(gn, single), np.full(3, 1 / 3))
    one = build_gate(GateMode.ONLY_STRUCT, 1, SMALL, Rng(0))
    np.testing.assert_allclose(gate_forward(one, single), [1.0])


def test_saturated_gate_follows_one_expert():
    gn = build_gate(GateMode.ONLY_STRUCT, 2, SMALL)
    arrays = gn.arrays()
    arrays[-1] = np.array([50.0, -50.0])
    gn = gn.with_arrays(arrays)
    single = GateInputs.of(structural=np.zeros(STRUCT_DIM))
    assert float(moe_predict(gn, [1.3, -4.0], single)) == pytest.approx(1 / (1 + np.exp(-1.3)))


def test_mode_and_input_mismatch():
    with pytest.raises(LinkMoeError) as exc:
        uses_features(GateMode.ONLY_FEAT, None)
    assert exc.value.code is ErrorCode.MODE_INPUT_MISMATCH
    assert uses_features(GateMode.ALL, None) is False
    assert uses_features(GateMode.ONLY_STRUCT, 8) is False

    struct_only = build_gate(GateMode.ONLY_STRUCT, 2, SMALL, Rng(0))
    with pytest.raises(LinkMoeError) as exc:
        gate_forward(struct_only, GateInputs(np.zeros((1, STRUCT_DIM)), np.zeros((1, FEAT_DIM))))
    assert exc.value.code is ErrorCode.MODE_INPUT_MISMATCH

    with_feat = build_gate(GateMode.ALL, 2, SMALL, Rng(0), feat_dim=FEAT_DIM)
    with pytest.raises(LinkMoeError) as exc:
        gate_forward(with_feat, GateInputs(np.zeros((1, STRUCT_DIM)), None))
    assert exc.value.code is ErrorCode.MODE_INPUT_MISMATCH


def test_struct_column_subsets():
    local = set(struct_columns_for(GateMode.ONLY_LOCAL_STRUCT))
    global_ = set(struct_columns_for(GateMode.ONLY_GLOBAL_STRUCT))
    full = set(struct_columns_for(GateMode.ALL))
    assert full == set(range(STRUCT_DIM))
    assert local | global_ == full
    assert local & global_ and local != global_
    assert struct_columns_for(GateMode.ONLY_FEAT) == ()


def test_split_validation_sizes_and_determinism():
    pos = [(i, i + 20) for i in range(10)]
    neg = NegativeSet.shared([(i, i + 40) for i in range(10)])
    train, val = split_validation(pos, neg, 0.9, seed=3)
    assert train.pos.shape == (9, 2) and val.pos.shape == (1, 2)
    assert train.neg.size == 9 and val.neg.size == 1
    merged = sorted(map(tuple, np.concatenate([train.pos, val.pos]).tolist()))
    assert merged == sorted(pos)
    again, _ = split_validation(pos, neg, 0.9, seed=3)
    np.testing.assert_array_equal(train.pos, again.pos)

    half_train, half_val = split_validation(pos[:2], NegativeSet.shared([(0, 50), (1, 50)]), 0.5, seed=0)
    assert half_train.pos.shape[0] == 1 and half_val.pos.shape[0] == 1


def test_split_validation_per_positive_negatives_follow():
    pos = np.array([(i, i + 10) for i in range(4)])
    per = np.stack([[(i, 30 + i), (i, 40 + i)] for i in range(4)])
    train, val = split_validation(pos, NegativeSet.per_positive(per), 0.5, seed=1)
    for part in (train, val):
        np.testing.assert_array_equal(part.neg.per_pos_pairs[:, 0, 0], part.pos[:, 0])


def test_split_validation_empty_side():
    with pytest.raises(LinkMoeError) as exc:
        split_validation([(0, 1)], NegativeSet.shared([(0, 2), (0, 3)]), 0.9, seed=0)
    assert exc.value.code is ErrorCode.EMPTY_SPLIT


def synthetic_batches(gn, m=2, seed=0):
    gen = np.random.default_rng(seed)
    pos_in, neg_in = inputs_for(gn, 30, seed), inputs_for(gn, 60, seed + 1)
    pos_scores = gen.normal(1.0, 1.0, (30, m))
    neg_scores = gen.normal(-1.0, 1.0, (60, m))
    val = RankingBatch(pos_in, pos_scores, neg_in, neg_scores)
    return val.labeled(), val


def test_zero_learning_rate_keeps_parameters():
    gn = build_gate(GateMode.ONLY_STRUCT, 2, SMALL, Rng(4))
    train, val = synthetic_batches(gn)
    cfg = SMALL.model_copy(update={"lr": 0.0, "max_epochs": 10, "patience": 3})
    result = train_gate(gn, train, val, cfg, Rng(5))
    for a, b in zip(result.model.arrays(), gn.arrays()):
        np.testing.assert_array_equal(a, b)
    assert result.best_epoch == 1
    assert len(result.history) == 4
    frame = result.history_frame()
    np.testing.assert_allclose(frame["val_mrr"], frame["val_mrr"].iloc[0])


def test_training_requires_both_labels():
    gn = build_gate(GateMode.ONLY_STRUCT, 2, SMALL, Rng(4))
    train, val = synthetic_batches(gn)
    only_pos = train.take(np.flatnonzero(train.labels == 1))
    with pytest.raises(LinkMoeError) as exc:
        train_gate(gn, only_pos, val, SMALL)
    assert exc.value.code is ErrorCode.NO_NEGATIVES


def test_training_is_deterministic(tmp_path):
    cfg = SMALL.model_copy(update={"lr": 0.01, "max_epochs": 15, "batch_size": 16, "dropout": 0.2})
    paths = []
    for run in ("a", "b"):
        gn = build_gate(GateMode.ALL, 2, cfg, Rng(6), feat_dim=FEAT_DIM)
        train, val = synthetic_batches(gn)
        result = train_gate(gn, train, val, cfg, Rng(7))
        path = tmp_path / f"{run}.lmoe"
        save_gate(path, result.model, None, {"experts": ["x", "y"]})
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_gate_checkpoint_round_trip(tmp_path):
    gn = build_gate(GateMode.ONLY_GLOBAL_STRUCT, 3, SMALL, Rng(8))
    std = standardizer_fit(np.random.default_rng(0).normal(size=(20, STRUCT_DIM)))
    save_gate(tmp_path / "g.lmoe", gn, std, {"experts": ["a", "b", "c"]})
    bundle = load_gate(tmp_path / "g.lmoe")
    assert bundle.gate.mode is GateMode.ONLY_GLOBAL_STRUCT
    assert bundle.experts == ["a", "b", "c"]
    assert bundle.normalizer is None
    np.testing.assert_array_equal(bundle.standardizer.mean, std.mean)
    inputs = inputs_for(gn, 5)
    np.testing.assert_array_equal(gate_forward(bundle.gate, inputs), gate_forward(gn, inputs))


def test_load_gate_rejects_other_checkpoints(tmp_path):
    save_feature_mlp(tmp_path / "m.lmoe", FeatureMlpExpert(init_mlp([3, 4, 1], Rng(0))))
    with pytest.raises(LinkMoeError) as exc:
        load_gate(tmp_path / "m.lmoe")
    assert exc.value.code is ErrorCode.BAD_CHECKPOINT


def test_standardizer_floors_constant_columns():
    std = standardizer_fit(np.array([[1.0, 7.0], [3.0, 7.0]]))
    np.testing.assert_array_equal(std.apply([[2.0, 7.0]]), [[0.0, 0.0]])
    assert std.std[1] == 1e-8


def test_planted_gate_routes_by_regime(planted, planted_moe):
    bundle = planted_moe.bundle
    ds = planted.dataset
    assert bundle.experts == [STRUCT_EXPERT, FEAT_EXPERT]
    for role in ("test_pos", "test_neg"):
        inputs = gate_inputs_for(bundle.gate, ds.graph, ds.features, bundle.standardizer, planted.pairs[role])
        w = gate_forward(bundle.gate, inputs)
        regime = planted.regime[role]
        assert w[regime, 0].mean() > 0.5
        assert w[~regime, 1].mean() > 0.5


@pytest.mark.parametrize("seed", [7, 11, 23, 31, 47])
def test_planted_moe_beats_experts_and_ensembles(tmp_path, seed, planted_cfg):
    planted = generate_planted_dataset(seed=seed)
    write_dataset(tmp_path, planted)
    registry = register_experts(
        [f"external:{name}={tmp_path / (name + '.scores')}" for name in (STRUCT_EXPERT, FEAT_EXPERT)]
    )
    ds = planted.dataset
    fitted = fit_link_moe(registry, ds, planted_cfg.model_copy(update={"seed": seed}))
    moe = evaluate_link_moe(fitted.bundle, registry, ds, ks=(10,)).hits[10]

    test_pos = np.column_stack([planted.scores[e]["test_pos"] for e in (STRUCT_EXPERT, FEAT_EXPERT)])
    test_neg = np.column_stack([planted.scores[e]["test_neg"] for e in (STRUCT_EXPERT, FEAT_EXPERT)])
    data = prepare_split_data(
        registry, ds, planted_cfg.split_ratio, seed, HeuristicConfig(), with_struct=False, with_feat=False
    )
    weights = train_global_ensemble(data.train, data.val, EnsembleTrainConfig(), Rng(seed)).model
    baselines = {
        STRUCT_EXPERT: evaluate(test_pos[:, 0], test_neg[:, 0], ks=(10,)).hits[10],
        FEAT_EXPERT: evaluate(test_pos[:, 1], test_neg[:, 1], ks=(10,)).hits[10],
        "mean": evaluate(mean_ensemble(test_pos.T), mean_ensemble(test_neg.T), ks=(10,)).hits[10],
        "global": evaluate(
            global_ensemble_logits(weights, test_pos), global_ensemble_logits(weights, test_neg), ks=(10,)
        ).hits[10],
    }
    assert moe >= max(baselines.values()), baselines

    bundle = fitted.bundle
    inputs = gate_inputs_for(bundle.gate, ds.graph, ds.features, bundle.standardizer, planted.pairs["test_pos"])
    w = gate_forward(bundle.gate, inputs)
    regime = planted.regime["test_pos"]
    assert w[regime, 0].mean() > 0.5
    assert w[~regime, 1].mean() > 0.5



def test_planted_checkpoint_predicts_identically(tmp_path, planted, planted_registry, planted_moe):
    bundle = planted_moe.bundle
    save_gate(tmp_path / "gate.lmoe", bundle.gate, bundle.standardizer, bundle.sidecar, bundle.normalizer)
    loaded = load_gate(tmp_path / "gate.lmoe")
    pairs = planted.pairs["test_pos"][:25]
    np.testing.assert_array_equal(
        predict_bundle(loaded, planted_registry, planted.dataset, pairs),
        predict_bundle(bundle, planted_registry, planted.dataset, pairs),
    )


def test_removal_study(planted, planted_registry, planted_cfg):
    cfg = planted_cfg.model_copy(update={"max_epochs": 3})
    reports = expert_removal_study(planted_registry, planted.dataset, cfg, ks=(10,))
    assert list(reports) == ["none", STRUCT_EXPERT, FEAT_EXPERT]
    assert all(0.0 < r.mrr <= 1.0 for r in reports.values())
    with pytest.raises(LinkMoeError) as exc:
        expert_removal_study(register_experts(["cn"]), planted.dataset, cfg, ks=(10,))
    assert exc.value.code is ErrorCode.EMPTY_REGISTRY


def test_single_expert_moe_reduces_to_the_expert(planted, planted_cfg):
    registry = register_experts(["cn"])
    ds = planted.dataset
    fitted = fit_link_moe(registry, ds, planted_cfg.model_copy(update={"max_epochs": 3}))
    ks = (1, 3, 10)
    moe = evaluate_link_moe(fitted.bundle, registry, ds, ks=ks)
    pos, negatives = ds.split.evaluation_set("test")
    pos_cn = score_pairs(registry, ds.graph, ds.features, pos).scores[0]
    neg_cn = score_pairs(registry, ds.graph, ds.features, negatives.flat_pairs).scores[0]
    direct = evaluate(pos_cn, negatives.layout(neg_cn), ks=ks)
    np.testing.assert_array_equal(moe.ranks, direct.ranks)
    assert moe.mrr == direct.mrr
    assert moe.hits == direct.hits


def test_missing_features_disable_the_feature_branch(planted, planted_cfg, caplog):
    ds = dataclasses.replace(planted.dataset, features=None)
    cfg = planted_cfg.model_copy(update={"max_epochs": 1})
    with caplog.at_level(logging.WARNING, logger="linkmoe.services.gating.pipeline"):
        fitted = fit_link_moe(register_experts(["cn", "ra"]), ds, cfg)
    assert fitted.bundle.gate.feat_branch is None
    assert any("feature branch" in r.getMessage() for r in caplog.records if r.levelno == logging.WARNING)
