import numpy as np
import pytest

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.models.schemas.training import EnsembleTrainConfig
from linkmoe.services.ensembles import (
    GlobalWeights,
    global_ensemble_logits,
    global_ensemble_predict,
    global_ensemble_weights,
    global_loss_and_grad,
    load_weights,
    mean_ensemble,
    mean_ensemble_weights,
    train_global_ensemble,
    write_weights,
)
from linkmoe.services.evaluation import mrr
from linkmoe.services.gating import GateInputs, RankingBatch
from linkmoe.services.nn import grad_check, sigmoid


def test_mean_ensemble():
    np.testing.assert_allclose(mean_ensemble(np.array([[0.2], [0.4], [0.6]])), [0.4])
    np.testing.assert_array_equal(mean_ensemble(np.array([[1.5, -2.0]])), [1.5, -2.0])
    np.testing.assert_allclose(mean_ensemble(np.array([[0.0], [0.0]]), probabilities=True), [0.5])
    means, weights = mean_ensemble_weights(np.ones((4, 3)))
    np.testing.assert_array_equal(weights, np.full((3, 4), 0.25))
    assert means.shape == (3,)


def test_mean_ensemble_needs_an_expert():
    with pytest.raises(LinkMoeError) as exc:
        mean_ensemble(np.zeros((0, 5)))
    assert exc.value.code is ErrorCode.EMPTY_REGISTRY


def test_global_predict_one_hot_and_zero():
    s = np.array([[2.0, -7.0], [-1.0, 3.0]])
    np.testing.assert_allclose(global_ensemble_predict(GlobalWeights(np.array([1.0, 0.0])), s), sigmoid([2.0, -1.0]))
    np.testing.assert_array_equal(global_ensemble_predict(GlobalWeights(np.zeros(2)), s), [0.5, 0.5])
    assert global_ensemble_weights(GlobalWeights(np.array([0.3, 0.7])), 3).shape == (3, 2)
    with pytest.raises(LinkMoeError) as exc:
        global_ensemble_logits(GlobalWeights(np.zeros(3)), s)
    assert exc.value.code is ErrorCode.DIM_MISMATCH


def test_global_loss_gradient():
    gen = np.random.default_rng(0)
    s = gen.normal(size=(40, 3))
    y = (gen.random(40) < 0.5).astype(float)

    def closure(arrays):
        loss, grad = global_loss_and_grad(arrays[0], s, y)
        return loss, [grad]

    assert grad_check(closure, [gen.normal(size=3)], tol=1e-6).passed


def perfect_and_noise(n_pos, n_neg, seed):
    gen = np.random.default_rng(seed)
    pos = np.column_stack([np.full(n_pos, 10.0), gen.normal(0.0, 1.0, n_pos)])
    neg = np.column_stack([np.full(n_neg, -10.0), gen.normal(0.0, 1.0, n_neg)])
    return pos, neg


def batch(pos, neg):
    return RankingBatch(GateInputs(), pos, GateInputs(), neg)


def test_global_ensemble_finds_perfect_expert():
    train = batch(*perfect_and_noise(40, 80, 0)).labeled()
    val = batch(*perfect_and_noise(10, 20, 1))
    result = train_global_ensemble(train, val, EnsembleTrainConfig(max_epochs=50), Rng(2))
    assert result.best_val_mrr == 1.0
    assert result.model.w[0] > 0.5
    held_pos, held_neg = perfect_and_noise(30, 60, 3)
    w = result.model
    assert mrr(global_ensemble_logits(w, held_pos), global_ensemble_logits(w, held_neg)) == 1.0


def test_global_ensemble_zero_lr_keeps_uniform_weights():
    train = batch(*perfect_and_noise(10, 10, 0)).labeled()
    val = batch(*perfect_and_noise(5, 5, 1))
    result = train_global_ensemble(train, val, EnsembleTrainConfig(lr=0.0, max_epochs=5, patience=2))
    np.testing.assert_array_equal(result.model.w, [0.5, 0.5])
    assert result.best_epoch == 1


def test_global_ensemble_init_weights_length():
    train = batch(*perfect_and_noise(4, 4, 0)).labeled()
    val = batch(*perfect_and_noise(2, 2, 1))
    with pytest.raises(LinkMoeError) as exc:
        train_global_ensemble(train, val, EnsembleTrainConfig(init_weights=[1.0, 0.0, 0.0]))
    assert exc.value.code is ErrorCode.DIM_MISMATCH


def test_weights_file_round_trip(tmp_path):
    w = GlobalWeights(np.array([0.25, -1 / 3]))
    names, loaded = load_weights(write_weights(tmp_path / "w.txt", w, ["cn", "ncn"]))
    assert names == ["cn", "ncn"]
    np.testing.assert_array_equal(loaded.w, w.w)
    (tmp_path / "bad.txt").write_text("cn\n")
    with pytest.raises(LinkMoeError) as exc:
        load_weights(tmp_path / "bad.txt")
    assert exc.value.code is ErrorCode.MALFORMED_LINE
