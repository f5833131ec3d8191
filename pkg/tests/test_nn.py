import numpy as np
import pytest

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.services.nn import (
    Checkpoint,
    CheckpointKind,
    MlpParams,
    adam_init,
    adam_step,
    bce_loss,
    grad_check,
    init_mlp,
    load_checkpoint,
    mlp_backward,
    mlp_forward,
    save_checkpoint,
    softmax,
    zeros_mlp,
)


def reference_forward(p: MlpParams, x, masks):
    h = np.atleast_2d(x)
    for l, (w, b) in enumerate(zip(p.weights, p.biases)):
        z = h @ w.T + b
        if l == len(p.weights) - 1:
            return z
        h = np.maximum(z, 0.0)
        if masks[l] is not None:
            h = h * masks[l]


def test_identity_layer():
    p = MlpParams(weights=[np.eye(2)], biases=[np.zeros(2)])
    out, _ = mlp_forward(p, [1.0, 2.0])
    np.testing.assert_array_equal(out, [1.0, 2.0])


def test_zero_network_outputs_zero():
    out, _ = mlp_forward(zeros_mlp([3, 4, 2]), np.ones((5, 3)))
    np.testing.assert_array_equal(out, np.zeros((5, 2)))


def test_forward_matches_reference_with_dropout():
    p = init_mlp([4, 6, 3], Rng(2), dropout_p=0.3)
    x = np.random.default_rng(0).normal(size=(7, 4))
    out, tape = mlp_forward(p, x, train_mode=True, rng=Rng(9))
    np.testing.assert_allclose(out, reference_forward(p, x, tape.masks), atol=1e-12)
    eval_out, eval_tape = mlp_forward(p, x)
    assert all(m is None for m in eval_tape.masks)
    np.testing.assert_allclose(eval_out, reference_forward(p, x, [None]), atol=1e-12)


def test_forward_dim_mismatch():
    with pytest.raises(LinkMoeError) as exc:
        mlp_forward(zeros_mlp([3, 2]), np.ones(4))
    assert exc.value.code is ErrorCode.DIM_MISMATCH


def test_linear_backward_is_adjoint():
    p = init_mlp([3, 2], Rng(0))
    x = np.array([0.5, -1.0, 2.0])
    _, tape = mlp_forward(p, x)
    grads, grad_x = mlp_backward(tape, np.array([0.0, 1.0]))
    np.testing.assert_array_equal(grads[0][1], x)
    np.testing.assert_array_equal(grads[0][0], np.zeros(3))
    np.testing.assert_array_equal(grad_x, p.weights[0][1])


def test_dead_relu_blocks_gradient():
    p = MlpParams(weights=[np.eye(2), np.ones((1, 2))], biases=[np.full(2, -10.0), np.zeros(1)])
    _, tape = mlp_forward(p, np.array([1.0, 2.0]))
    grads, grad_x = mlp_backward(tape, np.array([1.0]))
    np.testing.assert_array_equal(grad_x, np.zeros(2))
    np.testing.assert_array_equal(grads[0], np.zeros((2, 2)))


def test_backward_shape_check():
    _, tape = mlp_forward(zeros_mlp([3, 2]), np.ones((4, 3)))
    with pytest.raises(LinkMoeError) as exc:
        mlp_backward(tape, np.ones((4, 3)))
    assert exc.value.code is ErrorCode.TAPE_MISMATCH


def test_three_layer_gradcheck():
    p = init_mlp([5, 7, 6, 2], Rng(4))
    x = np.random.default_rng(1).normal(size=(8, 5))
    c = np.random.default_rng(2).normal(size=(8, 2))

    def closure(arrays):
        out, tape = mlp_forward(p.with_arrays(arrays), x)
        grads, _ = mlp_backward(tape, c)
        return float(np.sum(out * c)), grads

    result = grad_check(closure, p.arrays(), tol=1e-4)
    assert result.passed, result.max_rel_error
    assert result.checked >= 50


def test_gradcheck_linear_regression_and_negative_control():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=(20, 3)), rng.normal(size=20)

    def closure(arrays):
        (w,) = arrays
        r = x @ w - y
        return float(0.5 * r @ r), [x.T @ r]

    w0 = rng.normal(size=3)
    assert grad_check(closure, [w0], tol=1e-7).passed

    def corrupted(arrays):
        loss, (g,) = closure(arrays)
        return loss, [g * 1.5]

    assert not grad_check(corrupted, [w0], tol=1e-4).passed


def test_softmax():
    np.testing.assert_allclose(softmax(np.zeros(3)), np.full(3, 1 / 3))
    big = softmax(np.array([1000.0, 0.0]))
    assert np.all(np.isfinite(big))
    assert big[0] == pytest.approx(1.0) and big[1] == pytest.approx(0.0, abs=1e-300)


def test_bce_midpoint_and_perfect():
    loss, grad = bce_loss(0.0, 1.0)
    assert float(loss) == pytest.approx(np.log(2), abs=1e-6)
    assert float(grad) == pytest.approx(-0.5)
    loss, _ = bce_loss(30.0, 1.0)
    assert float(loss) < 1e-12


def test_bce_gradient_finite_difference():
    z = np.random.default_rng(5).normal(scale=3.0, size=30)
    y = (np.arange(30) % 2).astype(float)
    _, grad = bce_loss(z, y)
    h = 1e-6
    numeric = (bce_loss(z + h, y)[0] - bce_loss(z - h, y)[0]) / (2 * h)
    np.testing.assert_allclose(grad, numeric, atol=1e-6)


def test_adam_zero_grad_keeps_params():
    params = [np.array([1.0, -2.0])]
    state = adam_init(params, lr=0.1)
    new, state = adam_step(state, params, [np.zeros(2)])
    np.testing.assert_array_equal(new[0], params[0])
    assert state.step_count == 1


def test_adam_first_step_closed_form():
    params = [np.array([0.5, 0.5, 0.5])]
    g = np.array([0.2, -3.0, 1e-3])
    state = adam_init(params, lr=0.01)
    new, _ = adam_step(state, params, [g])
    expected = params[0] - 0.01 * g / (np.abs(g) + 1e-8)
    np.testing.assert_allclose(new[0], expected, rtol=1e-12)


def test_adam_constant_gradient_step_bounded_by_lr():
    p = [np.zeros(2)]
    state = adam_init(p, lr=0.01)
    for _ in range(200):
        prev = p[0]
        p, state = adam_step(state, p, [np.array([2.0, -0.5])])
        step = np.abs(p[0] - prev)
        assert np.all(step <= 0.01 * (1 + 1e-6))
    np.testing.assert_allclose(step, 0.01, rtol=1e-3)


def test_adam_deterministic():
    def trajectory():
        rng = Rng(8)
        p = [rng.normal(0.0, 1.0, (3, 3))]
        state = adam_init(p, lr=0.05, weight_decay=1e-4)
        for _ in range(20):
            p, state = adam_step(state, p, [rng.normal(0.0, 1.0, (3, 3))])
        return p[0]

    np.testing.assert_array_equal(trajectory(), trajectory())


def test_rng_derive_is_stable():
    a = Rng(5).derive("stage")
    b = Rng(5).derive("stage")
    np.testing.assert_array_equal(a.random(4), b.random(4))
    assert Rng(5).derive("other").seed != Rng(5).derive("stage").seed


def test_checkpoint_layout_and_bad_magic(tmp_path):
    p = init_mlp([3, 4, 2], Rng(1), dropout_p=0.25)
    path = tmp_path / "m.lmoe"
    written = save_checkpoint(path, Checkpoint(CheckpointKind.FEATURE_MLP, 0, [p, None], [np.arange(3.0)], {"k": 1}))
    assert [w.name for w in written] == ["m.lmoe", "m.json"]
    assert path.read_bytes()[:4] == b"LMOE"
    ckpt = load_checkpoint(path, expected=CheckpointKind.FEATURE_MLP)
    assert ckpt.slots[1] is None
    assert ckpt.slots[0].dims == [3, 4, 2] and ckpt.slots[0].dropout_p == 0.25
    for a, b in zip(ckpt.slots[0].arrays(), p.arrays()):
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(ckpt.extras[0], [0.0, 1.0, 2.0])
    assert ckpt.sidecar == {"k": 1}

    with pytest.raises(LinkMoeError) as exc:
        load_checkpoint(path, expected=CheckpointKind.GATE)
    assert exc.value.code is ErrorCode.BAD_CHECKPOINT
    path.write_bytes(b"XXXX" + path.read_bytes()[4:])
    with pytest.raises(LinkMoeError) as exc:
        load_checkpoint(path)
    assert exc.value.code is ErrorCode.BAD_CHECKPOINT
