"""Tests for loss oracles: frozen values, finite differences, unbiasedness.

Independent oracles used here: central finite differences for gradients
and Monte-Carlo averaging for the stochastic oracle's mean.
"""

import numpy as np
import pytest

from onlinefw.geometry import ColumnL1Ball, L2Ball
from onlinefw.oracles import (
    AdditiveGaussian,
    MinibatchSubsample,
    MulticlassLogistic,
    OneHiddenNN,
    RoundLoss,
    Sample,
    SyntheticQuadratic,
    empirical_lipschitz,
    empirical_noise_bound,
    grad_stochastic,
)


def make_batch(rng, n, d, C):
    return [
        Sample(features=rng.standard_normal(d), label=int(rng.integers(1, C + 1)))
        for _ in range(n)
    ]


def fd_grad(rl, w, h=1e-5):
    g = np.zeros_like(w, dtype=np.float64)
    for i in range(w.size):
        e = np.zeros_like(g)
        e.flat[i] = h
        g.flat[i] = (rl.loss(w + e) - rl.loss(w - e)) / (2.0 * h)
    return g


def max_rel_err(approx, exact):
    scale = max(1.0, float(np.abs(exact).max()))
    return float(np.abs(approx - exact).max()) / scale


def test_logistic_zero_weights_frozen_values():
    for C, expected in [(2, np.log(2.0)), (10, np.log(10.0))]:
        rl = RoundLoss(
            batch=[Sample(features=np.ones(3), label=1)],
            model=MulticlassLogistic(n_features=3, n_classes=C),
        )
        assert rl.loss(np.zeros((3, C))) == pytest.approx(expected, rel=1e-12)


def test_logistic_gradient_at_zero_frozen():
    rl = RoundLoss(
        batch=[Sample(features=np.array([1.0, 0.0]), label=1)],
        model=MulticlassLogistic(n_features=2, n_classes=2),
    )
    g = rl.grad_exact(np.zeros((2, 2)))
    np.testing.assert_allclose(g, np.array([[-0.5, 0.5], [0.0, 0.0]]), atol=1e-15)


def test_logistic_sums_over_batch():
    rng = np.random.default_rng(0)
    model = MulticlassLogistic(n_features=4, n_classes=3)
    batch = make_batch(rng, 2, 4, 3)
    w = rng.standard_normal((4, 3))
    whole = RoundLoss(batch=batch, model=model)
    parts = [RoundLoss(batch=[s], model=model) for s in batch]
    assert whole.loss(w) == pytest.approx(sum(p.loss(w) for p in parts), rel=1e-12)
    np.testing.assert_allclose(
        whole.grad_exact(w), sum(p.grad_exact(w) for p in parts), rtol=1e-12
    )


def test_nn_means_over_batch():
    rng = np.random.default_rng(1)
    model = OneHiddenNN(n_features=3, hidden=4, n_classes=2)
    batch = make_batch(rng, 2, 3, 2)
    w = 0.1 * rng.standard_normal(model.dims)
    whole = RoundLoss(batch=batch, model=model)
    parts = [RoundLoss(batch=[s], model=model) for s in batch]
    assert whole.loss(w) == pytest.approx(
        0.5 * sum(p.loss(w) for p in parts), rel=1e-12
    )


def test_quadratic_frozen_values():
    model = SyntheticQuadratic(A=np.eye(2), b=np.zeros(2))
    rl = RoundLoss(batch=[Sample(features=np.zeros(2), label=1)], model=model)
    assert rl.loss(np.array([[1.0], [1.0]])) == pytest.approx(1.0)

    model2 = SyntheticQuadratic(A=np.eye(2), b=np.array([1.0, 0.0]))
    rl2 = RoundLoss(batch=[Sample(features=np.zeros(2), label=1)], model=model2)
    np.testing.assert_allclose(
        rl2.grad_exact(np.zeros((2, 1))), np.array([[1.0], [0.0]])
    )


def test_quadratic_perturbation_term():
    p1, p2 = np.array([1.0, 0.0]), np.array([0.0, 2.0])
    model = SyntheticQuadratic(A=np.eye(2), b=np.zeros(2), perturb_scale=2.0)
    rl = RoundLoss(
        batch=[Sample(features=p1, label=1), Sample(features=p2, label=1)],
        model=model,
    )
    x = np.array([[1.0], [1.0]])
    # 1/2 * 2 + 2 * mean(p)'x = 1 + 2 * (0.5 + 1.0)
    assert rl.loss(x) == pytest.approx(4.0)
    np.testing.assert_allclose(
        rl.grad_exact(x), x + 2.0 * np.array([[0.5], [1.0]])
    )


def test_logistic_finite_difference_agreement():
    rng = np.random.default_rng(42)
    model = MulticlassLogistic(n_features=5, n_classes=3)
    worst = 0.0
    for _ in range(20):
        rl = RoundLoss(batch=make_batch(rng, 6, 5, 3), model=model)
        w = rng.uniform(-1, 1, size=(5, 3))
        worst = max(worst, max_rel_err(fd_grad(rl, w), rl.grad_exact(w)))
    assert worst <= 1e-5


def test_nn_directional_finite_differences():
    rng = np.random.default_rng(43)
    model = OneHiddenNN(n_features=4, hidden=4, n_classes=3)
    rl = RoundLoss(batch=make_batch(rng, 5, 4, 3), model=model)
    w = 0.5 * rng.standard_normal(model.dims)
    g = rl.grad_exact(w)
    h = 1e-5
    worst = 0.0
    for _ in range(50):
        u = rng.standard_normal(model.dims)
        u /= np.linalg.norm(u)
        fd = (rl.loss(w + h * u) - rl.loss(w - h * u)) / (2.0 * h)
        exact = float(np.vdot(g, u))
        worst = max(worst, abs(fd - exact) / max(1.0, abs(exact)))
    assert worst <= 1e-4


def test_quadratic_finite_differences_tight():
    rng = np.random.default_rng(44)
    model = SyntheticQuadratic(
        A=np.diag([2.0, 1.0, 0.5]), b=np.array([1.0, -1.0, 0.0])
    )
    rl = RoundLoss(batch=[Sample(features=np.zeros(3), label=1)], model=model)
    w = rng.standard_normal((3, 1))
    assert max_rel_err(fd_grad(rl, w), rl.grad_exact(w)) <= 1e-9


def test_nn_pack_unpack_roundtrip():
    model = OneHiddenNN(n_features=3, hidden=2, n_classes=4)
    rng = np.random.default_rng(2)
    w = rng.standard_normal(model.dims)
    np.testing.assert_array_equal(model.pack(model.unpack(w)), w)
    assert model.dims == (3 * 2 + 2 + 2 * 4 + 4, 1)


def test_gaussian_zero_sigma_is_exact():
    rng = np.random.default_rng(3)
    rl = RoundLoss(
        batch=make_batch(rng, 4, 3, 2),
        model=MulticlassLogistic(n_features=3, n_classes=2),
    )
    w = rng.standard_normal((3, 2))
    noise = AdditiveGaussian(sigma=0.0, seed=9)
    np.testing.assert_array_equal(
        grad_stochastic(rl, w, noise, 5, 0), rl.grad_exact(w)
    )


def test_stochastic_gradient_determinism():
    rng = np.random.default_rng(4)
    rl = RoundLoss(
        batch=make_batch(rng, 6, 3, 2),
        model=MulticlassLogistic(n_features=3, n_classes=2),
    )
    w = rng.standard_normal((3, 2))
    for noise in [AdditiveGaussian(sigma=0.5, seed=1), MinibatchSubsample(size=3, seed=1)]:
        a = grad_stochastic(rl, w, noise, 7, 2)
        b = grad_stochastic(rl, w, noise, 7, 2)
        np.testing.assert_array_equal(a, b)
        c = grad_stochastic(rl, w, noise, 7, 3)
        assert not np.array_equal(a, c)


def test_same_xi_coupling_minibatch():
    # With size=1 the realization is a single sample index; evaluating
    # at two points must hit the same index.
    rng = np.random.default_rng(5)
    model = MulticlassLogistic(n_features=3, n_classes=2)
    batch = make_batch(rng, 6, 3, 2)
    rl = RoundLoss(batch=batch, model=model)
    x = rng.standard_normal((3, 2))
    y = rng.standard_normal((3, 2))
    noise = MinibatchSubsample(size=1, seed=11)
    gx = grad_stochastic(rl, x, noise, 3, 0)
    gy = grad_stochastic(rl, y, noise, 3, 0)
    singles = [RoundLoss(batch=[s], model=model) for s in batch]
    matches = [
        i for i, p in enumerate(singles)
        if np.allclose(gx, 6.0 * p.grad_exact(x), rtol=1e-12)
    ]
    assert len(matches) == 1
    np.testing.assert_allclose(gy, 6.0 * singles[matches[0]].grad_exact(y), rtol=1e-12)


def test_same_xi_coupling_gaussian():
    rng = np.random.default_rng(6)
    rl = RoundLoss(
        batch=make_batch(rng, 4, 3, 2),
        model=MulticlassLogistic(n_features=3, n_classes=2),
    )
    x = rng.standard_normal((3, 2))
    y = rng.standard_normal((3, 2))
    noise = AdditiveGaussian(sigma=1.0, seed=12)
    nx = grad_stochastic(rl, x, noise, 2, 1) - rl.grad_exact(x)
    ny = grad_stochastic(rl, y, noise, 2, 1) - rl.grad_exact(y)
    np.testing.assert_allclose(nx, ny, atol=1e-12, rtol=0)


def test_minibatch_unbiasedness_monte_carlo():
    rng = np.random.default_rng(7)
    rl = RoundLoss(
        batch=make_batch(rng, 8, 6, 3),
        model=MulticlassLogistic(n_features=6, n_classes=3),
    )
    w = rng.standard_normal((6, 3))
    g = rl.grad_exact(w)
    noise = MinibatchSubsample(size=8, seed=13)
    n = 10_000
    acc = np.zeros_like(g)
    for k in range(n):
        acc += grad_stochastic(rl, w, noise, 1, k)
    rel = np.linalg.norm(acc / n - g) / np.linalg.norm(g)
    assert rel <= 3.0 / np.sqrt(n)


def test_empirical_lipschitz_quadratic():
    model = SyntheticQuadratic(A=np.diag([2.0, 1.0]), b=np.zeros(2))
    rl = RoundLoss(batch=[Sample(features=np.zeros(2), label=1)], model=model)
    fset = L2Ball(radius=3.0, dims=(2, 1))
    est = empirical_lipschitz(rl, fset, n_pairs=200, seed=1)
    assert 1.0 <= est <= 2.0 + 1e-9


def test_empirical_noise_bound_positive():
    rng = np.random.default_rng(8)
    rl = RoundLoss(
        batch=make_batch(rng, 6, 4, 2),
        model=MulticlassLogistic(n_features=4, n_classes=2),
    )
    w = rng.standard_normal((4, 2))
    bound = empirical_noise_bound(rl, w, MinibatchSubsample(size=2, seed=3), n_draws=50)
    assert bound > 0.0
    assert np.isfinite(bound)


def test_validation_errors():
    with pytest.raises(ValueError):
        Sample(features=np.array([np.inf, 0.0]), label=1)
    with pytest.raises(ValueError):
        Sample(features=np.zeros(2), label=0)
    with pytest.raises(ValueError):
        RoundLoss(batch=[], model=MulticlassLogistic(n_features=2, n_classes=2))
    with pytest.raises(ValueError):
        RoundLoss(
            batch=[Sample(features=np.zeros(3), label=1)],
            model=MulticlassLogistic(n_features=2, n_classes=2),
        )
    with pytest.raises(ValueError):
        RoundLoss(
            batch=[Sample(features=np.zeros(2), label=5)],
            model=MulticlassLogistic(n_features=2, n_classes=2),
        )
    with pytest.raises(ValueError):
        MinibatchSubsample(size=0)
    with pytest.raises(ValueError):
        AdditiveGaussian(sigma=-0.1)
    rl = RoundLoss(
        batch=[Sample(features=np.zeros(2), label=1)],
        model=MulticlassLogistic(n_features=2, n_classes=2),
    )
    with pytest.raises(ValueError):
        rl.loss(np.zeros((3, 2)))
    with pytest.raises(TypeError):
        grad_stochastic(rl, np.zeros((2, 2)), object(), 1, 0)


def test_gradient_feasible_set_interplay():
    # gradients live in point space: shapes must match the set dims
    model = MulticlassLogistic(n_features=3, n_classes=2)
    fset = ColumnL1Ball(radius=2.0, dims=(3, 2))
    rng = np.random.default_rng(9)
    rl = RoundLoss(batch=make_batch(rng, 4, 3, 2), model=model)
    g = rl.grad_exact(fset.sample_point(rng))
    assert g.shape == fset.dims
