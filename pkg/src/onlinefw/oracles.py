"""Loss functions, exact gradients, and seeded stochastic gradient oracles.

A round's loss is a batch of samples plus a model. Three models are
supported: multiclass logistic regression (summed over the batch, a
(d, C) weight matrix), a one-hidden-layer sigmoid network with softmax
output (mean cross-entropy, weights packed into a flat column), and a
synthetic quadratic with optional per-sample linear perturbations
(mean over the batch, the controlled testbed with a known average
objective).

Stochastic gradients are deterministic functions of (seed, round,
draw): the same realization can be re-evaluated at a second point,
which is exactly what a recursive variance-corrected estimator needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Sample",
    "RoundLoss",
    "MulticlassLogistic",
    "OneHiddenNN",
    "SyntheticQuadratic",
    "MinibatchSubsample",
    "AdditiveGaussian",
    "grad_stochastic",
    "empirical_lipschitz",
    "empirical_noise_bound",
]

_MASK64 = (1 << 64) - 1


@dataclass(eq=False)
class Sample:
    """One labeled example: a feature vector and a label in {1..C}."""

    features: np.ndarray
    label: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64).ravel()
        if not np.all(np.isfinite(self.features)):
            raise ValueError("sample features contain non-finite entries")
        if self.label < 1:
            raise ValueError(f"label must be >= 1, got {self.label}")


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    m = z.max(axis=1, keepdims=True)
    e = np.exp(z - m)
    return e / e.sum(axis=1, keepdims=True)


def _logsumexp_rows(z: np.ndarray) -> np.ndarray:
    m = z.max(axis=1)
    return m + np.log(np.exp(z - m[:, None]).sum(axis=1))


@dataclass(frozen=True)
class MulticlassLogistic:
    """Softmax regression; the point is the (n_features, n_classes) matrix W.

    The round loss is the SUM over the batch of per-sample cross
    entropies -log softmax_{y_i}(W^T a_i); the default weights encode
    that reduction.
    """

    n_features: int
    n_classes: int

    @property
    def dims(self) -> tuple[int, int]:
        return (self.n_features, self.n_classes)

    def default_weights(self, batch_size: int) -> np.ndarray:
        return np.ones(batch_size)

    def value(self, w, X, Y, weights) -> float:
        z = X @ w
        picked = z[np.arange(len(Y)), Y - 1]
        return float(np.dot(weights, _logsumexp_rows(z) - picked))

    def grad(self, w, X, Y, weights) -> np.ndarray:
        z = X @ w
        p = _softmax_rows(z)
        p[np.arange(len(Y)), Y - 1] -= 1.0
        # column c collects sum_i weights_i (softmax_c - 1{y_i=c}) a_i
        return X.T @ (weights[:, None] * p)


@dataclass(frozen=True)
class OneHiddenNN:
    """One sigmoid hidden layer, softmax output, mean cross-entropy.

    The point packs (W1, b1, W2, b2) into a single flat column in that
    order (C-order per block), so one product feasible set can cap each
    parameter group separately.
    """

    n_features: int
    hidden: int
    n_classes: int

    @property
    def dims(self) -> tuple[int, int]:
        d, m, c = self.n_features, self.hidden, self.n_classes
        return (d * m + m + m * c + c, 1)

    def block_dims(self) -> list[tuple[int, int]]:
        d, m, c = self.n_features, self.hidden, self.n_classes
        return [(d, m), (m, 1), (m, c), (c, 1)]

    def unpack(self, w: np.ndarray) -> list[np.ndarray]:
        parts, off = [], 0
        flat = w.ravel()
        for r, c in self.block_dims():
            parts.append(flat[off: off + r * c].reshape(r, c))
            off += r * c
        return parts

    def pack(self, parts) -> np.ndarray:
        return np.concatenate([p.ravel() for p in parts]).reshape(-1, 1)

    def default_weights(self, batch_size: int) -> np.ndarray:
        return np.full(batch_size, 1.0 / batch_size)

    def _forward(self, w, X):
        w1, b1, w2, b2 = self.unpack(w)
        h = 1.0 / (1.0 + np.exp(-(X @ w1 + b1.T)))
        z = h @ w2 + b2.T
        return h, z

    def value(self, w, X, Y, weights) -> float:
        _, z = self._forward(w, X)
        picked = z[np.arange(len(Y)), Y - 1]
        return float(np.dot(weights, _logsumexp_rows(z) - picked))

    def grad(self, w, X, Y, weights) -> np.ndarray:
        w1, b1, w2, b2 = self.unpack(w)
        h = 1.0 / (1.0 + np.exp(-(X @ w1 + b1.T)))
        z = h @ w2 + b2.T
        dz = _softmax_rows(z)
        dz[np.arange(len(Y)), Y - 1] -= 1.0
        dz *= weights[:, None]
        g_w2 = h.T @ dz
        g_b2 = dz.sum(axis=0)[:, None]
        dh = (dz @ w2.T) * h * (1.0 - h)
        g_w1 = X.T @ dh
        g_b1 = dh.sum(axis=0)[:, None]
        return self.pack([g_w1, g_b1, g_w2, g_b2])


@dataclass(frozen=True, eq=False)
class SyntheticQuadratic:
    """f(x) = 1/2 x'Ax + b'x plus a weighted-mean linear perturbation.

    Sample features act as the perturbation vectors p_i; the round loss
    is 1/2 x'Ax + b'x + perturb_scale * mean_i p_i'x. Reduction weights
    must sum to 1 (the quadratic core appears once, not per sample).
    """

    A: np.ndarray
    b: np.ndarray
    perturb_scale: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=np.float64))
        object.__setattr__(
            self, "b", np.asarray(self.b, dtype=np.float64).reshape(-1, 1)
        )
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError(f"A must be square, got shape {self.A.shape}")
        if self.b.shape[0] != self.A.shape[0]:
            raise ValueError("b length must match A")

    @property
    def n_features(self) -> int:
        return self.A.shape[0]

    @property
    def dims(self) -> tuple[int, int]:
        return (self.A.shape[0], 1)

    def default_weights(self, batch_size: int) -> np.ndarray:
        return np.full(batch_size, 1.0 / batch_size)

    def value(self, w, X, Y, weights) -> float:
        x = w.ravel()
        core = 0.5 * float(x @ self.A @ x) + float(self.b.ravel() @ x)
        if self.perturb_scale == 0.0:
            return core
        p = X.T @ weights
        return core + self.perturb_scale * float(p @ x)

    def grad(self, w, X, Y, weights) -> np.ndarray:
        g = self.A @ w + self.b
        if self.perturb_scale != 0.0:
            g = g + self.perturb_scale * (X.T @ weights)[:, None]
        return g


@dataclass(eq=False)
class RoundLoss:
    """One round's loss f_t: a nonempty batch evaluated under a model.

    Stacks the batch features once at construction; ``loss`` and
    ``grad_exact`` reuse the cached matrix.
    """

    batch: list[Sample]
    model: object
    X: np.ndarray = field(init=False, repr=False)
    Y: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.batch:
            raise ValueError("batch must be nonempty")
        self.X = np.stack([s.features for s in self.batch])
        self.Y = np.array([s.label for s in self.batch], dtype=np.int64)
        if self.X.shape[1] != self.model.n_features:
            raise ValueError(
                f"samples have {self.X.shape[1]} features, model expects "
                f"{self.model.n_features}"
            )
        n_classes = getattr(self.model, "n_classes", None)
        if n_classes is not None and self.Y.max() > n_classes:
            raise ValueError(
                f"label {self.Y.max()} exceeds n_classes={n_classes}"
            )
        self.weights = self.model.default_weights(len(self.batch))

    def _check_point(self, w) -> np.ndarray:
        arr = np.asarray(w, dtype=np.float64)
        if arr.shape != self.model.dims:
            raise ValueError(
                f"point has shape {arr.shape}, model expects {self.model.dims}"
            )
        return arr

    def loss(self, w) -> float:
        return self.model.value(self._check_point(w), self.X, self.Y, self.weights)

    def grad_exact(self, w) -> np.ndarray:
        return self.model.grad(self._check_point(w), self.X, self.Y, self.weights)


@dataclass(frozen=True)
class MinibatchSubsample:
    """Draw ``size`` samples uniformly with replacement from the batch."""

    size: int
    seed: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"subsample size must be >= 1, got {self.size}")


@dataclass(frozen=True)
class AdditiveGaussian:
    """Add N(0, sigma^2/N * I) noise over the N gradient entries."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


def _xi_rng(seed: int, round_index: int, draw: int) -> np.random.Generator:
    # Counter-based keying: the realization xi is a pure function of
    # (seed, round, draw), so the same xi can be evaluated twice.
    return np.random.default_rng([seed & _MASK64, 1, round_index, draw])


def grad_stochastic(rl: RoundLoss, w, noise, round_index: int, draw: int) -> np.ndarray:
    """Evaluate one stochastic gradient realization at ``w``.

    ``(noise.seed, round_index, draw)`` pins the realization; two calls
    with the same triple but different points share the identical xi.
    """

    if isinstance(noise, AdditiveGaussian):
        g = rl.grad_exact(w)
        if noise.sigma == 0.0:
            return g
        rng = _xi_rng(noise.seed, round_index, draw)
        scale = noise.sigma / np.sqrt(g.size)
        return g + rng.normal(0.0, scale, size=g.shape)
    if isinstance(noise, MinibatchSubsample):
        rng = _xi_rng(noise.seed, round_index, draw)
        idx = rng.integers(0, len(rl.batch), size=noise.size)
        arr = rl._check_point(w)
        # rescale so the subsample is unbiased for the batch reduction
        sub_w = rl.weights[idx] * (len(rl.batch) / noise.size)
        return rl.model.grad(arr, rl.X[idx], rl.Y[idx], sub_w)
    raise TypeError(f"unknown noise spec {noise!r}")


def empirical_lipschitz(rl: RoundLoss, feasible_set, n_pairs: int = 50,
                        seed: int = 0) -> float:
    """Max observed gradient difference ratio over random feasible pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        x = feasible_set.sample_point(rng)
        y = feasible_set.sample_point(rng)
        gap = float(np.linalg.norm(x - y))
        if gap < 1e-12:
            continue
        diff = float(np.linalg.norm(rl.grad_exact(x) - rl.grad_exact(y)))
        worst = max(worst, diff / gap)
    return worst


def empirical_noise_bound(rl: RoundLoss, w, noise, n_draws: int = 100,
                          round_index: int = 1) -> float:
    """Max observed stochastic-gradient deviation from the exact gradient."""
    g = rl.grad_exact(w)
    worst = 0.0
    for k in range(n_draws):
        dev = grad_stochastic(rl, w, noise, round_index, k) - g
        worst = max(worst, float(np.linalg.norm(dev)))
    return worst
