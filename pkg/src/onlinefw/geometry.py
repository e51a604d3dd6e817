"""Constraint sets and their linear minimization oracles.

Every feasible set here exposes the one primitive a projection-free
learner needs: ``lmo(direction)``, the exact minimizer of a linear
function over the set. Points are dense 2-d float64 arrays of shape
``(rows, cols)``; vector problems use ``cols = 1``.

Tie-breaking is deterministic everywhere: the lowest index wins among
tied coordinates, and exactly-zero entries resolve to positive sign.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FeasibleSet",
    "ColumnL1Ball",
    "Simplex",
    "L2Ball",
    "ProductSet",
]

# Vertex enumeration is a brute-force test oracle; beyond this many
# entries the vertex count explodes and the caller should not be here.
_ENUM_MAX_ENTRIES = 12


def _as_point(p, dims: tuple[int, int], name: str) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != tuple(dims):
        raise ValueError(
            f"{name} has shape {arr.shape}, expected {tuple(dims)}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


class FeasibleSet:
    """Base interface shared by all constraint sets.

    Subclasses are frozen dataclasses carrying the set parameters and
    ``dims = (rows, cols)``. All operations are pure functions of their
    inputs and hold no mutable state.
    """

    dims: tuple[int, int]

    @property
    def diameter(self) -> float:
        """Exact Euclidean diameter of the set."""
        raise NotImplementedError

    def lmo(self, direction) -> np.ndarray:
        """Return a vertex minimizing ``<direction, v>`` over the set."""
        raise NotImplementedError

    def contains(self, p, tol: float = 1e-9) -> bool:
        """True iff ``p`` satisfies the defining inequalities within ``tol``."""
        raise NotImplementedError

    def vertex_enumerate(self) -> list[np.ndarray]:
        """Exact vertex list for small instances (test oracle for lmo)."""
        raise NotImplementedError

    def initial_point(self) -> np.ndarray:
        """A canonical feasible starting point."""
        raise NotImplementedError

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        """A random feasible point (used by diameter and LMO probes)."""
        raise NotImplementedError

    @property
    def size(self) -> int:
        return self.dims[0] * self.dims[1]

    def _check_enum_size(self) -> None:
        if self.size > _ENUM_MAX_ENTRIES:
            raise ValueError(
                f"vertex enumeration supports at most {_ENUM_MAX_ENTRIES} "
                f"entries, got dims {self.dims}"
            )


@dataclass(frozen=True)
class ColumnL1Ball(FeasibleSet):
    """Matrix l1 ball: every column's l1 norm is at most ``radius``.

    This is the constraint max_j sum_i |W_ij| <= r. It decomposes
    column-wise, so the LMO places a single signed spike per column.

    Args:
        radius: l1 budget per column, must be positive.
        dims: (rows, cols) of the matrix variable.
    """

    radius: float
    dims: tuple[int, int]

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.dims[0] < 1 or self.dims[1] < 1:
            raise ValueError(f"dims must be positive, got {self.dims}")

    @property
    def diameter(self) -> float:
        # Opposite spikes in every column: sqrt(cols * (2r)^2).
        return 2.0 * self.radius * np.sqrt(self.dims[1])

    def lmo(self, direction) -> np.ndarray:
        """Per column j: -r * sign(d[i*, j]) * e_{i*}, i* = argmax_i |d[i, j]|.

        Ties pick the lowest row index (argmax convention); an
        exactly-zero pivot entry gets positive sign, so an all-zero
        column yields +r * e_0.
        """
        d = _as_point(direction, self.dims, "direction")
        rows = np.argmax(np.abs(d), axis=0)
        cols = np.arange(self.dims[1])
        signs = np.where(d[rows, cols] > 0.0, -1.0, 1.0)
        v = np.zeros(self.dims)
        v[rows, cols] = signs * self.radius
        return v

    def contains(self, p, tol: float = 1e-9) -> bool:
        arr = _as_point(p, self.dims, "point")
        return bool(np.abs(arr).sum(axis=0).max() <= self.radius + tol)

    def vertex_enumerate(self) -> list[np.ndarray]:
        self._check_enum_size()
        rows, cols = self.dims
        column_vertices = []
        for i in range(rows):
            for s in (+1.0, -1.0):
                e = np.zeros(rows)
                e[i] = s * self.radius
                column_vertices.append(e)
        out = []
        for combo in itertools.product(column_vertices, repeat=cols):
            out.append(np.stack(combo, axis=1))
        return out

    def initial_point(self) -> np.ndarray:
        return np.zeros(self.dims)

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        rows, cols = self.dims
        v = np.empty(self.dims)
        for j in range(cols):
            w = rng.dirichlet(np.ones(rows))
            signs = rng.choice([-1.0, 1.0], size=rows)
            # u^(1/d) pushes mass toward the boundary like a uniform draw.
            scale = self.radius * rng.uniform() ** (1.0 / rows)
            v[:, j] = scale * signs * w
        return v


@dataclass(frozen=True)
class Simplex(FeasibleSet):
    """Scaled probability simplex over all entries: p >= 0, sum(p) = scale."""

    scale: float
    dims: tuple[int, int]

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.dims[0] < 1 or self.dims[1] < 1:
            raise ValueError(f"dims must be positive, got {self.dims}")

    @property
    def diameter(self) -> float:
        # Two distinct vertices differ by scale in two coordinates.
        return self.scale * np.sqrt(2.0)

    def lmo(self, direction) -> np.ndarray:
        d = _as_point(direction, self.dims, "direction")
        i = int(np.argmin(d.ravel()))
        v = np.zeros(self.dims)
        v.flat[i] = self.scale
        return v

    def contains(self, p, tol: float = 1e-9) -> bool:
        arr = _as_point(p, self.dims, "point")
        if arr.min() < -tol:
            return False
        return bool(abs(arr.sum() - self.scale) <= tol)

    def vertex_enumerate(self) -> list[np.ndarray]:
        self._check_enum_size()
        out = []
        for i in range(self.size):
            v = np.zeros(self.dims)
            v.flat[i] = self.scale
            out.append(v)
        return out

    def initial_point(self) -> np.ndarray:
        return np.full(self.dims, self.scale / self.size)

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        w = rng.dirichlet(np.ones(self.size)) * self.scale
        return w.reshape(self.dims)


@dataclass(frozen=True)
class L2Ball(FeasibleSet):
    """Euclidean ball of the given radius around the origin."""

    radius: float
    dims: tuple[int, int]

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.dims[0] < 1 or self.dims[1] < 1:
            raise ValueError(f"dims must be positive, got {self.dims}")

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def lmo(self, direction) -> np.ndarray:
        d = _as_point(direction, self.dims, "direction")
        n = float(np.linalg.norm(d))
        if n == 0.0:
            v = np.zeros(self.dims)
            v.flat[0] = self.radius
            return v
        return (-self.radius / n) * d

    def contains(self, p, tol: float = 1e-9) -> bool:
        arr = _as_point(p, self.dims, "point")
        return bool(np.linalg.norm(arr) <= self.radius + tol)

    def vertex_enumerate(self) -> list[np.ndarray]:
        raise NotImplementedError(
            "L2Ball has no finite vertex set; enumeration is unsupported"
        )

    def initial_point(self) -> np.ndarray:
        return np.zeros(self.dims)

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        g = rng.standard_normal(self.dims)
        n = np.linalg.norm(g)
        if n == 0.0:
            return np.zeros(self.dims)
        return g * (self.radius * rng.uniform() ** (1.0 / self.size) / n)


@dataclass(frozen=True)
class ProductSet(FeasibleSet):
    """Cartesian product of blocks, flattened into a single (N, 1) point.

    Block b occupies the slice [offsets[b], offsets[b+1]) of the flat
    vector, reshaped to the block's own dims in C order. The LMO and
    membership tests decompose exactly across blocks, which is what a
    per-layer norm cap on a multi-layer model needs.
    """

    blocks: tuple[FeasibleSet, ...]

    def __post_init__(self):
        if len(self.blocks) < 1:
            raise ValueError("ProductSet needs at least one block")

    @property
    def dims(self) -> tuple[int, int]:
        return (sum(b.size for b in self.blocks), 1)

    @property
    def offsets(self) -> list[int]:
        out = [0]
        for b in self.blocks:
            out.append(out[-1] + b.size)
        return out

    @property
    def diameter(self) -> float:
        return float(np.sqrt(sum(b.diameter**2 for b in self.blocks)))

    def split(self, p) -> list[np.ndarray]:
        """Views of the flat point reshaped to each block's dims."""
        arr = _as_point(p, self.dims, "point")
        offs = self.offsets
        return [
            arr[offs[i]: offs[i + 1], 0].reshape(b.dims)
            for i, b in enumerate(self.blocks)
        ]

    def join(self, parts: list[np.ndarray]) -> np.ndarray:
        return np.concatenate([q.ravel() for q in parts]).reshape(-1, 1)

    def lmo(self, direction) -> np.ndarray:
        parts = self.split(direction)
        return self.join([b.lmo(q) for b, q in zip(self.blocks, parts)])

    def contains(self, p, tol: float = 1e-9) -> bool:
        parts = self.split(p)
        return all(b.contains(q, tol) for b, q in zip(self.blocks, parts))

    def vertex_enumerate(self) -> list[np.ndarray]:
        self._check_enum_size()
        per_block = [b.vertex_enumerate() for b in self.blocks]
        out = []
        for combo in itertools.product(*per_block):
            out.append(self.join(list(combo)))
        return out

    def initial_point(self) -> np.ndarray:
        return self.join([b.initial_point() for b in self.blocks])

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        return self.join([b.sample_point(rng) for b in self.blocks])
