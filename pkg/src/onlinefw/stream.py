"""Datasets and round streams.

Loaders for the two real multiclass datasets (MNIST IDX and CIFAR-10
binary layouts, parsed bit-exactly), a seeded synthetic Gaussian
cluster generator, and CSV export/import. A stream turns a dataset
into per-round batches: stochastic mode samples i.i.d. with
replacement, adversarial mode sorts by label and hands out consecutive
blocks, which is the hardest ordering for a learner that averages
history.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field

import numpy as np

from .oracles import MulticlassLogistic, RoundLoss, Sample

__all__ = [
    "Dataset",
    "Stream",
    "load_idx",
    "load_cifar10",
    "synthetic_dataset",
    "save_csv",
    "load_csv",
    "build_stream",
]

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801
CIFAR_RECORD_BYTES = 3073  # label byte + 32*32*3 pixels


@dataclass(eq=False)
class Dataset:
    samples: list[Sample]
    d: int
    C: int
    name: str

    def __post_init__(self):
        if not self.samples:
            raise ValueError("dataset must contain at least one sample")
        for s in self.samples:
            if s.features.shape != (self.d,):
                raise ValueError(
                    f"sample has {s.features.shape[0]} features, expected {self.d}"
                )
            if not (1 <= s.label <= self.C):
                raise ValueError(
                    f"label {s.label} outside 1..{self.C} in dataset {self.name!r}"
                )

    @property
    def n(self) -> int:
        return len(self.samples)


def _read_exact(path, expected: int, payload_offset: int) -> bytes:
    with open(path, "rb") as fh:
        data = fh.read()
    actual = len(data) - payload_offset
    if actual != expected:
        raise ValueError(
            f"{path}: expected {expected} payload bytes, found {actual}"
        )
    return data


def load_idx(images_path, labels_path) -> Dataset:
    """Parse the big-endian IDX pair used by the MNIST distribution.

    Image header: magic 0x00000803, count, rows, cols (uint32 each);
    label header: magic 0x00000801, count. Pixels are scaled to [0, 1]
    and the 0..9 labels shift to 1..10.
    """
    with open(images_path, "rb") as fh:
        header = fh.read(16)
    if len(header) < 16:
        raise ValueError(f"{images_path}: truncated IDX header")
    magic, count, rows, cols = struct.unpack(">IIII", header)
    if magic != IDX_IMAGE_MAGIC:
        raise ValueError(
            f"{images_path}: bad magic 0x{magic:08X}, "
            f"expected 0x{IDX_IMAGE_MAGIC:08X}"
        )
    data = _read_exact(images_path, count * rows * cols, 16)
    pixels = np.frombuffer(data, dtype=np.uint8, offset=16)
    images = pixels.reshape(count, rows * cols).astype(np.float64) / 255.0

    with open(labels_path, "rb") as fh:
        lheader = fh.read(8)
    if len(lheader) < 8:
        raise ValueError(f"{labels_path}: truncated IDX header")
    lmagic, lcount = struct.unpack(">II", lheader)
    if lmagic != IDX_LABEL_MAGIC:
        raise ValueError(
            f"{labels_path}: bad magic 0x{lmagic:08X}, "
            f"expected 0x{IDX_LABEL_MAGIC:08X}"
        )
    if lcount != count:
        raise ValueError(
            f"label count {lcount} does not match image count {count}"
        )
    ldata = _read_exact(labels_path, lcount, 8)
    labels = np.frombuffer(ldata, dtype=np.uint8, offset=8)

    samples = [
        Sample(features=images[i], label=int(labels[i]) + 1)
        for i in range(count)
    ]
    return Dataset(samples=samples, d=rows * cols, C=10, name="mnist")


def load_cifar10(batch_paths) -> Dataset:
    """Parse CIFAR-10 binary batches: 3073-byte records, label byte first."""
    samples: list[Sample] = []
    for path in batch_paths:
        with open(path, "rb") as fh:
            data = fh.read()
        if len(data) == 0 or len(data) % CIFAR_RECORD_BYTES != 0:
            raise ValueError(
                f"{path}: size {len(data)} is not a multiple of "
                f"{CIFAR_RECORD_BYTES}-byte records"
            )
        raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, CIFAR_RECORD_BYTES)
        for row in raw:
            samples.append(
                Sample(
                    features=row[1:].astype(np.float64) / 255.0,
                    label=int(row[0]) + 1,
                )
            )
    return Dataset(samples=samples, d=CIFAR_RECORD_BYTES - 1, C=10, name="cifar10")


def synthetic_dataset(d: int, C: int, n: int, separation: float,
                      seed: int) -> Dataset:
    """Gaussian clusters with class means at separation * basis vectors."""
    if d < 1 or C < 1 or n < 1:
        raise ValueError("d, C, n must all be >= 1")
    rng = np.random.default_rng(seed)
    labels = rng.integers(1, C + 1, size=n)
    features = rng.standard_normal((n, d))
    for i in range(n):
        features[i, (labels[i] - 1) % d] += separation
    samples = [
        Sample(features=features[i], label=int(labels[i])) for i in range(n)
    ]
    return Dataset(samples=samples, d=d, C=C, name=f"synthetic-{d}x{C}")


def save_csv(ds: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label"] + [f"f{i + 1}" for i in range(ds.d)])
        for s in ds.samples:
            writer.writerow([s.label] + [repr(float(v)) for v in s.features])


def load_csv(path, name: str = "csv") -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "label":
            raise ValueError(f"{path}: expected header starting with 'label'")
        d = len(header) - 1
        samples = []
        for row in reader:
            samples.append(
                Sample(
                    features=np.array([float(v) for v in row[1:]]),
                    label=int(row[0]),
                )
            )
    C = max(s.label for s in samples)
    return Dataset(samples=samples, d=d, C=C, name=name)


@dataclass(eq=False)
class Stream:
    """T rounds of batches over a dataset, plus the model defining f_t."""

    mode: str
    B: int
    T: int
    seed: int
    model: object
    batches: list[list[Sample]]
    _cache: dict = field(default_factory=dict, repr=False)

    def round_loss(self, t: int) -> RoundLoss:
        if not (1 <= t <= self.T):
            raise IndexError(
                f"stream exhausted: round {t} requested, have 1..{self.T}"
            )
        rl = self._cache.get(t)
        if rl is None:
            rl = RoundLoss(batch=self.batches[t - 1], model=self.model)
            self._cache[t] = rl
        return rl

    def losses(self) -> list[RoundLoss]:
        return [self.round_loss(t) for t in range(1, self.T + 1)]


def build_stream(ds: Dataset, mode: str, B: int, T: int, seed: int,
                 model=None) -> Stream:
    """Construct per-round batches.

    Stochastic batches are independent uniform draws with replacement;
    drawing round by round keeps a shorter run a prefix of a longer one
    under the same seed. Adversarial mode sorts by label (stable, so
    intra-class file order survives) and slices consecutive blocks.
    """
    if B < 1:
        raise ValueError(f"batch size must be >= 1, got {B}")
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if mode not in ("stochastic", "adversarial"):
        raise ValueError(
            f"mode must be 'stochastic' or 'adversarial', got {mode!r}"
        )
    if model is None:
        model = MulticlassLogistic(n_features=ds.d, n_classes=ds.C)

    if mode == "stochastic":
        rng = np.random.default_rng([seed & (2**64 - 1), 3])
        batches = []
        for _ in range(T):
            idx = rng.integers(0, ds.n, size=B)
            batches.append([ds.samples[i] for i in idx])
    else:
        if B * T > ds.n:
            raise ValueError(
                f"adversarial stream needs B*T <= n, got {B}*{T} > {ds.n}"
            )
        labels = np.array([s.label for s in ds.samples])
        order = np.argsort(labels, kind="stable")
        batches = [
            [ds.samples[i] for i in order[t * B:(t + 1) * B]]
            for t in range(T)
        ]
    return Stream(mode=mode, B=B, T=T, seed=seed, model=model, batches=batches)
