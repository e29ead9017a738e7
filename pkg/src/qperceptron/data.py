"""Discrete datasets: aggregation into pattern statistics, noise injection, generators, CSV IO."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class EmptyDatasetError(ValueError):
    """Raised when an operation receives no samples."""


class DimensionMismatchError(ValueError):
    """Raised when sample dimensions disagree."""


@dataclass(frozen=True)
class Sample:
    """One labelled input; x entries are +-1 for the main experiments (small integers for the appendix grids)."""

    x: tuple
    y: int


@dataclass(frozen=True)
class AggregatedDataset:
    """Samples grouped by unique pattern with counts and empirical label means b(x)."""

    patterns: np.ndarray  # (P, d)
    counts: np.ndarray  # (P,) ints
    label_mean: np.ndarray  # (P,) b(x) in [-1, 1]
    total: int

    @property
    def weight(self) -> np.ndarray:
        """Empirical pattern probabilities q(x) = M / N."""
        return self.counts / self.total

    @property
    def dim(self) -> int:
        return self.patterns.shape[1]


def aggregate(samples: list[Sample]) -> AggregatedDataset:
    """Group samples by unique input pattern (lexicographic order) and compute b(x), q(x)."""
    if not samples:
        raise EmptyDatasetError("cannot aggregate an empty sample list")
    dims = {len(s.x) for s in samples}
    if len(dims) > 1:
        raise DimensionMismatchError(f"mixed input dimensions {sorted(dims)}")
    x = np.array([s.x for s in samples], dtype=float)
    y = np.array([s.y for s in samples], dtype=float)
    patterns, inverse = np.unique(x, axis=0, return_inverse=True)
    counts = np.bincount(inverse, minlength=len(patterns))
    sums = np.bincount(inverse, weights=y, minlength=len(patterns))
    return AggregatedDataset(
        patterns=patterns,
        counts=counts,
        label_mean=sums / counts,
        total=len(samples),
    )


def data_density(b: float) -> np.ndarray:
    """Rank-1 data density matrix built from q(y|x) = (1 + b y) / 2.

    Index 0 corresponds to label y = +1.
    """
    if abs(b) > 1:
        raise ValueError(f"label mean b={b} outside [-1, 1]")
    qp = 0.5 * (1.0 + b)
    qm = 0.5 * (1.0 - b)
    off = np.sqrt(qp * qm)
    return np.array([[qp, off], [off, qm]])


# Base 2D problem: four corners, three labelled -1 and one +1.
NOISY_2D_PATTERNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
NOISY_2D_LABELS = (-1, -1, 1, -1)


def gen_noisy_2d(copies: int, flip_fraction: float, flip_patterns, seed: int = 0) -> list[Sample]:
    """Duplicate the four-corner 2D problem and flip labels -1 -> +1 on the chosen patterns.

    Exactly round(flip_fraction * copies) labels are flipped per listed pattern.
    """
    if copies <= 0:
        raise ValueError("copies must be positive")
    if not 0.0 <= flip_fraction <= 1.0:
        raise ValueError("flip_fraction must be in [0, 1]")
    flip_patterns = {tuple(p) for p in flip_patterns}
    rng = np.random.default_rng(seed)
    samples = []
    for pattern, label in zip(NOISY_2D_PATTERNS, NOISY_2D_LABELS):
        labels = np.full(copies, label)
        if pattern in flip_patterns:
            n_flip = round(flip_fraction * copies)
            idx = rng.permutation(copies)[:n_flip]
            labels[idx] = -labels[idx]
        samples.extend(Sample(x=pattern, y=int(v)) for v in labels)
    return samples


def gen_teacher_student(n_patterns: int, d: int, duplicates: int, seed: int = 0):
    """Random +-1 inputs labelled by a hidden Gaussian teacher vector, then duplicated.

    Returns (samples, teacher). sign(0) maps to +1.
    """
    if min(n_patterns, d, duplicates) <= 0:
        raise ValueError("n_patterns, d and duplicates must be positive")
    rng = np.random.default_rng(seed)
    x = rng.choice([-1, 1], size=(n_patterns, d))
    teacher = rng.standard_normal(d)
    labels = np.where(x @ teacher >= 0, 1, -1)
    samples = [
        Sample(x=tuple(int(v) for v in xi), y=int(yi))
        for xi, yi in zip(x, labels)
        for _ in range(duplicates)
    ]
    return samples, teacher


def flip_labels(samples: list[Sample], fraction: float, seed: int = 0) -> list[Sample]:
    """Negate the labels of floor(fraction * N) samples chosen by a seeded permutation."""
    if not 0.0 <= fraction <= 0.5:
        raise ValueError("fraction must be in [0, 0.5]")
    n_flip = int(fraction * len(samples))
    rng = np.random.default_rng(seed)
    flip = set(rng.permutation(len(samples))[:n_flip].tolist())
    return [Sample(x=s.x, y=-s.y if i in flip else s.y) for i, s in enumerate(samples)]


def split_train_test(samples: list[Sample], train_fraction: float, seed: int = 0):
    """Seeded random split: first floor(train_fraction * N) of a permutation go to train."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(samples))
    n_train = int(train_fraction * len(samples))
    train = [samples[i] for i in order[:n_train]]
    test = [samples[i] for i in order[n_train:]]
    return train, test


def gen_xor(copies: int) -> list[Sample]:
    """The XOR corners: (1,1), (-1,-1) -> -1 and (1,-1), (-1,1) -> +1, duplicated."""
    if copies <= 0:
        raise ValueError("copies must be positive")
    base = [
        Sample(x=(1, 1), y=-1),
        Sample(x=(1, -1), y=1),
        Sample(x=(-1, 1), y=1),
        Sample(x=(-1, -1), y=-1),
    ]
    return [s for s in base for _ in range(copies)]


APPENDIX_PROBLEMS = ("noisy-xor", "parallel-lines", "ellipse", "non-quadric")


def gen_appendix_problems(which: str, seed: int = 0, copies: int = 40) -> list[Sample]:
    """Point layouts for the four appendix boundary-geometry problems.

    noisy-xor: XOR with 30% of labels flipped on the two bottom patterns.
    parallel-lines: linearly separable rows of a 3x3 grid.
    ellipse: grid centre labelled -1, ring of 8 neighbours labelled +1.
    non-quadric: five alternating diagonal bands on the 3x3 grid (no conic separates them).
    """
    if which == "noisy-xor":
        samples = []
        rng = np.random.default_rng(seed)
        for s in gen_xor(1):
            labels = np.full(copies, s.y)
            if s.x[1] == -1:  # bottom row gets the noise
                n_flip = round(0.3 * copies)
                idx = rng.permutation(copies)[:n_flip]
                labels[idx] = -labels[idx]
            samples.extend(Sample(x=s.x, y=int(v)) for v in labels)
        return samples

    grid = [(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)]
    if which == "parallel-lines":
        labelled = [(p, 1 if p[1] >= 0 else -1) for p in grid]
    elif which == "ellipse":
        labelled = [(p, -1 if p == (0, 0) else 1) for p in grid]
    elif which == "non-quadric":
        labelled = [(p, 1 if (p[0] + p[1]) % 2 == 0 else -1) for p in grid]
    else:
        raise ValueError(f"unknown appendix problem {which!r}; expected one of {APPENDIX_PROBLEMS}")
    return [Sample(x=p, y=y) for p, y in labelled for _ in range(copies)]


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_samples_csv(path, samples: list[Sample]) -> None:
    """Write samples as CSV with header x0,...,x{d-1},y."""
    if not samples:
        raise EmptyDatasetError("no samples to write")
    d = len(samples[0].x)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(d)] + ["y"])
        for s in samples:
            writer.writerow([_fmt(v) for v in s.x] + [str(s.y)])


def read_samples_csv(path) -> list[Sample]:
    """Read samples written by write_samples_csv; integer entries round-trip bit-exactly."""
    samples = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        for row in reader:
            xs = tuple(int(v) if "." not in v else float(v) for v in row[:-1])
            samples.append(Sample(x=xs, y=int(row[-1])))
    if not samples:
        raise EmptyDatasetError(f"no samples in {path}")
    return samples
