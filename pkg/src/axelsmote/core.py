"""Shared domain types, validation, and the deterministic RNG contract.

Every random draw in this package comes from a keyed Philox stream obtained
through :func:`derive_stream`.  Streams are keyed by
``(master_seed, purpose, class_id, sample_index)``, so any unit of work owns
its own substream and parallel execution is bit-identical to serial
execution.  Philox is counter-based; together with ``SeedSequence`` keying
the produced byte streams are stable across platforms and thread counts.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyDataset,
    NonFiniteValue,
)

__all__ = [
    "Dataset",
    "AxelParams",
    "BalanceToMajority",
    "TargetCounts",
    "Ratio",
    "SamplingStrategy",
    "validate_dataset",
    "derive_stream",
    "class_counts",
]


@dataclass(frozen=True)
class Dataset:
    """An in-memory labeled feature matrix.

    Attributes:
        features: float matrix of shape (n, d).
        labels: int vector of length n with dense non-negative class ids.
        feature_names: optional list of d column names.
        normalized: whether min-max normalization has been applied.

    Arrays are copied on construction and frozen read-only, so a Dataset is
    safe to share across threads.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: Optional[tuple] = None
    normalized: bool = False

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64, copy=True)
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        if features.ndim != 2:
            raise DimensionMismatch(
                f"features must be 2-D, got shape {features.shape}"
            )
        if labels.ndim != 1:
            raise DimensionMismatch(f"labels must be 1-D, got shape {labels.shape}")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def rows_of_class(self, class_id: int) -> np.ndarray:
        """Row indices of all samples labeled ``class_id``, ascending."""
        return np.flatnonzero(self.labels == class_id)


def class_counts(labels: np.ndarray) -> dict:
    """Per-class sample counts, keyed by class id, ascending ids."""
    values, counts = np.unique(np.asarray(labels), return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def validate_dataset(ds: Dataset) -> Dataset:
    """Check Dataset invariants and return the dataset unchanged.

    Raises:
        EmptyDataset: no rows or no columns.
        DimensionMismatch: labels length differs from the row count.
        NonFiniteValue: a NaN/inf cell, reporting its (row, column).
    """
    n, d = ds.features.shape
    if n < 1 or d < 1:
        raise EmptyDataset(f"dataset has shape {ds.features.shape}")
    if ds.labels.shape[0] != n:
        raise DimensionMismatch(
            f"{ds.labels.shape[0]} labels for {n} rows"
        )
    if ds.feature_names is not None and len(ds.feature_names) != d:
        raise DimensionMismatch(
            f"{len(ds.feature_names)} feature names for {d} columns"
        )
    finite = np.isfinite(ds.features)
    if not finite.all():
        row, col = np.argwhere(~finite)[0]
        raise NonFiniteValue(int(row), int(col))
    if np.any(ds.labels < 0):
        raise ValueError("class labels must be non-negative integers")
    return ds


# --- sampling strategies ----------------------------------------------------


@dataclass(frozen=True)
class BalanceToMajority:
    """Grow every smaller class up to the majority count.

    When ``gamma`` is set, only classes below ``gamma * majority_count``
    (the usual imbalance criterion) are grown; others are left alone.
    """

    gamma: Optional[float] = None

    def __post_init__(self):
        if self.gamma is not None and not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")


@dataclass(frozen=True)
class TargetCounts:
    """Explicit per-class target sizes; oversampling only, never deletes."""

    targets: Mapping[int, int]

    def __post_init__(self):
        object.__setattr__(
            self, "targets", {int(k): int(v) for k, v in self.targets.items()}
        )


@dataclass(frozen=True)
class Ratio:
    """Grow each minority class to ``target_fraction`` of the majority count."""

    target_fraction: float

    def __post_init__(self):
        if not 0.0 < self.target_fraction <= 1.0:
            raise ValueError(
                f"target_fraction must be in (0, 1], got {self.target_fraction}"
            )


SamplingStrategy = Union[BalanceToMajority, TargetCounts, Ratio]


# --- AxelSMOTE hyperparameters ----------------------------------------------


@dataclass(frozen=True)
class AxelParams:
    """Hyperparameters of the trait-exchange oversampler.

    Attributes:
        k: neighbor count for same-class k-NN queries.
        t: number of feature traits (contiguous feature groups).
        theta: similarity threshold a trait must strictly exceed before an
            exchange is considered.
        alpha: influence rate, the probability gate applied both to each
            qualifying exchange and to the diversity-injection step.
        noise_scale: scale of the post-exchange Gaussian perturbation,
            multiplied by the per-class feature range.
        diversity_injection: whether the perturbation step runs at all.
        neighbor_subset: "uniform" draws a uniformly sized random subset of
            the neighbor list per trait; "full" visits all neighbors,
            nearest first.
        clip_to_unit: clip synthetic rows into [0, 1] after noise.
        strategy: how many samples each class receives.
        seed: master seed for all derived random streams.
    """

    k: int
    t: int
    theta: float
    alpha: float
    noise_scale: float = 0.05
    diversity_injection: bool = True
    neighbor_subset: str = "uniform"
    clip_to_unit: bool = False
    strategy: SamplingStrategy = field(default_factory=BalanceToMajority)
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must be in [0, 1], got {self.theta}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.noise_scale < 0.0:
            raise ValueError(f"noise_scale must be >= 0, got {self.noise_scale}")
        if self.neighbor_subset not in ("uniform", "full"):
            raise ValueError(
                f"neighbor_subset must be 'uniform' or 'full', "
                f"got {self.neighbor_subset!r}"
            )
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


# --- deterministic random streams -------------------------------------------


def _purpose_word(purpose: str) -> int:
    # stable 64-bit tag for an arbitrary purpose string; never use hash()
    digest = hashlib.sha256(purpose.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_stream(
    master_seed: int,
    purpose: str,
    class_id: int = 0,
    sample_index: int = 0,
) -> np.random.Generator:
    """Deterministic random stream keyed by (seed, purpose, class, index).

    Same key -> byte-identical output sequence, on any platform and under
    any thread count.  Distinct keys give statistically independent streams.
    """
    if class_id < 0 or sample_index < 0:
        raise ValueError("class_id and sample_index must be non-negative")
    key = np.random.SeedSequence(
        int(master_seed),
        spawn_key=(_purpose_word(purpose), int(class_id), int(sample_index)),
    )
    return np.random.Generator(np.random.Philox(key))
