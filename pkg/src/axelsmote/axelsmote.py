"""AxelSMOTE: trait-grouped, similarity-gated minority oversampling.

Data instances act as agents: a synthetic sample starts as a copy of a
random base instance of its class, then contiguous groups of features
("traits") are exchanged with nearest same-class neighbors.  An exchange
happens only when the trait similarity strictly exceeds ``theta`` and an
influence coin with probability ``alpha`` comes up; the exchanged trait is
a Beta(2, 2)-weighted blend of base and neighbor.  Exchanged traits may
finally receive small Gaussian noise scaled by the class-wise feature
range (diversity injection, gated by the same ``alpha``).

Randomness is fully keyed: each synthetic sample consumes three private
streams derived from ``(seed, purpose, class_id, sample_index)`` with
purposes ``"base"`` (base selection), ``"exchange"`` (subset draws, gate
coins, blend ratios, consumed in trait order) and ``"noise"`` (one coin,
then one standard normal per feature of each exchanged trait, ascending
trait order).  Generation is therefore embarrassingly parallel and
bit-identical regardless of worker count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np

from .core import (
    AxelParams,
    BalanceToMajority,
    Dataset,
    Ratio,
    SamplingStrategy,
    TargetCounts,
    class_counts,
    derive_stream,
    validate_dataset,
)
from .errors import (
    InvalidTarget,
    SkippedClassWarning,
    TraitCountExceedsFeatures,
    UnknownClass,
    UnnormalizedDataWarning,
)
from .knn import same_class_knn

__all__ = [
    "TraitPartition",
    "BlendRecord",
    "SyntheticSample",
    "SyntheticBatch",
    "partition_traits",
    "trait_similarity",
    "compute_class_ranges",
    "plan_counts",
    "draw_blend_ratio",
    "generate_one",
    "resample",
]


@dataclass(frozen=True)
class TraitPartition:
    """Ordered partition of feature indices into contiguous traits.

    Traits 0..t-2 hold exactly floor(d/t) indices each; the last trait takes
    the remaining d - (t-1)*floor(d/t) indices, so the union is always the
    full index set {0, ..., d-1}.
    """

    traits: Tuple[np.ndarray, ...]
    n_features: int

    def __len__(self) -> int:
        return len(self.traits)

    def __iter__(self):
        return iter(self.traits)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.traits[i]


def partition_traits(d: int, t: int) -> TraitPartition:
    """Split feature indices 0..d-1 into t contiguous traits.

    Raises:
        TraitCountExceedsFeatures: t > d.
        ValueError: t < 1 or d < 1.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if t > d:
        raise TraitCountExceedsFeatures(f"{t} traits requested for {d} features")
    base = d // t
    bounds = [j * base for j in range(t)] + [d]
    traits = tuple(
        np.arange(bounds[j], bounds[j + 1], dtype=np.intp) for j in range(t)
    )
    return TraitPartition(traits=traits, n_features=d)


def trait_similarity(a: np.ndarray, b: np.ndarray, trait: np.ndarray) -> float:
    """1 minus the mean absolute per-feature difference within ``trait``.

    On [0, 1]-normalized data the result lies in [0, 1]; no clamping is
    applied, so unnormalized inputs can yield negative values.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    idx = np.asarray(trait)
    if idx.size == 0:
        raise ValueError("trait must contain at least one feature index")
    return float(1.0 - np.mean(np.abs(a[idx] - b[idx])))


def compute_class_ranges(ds: Dataset, class_id: int) -> np.ndarray:
    """Per-feature (max - min) over the original members of one class.

    Raises:
        UnknownClass: class_id does not occur in the dataset.
    """
    rows = ds.rows_of_class(class_id)
    if rows.size == 0:
        raise UnknownClass(f"class {class_id} not present in dataset")
    block = ds.features[rows]
    return block.max(axis=0) - block.min(axis=0)


def plan_counts(ds: Dataset, strategy: SamplingStrategy) -> Dict[int, int]:
    """Number of synthetic samples each class receives under ``strategy``.

    Every class id in the dataset appears in the result.  Classes with at
    most one member are never grown: their count is forced to zero and a
    SkippedClassWarning is emitted.

    Raises:
        InvalidTarget: a TargetCounts entry below the current class count.
        UnknownClass: a TargetCounts entry for an absent class.
    """
    counts = class_counts(ds.labels)
    max_count = max(counts.values())

    if isinstance(strategy, BalanceToMajority):
        if strategy.gamma is None:
            targets = {c: max_count for c in counts}
        else:
            cut = strategy.gamma * max_count
            targets = {c: (max_count if n < cut else n) for c, n in counts.items()}
    elif isinstance(strategy, TargetCounts):
        for c, target in strategy.targets.items():
            if c not in counts:
                raise UnknownClass(f"target given for absent class {c}")
            if target < counts[c]:
                raise InvalidTarget(
                    f"class {c}: target {target} below current count {counts[c]}"
                )
        targets = {c: strategy.targets.get(c, n) for c, n in counts.items()}
    elif isinstance(strategy, Ratio):
        floor_count = int(round(strategy.target_fraction * max_count))
        targets = {c: max(n, floor_count) for c, n in counts.items()}
    else:
        raise TypeError(f"unknown sampling strategy: {strategy!r}")

    plan = {}
    for c in sorted(counts):
        s_c = targets[c] - counts[c]
        if s_c > 0 and counts[c] <= 1:
            warnings.warn(
                f"class {c} has {counts[c]} member(s); skipped (no neighbors)",
                SkippedClassWarning,
                stacklevel=2,
            )
            s_c = 0
        plan[c] = s_c
    return plan


class BlendRecord(NamedTuple):
    """One trait exchange: which trait, against which row, at what ratio."""

    trait: int
    neighbor: int
    ratio: float


@dataclass(frozen=True)
class SyntheticSample:
    """A generated sample plus full provenance of how it was built."""

    values: np.ndarray
    class_id: int
    base_index: int
    exchanged_traits: frozenset
    blend_log: Tuple[BlendRecord, ...]
    noise_applied: bool

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SyntheticBatch:
    """All samples of one resampling run with the parameter snapshot."""

    samples: Tuple[SyntheticSample, ...]
    params: AxelParams
    per_class_counts: Dict[int, int]

    def __len__(self) -> int:
        return len(self.samples)


def draw_blend_ratio(rng: np.random.Generator) -> float:
    """Beta(2, 2) blending weight, guarded to the open interval (0, 1)."""
    lam = float(rng.beta(2.0, 2.0))
    while not 0.0 < lam < 1.0:  # boundary hits have measure zero
        lam = float(rng.beta(2.0, 2.0))
    return lam


def _generate(
    features: np.ndarray,
    class_rows: np.ndarray,
    neighbors_for: Callable[[int], np.ndarray],
    ranges: np.ndarray,
    partition: TraitPartition,
    params: AxelParams,
    class_id: int,
    sample_index: int,
) -> SyntheticSample:
    """Generation core; all inputs are read-only and precomputed."""
    rng_base = derive_stream(params.seed, "base", class_id, sample_index)
    base_row = int(class_rows[int(rng_base.integers(class_rows.size))])
    neighbor_rows = neighbors_for(base_row)

    x_base = features[base_row]
    values = x_base.copy()
    blend_log = []
    exchanged = set()

    rng_ex = derive_stream(params.seed, "exchange", class_id, sample_index)
    m = neighbor_rows.size
    for trait_idx, trait in enumerate(partition):
        if params.neighbor_subset == "uniform":
            size = int(rng_ex.integers(1, m + 1))
            subset = neighbor_rows[rng_ex.choice(m, size=size, replace=False)]
        else:
            subset = neighbor_rows
        for nbr_row in subset:
            x_nbr = features[nbr_row]
            sim = 1.0 - float(np.mean(np.abs(x_base[trait] - x_nbr[trait])))
            # gate coin is drawn only when the similarity condition holds
            if sim > params.theta and rng_ex.uniform() < params.alpha:
                lam = draw_blend_ratio(rng_ex)
                values[trait] = lam * x_base[trait] + (1.0 - lam) * x_nbr[trait]
                blend_log.append(BlendRecord(trait_idx, int(nbr_row), lam))
                exchanged.add(trait_idx)

    noise_applied = False
    if params.diversity_injection:
        rng_noise = derive_stream(params.seed, "noise", class_id, sample_index)
        if rng_noise.uniform() < params.alpha and exchanged:
            for trait_idx in sorted(exchanged):
                trait = partition[trait_idx]
                eps = rng_noise.normal(size=trait.size)
                values[trait] += params.noise_scale * ranges[trait] * eps
            noise_applied = True

    if params.clip_to_unit:
        np.clip(values, 0.0, 1.0, out=values)

    return SyntheticSample(
        values=values,
        class_id=class_id,
        base_index=base_row,
        exchanged_traits=frozenset(exchanged),
        blend_log=tuple(blend_log),
        noise_applied=noise_applied,
    )


def _warn_if_unnormalized(ds: Dataset):
    if not ds.normalized:
        warnings.warn(
            "dataset is not min-max normalized; trait similarity assumes "
            "unit-scale features",
            UnnormalizedDataWarning,
            stacklevel=3,
        )


def generate_one(
    ds: Dataset,
    class_id: int,
    sample_index: int,
    partition: TraitPartition,
    params: AxelParams,
) -> SyntheticSample:
    """Generate a single synthetic sample for ``class_id``.

    The base instance is drawn uniformly from the class using the "base"
    stream keyed by ``(params.seed, class_id, sample_index)``; with the same
    key the same sample is reproduced exactly.

    Raises:
        SingletonClass: the class has fewer than two members.
        UnknownClass: the class does not occur in the dataset.
    """
    _warn_if_unnormalized(ds)
    if partition.n_features != ds.n_features:
        raise TraitCountExceedsFeatures(
            f"partition covers {partition.n_features} features, "
            f"dataset has {ds.n_features}"
        )
    class_rows = ds.rows_of_class(class_id)
    if class_rows.size == 0:
        raise UnknownClass(f"class {class_id} not present in dataset")
    ranges = compute_class_ranges(ds, class_id)
    return _generate(
        ds.features,
        class_rows,
        lambda row: same_class_knn(ds, row, params.k).indices,
        ranges,
        partition,
        params,
        class_id,
        sample_index,
    )


def resample(
    ds: Dataset,
    params: AxelParams,
    n_workers: int = 1,
) -> Tuple[Dataset, SyntheticBatch]:
    """Augment every undersized class with synthetic samples.

    Returns the expanded dataset (original rows first, unchanged and in
    order, then synthetic rows grouped by ascending class id) together with
    a batch carrying per-sample provenance.  The output is a pure function
    of ``(ds, params)``; ``n_workers`` only controls execution.

    Raises:
        TraitCountExceedsFeatures: params.t exceeds the feature count.
        InvalidTarget / UnknownClass: propagated from plan_counts.
    """
    validate_dataset(ds)
    partition = partition_traits(ds.n_features, params.t)
    _warn_if_unnormalized(ds)
    plan = plan_counts(ds, params.strategy)

    tasks = []
    for class_id in sorted(plan):
        s_c = plan[class_id]
        if s_c == 0:
            continue
        class_rows = ds.rows_of_class(class_id)
        ranges = compute_class_ranges(ds, class_id)
        # eager per-class neighbor cache: read-only during generation
        cache = {
            int(row): same_class_knn(ds, int(row), params.k).indices
            for row in class_rows
        }
        for sample_index in range(s_c):
            tasks.append((class_id, sample_index, class_rows, cache, ranges))

    def run_task(task):
        class_id, sample_index, class_rows, cache, ranges = task
        return _generate(
            ds.features,
            class_rows,
            cache.__getitem__,
            ranges,
            partition,
            params,
            class_id,
            sample_index,
        )

    if n_workers > 1 and tasks:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            samples = list(pool.map(run_task, tasks))
    else:
        samples = [run_task(task) for task in tasks]

    if samples:
        synth_features = np.vstack([s.values for s in samples])
        synth_labels = np.array([s.class_id for s in samples], dtype=np.int64)
        features_plus = np.vstack([ds.features, synth_features])
        labels_plus = np.concatenate([ds.labels, synth_labels])
        still_in_unit = bool(
            synth_features.min() >= -1e-9 and synth_features.max() <= 1 + 1e-9
        )
    else:
        features_plus = ds.features
        labels_plus = ds.labels
        still_in_unit = True

    expanded = Dataset(
        features=features_plus,
        labels=labels_plus,
        feature_names=ds.feature_names,
        normalized=ds.normalized and still_in_unit,
    )
    batch = SyntheticBatch(
        samples=tuple(samples),
        params=params,
        per_class_counts=dict(plan),
    )
    return expanded, batch
