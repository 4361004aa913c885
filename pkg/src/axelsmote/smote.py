"""Classic SMOTE baseline under the same plumbing as the trait sampler.

Each synthetic sample interpolates one base instance toward one uniformly
chosen same-class neighbor: ``base + delta * (neighbor - base)`` with
``delta ~ U(0, 1)``.  Per-sample randomness comes from the "smote" stream
keyed by ``(seed, class_id, sample_index)``, consumed as: base position,
neighbor position, delta.
"""

from __future__ import annotations

import numpy as np

from .core import Dataset, SamplingStrategy, derive_stream, validate_dataset
from .axelsmote import plan_counts
from .knn import same_class_knn

__all__ = ["smote_resample"]


def smote_resample(
    ds: Dataset,
    k: int,
    strategy: SamplingStrategy,
    seed: int,
) -> Dataset:
    """Oversample with linear interpolation between same-class neighbors.

    Original rows are preserved first and unchanged; synthetic rows follow,
    grouped by ascending class id.  Deterministic under ``seed``.

    Raises:
        SingletonClass: propagated if a grown class has a lone member.
    """
    validate_dataset(ds)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    plan = plan_counts(ds, strategy)

    new_rows = []
    new_labels = []
    for class_id in sorted(plan):
        s_c = plan[class_id]
        if s_c == 0:
            continue
        class_rows = ds.rows_of_class(class_id)
        cache = {
            int(row): same_class_knn(ds, int(row), k).indices
            for row in class_rows
        }
        for sample_index in range(s_c):
            rng = derive_stream(seed, "smote", class_id, sample_index)
            base_row = int(class_rows[int(rng.integers(class_rows.size))])
            neighbors = cache[base_row]
            nbr_row = int(neighbors[int(rng.integers(neighbors.size))])
            delta = float(rng.uniform())
            base = ds.features[base_row]
            new_rows.append(base + delta * (ds.features[nbr_row] - base))
            new_labels.append(class_id)

    if not new_rows:
        return Dataset(
            features=ds.features,
            labels=ds.labels,
            feature_names=ds.feature_names,
            normalized=ds.normalized,
        )
    return Dataset(
        features=np.vstack([ds.features, np.vstack(new_rows)]),
        labels=np.concatenate([ds.labels, np.array(new_labels, dtype=np.int64)]),
        feature_names=ds.feature_names,
        normalized=ds.normalized,
    )
