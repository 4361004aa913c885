"""Same-class k-nearest-neighbor queries with deterministic ordering.

Search is exact brute force: at desk scale this is cheap, and it keeps
approximation out of the reproducibility contract.  Neighbors are sorted by
ascending Euclidean distance with ties broken by ascending row index.

Ordering is pinned to one arithmetic expression: squared distances are
computed as ``(diffs * diffs).sum(axis=1)`` in float64 and rows are sorted
on those squared values, so "tie" means bit-equal results of exactly that
computation.  Anything reproducing the ordering must use the same
expression; a mathematically equivalent one can round differently and
break ties elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset
from .errors import SingletonClass

__all__ = ["NeighborList", "same_class_knn"]


@dataclass(frozen=True)
class NeighborList:
    """Up to k same-class neighbors of one query row.

    ``indices`` are dataset row indices; ``distances`` are the matching
    Euclidean distances, non-decreasing.
    """

    indices: np.ndarray
    distances: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)


def same_class_knn(ds: Dataset, query_index: int, k: int) -> NeighborList:
    """Nearest same-class neighbors of ``ds.features[query_index]``.

    Returns min(k, class size - 1) neighbors sorted by ascending distance,
    ties broken by ascending row index; the query itself is excluded.

    Raises:
        SingletonClass: the query's class has no other member.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = ds.n_samples
    if not 0 <= query_index < n:
        raise IndexError(f"query index {query_index} out of range for {n} rows")

    label = ds.labels[query_index]
    candidates = np.flatnonzero(ds.labels == label)
    candidates = candidates[candidates != query_index]
    if candidates.size == 0:
        raise SingletonClass(
            f"class {int(label)} has a single member (row {query_index})"
        )

    diffs = ds.features[candidates] - ds.features[query_index]
    squared = (diffs * diffs).sum(axis=1)

    # lexsort: primary key squared distance, secondary key row index
    order = np.lexsort((candidates, squared))[: min(k, candidates.size)]
    return NeighborList(
        indices=candidates[order].copy(),
        distances=np.sqrt(squared[order]),
    )
