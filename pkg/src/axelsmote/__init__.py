"""Deterministic minority oversampling via trait exchange, plus a lattice
culture simulator, a classic interpolation baseline, imbalance metrics, and
a CSV pipeline.

The central entry points are :func:`resample` (agent-style trait-exchange
oversampling), :func:`smote_resample` (interpolation baseline),
:func:`run` / :func:`init_grid` (culture lattice), and the CSV helpers
:func:`load_csv` / :func:`export_csv`.  All randomness flows through
counter-based streams keyed by (seed, purpose, class, sample), so results
are reproducible bit for bit regardless of worker count.
"""

from __future__ import annotations

from .axelrod import (
    CultureGrid,
    SimulationReport,
    count_regions,
    cultural_similarity,
    grid_to_csv,
    init_grid,
    is_absorbed,
    run,
    step,
)
from .axelsmote import (
    BlendRecord,
    SyntheticBatch,
    SyntheticSample,
    TraitPartition,
    compute_class_ranges,
    draw_blend_ratio,
    generate_one,
    partition_traits,
    plan_counts,
    resample,
    trait_similarity,
)
from .core import (
    AxelParams,
    BalanceToMajority,
    Dataset,
    Ratio,
    TargetCounts,
    class_counts,
    derive_stream,
    validate_dataset,
)
from .errors import (
    AllMissingColumn,
    AxelsmoteError,
    DimensionMismatch,
    EmptyDataset,
    EmptyFile,
    EmptyTrainingSet,
    InvalidDimension,
    InvalidTarget,
    LengthMismatch,
    MetricWarning,
    MissingLabelColumn,
    NonFiniteValue,
    ParseError,
    SingletonClass,
    SkippedClassWarning,
    StratificationError,
    TraitCountExceedsFeatures,
    UnknownClass,
    UnnormalizedDataWarning,
)
from .io import (
    CsvSchema,
    NormalizationParams,
    export_csv,
    impute_missing,
    load_csv,
    normalize,
)
from .knn import NeighborList, same_class_knn
from .metrics import (
    ClassCounts,
    ConfusionCounts,
    balanced_accuracy,
    confusion_counts,
    f1_score,
    imbalance_ratio,
    knn_classify,
    minority_classes,
    stratified_split,
)
from .smote import smote_resample

__version__ = "1.0.0"

__all__ = [
    "__version__",
    # core
    "Dataset",
    "AxelParams",
    "BalanceToMajority",
    "TargetCounts",
    "Ratio",
    "class_counts",
    "validate_dataset",
    "derive_stream",
    # oversampling
    "TraitPartition",
    "partition_traits",
    "trait_similarity",
    "compute_class_ranges",
    "plan_counts",
    "draw_blend_ratio",
    "generate_one",
    "resample",
    "BlendRecord",
    "SyntheticSample",
    "SyntheticBatch",
    "smote_resample",
    # neighbors
    "NeighborList",
    "same_class_knn",
    "knn_classify",
    # culture lattice
    "CultureGrid",
    "SimulationReport",
    "init_grid",
    "cultural_similarity",
    "step",
    "is_absorbed",
    "count_regions",
    "run",
    "grid_to_csv",
    # metrics
    "ClassCounts",
    "ConfusionCounts",
    "confusion_counts",
    "imbalance_ratio",
    "minority_classes",
    "f1_score",
    "balanced_accuracy",
    "stratified_split",
    # io
    "CsvSchema",
    "NormalizationParams",
    "load_csv",
    "impute_missing",
    "normalize",
    "export_csv",
    # errors and warnings
    "AxelsmoteError",
    "EmptyDataset",
    "DimensionMismatch",
    "NonFiniteValue",
    "SingletonClass",
    "TraitCountExceedsFeatures",
    "UnknownClass",
    "InvalidTarget",
    "InvalidDimension",
    "LengthMismatch",
    "EmptyTrainingSet",
    "ParseError",
    "MissingLabelColumn",
    "EmptyFile",
    "AllMissingColumn",
    "StratificationError",
    "SkippedClassWarning",
    "UnnormalizedDataWarning",
    "MetricWarning",
]
