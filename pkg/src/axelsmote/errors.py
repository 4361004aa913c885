"""Exception and warning types shared across the package."""


class AxelsmoteError(Exception):
    """Base class for all errors raised by this package."""


class EmptyDataset(AxelsmoteError):
    """Dataset has no rows or no columns."""


class DimensionMismatch(AxelsmoteError):
    """Array shapes are inconsistent (e.g. labels length != row count)."""


class NonFiniteValue(AxelsmoteError):
    """A feature cell is NaN or infinite."""

    def __init__(self, row, col):
        self.row = row
        self.col = col
        super().__init__(f"non-finite feature value at row {row}, column {col}")


class SingletonClass(AxelsmoteError):
    """A class has a single member, so it has no same-class neighbors."""


class TraitCountExceedsFeatures(AxelsmoteError):
    """Requested more traits than there are features."""


class UnknownClass(AxelsmoteError):
    """A class id does not occur in the dataset."""


class InvalidTarget(AxelsmoteError):
    """An explicit per-class target is below the current class count."""


class InvalidDimension(AxelsmoteError):
    """Lattice parameters L, f or q are out of range."""


class LengthMismatch(AxelsmoteError):
    """Label vectors passed to a metric have different lengths."""


class EmptyTrainingSet(AxelsmoteError):
    """Classifier asked to fit on zero training rows."""


class ParseError(AxelsmoteError):
    """A CSV cell failed to parse as a number or a known missing marker."""

    def __init__(self, row, col, message):
        self.row = row
        self.col = col
        super().__init__(f"row {row}, column {col}: {message}")


class MissingLabelColumn(AxelsmoteError):
    """The configured label column is not present in the file."""


class EmptyFile(AxelsmoteError):
    """The CSV file contains no data rows."""


class AllMissingColumn(AxelsmoteError):
    """A feature column has no observed values to impute from."""


class StratificationError(AxelsmoteError):
    """A class is too small to appear in both folds of a stratified split."""


class SkippedClassWarning(UserWarning):
    """A class was left untouched because it has at most one member."""


class UnnormalizedDataWarning(UserWarning):
    """Similarity gating assumes unit-scale features; input is not normalized."""


class MetricWarning(UserWarning):
    """A metric hit a degenerate case (zero division, class absent from truth)."""
