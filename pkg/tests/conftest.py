import numpy as np
import pytest

from axelsmote import Dataset


@pytest.fixture
def skew90_10():
    """100-row normalized dataset with class counts {0: 90, 1: 10}."""
    rng = np.random.default_rng(11)
    X = rng.random((100, 4))
    y = np.array([0] * 90 + [1] * 10, dtype=np.int64)
    return Dataset(features=X, labels=y, normalized=True)


@pytest.fixture
def write_csv(tmp_path):
    """Return a writer that dumps raw text to a temp CSV and yields its path."""

    def _write(text: str, name: str = "data.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
