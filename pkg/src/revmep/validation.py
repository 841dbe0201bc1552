"""Input checks for array-shaped truth tables."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array


def check_binary_rows(a, n_columns: int | None = None, name: str = "X") -> np.ndarray:
    """2-D integer array of 0/1 values, optionally with a fixed column count."""
    arr = np.asarray(a)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr = check_array(arr, dtype=None, ensure_min_samples=1)
    if not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0/1 values")
    arr = arr.astype(np.int64)
    if n_columns is not None and arr.shape[1] != n_columns:
        raise ValueError(f"{name} has {arr.shape[1]} columns, expected {n_columns}")
    return arr


def check_truth_table(X, y, max_inputs: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Validate a partial truth table: binary rows, no contradictory duplicates."""
    X = check_binary_rows(X, name="X")
    y = check_binary_rows(y, name="y")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if X.shape[1] > max_inputs:
        raise ValueError(f"{X.shape[1]} inputs exceed the limit of {max_inputs}")
    keys = X @ (1 << np.arange(X.shape[1]))
    seen: dict[int, tuple[int, ...]] = {}
    for k, row in zip(keys.tolist(), map(tuple, y.tolist())):
        if seen.setdefault(k, row) != row:
            raise ValueError(f"input pattern {k} is given two different outputs")
    return X, y
