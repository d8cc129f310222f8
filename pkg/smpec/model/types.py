"""Array aliases shared across the toolkit."""

from typing import Sequence, Union

import numpy as np
from numpy.typing import NDArray

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]
ArrayLike = Union[Sequence[float], Sequence[Sequence[float]], NDArray]


def as_vector(x: ArrayLike, dimension: int = None) -> Vector:
    """Coerce to a 1-D float64 array, optionally checking its length."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    if dimension is not None and v.shape[0] != dimension:
        raise ValueError(f"expected length {dimension}, got {v.shape[0]}")
    return v


def as_matrix(a: ArrayLike) -> Matrix:
    m = np.asarray(a, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    return m


def frozen(a: NDArray) -> NDArray:
    """Return a read-only copy so instance data stays immutable."""
    out = np.array(a, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


def plain(obj):
    """Recursively convert numpy scalars and arrays to plain Python values for YAML"""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
