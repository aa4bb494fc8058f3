"""Input-space kernels, Gram matrices and the naive output kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, InputShapeError, InvalidLabelError

GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian kernel ``k(x1, x2) = exp(-||x1 - x2||^2 / (2 sigma^2))``.

    The kernel is bounded by 1, attained on the diagonal.
    """

    sigma: float = 0.5
    family: str = GAUSSIAN

    def __post_init__(self):
        if self.family != GAUSSIAN:
            raise ValueError(f"unsupported kernel family {self.family!r}")
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise ValueError(f"bandwidth must be positive, got {self.sigma}")

    @property
    def bound(self) -> float:
        return 1.0


def as_points(points) -> np.ndarray:
    """Coerce input points to a float ``(n, d)`` array.

    A 1-D array is read as ``n`` scalar points (``d = 1``).
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr[:, None]
    elif arr.ndim != 2:
        raise InputShapeError(f"points must be 1-D or 2-D, got shape {arr.shape}")
    return arr


def as_point(x) -> np.ndarray:
    """Coerce a single input point to a 1-D array of length ``d``."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise InputShapeError(f"a single point must be 1-D, got shape {arr.shape}")
    return arr


def eval_kernel(spec: KernelSpec, x1, x2) -> float:
    a, b = as_point(x1), as_point(x2)
    if a.shape != b.shape:
        raise InputShapeError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    diff = a - b
    return float(np.exp(-np.dot(diff, diff) / (2.0 * spec.sigma**2)))


def sq_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances between rows of ``a`` and ``b``."""
    if a.shape[1] != b.shape[1]:
        raise InputShapeError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def cross_kernel(spec: KernelSpec, a, b) -> np.ndarray:
    """Kernel matrix ``k(a_i, b_j)`` between two point sets."""
    return np.exp(-sq_distances(as_points(a), as_points(b)) / (2.0 * spec.sigma**2))


def gram_matrix(spec: KernelSpec, points) -> np.ndarray:
    """Symmetric Gram matrix of ``points`` with unit diagonal.

    Only the upper triangle is evaluated; the lower one is mirrored so the
    result is exactly symmetric.
    """
    X = as_points(points)
    n = X.shape[0]
    if n == 0:
        raise EmptyInputError("cannot build a Gram matrix of zero points")
    K = cross_kernel(spec, X, X)
    iu = np.triu_indices(n, k=1)
    K[(iu[1], iu[0])] = K[iu]
    np.fill_diagonal(K, 1.0)
    return K


def check_labels(labels) -> np.ndarray:
    y = np.asarray(labels)
    if y.size and not np.all((y == 1) | (y == -1)):
        bad = y[(y != 1) & (y != -1)][0]
        raise InvalidLabelError(f"labels must be -1 or +1, got {bad!r}")
    return y.astype(np.int8)


def naive_output_kernel(y1, y2) -> int:
    """Indicator kernel ``l(y1, y2) = 1{y1 == y2}`` on the labels {-1, +1}."""
    check_labels([y1, y2])
    return int(y1 == y2)
