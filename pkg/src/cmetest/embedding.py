"""Conditional kernel mean maps into the RKHS of the naive output kernel.

With the naive kernel the output RKHS is two dimensional and the sections
``l(., +1)`` and ``l(., -1)`` form an orthonormal basis, so every element is
stored as its pair of coordinates ``(a_plus, a_minus)``. Array-valued
helpers use a trailing axis of length 2 in that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg

from .errors import (
    EmptyInputError,
    InputShapeError,
    InvalidCandidateError,
    InvalidRegularizationError,
    NumericalError,
)
from .kernels import KernelSpec, as_point, as_points, check_labels, cross_kernel, gram_matrix

# Candidate regression function: maps an (n, d) array of inputs to n values.
Regression = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GVec:
    a_plus: float
    a_minus: float

    @classmethod
    def from_label(cls, y: int) -> "GVec":
        """The kernel section ``l(., y)``."""
        check_labels([y])
        return cls(1.0, 0.0) if y == 1 else cls(0.0, 1.0)

    @classmethod
    def from_probability(cls, p: float) -> "GVec":
        return cls(float(p), 1.0 - float(p))

    def as_array(self) -> np.ndarray:
        return np.array([self.a_plus, self.a_minus])

    def norm_sq(self) -> float:
        return self.a_plus**2 + self.a_minus**2


def evaluate_candidate(f: Regression, inputs) -> np.ndarray:
    """Evaluate ``f`` at every input and check it is a valid regression function.

    Constant-returning callables are broadcast to one value per input.
    """
    X = as_points(inputs)
    values = np.broadcast_to(np.asarray(f(X), dtype=float), (X.shape[0],)).copy()
    bad = ~((values >= -1.0) & (values <= 1.0))
    if np.any(bad):
        raise InvalidCandidateError(
            f"candidate must map into [-1, 1]; got {values[bad][0]!r}"
        )
    return values


def probabilities(f: Regression, inputs) -> np.ndarray:
    """``P(Y = 1 | X = x) = (f(x) + 1) / 2`` at every input."""
    return (evaluate_candidate(f, inputs) + 1.0) / 2.0


def probability_coords(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.stack([p, 1.0 - p], axis=-1)


def label_coords(labels) -> np.ndarray:
    """Coordinates of ``l(., Y_i)`` for each label, shape ``labels.shape + (2,)``."""
    y = check_labels(labels)
    return np.stack([(y == 1), (y == -1)], axis=-1).astype(float)


def theoretical_mean_map(f: Regression, x) -> GVec:
    """Mean map of the label distribution that ``f`` induces at ``x``."""
    point = as_point(x)
    p = probabilities(f, point[None, :])[0]
    return GVec.from_probability(p)


def theoretical_coords(f: Regression, inputs) -> np.ndarray:
    return probability_coords(probabilities(f, inputs))


def g_distance_sq(a: GVec, b: GVec) -> float:
    return (a.a_plus - b.a_plus) ** 2 + (a.a_minus - b.a_minus) ** 2


def default_lambda(n: int) -> float:
    """Default ridge ``lambda_n = n ** (-1/4)``."""
    return float(n) ** -0.25


def _smallest_pivot(A: np.ndarray) -> float:
    _, d, _ = linalg.ldl(A, lower=True)
    return float(np.min(np.diag(d)))


def solve_regularized(K: np.ndarray, rhs: np.ndarray, lam: float) -> np.ndarray:
    """Solve ``(K + lam I) C = rhs`` through a Cholesky factorization."""
    if not lam > 0:
        raise InvalidRegularizationError(f"lambda must be positive, got {lam}")
    A = K + lam * np.eye(K.shape[0])
    try:
        factor = linalg.cho_factor(A, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise NumericalError(
            f"K + lambda I is not numerically positive definite "
            f"(smallest pivot {_smallest_pivot(A):.3e})"
        ) from exc
    return linalg.cho_solve(factor, rhs, check_finite=False)


@dataclass(frozen=True, eq=False)
class VvktModel:
    """Regularized least-squares estimate of the conditional mean map.

    ``coeffs[i]`` holds the coordinates of the representer coefficient of
    training input ``i``; the estimate at ``x`` is ``sum_i k(x, X_i) coeffs[i]``.
    """

    train_inputs: np.ndarray
    kernel: KernelSpec
    lam: float
    coeffs: np.ndarray

    def predict(self, points) -> np.ndarray:
        """Estimated coordinates at each point, shape ``(q, 2)``."""
        X = as_points(points)
        if X.shape[1] != self.train_inputs.shape[1]:
            raise InputShapeError(
                f"expected {self.train_inputs.shape[1]}-dimensional points, got {X.shape[1]}"
            )
        return cross_kernel(self.kernel, X, self.train_inputs) @ self.coeffs

    def __call__(self, x) -> GVec:
        return eval_vvkt(self, x)


def fit_vvkt(sample, kernel: KernelSpec, lam: float) -> VvktModel:
    """Fit the vector-valued kernel estimator on a labeled sample."""
    X = as_points(sample.inputs)
    if X.shape[0] == 0:
        raise EmptyInputError("cannot fit on an empty sample")
    K = gram_matrix(kernel, X)
    C = solve_regularized(K, label_coords(sample.labels), lam)
    return VvktModel(train_inputs=X, kernel=kernel, lam=float(lam), coeffs=C)


def eval_vvkt(model: VvktModel, x) -> GVec:
    a_plus, a_minus = model.predict(as_point(x)[None, :])[0]
    return GVec(float(a_plus), float(a_minus))


def vvkt_in_sample(inputs, label_sets, kernel: KernelSpec, lam: float) -> np.ndarray:
    """Fitted values at the shared inputs for several label sets at once.

    ``label_sets`` has shape ``(n, m)``, one column per dataset. All datasets
    share the inputs, so ``K + lam I`` is factorized once. Returns an array of
    shape ``(m, n, 2)``.
    """
    X = as_points(inputs)
    Y = np.asarray(label_sets)
    n, m = Y.shape
    if n != X.shape[0]:
        raise InputShapeError(f"{X.shape[0]} inputs but {n} labels per dataset")
    K = gram_matrix(kernel, X)
    L = label_coords(Y).reshape(n, 2 * m)  # column 2j+c: dataset j, coordinate c
    fitted = K @ solve_regularized(K, L, lam)
    return fitted.reshape(n, m, 2).transpose(1, 0, 2)


def reference_variable(inputs, f: Regression, evaluator: Callable[[np.ndarray], GVec]) -> float:
    """Average squared G-distance between the map induced by ``f`` and ``evaluator``."""
    X = as_points(inputs)
    if X.shape[0] == 0:
        raise EmptyInputError("reference variable needs at least one input")
    total = 0.0
    for x in X:
        total += g_distance_sq(theoretical_mean_map(f, x), evaluator(x))
    return total / X.shape[0]


def reference_variables(target: np.ndarray, estimates: np.ndarray) -> np.ndarray:
    """Vectorized reference variables.

    ``target`` has shape ``(n, 2)`` and ``estimates`` shape ``(m, n, 2)``;
    returns one value per dataset.
    """
    diff = estimates - target[None, :, :]
    return np.einsum("jic,jic->j", diff, diff) / target.shape[0]
