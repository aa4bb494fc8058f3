"""Conditional probability estimators for the point-estimation test."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np

from .embedding import GVec
from .errors import InputShapeError, InvalidHyperparameterError
from .kernels import as_point, as_points, check_labels, sq_distances


class ProbEstimator(ABC):
    """Estimator of ``p(x) = P(Y = 1 | X = x)`` from a labeled sample.

    Subclasses implement :meth:`fit` and :meth:`predict`. Predictions must lie
    in ``[0, 1]``.
    """

    @abstractmethod
    def fit(self, sample) -> "ProbEstimator":
        ...

    @abstractmethod
    def predict(self, points) -> np.ndarray:
        """Estimated probabilities at an ``(q, d)`` array of points."""

    def predict_in_sample(self, inputs, label_sets) -> np.ndarray:
        """Estimates at ``inputs`` for each label set sharing those inputs.

        ``label_sets`` has shape ``(n, m)``; returns shape ``(m, n)``. The
        default refits once per column.
        """
        from .resampling import LabeledSample

        Y = np.asarray(label_sets)
        return np.stack(
            [self.fit(LabeledSample(inputs, Y[:, j])).predict(inputs) for j in range(Y.shape[1])]
        )


class KnnEstimator(ProbEstimator):
    """k-nearest-neighbor vote under Euclidean distance.

    Distance ties are broken in favor of the lower training index. A query
    that coincides with a training input counts that input as a neighbor.
    """

    def __init__(self, k: int):
        if int(k) != k or k < 1:
            raise InvalidHyperparameterError(f"k must be a positive integer, got {k}")
        self.k = int(k)
        self.train_inputs: np.ndarray | None = None
        self.train_labels: np.ndarray | None = None

    @classmethod
    def default_for(cls, n: int) -> "KnnEstimator":
        """``k = floor(sqrt(n))`` neighbors."""
        return cls(max(1, math.isqrt(n)))

    def __repr__(self):
        return f"KnnEstimator(k={self.k})"

    def _check_size(self, n: int):
        if self.k > n:
            raise InvalidHyperparameterError(f"k={self.k} exceeds the sample size {n}")

    def fit(self, sample) -> "KnnEstimator":
        X = as_points(sample.inputs)
        self._check_size(X.shape[0])
        self.train_inputs = X
        self.train_labels = check_labels(sample.labels)
        return self

    def neighbors(self, points, train_inputs=None) -> np.ndarray:
        """Indices of the ``k`` nearest training inputs, shape ``(q, k)``."""
        train = self.train_inputs if train_inputs is None else as_points(train_inputs)
        if train is None:
            raise RuntimeError("estimator is not fitted")
        Q = as_points(points)
        if Q.shape[1] != train.shape[1]:
            raise InputShapeError(f"expected {train.shape[1]}-dimensional points, got {Q.shape[1]}")
        order = np.argsort(sq_distances(Q, train), axis=1, kind="stable")
        return order[:, : self.k]

    def predict(self, points) -> np.ndarray:
        idx = self.neighbors(points)
        return np.count_nonzero(self.train_labels[idx] == 1, axis=1) / self.k

    def predict_in_sample(self, inputs, label_sets) -> np.ndarray:
        X = as_points(inputs)
        self._check_size(X.shape[0])
        Y = check_labels(label_sets)
        idx = self.neighbors(X, train_inputs=X)
        # Y[idx] has shape (n, k, m)
        return (np.count_nonzero(Y[idx] == 1, axis=1) / self.k).T


def knn_predict(estimator: KnnEstimator, x) -> float:
    return float(estimator.predict(as_point(x)[None, :])[0])


def pet_mean_map(estimator: ProbEstimator, x) -> GVec:
    """Plug-in mean map ``p_hat(x) l(., +1) + (1 - p_hat(x)) l(., -1)``."""
    p = float(estimator.predict(as_point(x)[None, :])[0])
    return GVec.from_probability(p)
