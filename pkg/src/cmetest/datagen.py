"""Synthetic binary classification data from a two-Gaussian-class model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import Regression
from .errors import EmptyInputError
from .kernels import as_points
from .resampling import LabeledSample, resample_labels


@dataclass(frozen=True)
class MixtureParams:
    """Class prior ``p_star``, shared scale ``lam_star`` and class centers."""

    p_star: float = 0.5
    lam_star: float = 1.0
    mu1: float = 1.0
    mu2: float = -1.0

    def __post_init__(self):
        if not 0.0 < self.p_star < 1.0:
            raise ValueError(f"p_star must lie in (0, 1), got {self.p_star}")
        if not self.lam_star > 0.0:
            raise ValueError(f"lam_star must be positive, got {self.lam_star}")


def true_regression(params: MixtureParams, x) -> np.ndarray | float:
    """Regression function ``E[Y | X = x]`` of the mixture, elementwise in ``x``."""
    x = np.asarray(x, dtype=float)
    a = np.log(params.p_star) - (x - params.mu1) ** 2 / params.lam_star
    b = np.log1p(-params.p_star) - (x - params.mu2) ** 2 / params.lam_star
    top = np.maximum(a, b)
    ea, eb = np.exp(a - top), np.exp(b - top)
    out = (ea - eb) / (ea + eb)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MixtureRegression:
    """Callable regression function over ``(n, 1)`` input arrays."""

    params: MixtureParams = MixtureParams()

    def __call__(self, inputs) -> np.ndarray:
        return true_regression(self.params, as_points(inputs)[:, 0])


def candidate(p: float, lam: float, mu1: float = 1.0, mu2: float = -1.0) -> MixtureRegression:
    """Candidate from the model family with known centers."""
    return MixtureRegression(MixtureParams(p, lam, mu1, mu2))


def sample_dataset(
    params: MixtureParams,
    n: int,
    rng: np.random.Generator,
    regression: Regression | None = None,
) -> LabeledSample:
    """Draw ``n`` inputs uniform on ``[-1, 1]`` and labels from ``regression``.

    ``regression`` defaults to the true regression function of ``params``.
    """
    if n < 1:
        raise EmptyInputError(f"sample size must be positive, got {n}")
    f = MixtureRegression(params) if regression is None else regression
    inputs = rng.uniform(-1.0, 1.0, size=(n, 1))
    return LabeledSample(inputs, resample_labels(inputs, f, rng))
