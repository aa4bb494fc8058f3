"""Label resampling, reference variables and the rank test.

Given a sample ``D_0`` and a candidate regression function ``f``, ``m - 1``
alternative label sets are drawn on the same inputs from the label law that
``f`` induces. Every dataset yields a reference variable ``Z_j`` measuring how
far its estimated conditional mean map lies from the one implied by ``f``.
Under the null hypothesis the datasets are exchangeable, so the rank of
``Z_0`` among all ``Z_j`` (ties broken by a uniform random permutation) is
uniform on ``1..m`` and the acceptance probability of ``p_lo <= rank <= q_hi``
is exactly ``(q_hi - p_lo + 1) / m``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .embedding import (
    Regression,
    default_lambda,
    evaluate_candidate,
    probability_coords,
    reference_variables,
    theoretical_coords,
    vvkt_in_sample,
)
from .errors import EmptyInputError, InputShapeError, InvalidPermutationError
from .estimators import KnnEstimator, ProbEstimator
from .kernels import KernelSpec, as_points, check_labels


class Estimator(str, enum.Enum):
    VVKT = "vvkt"
    PET = "pet"


@dataclass(frozen=True, eq=False)
class LabeledSample:
    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = as_points(self.inputs)
        y = check_labels(np.ravel(self.labels))
        if X.shape[0] != y.shape[0]:
            raise InputShapeError(f"{X.shape[0]} inputs but {y.shape[0]} labels")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "labels", y)

    def __len__(self):
        return self.labels.shape[0]


@dataclass(frozen=True)
class TestConfig:
    """Parameters of one test run.

    ``q_hi`` defaults to ``m - 2``. ``lam`` defaults to ``n ** (-1/4)`` and
    ``k_neighbors`` to ``floor(sqrt(n))``, both resolved against the size of
    the sample being tested.
    """

    __test__ = False  # not a pytest class

    m: int = 40
    p_lo: int = 1
    q_hi: int | None = None
    estimator: Estimator = Estimator.VVKT
    kernel: KernelSpec = field(default_factory=KernelSpec)
    lam: float | None = None
    k_neighbors: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "estimator", Estimator(self.estimator))
        if self.q_hi is None:
            object.__setattr__(self, "q_hi", self.m - 2)
        if self.m < 2:
            raise ValueError(f"m must be at least 2, got {self.m}")
        if not 1 <= self.p_lo <= self.q_hi <= self.m:
            raise ValueError(
                f"need 1 <= p_lo <= q_hi <= m, got p_lo={self.p_lo}, q_hi={self.q_hi}, m={self.m}"
            )
        if self.lam is not None and not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.k_neighbors is not None and self.k_neighbors < 1:
            raise ValueError(f"k must be positive, got {self.k_neighbors}")

    @property
    def acceptance_probability(self) -> float:
        """Exact acceptance probability under the null hypothesis."""
        return (self.q_hi - self.p_lo + 1) / self.m

    def lam_for(self, n: int) -> float:
        return default_lambda(n) if self.lam is None else self.lam

    def knn_for(self, n: int) -> KnnEstimator:
        if self.k_neighbors is None:
            return KnnEstimator.default_for(n)
        return KnnEstimator(self.k_neighbors)


@dataclass(frozen=True, eq=False)
class TestOutcome:
    __test__ = False

    rank: int
    accepted: bool
    z_values: np.ndarray
    permutation: np.ndarray

    @property
    def m(self) -> int:
        return self.z_values.shape[0]

    @property
    def normalized_rank(self) -> float:
        return self.rank / self.m


def child_seed(seed, index: int) -> np.random.SeedSequence:
    """Deterministic independent child of ``seed`` (an int or SeedSequence)."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key + (index,))


def resample_labels(inputs, f: Regression, rng: np.random.Generator, count: int | None = None) -> np.ndarray:
    """Draw labels ``+1`` with probability ``(f(x) + 1) / 2`` at each input.

    Each label takes one uniform ``U`` on ``(-1, 1]`` and is ``+1`` iff
    ``U <= f(x)``. With ``count`` set, returns an ``(n, count)`` array whose
    uniforms are consumed in row-major order; otherwise an ``(n,)`` array.
    """
    fx = evaluate_candidate(f, inputs)
    shape = fx.shape if count is None else (fx.shape[0], count)
    u = 1.0 - 2.0 * rng.random(shape)
    fx = fx if count is None else fx[:, None]
    return np.where(u <= fx, 1, -1).astype(np.int8)


def check_permutation(perm, m: int) -> np.ndarray:
    perm = np.asarray(perm)
    if perm.shape != (m,) or not np.array_equal(np.sort(perm), np.arange(1, m + 1)):
        raise InvalidPermutationError(f"expected a permutation of 1..{m}, got {perm.tolist()}")
    return perm


def rank_with_ties(z0: float, z_alts, perm) -> int:
    """Rank of ``z0`` among ``z_alts`` under the permutation-broken order.

    Alternative ``j`` (1-based) carries tag ``perm[j-1]`` and the original
    carries ``perm[m-1]``; an alternative precedes the original when its value
    is smaller, or equal with a smaller tag.
    """
    z_alts = np.asarray(z_alts, dtype=float)
    perm = check_permutation(perm, z_alts.shape[0] + 1)
    below = z_alts < z0
    tied = (z_alts == z0) & (perm[:-1] < perm[-1])
    return 1 + int(np.count_nonzero(below | tied))


def compute_z_values(
    inputs,
    label_sets,
    f: Regression,
    config: TestConfig,
    estimator: ProbEstimator | None = None,
) -> np.ndarray:
    """Reference variables for every column of ``label_sets`` (shape ``(n, m)``)."""
    X = as_points(inputs)
    n = X.shape[0]
    target = theoretical_coords(f, X)
    if config.estimator is Estimator.VVKT:
        estimates = vvkt_in_sample(X, label_sets, config.kernel, config.lam_for(n))
    else:
        est = estimator if estimator is not None else config.knn_for(n)
        estimates = probability_coords(est.predict_in_sample(X, label_sets))
    return reference_variables(target, estimates)


def run_test(
    sample: LabeledSample,
    f: Regression,
    config: TestConfig,
    seed=None,
    estimator: ProbEstimator | None = None,
) -> TestOutcome:
    """Test ``H0: f_* = f`` on ``sample``.

    ``seed`` overrides ``config.seed`` and may be a ``SeedSequence``.
    ``estimator`` replaces the default kNN estimator on the PET path.
    """
    if len(sample) == 0:
        raise EmptyInputError("cannot test an empty sample")
    root = config.seed if seed is None else seed
    label_rng = np.random.default_rng(child_seed(root, 0))
    perm_rng = np.random.default_rng(child_seed(root, 1))

    alts = resample_labels(sample.inputs, f, label_rng, count=config.m - 1)
    label_sets = np.column_stack([sample.labels, alts])
    z = compute_z_values(sample.inputs, label_sets, f, config, estimator)
    perm = perm_rng.permutation(config.m) + 1

    rank = rank_with_ties(z[0], z[1:], perm)
    return TestOutcome(
        rank=rank,
        accepted=config.p_lo <= rank <= config.q_hi,
        z_values=z,
        permutation=perm,
    )
