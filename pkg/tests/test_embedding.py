import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmetest.embedding import (
    GVec,
    eval_vvkt,
    fit_vvkt,
    g_distance_sq,
    label_coords,
    reference_variable,
    theoretical_mean_map,
    vvkt_in_sample,
)
from cmetest.errors import (
    EmptyInputError,
    InputShapeError,
    InvalidCandidateError,
    InvalidRegularizationError,
    NumericalError,
)
from cmetest.estimators import KnnEstimator, pet_mean_map
from cmetest.kernels import KernelSpec, gram_matrix
from cmetest.resampling import LabeledSample

SPEC = KernelSpec(0.5)


def const(c):
    return lambda X: np.full(len(X), c)


@pytest.mark.parametrize("fx,expected", [(1.0, (1.0, 0.0)), (0.0, (0.5, 0.5)), (-0.4, (0.3, 0.7))])
def test_theoretical_mean_map(fx, expected):
    g = theoretical_mean_map(const(fx), 0.2)
    assert (g.a_plus, g.a_minus) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("fx", [1.5, -1.0001, float("nan")])
def test_theoretical_mean_map_rejects_invalid_candidate(fx):
    with pytest.raises(InvalidCandidateError):
        theoretical_mean_map(const(fx), 0.0)


def test_gvec_from_label_is_unit():
    assert GVec.from_label(1) == GVec(1.0, 0.0)
    assert GVec.from_label(-1) == GVec(0.0, 1.0)
    assert GVec(0.6, 0.8).norm_sq() == pytest.approx(1.0)


def test_g_distance_examples():
    g = GVec(0.3, 0.4)
    assert g_distance_sq(g, g) == 0.0
    assert g_distance_sq(GVec.from_probability(0.3), GVec.from_probability(0.8)) == pytest.approx(0.5)
    assert g_distance_sq(GVec(1, 0), GVec(0, 1)) == 2.0


@given(st.floats(0, 1), st.floats(0, 1))
def test_g_norm_identity(p, q):
    d = g_distance_sq(GVec.from_probability(p), GVec.from_probability(q))
    assert d == pytest.approx(2 * (p - q) ** 2, abs=1e-15)


def test_single_point_fit():
    model = fit_vvkt(LabeledSample([0.1], [1]), SPEC, 1.0)
    np.testing.assert_allclose(model.coeffs, [[0.5, 0.0]])
    g = eval_vvkt(model, 0.1)
    assert (g.a_plus, g.a_minus) == pytest.approx((0.5, 0.0), abs=1e-15)


def test_interpolation_limit():
    sample = LabeledSample([-0.5, 0.5], [1, -1])
    model = fit_vvkt(sample, SPEC, 1e-10)
    np.testing.assert_allclose(model.predict(sample.inputs), label_coords(sample.labels), atol=1e-6)


def test_interpolation_limit_well_separated():
    X = np.linspace(-3, 3, 7)
    y = np.array([1, -1, -1, 1, 1, -1, 1])
    model = fit_vvkt(LabeledSample(X, y), SPEC, 1e-10)
    err = np.sqrt(np.sum((model.predict(X) - label_coords(y)) ** 2, axis=1))
    assert err.max() <= 1e-4


FIX_X = np.array([-1.0, 0.0, 1.0])
FIX_Y = np.array([1, -1, 1])


def _oracle_coeffs():
    # plain Gauss elimination via numpy's general (LU) solver, not Cholesky
    K = np.array([[math.exp(-((a - b) ** 2) / 0.5) for b in FIX_X] for a in FIX_X])
    L = np.array([[1.0, 0.0] if y == 1 else [0.0, 1.0] for y in FIX_Y])
    return np.linalg.solve(K + 0.1 * np.eye(3), L)


def test_three_point_fixture_matches_dense_solve():
    model = fit_vvkt(LabeledSample(FIX_X, FIX_Y), SPEC, 0.1)
    np.testing.assert_allclose(model.coeffs, _oracle_coeffs(), atol=1e-10, rtol=0)


def test_three_point_fixture_eval():
    model = fit_vvkt(LabeledSample(FIX_X, FIX_Y), SPEC, 0.1)
    C = _oracle_coeffs()
    kx = np.array([math.exp(-((0.5 - b) ** 2) / 0.5) for b in FIX_X])
    g = eval_vvkt(model, 0.5)
    np.testing.assert_allclose([g.a_plus, g.a_minus], kx @ C, atol=1e-10, rtol=0)


def test_far_away_query_decays():
    model = fit_vvkt(LabeledSample([-1.0, 0.0, 1.0], [1, -1, 1]), SPEC, 0.1)
    g = eval_vvkt(model, 6.0)  # 5 = 10 sigma from the nearest input
    assert abs(g.a_plus) < 1e-6 and abs(g.a_minus) < 1e-6


def test_eval_dimension_mismatch():
    model = fit_vvkt(LabeledSample([[0.0, 1.0]], [1]), SPEC, 1.0)
    with pytest.raises(InputShapeError):
        eval_vvkt(model, [0.0])


@pytest.mark.parametrize("lam", [0.0, -1.0])
def test_rejects_nonpositive_lambda(lam):
    with pytest.raises(InvalidRegularizationError):
        fit_vvkt(LabeledSample([0.0], [1]), SPEC, lam)


def test_non_pd_reports_pivot():
    # duplicated points make K singular; a tiny lambda is swamped by rounding
    X = np.zeros(30)
    with pytest.raises(NumericalError, match="pivot"):
        fit_vvkt(LabeledSample(X, np.ones(30, dtype=int)), SPEC, 1e-300)


@pytest.mark.parametrize("n", [5, 50, 200])
def test_solve_residual(n):
    rng = np.random.default_rng(n)
    X = rng.uniform(-1, 1, size=n)
    y = rng.choice([-1, 1], size=n)
    lam = n**-0.25
    model = fit_vvkt(LabeledSample(X, y), SPEC, lam)
    K = gram_matrix(SPEC, X)
    assert np.linalg.norm((K + lam * np.eye(n)) @ model.coeffs - label_coords(y)) <= 1e-8


def test_heavy_regularization_limit():
    rng = np.random.default_rng(1)
    X = rng.uniform(-1, 1, size=20)
    sample = LabeledSample(X, rng.choice([-1, 1], size=20))
    model = fit_vvkt(sample, SPEC, 1e8)
    assert np.abs(model.coeffs).max() < 1e-6
    f = lambda Z: np.tanh(2 * Z[:, 0])
    p = (np.tanh(2 * X) + 1) / 2
    z = reference_variable(X, f, model)
    assert z == pytest.approx(np.mean(p**2 + (1 - p) ** 2), abs=1e-6)


def test_label_flip_symmetry():
    rng = np.random.default_rng(5)
    X = rng.uniform(-1, 1, size=15)
    y = rng.choice([-1, 1], size=15)
    a = fit_vvkt(LabeledSample(X, y), SPEC, 0.3)
    b = fit_vvkt(LabeledSample(X, -y), SPEC, 0.3)
    assert np.array_equal(a.coeffs, b.coeffs[:, ::-1])
    q = rng.uniform(-1, 1, size=(4, 1))
    assert np.array_equal(a.predict(q), b.predict(q)[:, ::-1])


def test_batched_fit_matches_individual_fits():
    rng = np.random.default_rng(9)
    X = rng.uniform(-1, 1, size=12)
    Y = rng.choice([-1, 1], size=(12, 4))
    batched = vvkt_in_sample(X, Y, SPEC, 0.2)
    for j in range(4):
        single = fit_vvkt(LabeledSample(X, Y[:, j]), SPEC, 0.2).predict(X)
        np.testing.assert_allclose(batched[j], single, atol=1e-13)


def test_reference_variable_examples():
    X = np.linspace(-1, 1, 7)
    f = lambda Z: np.tanh(2 * Z[:, 0])
    assert reference_variable(X, f, lambda x: theoretical_mean_map(f, x)) == 0.0
    assert reference_variable(X, const(0.0), lambda x: GVec(0.0, 0.0)) == pytest.approx(0.5)
    with pytest.raises(EmptyInputError):
        reference_variable(np.empty((0, 1)), f, lambda x: GVec(0, 0))


def test_reference_variable_pet_closed_form():
    rng = np.random.default_rng(11)
    X = rng.uniform(-1, 1, size=30)
    y = rng.choice([-1, 1], size=30)
    est = KnnEstimator(5).fit(LabeledSample(X, y))
    f = lambda Z: np.tanh(2 * Z[:, 0])
    z = reference_variable(X, f, lambda x: pet_mean_map(est, x))
    p = (np.tanh(2 * X) + 1) / 2
    assert z == pytest.approx(2 * np.mean((p - est.predict(X)) ** 2), abs=1e-12)
