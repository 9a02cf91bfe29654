import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from latentree import (
    CorrelationMatrix,
    CovarianceMatrix,
    DegenerateVariableError,
    LinearGaussian,
    ShapeError,
    Tolerances,
    Topology,
    covariance_to_correlation,
    leaf_correlations,
    random_tree_model,
    tree_is_valid,
    validate_correlation_matrix,
)

from helpers import make_model


def test_validate_passes_equicorrelated():
    m = np.full((3, 3), 0.5)
    np.fill_diagonal(m, 1.0)
    assert validate_correlation_matrix(CorrelationMatrix(m)).ok


def test_validate_flags_range():
    m = np.eye(3)
    m[0, 1] = m[1, 0] = 1.2
    m[0, 2] = m[2, 0] = m[1, 2] = m[2, 1] = 0.5
    report = validate_correlation_matrix(m)
    assert not report.ok
    assert any(v.startswith("range") for v in report.violations)


def test_validate_flags_psd():
    m = np.array([[1, 0.9, 0.9], [0.9, 1, -0.9], [0.9, -0.9, 1]])
    # exact characteristic polynomial: smallest root is negative
    x = sympy.symbols("x")
    mat = sympy.Matrix([[1, sympy.Rational(9, 10), sympy.Rational(9, 10)],
                        [sympy.Rational(9, 10), 1, -sympy.Rational(9, 10)],
                        [sympy.Rational(9, 10), -sympy.Rational(9, 10), 1]])
    roots = [float(z) for z in sympy.Poly(mat.charpoly(x).as_expr(), x).real_roots()]
    assert min(roots) < 0
    report = validate_correlation_matrix(m)
    assert [v.split(":")[0] for v in report.violations] == ["psd"]


def test_validate_flags_asymmetry_diagonal_and_dependency():
    m = np.array([[1.0, 0.5, 0.0], [0.4, 0.9, 0.5], [0.0, 0.5, 1.0]])
    kinds = {v.split(":")[0] for v in validate_correlation_matrix(m).violations}
    assert {"asymmetry", "diagonal", "dependency"} <= kinds


def test_validate_rejects_non_square():
    with pytest.raises(ShapeError):
        validate_correlation_matrix(np.ones((2, 3)))
    with pytest.raises(ShapeError):
        CorrelationMatrix(np.ones((2, 3)))


def test_covariance_to_correlation_basic():
    c = CovarianceMatrix(np.array([[4.0, 3.0], [3.0, 9.0]]))
    assert covariance_to_correlation(c).values[0, 1] == pytest.approx(0.5, abs=1e-15)


def test_diagonal_covariance_gives_identity():
    c = CovarianceMatrix(np.diag([2.0, 5.0, 0.1]))
    np.testing.assert_array_equal(covariance_to_correlation(c).values, np.eye(3))


def test_markov_chain_covariance():
    rho = 0.5
    s = np.array([2.0, 3.0, 5.0])
    sd = np.sqrt(s)
    cov = np.array([
        [s[0], rho * sd[0] * sd[1], rho ** 2 * sd[0] * sd[2]],
        [rho * sd[0] * sd[1], s[1], rho * sd[1] * sd[2]],
        [rho ** 2 * sd[0] * sd[2], rho * sd[1] * sd[2], s[2]],
    ])
    r = covariance_to_correlation(CovarianceMatrix(cov)).values
    assert r[0, 1] == pytest.approx(0.5, abs=1e-12)
    assert r[0, 2] == pytest.approx(0.25, abs=1e-12)
    assert r[1, 2] == pytest.approx(0.5, abs=1e-12)


def test_covariance_rejects_zero_variance():
    with pytest.raises(DegenerateVariableError):
        covariance_to_correlation(CovarianceMatrix(np.array([[1.0, 0.0], [0.0, 0.0]])))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_correlation_invariant_under_rescaling(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(5, 5))
    cov = a @ a.T + 0.1 * np.eye(5)
    d = np.diag(rng.uniform(0.01, 100.0, size=5))
    r1 = covariance_to_correlation(CovarianceMatrix(cov)).values
    r2 = covariance_to_correlation(CovarianceMatrix(d @ cov @ d)).values
    np.testing.assert_allclose(r2, r1, rtol=1e-12, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2**32 - 1))
def test_oracle_output_validates(n, seed):
    t = random_tree_model(n, np.random.default_rng(seed), corr_range=(0.5, 0.95))
    assert validate_correlation_matrix(leaf_correlations(t), Tolerances(dep_floor=1e-12)).ok


def test_tree_valid_star():
    t = make_model(["a", "b", "c"], ["w"], [("a", "w", 0.5), ("b", "w", 0.6), ("c", "w", 0.7)])
    assert tree_is_valid(t).ok


def test_tree_invalid_degree_two_hidden():
    topo = Topology(("a", "b", "c"), ("w1", "w2"), ((0, 3), (1, 4), (2, 4), (3, 4)))
    violations = tree_is_valid(topo).violations
    assert any(v.startswith("hidden degree") for v in violations)


def test_tree_invalid_forest():
    topo = Topology(
        ("a", "b", "c", "d", "e", "f"), ("w1", "w2"),
        ((0, 6), (1, 6), (2, 6), (3, 7), (4, 7), (5, 7)),
    )
    violations = tree_is_valid(topo).violations
    assert any(v.startswith("connectivity") for v in violations)
    assert any(v.startswith("tree") for v in violations)


def test_tree_edge_correlation_bounds():
    t = make_model(["a", "b", "c"], ["w"], [("a", "w", 0.5), ("b", "w", 1.0), ("c", "w", 0.0001)])
    kinds = tree_is_valid(t).violations
    assert len(kinds) == 2


def test_linear_gaussian_rejects_negative_noise():
    with pytest.raises(ValueError):
        LinearGaussian(0.5, 0.0, -1e-3)


def test_linear_gaussian_compose():
    x_given_a = LinearGaussian(2.0, 1.0, 0.5)
    a_given_b = LinearGaussian(0.5, 3.0, 0.75)
    composed = x_given_a.compose(a_given_b)
    assert composed == LinearGaussian(1.0, 7.0, 0.5 + 4.0 * 0.75)


def test_tolerances_positive():
    with pytest.raises(ValueError):
        Tolerances(eq_tol=0.0)
    with pytest.raises(ValueError):
        Tolerances(eq_tol=1.5)
