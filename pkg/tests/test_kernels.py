"""The compiled kernels must agree exactly with the pure-Python reference."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import latentree
from latentree import _kernels_py, leaf_correlations, random_tree_model

compiled = pytest.importorskip("latentree._kernels")

unit = st.floats(-1.0, 1.0, allow_nan=False)


def test_backend_reported():
    assert latentree.BACKEND in ("cython", "python")


@settings(max_examples=300, deadline=None)
@given(unit, unit, unit, st.sampled_from([1e-9, 1e-6, 1e-2]))
def test_classify_products_parity(a, b, c, tol):
    assert compiled.classify_products(a, b, c, tol) == _kernels_py.classify_products(a, b, c, tol)


def test_classify_products_ties():
    for a, b, c in itertools.product([0.1, 0.2, 0.2 * (1 + 1e-7)], repeat=3):
        for tol in (1e-9, 1e-6):
            assert compiled.classify_products(a, b, c, tol) == _kernels_py.classify_products(a, b, c, tol)


@settings(max_examples=300, deadline=None)
@given(unit, unit, unit)
def test_star_code_parity(r12, r13, r23):
    assert compiled.star_code(r12, r13, r23, 1e-3, 1e-9) == _kernels_py.star_code(r12, r13, r23, 1e-3, 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 9), st.integers(0, 2**32 - 1))
def test_first_star_violation_parity(n, seed):
    rng = np.random.default_rng(seed)
    r = leaf_correlations(random_tree_model(n, rng)).values.copy()
    if rng.random() < 0.7:
        i, j = sorted(rng.choice(n, 2, replace=False))
        r[i, j] = r[j, i] = rng.uniform(-1, 1)
    assert compiled.first_star_violation(r, 1e-3, 1e-9) == _kernels_py.first_star_violation(r, 1e-3, 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 10), st.integers(0, 2**32 - 1))
def test_classify_quartets_parity(n, seed):
    rng = np.random.default_rng(seed)
    r = leaf_correlations(random_tree_model(n, rng)).values.copy()
    r += np.triu(rng.normal(scale=1e-3, size=r.shape), 1)
    r = np.triu(r, 1) + np.triu(r, 1).T + np.eye(n)
    quads = np.array(list(itertools.combinations(range(n), 4)), dtype=np.intp)
    for tol in (1e-9, 1e-2):
        np.testing.assert_array_equal(
            np.asarray(compiled.classify_quartets(r, quads, tol)),
            _kernels_py.classify_quartets(r, quads, tol),
        )


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 14), st.integers(0, 2**32 - 1))
def test_node_correlations_parity(n, seed):
    t = random_tree_model(n, np.random.default_rng(seed))
    a = np.array([e[0] for e in t.edges], dtype=np.intp)
    b = np.array([e[1] for e in t.edges], dtype=np.intp)
    r = np.array([e[2] for e in t.edges])
    n_nodes = n + len(t.hidden)
    np.testing.assert_allclose(
        np.asarray(compiled.node_correlations(n_nodes, a, b, r)),
        _kernels_py.node_correlations(n_nodes, a, b, r),
        rtol=0, atol=1e-15,
    )


@pytest.mark.parametrize("kern", [compiled, _kernels_py], ids=["cython", "python"])
def test_node_correlations_bad_index(kern):
    a = np.array([0, 1], dtype=np.intp)
    b = np.array([2, 5], dtype=np.intp)
    with pytest.raises(IndexError):
        kern.node_correlations(3, a, b, np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        kern.node_correlations(3, a, b, np.array([0.5]))
