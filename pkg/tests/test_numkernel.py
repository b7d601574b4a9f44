import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cychern.numkernel import (
    DimensionError, GradedDims, as_mat, graded_commutator, pmap, schatten_norm,
    singular_values, singular_values_gram, trace, worker_count,
)
from cychern.fixtures import swap


def random_matrix(seed, rows, cols):
    r = np.random.default_rng(seed)
    return r.standard_normal((rows, cols)) + 1j * r.standard_normal((rows, cols))


shapes = st.tuples(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.integers(1, 6))


def test_as_mat_rejects_bad_input():
    with pytest.raises(DimensionError):
        as_mat([1, 2, 3])
    with pytest.raises(ValueError):
        as_mat([[1.0, np.nan]])
    assert as_mat([[1, 2]]).dtype == complex


def test_graded_dims():
    g = GradedDims(2, 1)
    assert g.total == 3
    assert np.allclose(np.diag(g.grading()), [1, 1, -1])
    with pytest.raises(ValueError):
        GradedDims(0, 0)
    with pytest.raises(ValueError):
        GradedDims(-1, 2)


def test_trace_requires_square():
    assert trace(np.eye(3)) == 3
    with pytest.raises(DimensionError):
        trace(np.ones((2, 3)))


@given(shapes)
@settings(max_examples=50, deadline=None)
def test_trace_cyclicity(args):
    seed, r, c = args
    A, B = random_matrix(seed, r, c), random_matrix(seed + 1, c, r)
    bound = 1e-12 * (np.linalg.norm(A, 2) * np.linalg.norm(B, 2) + 1)
    assert abs(trace(A @ B) - trace(B @ A)) <= bound


@given(shapes)
@settings(max_examples=50, deadline=None)
def test_singular_values_sorted_and_match_gram_route(args):
    seed, r, c = args
    M = random_matrix(seed, r, c)
    s = singular_values(M)
    assert s.shape == (min(r, c),)
    assert np.all(s >= 0)
    assert np.all(np.diff(s) <= 0)
    assert np.allclose(s, singular_values_gram(M), atol=1e-8 * (1 + s[0]))


def test_singular_values_of_rank_one():
    s = singular_values(np.outer([1, 2], [3, 4, 0]))
    assert s[0] == pytest.approx(np.sqrt(5) * 5)
    assert s[1] == 0.0


def test_schatten_known_values():
    M = np.diag([3.0, 4.0])
    assert schatten_norm(M, 1) == pytest.approx(7.0)
    assert schatten_norm(M, 2) == pytest.approx(5.0)
    assert schatten_norm(np.zeros((2, 2)), 3) == 0.0
    # large exponents approach the operator norm without overflow
    assert schatten_norm(1e10 * M, 400) == pytest.approx(4e10, rel=1e-3)


@pytest.mark.parametrize("p", [0.5, 0.0, -1.0, np.inf, np.nan])
def test_schatten_domain_error(p):
    with pytest.raises(ValueError):
        schatten_norm(np.eye(2), p)


@given(shapes, st.floats(1.0, 8.0), st.floats(0.0, 8.0))
@settings(max_examples=50, deadline=None)
def test_schatten_monotone_in_p(args, p, extra):
    seed, r, c = args
    M = random_matrix(seed, r, c)
    assert schatten_norm(M, p + extra) <= schatten_norm(M, p) + 1e-10


@given(shapes, st.floats(1.05, 20.0))
@settings(max_examples=50, deadline=None)
def test_holder(args, a):
    seed, r, c = args
    b = a / (a - 1.0)
    S, T = random_matrix(seed, r, c), random_matrix(seed + 7, c, r)
    assert schatten_norm(S @ T, 1) <= schatten_norm(S, a) * schatten_norm(T, b) + 1e-10


def test_graded_commutator_examples():
    F = swap(1)
    T = np.diag([1.0, 0.0])
    assert np.allclose(graded_commutator(F, F, T), [[0, -1], [1, 0]])
    assert np.allclose(graded_commutator(F, F, np.eye(2)), 0)
    assert np.allclose(graded_commutator(F, F, F, degT=1), 2 * np.eye(2))
    # ungraded: plain commutator regardless of degree
    assert np.allclose(graded_commutator(F, F, F, degT=1, graded=False), 0)


def test_graded_commutator_rectangular_and_mismatch():
    FX, FY = swap(1), swap(2)
    T = random_matrix(3, 4, 2)
    assert np.allclose(graded_commutator(FX, FY, T), FY @ T - T @ FX)
    with pytest.raises(DimensionError):
        graded_commutator(FY, FX, T)


def test_pmap_thread_count(monkeypatch):
    monkeypatch.setenv("CYCHERN_THREADS", "4")
    assert worker_count() == 4
    assert pmap(lambda x: x * x, range(20)) == [x * x for x in range(20)]
    monkeypatch.setenv("CYCHERN_THREADS", "junk")
    assert worker_count() == 1
