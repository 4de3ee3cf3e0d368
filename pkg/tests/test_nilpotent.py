import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import block_diag

from hodgecurv.errors import NotNilpotent, NotRepresentable
from hodgecurv.fixtures import get_fixture
from hodgecurv.hodge import base_curvature_direct
from hodgecurv.linalg import bracket, end_inner, h_adjoint
from hodgecurv.nilpotent import (commutator_chain_check, hsc_bound_from_traces,
                                 jordan_grading, level_projector, make_graded,
                                 orthogonal_strict_grading, random_graded_instance,
                                 random_metric, random_nilpotent, shift_block,
                                 trace_profile)


def _span_equal(X, Y):
    return np.linalg.matrix_rank(np.hstack([X, Y]), tol=1e-9) == X.shape[1] == Y.shape[1]


def test_zero_is_single_level():
    g = jordan_grading(np.zeros((3, 3)))
    assert g.k == 0 and g.dims == [3]
    assert np.all(trace_profile(g).a == 0)
    c = commutator_chain_check(g)
    assert c.lhs == c.m1 == c.m2 == c.m3 == 0 and c.holds
    assert hsc_bound_from_traces(g) == 0


def test_shift_block_levels():
    g = jordan_grading(shift_block(2))
    e1, e2 = np.eye(2)[:, [0]], np.eye(2)[:, [1]]
    assert _span_equal(g.levels[0], e2) and _span_equal(g.levels[1], e1)
    assert g.is_strictly_graded and g.is_h_orthogonal


def test_shift_plus_zero_levels():
    A = block_diag(shift_block(2), np.zeros((1, 1)))
    g = jordan_grading(A)
    I3 = np.eye(3)
    assert g.dims == [2, 1]
    assert _span_equal(g.levels[0], I3[:, [1, 2]])
    assert _span_equal(g.levels[1], I3[:, [0]])
    assert g.is_strictly_graded


def test_not_nilpotent():
    with pytest.raises(NotNilpotent):
        jordan_grading(np.eye(2))


@pytest.mark.parametrize("sizes", [(3,), (2, 2), (3, 1), (4, 2, 1), (1, 1)])
def test_jordan_grading_strict_on_block_sums(sizes):
    rng = np.random.default_rng(sum(sizes))
    A = block_diag(*[shift_block(n) for n in sizes])
    S = rng.normal(size=A.shape) + 1j * rng.normal(size=A.shape) + 3 * np.eye(A.shape[0])
    g = jordan_grading(S @ A @ np.linalg.inv(S))
    assert g.is_strictly_graded
    assert g.k == max(sizes) - 1


def test_jordan_grading_random_always_strict():
    rng = np.random.default_rng(41)
    for _ in range(300):
        r = int(rng.integers(2, 7))
        g = jordan_grading(random_nilpotent(r, rng), random_metric(r, rng))
        assert g.is_strictly_graded


def test_orthogonal_grading_examples():
    g = orthogonal_strict_grading(shift_block(3), np.eye(3))
    assert g.is_h_orthogonal and g.is_strictly_graded
    A = block_diag(shift_block(2), shift_block(3))
    h = block_diag(np.diag([2.0, 0.5]), np.diag([1.0, 3.0, 0.25])).astype(complex)
    g = orthogonal_strict_grading(A, h)
    assert g.is_h_orthogonal and g.is_strictly_graded


def test_orthogonal_grading_outcomes_are_consistent():
    rng = np.random.default_rng(42)
    seen = set()
    for _ in range(200):
        r = int(rng.integers(2, 6))
        A, h = random_nilpotent(r, rng), random_metric(r, rng)
        try:
            g = orthogonal_strict_grading(A, h)
        except NotRepresentable:
            seen.add("not representable")
            continue
        seen.add("ok")
        assert g.is_h_orthogonal and g.is_strictly_graded
    assert "ok" in seen


def test_make_graded_requires_basis():
    with pytest.raises(ValueError):
        make_graded(shift_block(2), np.eye(2), [np.eye(2)[:, [0]], np.eye(2)[:, [0]]])


def test_uniformizing_trace_profile_and_bound():
    b = get_fixture("uniformizing")
    t = np.array([1j])
    g = orthogonal_strict_grading(b.theta_at(t)[0], b.h_at(t))
    assert trace_profile(g).total == pytest.approx(0.25)
    assert hsc_bound_from_traces(g) == pytest.approx(-1 / 32)
    measured = base_curvature_direct(b, t).R[0, 0, 0, 0].real
    assert measured == pytest.approx(-1 / 8) and measured <= -1 / 32


def test_sym2_trace_profile_and_bound():
    b = get_fixture("sym2")
    t = np.array([1j])
    g = orthogonal_strict_grading(b.theta_at(t)[0], b.h_at(t))
    assert g.k == 2
    assert trace_profile(g).total == pytest.approx(1.0)
    assert hsc_bound_from_traces(g) == pytest.approx(-1 / 12)
    assert base_curvature_direct(b, t).R[0, 0, 0, 0].real == pytest.approx(-0.5)


def test_shift_block_equality_case():
    c = commutator_chain_check(jordan_grading(shift_block(2)))
    assert c.lhs == pytest.approx(np.sqrt(2), abs=1e-12)
    assert c.m1 == pytest.approx(np.sqrt(2), abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(r=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_level_trace_identity(r, seed):
    g = random_graded_instance(r, np.random.default_rng(seed))
    A, h = g.A, g.h
    C = bracket(h_adjoint(A, h), A)
    a = trace_profile(g).a
    for p in range(g.k + 1):
        prev = a[p - 1] if p else 0.0
        val = np.trace(C @ level_projector(g, p))
        assert val == pytest.approx(a[p] - prev, abs=1e-9 * max(1.0, np.linalg.norm(C)))


@settings(max_examples=300, deadline=None)
@given(r=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_trace_total_is_end_norm(r, seed):
    g = random_graded_instance(r, np.random.default_rng(seed))
    assert trace_profile(g).total == pytest.approx(end_inner(g.A, g.A, g.h).real, rel=1e-9, abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(r=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_chain_holds_on_orthogonal_strict(r, seed):
    g = random_graded_instance(r, np.random.default_rng(seed))
    assert g.is_h_orthogonal and g.is_strictly_graded
    c = commutator_chain_check(g)
    assert c.asserted and c.holds, c.margins


def test_general_jordan_grading_is_measured_not_asserted():
    rng = np.random.default_rng(43)
    for _ in range(50):
        g = jordan_grading(random_nilpotent(4, rng), random_metric(4, rng))
        c = commutator_chain_check(g)
        assert c.asserted == g.is_h_orthogonal
