import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import E
from mfshift.errors import DegeneratePairing, NodeCollision, NonFinite
from mfshift.liealg import algebra, levi_data, regular_nilpotent, root_vector
from mfshift.numkernel import (
    Subspace,
    lambda_coefficients,
    max_angle,
    null_space,
    perp_trace_form,
    polyval_coefficients,
    span,
    subspace_equal,
    subspace_intersect,
    subspace_sum,
    svd_rank,
    unity_nodes,
)


def _random_subspace(rng, ambient, d):
    v = rng.standard_normal((d, ambient)) + 1j * rng.standard_normal((d, ambient))
    return span(v, ambient_dim=ambient)


# -- svd_rank --------------------------------------------------------------------


def test_rank_identity_and_zero():
    assert svd_rank(np.eye(3)).rank == 3
    assert svd_rank(np.zeros((3, 3))).rank == 0


def test_rank_of_parallel_invariant_gradients():
    # hand evaluation: 2y and 3y^2 - tr(y^2) I = -3y at y = diag(1, 1, -2)
    alg = algebra(3)
    y = np.diag([1.0, 1.0, -2.0])
    rows = np.array([alg.coords(2 * y), alg.coords(3 * y @ y - np.trace(y @ y) * np.eye(3))])
    assert np.allclose(rows[1], -3 * alg.coords(y))
    assert svd_rank(rows).rank == 1


def test_rank_report_fields():
    rep = svd_rank(np.diag([1.0, 1e-3, 1e-12]))
    assert rep.rank == 2
    assert rep.cutoff == pytest.approx(1e-8)
    d = rep.as_dict()
    assert d["rank"] == 2 and len(d["singular_values"]) == 3


def test_scale_floor_zeroes_pure_roundoff():
    noise = 1e-17 * np.ones((3, 3))
    assert svd_rank(noise).rank == 1
    assert svd_rank(noise, scale=1.0).rank == 0
    assert null_space(noise, scale=1.0).dim == 3


def test_nonfinite_rejected():
    with pytest.raises(NonFinite):
        svd_rank(np.array([[np.nan, 0.0], [0.0, 1.0]]))


@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_rank_of_constructed_product(m, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, m)
    U = np.linalg.qr(rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8)))[0][:, :r]
    V = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))[0][:r]
    s = np.exp(rng.uniform(-3, 3, r))
    assert svd_rank((U * s) @ V).rank == r


# -- span / equality / sum / intersection -----------------------------------------


def test_span_examples():
    assert span([[1, 0], [2, 0]]).dim == 1
    assert span([], ambient_dim=2).dim == 0
    with pytest.raises(ValueError):
        span([])


def test_span_of_commutators_with_root_vector():
    alg = algebra(3)
    x = root_vector(3, (0, 1))
    comms = [alg.coords(B @ x - x @ B) for B in alg.basis]
    assert span(comms).dim == 4


def test_subspace_equal_examples(rng):
    S = _random_subspace(rng, 5, 2)
    assert subspace_equal(S, S)
    assert not subspace_equal(span([[1, 0]]), span([[0, 1]]))
    alg = algebra(3)
    y = np.diag([1.0, 1.0, -2.0])
    grads = span([alg.coords(2 * y), alg.coords(3 * y @ y - np.trace(y @ y) * np.eye(3))])
    assert subspace_equal(grads, span([alg.coords(y)]))


def test_line_sum_and_intersection():
    a, b = span([[1, 0]]), span([[1, 1]])
    assert subspace_sum(a, b).dim == 2
    assert subspace_intersect(a, b).dim == 0


def test_max_angle_dimension_mismatch():
    assert max_angle(span([[1, 0, 0]]), Subspace.full(3)) == pytest.approx(np.pi / 2)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_self_intersection(d, seed):
    S = _random_subspace(np.random.default_rng(seed), 8, d)
    assert subspace_equal(subspace_intersect(S, S, 1e-6), S)


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_dimension_formula(da, db, common, seed):
    # A = C + A', B = C + B' in general position: the shared part is exactly C
    rng = np.random.default_rng(seed)
    ambient = 12
    common = min(common, da, db)
    C = rng.standard_normal((common, ambient))
    A = span(np.vstack([C, rng.standard_normal((da - common, ambient))]), ambient_dim=ambient)
    B = span(np.vstack([C, rng.standard_normal((db - common, ambient))]), ambient_dim=ambient)
    I = subspace_intersect(A, B, 1e-6)
    S = subspace_sum(A, B)
    assert S.dim + I.dim == A.dim + B.dim
    assert I.dim == (common if da + db - common <= ambient else da + db - ambient)


# -- trace-form annihilator ------------------------------------------------------


def test_perp_of_whole_space_is_zero():
    alg = algebra(3)
    assert perp_trace_form(Subspace.full(alg.dim), alg.gram).dim == 0
    assert perp_trace_form(Subspace.zero(alg.dim), alg.gram).dim == alg.dim


def test_perp_of_levi_commutator_sl3():
    alg = algebra(3)
    L = levi_data(3, (0, 1))
    P = perp_trace_form(L.levi_comm, alg.gram)
    assert P.dim == 5
    expected = span(list(L.u_minus.basis) + list(L.ker_alpha.basis) + list(L.u_plus.basis))
    assert subspace_equal(P, expected)


def test_perp_is_bilinear_not_hermitian():
    # an isotropic line for the trace form lies in its own annihilator
    alg = algebra(3)
    xi = span([alg.coords(regular_nilpotent(3) @ regular_nilpotent(3))])
    P = perp_trace_form(xi, alg.gram)
    assert P.contains(xi.basis[0])


def test_degenerate_pairing():
    with pytest.raises(DegeneratePairing):
        perp_trace_form(span([[1, 0]]), np.diag([1.0, 0.0]))


@given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.data())
def test_double_perp(n, seed, data):
    alg = algebra(n)
    d = data.draw(st.integers(0, alg.dim))
    S = _random_subspace(np.random.default_rng(seed), alg.dim, d)
    P = perp_trace_form(S, alg.gram)
    assert P.dim == alg.dim - S.dim
    assert subspace_equal(perp_trace_form(P, alg.gram), S)


# -- coefficient extraction -------------------------------------------------------


def test_constant_samples():
    assert np.allclose(lambda_coefficients([5, 5, 5], 2), [5, 0, 0])


def test_square_at_explicit_nodes():
    nodes = np.array([1, 1j, -1])
    assert np.allclose(lambda_coefficients(nodes**2, 2, nodes=nodes), [0, 0, 1])


def test_shifted_square_trace_sl3(rng):
    from conftest import random_sl
    y = random_sl(3, rng)
    xi = regular_nilpotent(3)
    nodes = unity_nodes(2, 0.7)
    vals = [np.trace((y + lam * xi) @ (y + lam * xi)) for lam in nodes]
    c = lambda_coefficients(vals, 2, radius=0.7)
    assert np.allclose(c, [np.trace(y @ y), 2 * np.trace(xi @ y), 0], atol=1e-12)


def test_node_collision():
    with pytest.raises(NodeCollision):
        lambda_coefficients([1, 2, 3], 2, nodes=[0.0, 1.0, 1.0])


def test_sample_count_mismatch():
    with pytest.raises(ValueError):
        lambda_coefficients([1, 2], 2)


@given(st.integers(0, 6), st.floats(0.05, 20.0), st.integers(0, 2**32 - 1))
def test_interpolation_round_trip(d, radius, seed):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((d + 1, 2)) + 1j * rng.standard_normal((d + 1, 2))
    nodes = unity_nodes(d, radius)
    vals = np.array([polyval_coefficients(c, lam) for lam in nodes])
    got = lambda_coefficients(vals, d, radius=radius)
    # conditioning of the scaled DFT grows like max(r, 1/r)^d
    cond = max(radius, 1 / radius) ** d
    assert np.linalg.norm(got - c) <= 1e-13 * cond * np.linalg.norm(c) + 1e-14


def test_unity_nodes_are_roots():
    z = unity_nodes(4, 2.0)
    assert np.allclose((z / 2.0) ** 5, 1.0)
