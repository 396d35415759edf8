import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import E, random_sl
from mfshift.argshift import (
    CLASSICAL_ORDER_SL3,
    centralizer_span,
    eval_F,
    grad_F,
    jacobian_F,
    jacobian_rank,
    label_permutation,
    nabla_FA_span,
    new_shift_system,
    poisson_bracket,
)
from mfshift.bifurcation import make_shift
from mfshift.errors import NotRegular
from mfshift.invariants import chi, nabla_I
from mfshift.liealg import algebra, levi_data, regular_nilpotent, sample_ker_alpha_circ, simple_roots
from mfshift.numkernel import span, subspace_equal, subspace_intersect


def _generic(n):
    return new_shift_system(make_shift(n, "generic"))


def _classical_tuple(y, xi):
    # the sl_3 coordinates written out directly with traces
    tr = np.trace
    return np.array([tr(y @ y), tr(y @ y @ y), 2 * tr(xi @ y), 3 * tr(xi @ xi @ y), 3 * tr(xi @ y @ y)])


def test_shift_kinds():
    s = new_shift_system(regular_nilpotent(3))
    assert s.kind == "Nilpotent" and s.b == 5
    s = new_shift_system(regular_nilpotent(3) + np.diag([2.0, -1.0, -1.0]))
    assert s.kind == "NonNilpotent" and s.b == 5
    with pytest.raises(NotRegular):
        new_shift_system(np.zeros((3, 3)))
    with pytest.raises(NotRegular):
        new_shift_system(np.diag([1.0, 1.0, -2.0]))


def test_labels_lexicographic():
    assert _generic(3).labels == ((1, 0), (1, 1), (2, 0), (2, 1), (2, 2))
    assert _generic(4).b == 9


def test_sl3_nilpotent_tuple(rng):
    xi = regular_nilpotent(3)
    sys = new_shift_system(xi)
    perm = label_permutation(sys, CLASSICAL_ORDER_SL3)
    for _ in range(20):
        y = random_sl(3, rng)
        got = eval_F(sys, y)[perm]
        want = _classical_tuple(y, xi)
        assert np.all(np.abs(got - want) <= 1e-12 * np.maximum(np.abs(want), 1.0))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_constant_coefficient_is_chi(n, rng):
    sys = _generic(n)
    y = random_sl(n, rng)
    F = eval_F(sys, y)
    j0 = [sys.label_index((i, 0)) for i in range(1, n)]
    assert np.allclose(F[j0], chi(y))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_zero_maps_to_zero(n):
    assert np.allclose(eval_F(_generic(n), np.zeros((n, n))), 0)


@given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_generators_homogeneous(n, seed, s):
    # f_ij has degree d_i - j in x
    rng = np.random.default_rng(seed)
    sys = _generic(n)
    y = random_sl(n, rng)
    degs = np.array([i + 1 - j for i, j in sys.labels])
    a, b = eval_F(sys, s * y), s**degs * eval_F(sys, y)
    assert np.allclose(a, b, rtol=1e-9, atol=1e-9 * np.abs(b).max())


def test_direct_expansion_sl4(rng):
    # oracle: expand tr((y + lam a)^k) by brute-force sum over words
    sys = _generic(4)
    a = sys.a
    y = random_sl(4, rng)
    F = eval_F(sys, y)
    for (i, j), val in zip(sys.labels, F):
        k = i + 1
        tot = 0
        for word in itertools.product((0, 1), repeat=k):
            if sum(word) != j:
                continue
            m = np.eye(4)
            for w in word:
                m = m @ (a if w else y)
            tot += np.trace(m)
        assert abs(val - tot) <= 1e-10 * max(1.0, abs(tot))


def test_sl3_differential_on_witness_tangent(rng):
    xi = regular_nilpotent(3)
    sys = new_shift_system(xi)
    alg = algebra(3)
    perm = label_permutation(sys, CLASSICAL_ORDER_SL3)
    J = jacobian_F(sys, E(3, 0, 1))[perm]
    for _ in range(5):
        z1, z2, z3, z4, z5, z6 = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        z = np.array([[z1 + z2, z3, z4], [z5, -z1 + z2, 0], [0, z5 + z6, -2 * z2]])
        got = J @ alg.coords(z)
        assert np.allclose(got, [2 * z5, 0, 2 * z3, 3 * z4, 6 * z2])


def test_linear_generator_gradient_is_constant(rng):
    xi = regular_nilpotent(3)
    sys = new_shift_system(xi)
    k = sys.label_index((1, 1))
    for _ in range(3):
        assert np.allclose(grad_F(sys, random_sl(3, rng))[k], 2 * xi)


def test_jacobian_finite_differences(rng):
    for n in (2, 3, 4):
        sys = _generic(n)
        alg = algebra(n)
        y, z = random_sl(n, rng), random_sl(n, rng)
        h = 1e-5
        num = (eval_F(sys, y + h * z) - eval_F(sys, y - h * z)) / (2 * h)
        assert np.allclose(num, jacobian_F(sys, y) @ alg.coords(z), atol=1e-6)


def test_full_rank_off_critical_set():
    sys = new_shift_system(make_shift(3, "generic"))
    x = np.diag([1.0, 2.0, -3.0]) + 0.1 * E(3, 0, 1)
    assert jacobian_rank(sys, x).rank == 5


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gradient_span_matches_centralizer_span(n, rng):
    for spec in ("generic", "nilpotent"):
        sys = new_shift_system(make_shift(n, spec))
        for _ in range(10):
            x = random_sl(n, rng)
            A = nabla_FA_span(sys, x)
            assert A.dim == sys.b
            B = centralizer_span(sys, x, rng=rng)
            assert subspace_equal(A, B, 1e-6)
            I = nabla_I(x)
            assert all(A.contains(v, 1e-8) for v in I.basis)


def test_gradients_at_cartan_points_are_lower_triangular(rng):
    for n in (3, 4):
        sys = _generic(n)
        for _ in range(10):
            d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x = np.diag(d - d.mean())
            for g in grad_F(sys, x):
                assert np.linalg.norm(np.triu(g, 1)) <= 1e-10 * np.linalg.norm(g)


@pytest.mark.parametrize("n", [3, 4])
def test_levi_intersection_direction(n, rng):
    sys = _generic(n)
    alg = algebra(n)
    y = np.diag(sys.a).real
    for alpha in simple_roots(n):
        L = levi_data(n, alpha)
        # projection of a onto [l, l]: e_-alpha + c h_alpha with c = alpha(y) / 2
        c = (y[alpha[0]] - y[alpha[1]]) / 2
        d = span([alg.coords(L.e_neg + c * L.h_alpha)])
        for _ in range(3):
            h = sample_ker_alpha_circ(n, alpha, rng)
            inter = subspace_intersect(nabla_FA_span(sys, h), L.levi_comm)
            assert inter.dim == 1
            assert subspace_equal(inter, d, 1e-6)


def test_poisson_examples(rng):
    xi = regular_nilpotent(3)
    sys = new_shift_system(xi)
    x = random_sl(3, rng)
    assert poisson_bracket(sys, (2, 1), (2, 1), x) == 0
    # the bracket pairs x with [2x, 2 xi]
    val = poisson_bracket(sys, (1, 0), (1, 1), x)
    assert abs(val) < 1e-12 * np.linalg.norm(x) ** 2
    assert abs(np.trace(x @ (2 * x @ (2 * xi) - 2 * xi @ (2 * x)))) < 1e-12


@given(st.integers(2, 4), st.sampled_from(["generic", "nilpotent"]), st.integers(0, 2**32 - 1))
def test_poisson_commutativity(n, spec, seed):
    rng = np.random.default_rng(seed)
    sys = new_shift_system(make_shift(n, spec))
    x = random_sl(n, rng)
    g = grad_F(sys, x)
    for p, q in itertools.combinations(range(sys.b), 2):
        scale = np.linalg.norm(x) * np.linalg.norm(g[p]) * np.linalg.norm(g[q])
        assert abs(poisson_bracket(sys, sys.labels[p], sys.labels[q], x, grads=g)) <= 1e-8 * scale
