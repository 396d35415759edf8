"""Shift-of-argument (Mishchenko-Fomenko) systems on sl_n.

For a regular shift ``a`` every invariant expands as

    f_i(x + lam a) = f_i(a) lam^d_i + sum_{j < d_i} lam^j f_ij(x)

and the ``b`` polynomials ``f_ij`` (labels ``(i, j)``, ``i = 1..ell``,
``j = 0..d_i - 1``, lexicographic) are the coordinates of the system map.
Coefficients are extracted by sampling on a circle of roots of unity and
inverting with a DFT; no symbolic expansion is involved.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InsufficientRegularLambdas, NotRegular
from .invariants import _gradients_from_powers, chi
from .liealg import Kind, algebra, bracket, centralizer, centralizer_report, classify, trace_form
from .numkernel import RANK_TOL, RankReport, Subspace, lambda_coefficients, span, svd_rank, unity_nodes

NILPOTENT_TOL = 1e-10
LAMBDA_GAP_TOL = 1e-6


@dataclass(frozen=True)
class ShiftSystem:
    a: np.ndarray = field(repr=False)
    n: int
    kind: str
    labels: tuple[tuple[int, int], ...]

    @property
    def b(self) -> int:
        return len(self.labels)

    @property
    def algebra(self):
        return algebra(self.n)

    @property
    def is_nilpotent(self) -> bool:
        return self.kind == "Nilpotent"

    def degree(self, i: int) -> int:
        return i + 1

    def label_index(self, label) -> int:
        return self.labels.index(tuple(label))

    def row_weights(self, x) -> np.ndarray:
        """Homogeneity scale ``|x|^(d_i-1-j) |a|^j`` of each gradient row."""
        na = np.linalg.norm(self.a)
        # floored so rows that vanish identically near x = 0 stay small
        nx = max(np.linalg.norm(x), 1e-3 * na)
        return np.array([nx ** (i - j) * na ** j for i, j in self.labels])


def shift_kind(a) -> str:
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    scale = max(1.0, np.linalg.norm(a) ** n)
    return "Nilpotent" if np.linalg.norm(chi(a)) <= NILPOTENT_TOL * scale else "NonNilpotent"


def new_shift_system(a, tol: float = RANK_TOL) -> ShiftSystem:
    a = np.array(a, dtype=np.complex128)
    cls = classify(a, tol)
    if cls.kind is not Kind.REGULAR:
        raise NotRegular(f"shift element is {cls.kind.value} (centralizer dim {cls.centralizer_dim})")
    a.setflags(write=False)
    n = a.shape[0]
    labels = tuple((i, j) for i in range(1, n) for j in range(i + 1))
    return ShiftSystem(a=a, n=n, kind=shift_kind(a), labels=labels)


def _radius(sys, x):
    nx, na = np.linalg.norm(x), np.linalg.norm(sys.a)
    return nx / na if nx > 0 and na > 0 else 1.0


def eval_F(sys: ShiftSystem, x) -> np.ndarray:
    """System value: entry ``(i, j)`` is the ``lam^j`` coefficient of ``f_i(x + lam a)``."""
    x = np.asarray(x, dtype=np.complex128)
    r = _radius(sys, x)
    out = np.empty(sys.b, dtype=np.complex128)
    by_degree = {}
    for idx, (i, j) in enumerate(sys.labels):
        d = i + 1
        if d not in by_degree:
            nodes = unity_nodes(d, r)
            pts = x[None] + nodes[:, None, None] * sys.a[None]
            vals = _kernels.trace_powers(pts, d)[:, d]
            by_degree[d] = lambda_coefficients(vals, d, radius=r)
        # the top coefficient f_i(a) does not depend on x and is dropped
        out[idx] = by_degree[d][j]
    return out


def grad_F(sys: ShiftSystem, x) -> np.ndarray:
    """Gradients of all ``b`` generators at ``x`` as a ``(b, n, n)`` stack.

    The gradient of ``f_ij`` is the ``lam^j`` coefficient of
    ``grad f_i(x + lam a)``, a polynomial of degree ``d_i - 1`` in ``lam``.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = sys.n
    r = _radius(sys, x)
    out = np.empty((sys.b, n, n), dtype=np.complex128)
    by_degree = {}
    for idx, (i, j) in enumerate(sys.labels):
        d = i + 1
        if d not in by_degree:
            nodes = unity_nodes(d - 1, r)
            pts = x[None] + nodes[:, None, None] * sys.a[None]
            pw = _kernels.power_stack(pts, d - 1)
            grads = _gradients_from_powers(pw, n, [d])[:, 0]   # (d, n, n)
            by_degree[d] = lambda_coefficients(grads, d - 1, radius=r)
        out[idx] = by_degree[d][j]
    return out


def jacobian_F(sys: ShiftSystem, x) -> np.ndarray:
    """``b x dim`` Jacobian in the fixed basis (rows are trace-form pairings)."""
    alg = sys.algebra
    return alg.coords(grad_F(sys, x)) @ alg.gram


def weighted_jacobian(sys: ShiftSystem, x) -> np.ndarray:
    """Jacobian with each row divided by its homogeneity scale (rank-preserving)."""
    return jacobian_F(sys, x) / sys.row_weights(x)[:, None]


def jacobian_rank(sys: ShiftSystem, x, tol: float = RANK_TOL) -> RankReport:
    return svd_rank(weighted_jacobian(sys, x), tol, scale=1.0)


def nabla_FA_span(sys: ShiftSystem, x, tol: float = RANK_TOL) -> Subspace:
    alg = sys.algebra
    coords = alg.coords(grad_F(sys, x)) / sys.row_weights(x)[:, None]
    return span(coords, tol, ambient_dim=alg.dim, scale=1.0)


def centralizer_span(sys: ShiftSystem, x, lambda_samples: int | None = None, rng=None,
                     tol: float = RANK_TOL, budget_factor: int = 20) -> Subspace:
    """Span of the centralizers of ``x + lam a`` over random regular ``lam`` in the unit disc.

    A parameter is rejected when ``x + lam a`` is singular or within
    ``LAMBDA_GAP_TOL`` (relative spectral gap of ``ad``) of being singular.
    """
    x = np.asarray(x, dtype=np.complex128)
    alg = sys.algebra
    count = lambda_samples if lambda_samples is not None else 2 * sys.b
    rng = rng if rng is not None else np.random.default_rng(0)
    vecs, accepted = [], 0
    for _ in range(budget_factor * count):
        if accepted == count:
            break
        lam = np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        p = x + lam * sys.a
        rep = centralizer_report(p, tol)
        if rep.rank != alg.dim - alg.rank:
            continue
        s = rep.singular_values
        if s[rep.rank - 1] < LAMBDA_GAP_TOL * s[0]:
            continue
        vecs.extend(centralizer(p, tol).basis)
        accepted += 1
    if accepted < count:
        raise InsufficientRegularLambdas(f"only {accepted} of {count} parameters were regular")
    return span(vecs, tol, ambient_dim=alg.dim)


def poisson_bracket(sys: ShiftSystem, label_a, label_b, x, grads=None) -> complex:
    """``<x, [grad f_A, grad f_B]>`` for two generator labels."""
    x = np.asarray(x, dtype=np.complex128)
    g = grads if grads is not None else grad_F(sys, x)
    ga = g[sys.label_index(label_a)]
    gb = g[sys.label_index(label_b)]
    return trace_form(x, bracket(ga, gb))


# conventional sl_3 tuple y -> (tr y^2, tr y^3, 2tr(xi y), 3tr(xi^2 y), 3tr(xi y^2))
CLASSICAL_ORDER_SL3 = ((1, 0), (2, 0), (1, 1), (2, 2), (2, 1))


def label_permutation(sys: ShiftSystem, order=CLASSICAL_ORDER_SL3) -> list[int]:
    """Indices into ``sys.labels`` listing the generators in ``order``."""
    return [sys.label_index(lab) for lab in order]
