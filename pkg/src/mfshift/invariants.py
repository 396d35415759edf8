"""Trace-power invariants of sl_n, their gradients and Hessians, the adjoint
quotient, and the minor system cutting out the singular locus.

Generators are ``f_k(y) = tr(y^k)`` for ``k = 2..n`` with no prefactors;
generator ``i`` (1-based) has degree ``k = i + 1``. Gradients are taken with
respect to the trace form, so ``tr(grad_k(y) z)`` is the directional
derivative of ``f_k`` at ``y`` along ``z``.
"""
from __future__ import annotations

import functools
from itertools import combinations

import numpy as np

from . import _kernels
from .errors import DegreeOutOfRange
from .liealg import algebra, algebra_of
from .numkernel import RANK_TOL, RankReport, Subspace, span, svd_rank

MINOR_TOL = 1e-8


def _check_degree(k, n):
    if not 2 <= k <= n:
        raise DegreeOutOfRange(f"degree {k} outside 2..{n} for sl_{n}")


def eval_invariant(k: int, y) -> complex:
    y = np.asarray(y, dtype=np.complex128)
    _check_degree(k, y.shape[0])
    return complex(_kernels.trace_powers(y[None], k)[0, k])


def chi(y) -> np.ndarray:
    """Adjoint quotient ``(tr y^2, ..., tr y^n)``."""
    y = np.asarray(y, dtype=np.complex128)
    n = y.shape[0]
    return _kernels.trace_powers(y[None], n)[0, 2:]


def _gradients_from_powers(pw, n, degrees):
    # pw: (..., kmax+1, n, n) matrix powers
    eye = np.eye(n)
    out = []
    for k in degrees:
        P = pw[..., k - 1, :, :]
        tr = np.trace(P, axis1=-2, axis2=-1)[..., None, None]
        out.append(k * (P - tr / n * eye))
    return np.stack(out, axis=-3)


def grad_invariant(k: int, y) -> np.ndarray:
    """``k (y^(k-1) - tr(y^(k-1))/n I)``."""
    y = np.asarray(y, dtype=np.complex128)
    n = y.shape[0]
    _check_degree(k, n)
    pw = _kernels.power_stack(y[None], k - 1)[0]
    return _gradients_from_powers(pw, n, [k])[0]


def grad_all(y) -> np.ndarray:
    """Stack ``(n-1, n, n)`` of the gradients of ``tr y^2 .. tr y^n``."""
    y = np.asarray(y, dtype=np.complex128)
    n = y.shape[0]
    pw = _kernels.power_stack(y[None], n - 1)[0]
    return _gradients_from_powers(pw, n, range(2, n + 1))


def grad_all_batch(ys) -> np.ndarray:
    """Gradients for a stack of points: ``(batch, n-1, n, n)``."""
    ys = np.asarray(ys, dtype=np.complex128)
    n = ys.shape[-1]
    pw = _kernels.power_stack(ys, n - 1)
    return _gradients_from_powers(pw, n, range(2, n + 1))


def hessian_apply(k: int, y, z) -> np.ndarray:
    """Directional derivative of ``grad_invariant(k, .)`` at ``y`` along ``z``.

    ``k sum_{p+q=k-2} y^p z y^q - k(k-1)/n tr(y^(k-2) z) I``
    """
    y = np.asarray(y, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    n = y.shape[0]
    _check_degree(k, n)
    return _hessian_from_powers(_kernels.power_stack(y[None], max(k - 2, 0))[0], z, k, n)


def _hessian_from_powers(pw, z, k, n):
    # z may be a stack (..., n, n); pw holds y^0..y^(k-2)
    acc = 0
    for p in range(k - 1):
        acc = acc + pw[p] @ z @ pw[k - 2 - p]
    tr = np.trace(pw[k - 2] @ z, axis1=-2, axis2=-1)[..., None, None]
    return k * acc - (k * (k - 1) / n) * tr * np.eye(n)


def dchi(y) -> np.ndarray:
    """Jacobian of ``chi`` in the fixed basis: rows ``tr(grad_k(y) B_j)``."""
    alg = algebra_of(y)
    return alg.coords(grad_all(y)) @ alg.gram


def _unit(y):
    y = np.asarray(y, dtype=np.complex128)
    ny = np.linalg.norm(y)
    return y / ny if ny > 0 else y


def dchi_rank(y, tol: float = RANK_TOL) -> RankReport:
    """Rank of ``d chi`` at ``y``.

    Evaluated at ``y / |y|``: each gradient row is homogeneous, so this only
    rescales rows and leaves the rank unchanged while balancing degrees.
    """
    return svd_rank(dchi(_unit(y)), tol, scale=1.0)


def nabla_I(y, tol: float = RANK_TOL) -> Subspace:
    """Span of the invariant gradients at ``y``."""
    alg = algebra_of(y)
    return span(alg.coords(grad_all(_unit(y))), tol, ambient_dim=alg.dim, scale=1.0)


# -- singular locus ------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def minor_subsets(n: int) -> np.ndarray:
    """Row subsets (lexicographic) selecting the ell x ell minors."""
    alg = algebra(n)
    subs = np.array(list(combinations(range(alg.dim), alg.rank)), dtype=np.int64)
    subs.setflags(write=False)
    return subs


def _gradient_columns(y):
    alg = algebra_of(y)
    return alg.coords(grad_all(y)).T          # (dim, ell)


def singular_minors(y) -> np.ndarray:
    """All ``ell x ell`` minors of the ``dim x ell`` gradient matrix at ``y``."""
    y = np.asarray(y, dtype=np.complex128)
    A = _gradient_columns(y)
    subs = minor_subsets(y.shape[0])
    return np.linalg.det(A[subs]) if A.shape[1] > 1 else A[subs[:, 0], 0].copy()


def _hessian_columns(y):
    """``dA[j, :, c]``: coordinates of the Hessian of generator c applied to basis j."""
    alg = algebra_of(y)
    n = alg.n
    pw = _kernels.power_stack(y[None], max(n - 2, 0))[0]
    cols = []
    for k in range(2, n + 1):
        H = _hessian_from_powers(pw, alg.basis, k, n)   # (dim, n, n)
        cols.append(alg.coords(H))                      # (dim_dir, dim)
    return np.stack(cols, axis=-1)                      # (dim_dir, dim, ell)


def singular_minors_jacobian(y) -> tuple[np.ndarray, np.ndarray]:
    """Minors and their exact Jacobian (rows: minors, columns: basis directions)."""
    y = np.asarray(y, dtype=np.complex128)
    A = _gradient_columns(y)
    dA = _hessian_columns(y)
    return _kernels.minors_jacobian(A, dA, minor_subsets(y.shape[0]))


def max_minor(y) -> float:
    """Largest minor at ``y / |y|`` (scale-free singularity indicator)."""
    m = singular_minors(_unit(y))
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_singular_by_minors(y, tol: float = MINOR_TOL) -> bool:
    return max_minor(y) <= tol
