"""Dense complex linear algebra: rank decisions, subspace calculus, and
polynomial-coefficient extraction in the shift parameter.

Subspaces are stored as orthonormal row bases (rows are coordinate vectors in
the ambient space). Orthonormality is with respect to the Hermitian dot
product and only serves conditioning; the symmetric bilinear trace form is
handled separately by :func:`perp_trace_form`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .errors import DegeneratePairing, NodeCollision, NonFinite

RANK_TOL = 1e-8
ANGLE_TOL = 1e-8
NODE_COLLISION_TOL = 1e-12


@dataclass(frozen=True)
class RankReport:
    rank: int
    singular_values: np.ndarray = field(repr=False)
    tol_used: float

    scale: float | None = None

    @property
    def cutoff(self) -> float:
        return self.tol_used * _reference(self.singular_values, self.scale)

    def as_dict(self):
        return {
            "rank": int(self.rank),
            "singular_values": [float(v) for v in self.singular_values],
            "tol_used": float(self.tol_used),
        }


@dataclass(frozen=True)
class Subspace:
    """Orthonormal row basis of a subspace of ``C^ambient_dim``."""

    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128).reshape(-1, self.ambient_dim)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project(self, v):
        """Orthogonal (Hermitian) projection of coordinate vector(s) onto the subspace."""
        v = np.asarray(v, dtype=np.complex128)
        return (v @ self.basis.conj().T) @ self.basis

    def residual(self, v) -> float:
        """Norm of the component of ``v`` orthogonal to the subspace, relative to ``|v|``."""
        v = np.asarray(v, dtype=np.complex128)
        nv = np.linalg.norm(v)
        if nv == 0:
            return 0.0
        return float(np.linalg.norm(v - self.project(v)) / nv)

    def contains(self, v, tol: float = 1e-8) -> bool:
        return self.residual(v) < tol

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((0, ambient_dim), dtype=np.complex128))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=np.complex128))


def _check_finite(M):
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix contains NaN or Inf entries")


def _reference(s, scale=None):
    # largest singular value, floored by a known natural scale of the matrix
    top = s[0] if s.size else 0.0
    if scale is not None:
        top = max(top, scale)
    return top if top > 0 else 1.0


def svd_rank(M, tol_rel: float = RANK_TOL, scale: float | None = None) -> RankReport:
    """Numerical rank with a relative singular-value cutoff.

    Singular values at or below ``tol_rel * sigma_max`` (or ``tol_rel`` when
    every singular value is zero) are treated as zero. Passing ``scale``
    floors the reference ``sigma_max``; use it when the matrix has a known
    O(scale) size, so that a matrix made only of roundoff gets rank 0.
    """
    M = np.atleast_2d(np.asarray(M, dtype=np.complex128))
    _check_finite(M)
    if M.size == 0:
        return RankReport(0, np.zeros(0), tol_rel, scale)
    s = np.linalg.svd(M, compute_uv=False)
    return RankReport(int(np.sum(s > tol_rel * _reference(s, scale))), s, tol_rel, scale)


def null_space(M, tol_rel: float = RANK_TOL, scale: float | None = None) -> Subspace:
    """Right kernel ``{v : M v = 0}`` as an orthonormal row basis."""
    M = np.atleast_2d(np.asarray(M, dtype=np.complex128))
    _check_finite(M)
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return Subspace.full(ncols)
    _, s, vh = np.linalg.svd(M)
    r = int(np.sum(s > tol_rel * _reference(s, scale)))
    return Subspace(ncols, vh[r:].conj())


def span(vectors, tol_rel: float = RANK_TOL, ambient_dim: int | None = None,
         scale: float | None = None) -> Subspace:
    """Orthonormal basis of the numerical span of ``vectors``."""
    vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    if not vecs:
        if ambient_dim is None:
            raise ValueError("ambient_dim is required for an empty vector list")
        return Subspace.zero(ambient_dim)
    dims = {v.size for v in vecs}
    if len(dims) != 1 or (ambient_dim is not None and dims != {ambient_dim}):
        raise ValueError("vectors do not share one ambient dimension")
    M = np.vstack(vecs)
    _check_finite(M)
    _, s, vh = np.linalg.svd(M, full_matrices=False)
    r = int(np.sum(s > tol_rel * _reference(s, scale)))
    return Subspace(M.shape[1], vh[:r])


def principal_angles(A: Subspace, B: Subspace) -> np.ndarray:
    """Principal angles in radians, descending (sine-accurate for small angles)."""
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    if A.dim == 0 or B.dim == 0:
        return np.zeros(0)
    return subspace_angles(A.basis.T, B.basis.T)


def max_angle(A: Subspace, B: Subspace) -> float:
    """Largest principal angle; ``pi/2`` when the dimensions differ."""
    if A.dim != B.dim:
        return float(np.pi / 2)
    ang = principal_angles(A, B)
    return float(ang.max()) if ang.size else 0.0


def subspace_equal(A: Subspace, B: Subspace, tol: float = 1e-6) -> bool:
    if A.ambient_dim != B.ambient_dim or A.dim != B.dim:
        return False
    return max_angle(A, B) < tol


def subspace_sum(A: Subspace, B: Subspace, tol_rel: float = RANK_TOL) -> Subspace:
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    return span(list(A.basis) + list(B.basis), tol_rel, ambient_dim=A.ambient_dim)


def subspace_intersect(A: Subspace, B: Subspace, tol: float = ANGLE_TOL) -> Subspace:
    """Intersection of two subspaces.

    Uses the kernel of ``[Q_A, -Q_B]``: a principal angle ``theta`` shows up as
    the singular value ``sqrt(1 - cos(theta))``, roughly ``theta / sqrt(2)``,
    so the cutoff is applied on that scale.
    """
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(A.ambient_dim)
    C = np.hstack([A.basis.T, -B.basis.T])
    _, s, vh = np.linalg.svd(C)
    s_full = np.zeros(C.shape[1])
    s_full[: s.size] = s
    keep = s_full < tol / np.sqrt(2.0)
    if not keep.any():
        return Subspace.zero(A.ambient_dim)
    coeffs = vh[keep].conj()[:, : A.dim]
    return span(coeffs @ A.basis, RANK_TOL, ambient_dim=A.ambient_dim)


def perp_trace_form(S: Subspace, gram, cond_max: float = 1e12) -> Subspace:
    """Annihilator of ``S`` under the symmetric bilinear form with Gram matrix ``gram``.

    The pairing is bilinear (no complex conjugation): ``x^T G s = 0``.
    """
    G = np.asarray(gram, dtype=np.complex128)
    if G.shape != (S.ambient_dim, S.ambient_dim):
        raise ValueError("Gram matrix does not match the ambient dimension")
    s = np.linalg.svd(G, compute_uv=False)
    if s[-1] == 0 or s[0] / s[-1] > cond_max:
        raise DegeneratePairing("pairing Gram matrix is numerically singular")
    if S.dim == 0:
        return Subspace.full(S.ambient_dim)
    return null_space(S.basis @ G.T)


def unity_nodes(degree: int, radius: float = 1.0) -> np.ndarray:
    """Scaled roots of unity ``radius * exp(2 pi i m / (degree + 1))``."""
    m = np.arange(degree + 1)
    return radius * np.exp(2j * np.pi * m / (degree + 1))


def lambda_coefficients(samples, degree: int, nodes=None, radius: float = 1.0):
    """Coefficients ``c_0..c_d`` of the degree-``d`` interpolant of ``samples``.

    ``samples[m]`` is the value at node ``m``; trailing axes are interpolated
    componentwise. Without explicit ``nodes`` the samples are taken to sit at
    :func:`unity_nodes` and the inversion is an inverse DFT.
    """
    vals = np.asarray(samples, dtype=np.complex128)
    if vals.shape[0] != degree + 1:
        raise ValueError(f"need {degree + 1} samples for degree {degree}, got {vals.shape[0]}")
    _check_finite(vals)
    if nodes is None:
        coeffs = np.fft.fft(vals, axis=0) / (degree + 1)
        # fft uses exp(-2 pi i m k/N), which is the inverse of evaluation at unity_nodes
        scale = radius ** -np.arange(degree + 1, dtype=float)
        return coeffs * scale.reshape((-1,) + (1,) * (vals.ndim - 1))
    nodes = np.asarray(nodes, dtype=np.complex128)
    if nodes.shape != (degree + 1,):
        raise ValueError("node count must equal degree + 1")
    diff = np.abs(nodes[:, None] - nodes[None, :])
    np.fill_diagonal(diff, np.inf)
    if diff.min(initial=np.inf) < NODE_COLLISION_TOL:
        raise NodeCollision("interpolation nodes coincide")
    V = np.vander(nodes, degree + 1, increasing=True)
    flat = vals.reshape(degree + 1, -1)
    return np.linalg.solve(V, flat).reshape(vals.shape)


def polyval_coefficients(coeffs, lam):
    """Evaluate ``sum_k coeffs[k] lam^k`` (componentwise over trailing axes)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    out = np.zeros(coeffs.shape[1:], dtype=np.complex128)
    for c in coeffs[::-1]:
        out = out * lam + c
    return out
