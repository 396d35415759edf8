"""The sl_n structure layer.

Elements are plain ``(n, n)`` complex numpy arrays with vanishing trace.
Coordinates refer to one fixed Hermitian-orthonormal basis of sl_n: the
off-diagonal elementary matrices ``E_ij`` followed by the normalized
traceless diagonals ``(E_11 + ... + E_kk - k E_{k+1,k+1}) / sqrt(k(k+1))``.
Roots are index pairs ``(i, j)`` with ``i < j`` (zero-based) standing for
``eps_i - eps_j``.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import AlgebraMismatch, ClassifierDisagreement, NonFinite, SamplingExhausted
from .numkernel import RANK_TOL, RankReport, Subspace, null_space, span, svd_rank

TRACE_TOL = 1e-12


@dataclass(frozen=True)
class AlgebraDescriptor:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"sl_n needs integer n >= 2, got {self.n!r}")

    @property
    def dim(self) -> int:
        return self.n * self.n - 1

    @property
    def rank(self) -> int:
        return self.n - 1

    @property
    def b(self) -> int:
        return (self.dim + self.rank) // 2

    @property
    def u(self) -> int:
        return self.b - self.rank

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(range(2, self.n + 1))

    @functools.cached_property
    def basis(self) -> np.ndarray:
        """``(dim, n, n)`` stack of basis matrices."""
        n = self.n
        mats = []
        for i in range(n):
            for j in range(n):
                if i != j:
                    E = np.zeros((n, n), dtype=np.complex128)
                    E[i, j] = 1.0
                    mats.append(E)
        for k in range(1, n):
            d = np.zeros(n)
            d[:k] = 1.0
            d[k] = -k
            mats.append(np.diag(d / np.sqrt(k * (k + 1))).astype(np.complex128))
        B = np.array(mats)
        B.setflags(write=False)
        return B

    @functools.cached_property
    def gram(self) -> np.ndarray:
        """Trace-form Gram matrix ``tr(B_i B_j)`` (a symmetric permutation matrix)."""
        B = self.basis
        G = np.einsum("iab,jba->ij", B, B)
        G.setflags(write=False)
        return G

    @functools.cached_property
    def _ad_structure(self) -> np.ndarray:
        # T[k] is the coordinate matrix of z -> [B_k, z]
        B = self.basis
        T = np.empty((self.dim, self.dim, self.dim), dtype=np.complex128)
        for k in range(self.dim):
            brackets = B[k] @ B - B @ B[k]
            T[k] = self.coords(brackets).T
        T.setflags(write=False)
        return T

    def coords(self, x) -> np.ndarray:
        """Coordinates of one element ``(n, n)`` or a stack ``(..., n, n)``."""
        x = np.asarray(x, dtype=np.complex128)
        # basis is real and Hermitian-orthonormal, so coordinates are Frobenius pairings
        return np.einsum("kab,...ab->...k", self.basis.real, x)

    def element(self, c) -> np.ndarray:
        return np.einsum("...k,kab->...ab", np.asarray(c, dtype=np.complex128), self.basis)

    def as_dict(self) -> dict:
        return {
            "n": self.n, "dim": self.dim, "rank": self.rank,
            "b": self.b, "u": self.u, "degrees": list(self.degrees),
        }


@functools.lru_cache(maxsize=None)
def algebra(n: int) -> AlgebraDescriptor:
    return AlgebraDescriptor(int(n))


def algebra_of(x) -> AlgebraDescriptor:
    return algebra(np.shape(x)[0])


def as_element(x, trace_tol: float = TRACE_TOL) -> np.ndarray:
    """Validate and convert to a traceless complex square matrix."""
    x = np.array(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape[0] < 2:
        raise ValueError(f"expected a square matrix of size >= 2, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("element has NaN or Inf entries")
    scale = max(np.linalg.norm(x), 1.0)
    if abs(np.trace(x)) > trace_tol * scale:
        raise ValueError("element is not traceless")
    return x


def _same_algebra(x, y):
    if np.shape(x) != np.shape(y):
        raise AlgebraMismatch(f"shapes {np.shape(x)} and {np.shape(y)} differ")


# -- roots ------------------------------------------------------------------


def positive_roots(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def simple_roots(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def root_value(alpha, h) -> complex:
    """``alpha(h)`` for a diagonal matrix or a vector of diagonal entries."""
    h = np.asarray(h)
    d = np.diag(h) if h.ndim == 2 else h
    i, j = alpha
    return d[i] - d[j]


def root_vector(n: int, alpha, negative: bool = False) -> np.ndarray:
    i, j = alpha
    E = np.zeros((n, n), dtype=np.complex128)
    if negative:
        E[j, i] = 1.0
    else:
        E[i, j] = 1.0
    return E


def coroot(n: int, alpha) -> np.ndarray:
    i, j = alpha
    h = np.zeros((n, n), dtype=np.complex128)
    h[i, i], h[j, j] = 1.0, -1.0
    return h


def regular_nilpotent(n: int) -> np.ndarray:
    """Sum of the negative simple root vectors: ones on the subdiagonal."""
    return np.eye(n, k=-1, dtype=np.complex128)


# -- brackets, pairings, centralizers ----------------------------------------


def trace_form(x, y) -> complex:
    _same_algebra(x, y)
    return complex(np.sum(np.asarray(x) * np.asarray(y).T))


def bracket(x, y) -> np.ndarray:
    _same_algebra(x, y)
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    return x @ y - y @ x


def ad_matrix(x) -> np.ndarray:
    """Coordinate matrix of ``z -> [x, z]``."""
    alg = algebra_of(x)
    c = alg.coords(x)
    return np.einsum("k,kij->ij", c, alg._ad_structure)


def _normalized(x):
    nx = np.linalg.norm(x)
    return x / nx if nx > 0 else x


def centralizer(x, tol: float = RANK_TOL) -> Subspace:
    """Numerical kernel of ``ad(x)``; scale-invariant in ``x``."""
    return null_space(ad_matrix(_normalized(np.asarray(x, dtype=np.complex128))), tol, scale=1.0)


def centralizer_report(x, tol: float = RANK_TOL) -> RankReport:
    return svd_rank(ad_matrix(_normalized(np.asarray(x, dtype=np.complex128))), tol, scale=1.0)


def adjoint_image(x, tol: float = RANK_TOL) -> Subspace:
    """The orbit tangent ``[g, x]`` as a subspace."""
    A = ad_matrix(_normalized(np.asarray(x, dtype=np.complex128)))
    return span(A.T, tol, ambient_dim=A.shape[0], scale=1.0)


def derived_subalgebra(S: Subspace, n: int, tol: float = RANK_TOL) -> Subspace:
    """``[S, S]`` for a subalgebra ``S`` given in coordinates."""
    alg = algebra(n)
    mats = alg.element(S.basis)
    brs = [alg.coords(bracket(mats[p], mats[q])) for p, q in combinations(range(S.dim), 2)]
    # brackets of unit vectors are O(1); an abelian S must give exactly {0}
    return span(brs, tol, ambient_dim=alg.dim, scale=1.0)


def center(S: Subspace, n: int, tol: float = RANK_TOL) -> Subspace:
    """Centre ``{z in S : [z, S] = 0}`` of a subalgebra."""
    alg = algebra(n)
    if S.dim == 0:
        return S
    T = alg._ad_structure
    blocks = []
    for sp in S.basis:
        ad_s = np.einsum("k,kij->ij", sp, T)         # z -> [s_p, z]
        blocks.append(ad_s @ S.basis.T)              # acts on coefficients of z
    M = np.vstack(blocks)
    ker = null_space(M, tol, scale=1.0)
    if ker.dim == 0:
        return Subspace.zero(alg.dim)
    return span(ker.basis @ S.basis, tol, ambient_dim=alg.dim)


# -- classification -----------------------------------------------------------


class Kind(str, enum.Enum):
    REGULAR = "Regular"
    SUBREGULAR = "Subregular"
    DEEPER_SINGULAR = "DeeperSingular"


@dataclass(frozen=True)
class ElementClass:
    kind: Kind
    centralizer_dim: int
    krylov_dim: int


def krylov_dim(x, tol: float = RANK_TOL) -> int:
    """``dim span{I, x, ..., x^(n-1)}``; equals n exactly for regular x."""
    x = _normalized(np.asarray(x, dtype=np.complex128))
    n = x.shape[0]
    powers = [np.eye(n, dtype=np.complex128)]
    for _ in range(n - 1):
        powers.append(powers[-1] @ x)
    return svd_rank(np.array([p.ravel() for p in powers]), tol, scale=1.0).rank


def classify(x, tol: float = RANK_TOL) -> ElementClass:
    x = np.asarray(x, dtype=np.complex128)
    alg = algebra_of(x)
    cdim = centralizer(x, tol).dim
    kdim = krylov_dim(x, tol)
    if (cdim == alg.rank) != (kdim == alg.n):
        raise ClassifierDisagreement(
            f"centralizer dim {cdim} and Krylov dim {kdim} disagree on regularity"
        )
    if cdim == alg.rank:
        kind = Kind.REGULAR
    elif cdim == alg.rank + 2:
        kind = Kind.SUBREGULAR
    else:
        kind = Kind.DEEPER_SINGULAR
    return ElementClass(kind, cdim, kdim)


def is_regular(x, tol: float = RANK_TOL) -> bool:
    return centralizer(x, tol).dim == algebra_of(x).rank


# -- samplers -----------------------------------------------------------------


def sample_ker_alpha_circ(n: int, alpha, rng, max_abs: int = 3, budget: int = 10_000) -> np.ndarray:
    """Integer traceless diagonal in ker(alpha) with every other root value >= 1 in size."""
    i, j = alpha
    others = [r for r in positive_roots(n) if r != (i, j)]
    for _ in range(budget):
        d = rng.integers(-max_abs, max_abs + 1, size=n).astype(float)
        d[j] = d[i]
        if d.sum() != 0:
            continue
        if all(abs(d[p] - d[q]) >= 0.5 for p, q in others):
            return np.diag(d).astype(np.complex128)
    raise SamplingExhausted(f"no point of ker{alpha}° found in {budget} draws")


@dataclass(frozen=True)
class Conjugator:
    """An explicit element g of SL_n and its inverse, acting by ``x -> g x g^-1``."""

    g: np.ndarray = field(repr=False)
    g_inv: np.ndarray = field(repr=False)

    @classmethod
    def identity(cls, n: int) -> "Conjugator":
        eye = np.eye(n, dtype=np.complex128)
        return cls(eye, eye)

    def apply(self, x) -> np.ndarray:
        return self.g @ np.asarray(x, dtype=np.complex128) @ self.g_inv

    def ad_matrix(self) -> np.ndarray:
        """Coordinate matrix of ``Ad_g``."""
        alg = algebra(self.g.shape[0])
        return alg.coords(self.g @ alg.basis @ self.g_inv).T

    def push(self, S: Subspace, tol: float = RANK_TOL) -> Subspace:
        if S.dim == 0:
            return S
        return span(S.basis @ self.ad_matrix().T, tol, ambient_dim=S.ambient_dim)


def random_conjugator(n: int, rng) -> Conjugator:
    """``g = Q U`` with Q a det-normalized unitary factor and U unipotent upper triangular."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    Q = Q / np.linalg.det(Q) ** (1.0 / n)
    U = np.eye(n, dtype=np.complex128) + np.triu(rng.uniform(-1.0, 1.0, (n, n)), k=1)
    g = Q @ U
    U_inv = np.linalg.inv(U)
    return Conjugator(g, U_inv @ Q.conj().T)


def random_conjugation(x, rng) -> tuple[Conjugator, np.ndarray]:
    x = np.asarray(x, dtype=np.complex128)
    c = random_conjugator(x.shape[0], rng)
    return c, c.apply(x)


# -- Levi data ----------------------------------------------------------------


@dataclass(frozen=True)
class LeviData:
    alpha: tuple[int, int]
    e_pos: np.ndarray = field(repr=False)
    e_neg: np.ndarray = field(repr=False)
    h_alpha: np.ndarray = field(repr=False)
    ker_alpha: Subspace
    levi_comm: Subspace
    u_plus: Subspace
    u_minus: Subspace
    borel_minus: Subspace
    cartan: Subspace


def _span_mats(alg, mats):
    return span([alg.coords(m) for m in mats], ambient_dim=alg.dim)


def cartan(n: int) -> Subspace:
    alg = algebra(n)
    return _span_mats(alg, [coroot(n, (k, k + 1)) for k in range(n - 1)])


def levi_data(n: int, alpha) -> LeviData:
    alg = algebra(n)
    i, j = alpha
    e_pos = root_vector(n, alpha)
    e_neg = root_vector(n, alpha, negative=True)
    h_alpha = e_pos @ e_neg - e_neg @ e_pos
    # ker(alpha) inside the Cartan: traceless diagonals with d_i = d_j
    ker_vecs = []
    for k in range(n):
        if k in (i, j):
            continue
        d = np.zeros(n)
        d[i] = d[j] = 1.0
        d[k] = -2.0
        ker_vecs.append(np.diag(d))
    rest = [k for k in range(n) if k not in (i, j)]
    for p, q in zip(rest, rest[1:]):
        d = np.zeros(n)
        d[p], d[q] = 1.0, -1.0
        ker_vecs.append(np.diag(d))
    ker = _span_mats(alg, ker_vecs) if ker_vecs else Subspace.zero(alg.dim)
    others = [r for r in positive_roots(n) if r != tuple(alpha)]
    u_plus = _span_mats(alg, [root_vector(n, r) for r in others]) if others else Subspace.zero(alg.dim)
    u_minus = (
        _span_mats(alg, [root_vector(n, r, negative=True) for r in others])
        if others else Subspace.zero(alg.dim)
    )
    h = cartan(n)
    borel_minus = span(
        list(h.basis) + [alg.coords(root_vector(n, r, negative=True)) for r in positive_roots(n)],
        ambient_dim=alg.dim,
    )
    return LeviData(
        alpha=(i, j), e_pos=e_pos, e_neg=e_neg, h_alpha=h_alpha,
        ker_alpha=ker,
        levi_comm=_span_mats(alg, [e_neg, h_alpha, e_pos]),
        u_plus=u_plus, u_minus=u_minus, borel_minus=borel_minus, cartan=h,
    )
