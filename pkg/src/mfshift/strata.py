"""Smooth points of the critical set ``g_sing + C a`` and their tangent spaces."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .argshift import ShiftSystem, weighted_jacobian
from .errors import (
    NotOnSingularLocus,
    NotSemisimple,
    NotSubregular,
    SmoothnessFailed,
    WrongAlgebra,
    WrongShiftKind,
)
from .invariants import MINOR_TOL, singular_minors_jacobian
from .liealg import (
    Conjugator,
    Kind,
    adjoint_image,
    algebra,
    algebra_of,
    centralizer,
    classify,
    derived_subalgebra,
    random_conjugator,
    root_vector,
    sample_ker_alpha_circ,
)
from .numkernel import (
    RANK_TOL,
    RankReport,
    Subspace,
    max_angle,
    null_space,
    perp_trace_form,
    span,
    subspace_sum,
    svd_rank,
)

SEMISIMPLE_TOL = 1e-6
CROSS_CHECK_TOL = 1e-7


@dataclass(frozen=True)
class SubregSSWitness:
    alpha: tuple[int, int]
    h_diag: tuple[float, ...]
    conjugator: Conjugator = field(repr=False)
    t: complex
    seed: int | None = None

    def as_dict(self) -> dict:
        return {
            "type": "subregular_semisimple",
            "alpha": list(self.alpha),
            "h_diag": [float(v) for v in self.h_diag],
            "conjugator_seed": self.seed,
            "t": [float(self.t.real), float(self.t.imag)],
        }


@dataclass(frozen=True)
class NilpotentWitness:
    alpha: tuple[int, int]

    def as_dict(self) -> dict:
        return {
            "type": "nilpotent_sl3",
            "alpha": list(self.alpha),
            "h_diag": None,
            "conjugator_seed": None,
            "t": [0.0, 0.0],
        }


@dataclass(frozen=True)
class CriticalSample:
    x: np.ndarray = field(repr=False)
    witness: SubregSSWitness | NilpotentWitness
    tangent: Subspace
    smooth_certified: bool
    tangent_source: str        # "ClosedForm" or "Numeric"


def semisimple_defect(x) -> float:
    """Relative size of ``prod (x - mu I)`` over the clustered distinct eigenvalues.

    Vanishes exactly for diagonalizable ``x``.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    nx = np.linalg.norm(x)
    if nx == 0:
        return 0.0
    xs = x / nx
    eig = np.linalg.eigvals(xs)
    distinct = []
    for mu in eig:
        if all(abs(mu - nu) > 1e-6 for nu in distinct):
            distinct.append(mu)
    P = np.eye(n, dtype=np.complex128)
    for mu in distinct:
        P = P @ (xs - mu * np.eye(n))
    return float(np.linalg.norm(P))


def tangent_subreg_ss(x, tol: float = RANK_TOL) -> Subspace:
    """Tangent space of the singular locus at a subregular semisimple point:
    the trace-form annihilator of the derived algebra of the centralizer."""
    x = np.asarray(x, dtype=np.complex128)
    alg = algebra_of(x)
    cls = classify(x, tol)
    if cls.kind is not Kind.SUBREGULAR:
        raise NotSubregular(f"centralizer dimension {cls.centralizer_dim}, expected {alg.rank + 2}")
    if semisimple_defect(x) > SEMISIMPLE_TOL:
        raise NotSemisimple("element is not diagonalizable to tolerance")
    derived = derived_subalgebra(centralizer(x, tol), alg.n, tol)
    return perp_trace_form(derived, alg.gram)


def tangent_numeric(y, tol: float = RANK_TOL, minor_tol: float = MINOR_TOL) -> tuple[Subspace, bool]:
    """Kernel of the differential of the minor system at ``y``.

    Returns the kernel and whether it has the smooth-point dimension ``dim - 3``.
    The minors are homogeneous, so the kernel is computed at ``y / |y|``.
    """
    y = np.asarray(y, dtype=np.complex128)
    alg = algebra_of(y)
    ny = np.linalg.norm(y)
    yu = y / ny if ny > 0 else y
    minors, J = singular_minors_jacobian(yu)
    if minors.size and np.max(np.abs(minors)) > minor_tol:
        raise NotOnSingularLocus(f"largest minor {np.max(np.abs(minors)):.3e} exceeds {minor_tol}")
    ker = null_space(J, tol, scale=1.0)
    return ker, ker.dim == alg.dim - 3


def _disc(rng) -> complex:
    return complex(np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))


def sample_critical(sys: ShiftSystem, alpha, rng, *, h=None, conjugator: Conjugator | None = None,
                    t: complex | None = None, seed: int | None = None,
                    tol: float = RANK_TOL) -> CriticalSample:
    """Point ``Ad_g(h) + t a`` of the critical set with ``h`` in ker(alpha)°.

    The closed-form tangent is ``Ad_g(T_h g_sing) + C a``. Raises
    :class:`SmoothnessFailed` when ``a`` is not transversal to the singular tangent.
    """
    n = sys.n
    alpha = tuple(alpha)
    if h is None:
        h = sample_ker_alpha_circ(n, alpha, rng)
    h = np.asarray(h, dtype=np.complex128)
    if conjugator is None:
        conjugator = random_conjugator(n, rng)
    if t is None:
        t = _disc(rng)
    alg = sys.algebra
    x = conjugator.apply(h) + t * sys.a
    t_sing = conjugator.push(tangent_subreg_ss(h, tol), tol)
    tangent = subspace_sum(t_sing, span([alg.coords(sys.a)], ambient_dim=alg.dim), tol)
    witness = SubregSSWitness(alpha, tuple(np.real(np.diag(h))), conjugator, complex(t), seed)
    if tangent.dim != alg.dim - 2:
        raise SmoothnessFailed(
            f"shift direction lies in the singular tangent (sum dim {tangent.dim})",
            repro=witness.as_dict(),
        )
    return CriticalSample(x, witness, tangent, True, "ClosedForm")


def commutator_presentation_sl3() -> list[np.ndarray]:
    """Spanning set of ``[sl_3, E_12]``."""
    E = lambda i, j: root_vector(3, (i, j))
    h = np.diag([1.0, -1.0, 0.0]).astype(np.complex128)
    return [h, E(0, 1), E(0, 2), root_vector(3, (1, 2), negative=True)]


def nilpotent_witness_sl3(sys: ShiftSystem, tol: float = RANK_TOL) -> CriticalSample:
    """Smooth point ``x = e_alpha`` of the critical set for a nilpotent shift in sl_3.

    The closed-form tangent is ``[sl_3, x] + z(l_alpha) + C a``; it is cross-checked
    against the minor-system kernel plus ``C a``.
    """
    if sys.n != 3:
        raise WrongAlgebra(f"nilpotent witness is defined for sl_3, got sl_{sys.n}")
    if not sys.is_nilpotent:
        raise WrongShiftKind("nilpotent witness needs a nilpotent shift")
    alg = algebra(3)
    x = root_vector(3, (0, 1))
    gens = commutator_presentation_sl3() + [np.diag([1.0, 1.0, -2.0]), sys.a]
    tangent = span([alg.coords(g) for g in gens], tol, ambient_dim=alg.dim)
    ker, smooth = tangent_numeric(x, tol)
    numeric = subspace_sum(ker, span([alg.coords(sys.a)], ambient_dim=alg.dim), tol)
    agree = tangent.dim == numeric.dim == alg.dim - 2 and max_angle(tangent, numeric) < CROSS_CHECK_TOL
    return CriticalSample(x, NilpotentWitness((0, 1)), tangent, bool(smooth and agree), "ClosedForm")


def orbit_restricted_rank(sys: ShiftSystem, x, tol: float = RANK_TOL) -> RankReport:
    """Rank of the system differential restricted to the orbit tangent ``[g, x]``."""
    orbit = adjoint_image(x, tol)
    return svd_rank(weighted_jacobian(sys, x) @ orbit.basis.T, tol, scale=1.0)
