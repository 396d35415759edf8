"""Numerical oracle suite: each check compares a library routine with an
independent computation and reports the measured discrepancy."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .argshift import grad_F, jacobian_F, eval_F, new_shift_system, poisson_bracket
from .bifurcation import POISSON_TOL, make_shift, random_element
from .invariants import eval_invariant, grad_invariant, hessian_apply
from .liealg import algebra, centralizer_report, trace_form
from .numkernel import (
    RANK_TOL,
    lambda_coefficients,
    max_angle,
    perp_trace_form,
    polyval_coefficients,
    span,
    unity_nodes,
)

FD_TOL = 1e-6
ROUNDTRIP_TOL = 1e-10
# a rank cutoff must sit this many times above the roundoff floor and below the gap
SAFETY = 100.0


@dataclass
class Check:
    name: str
    measured: float
    threshold: str
    passed: bool
    detail: str = ""

    def __post_init__(self):
        self.measured = float(self.measured)
        self.passed = bool(self.passed)

    def as_dict(self) -> dict:
        return {"name": self.name, "measured": float(self.measured), "threshold": self.threshold,
                "pass": bool(self.passed), "detail": self.detail}


def _fd(f, x, z, h=1e-5):
    return (f(x + h * z) - f(x - h * z)) / (2 * h)


def check_fd_gradients(rng) -> Check:
    """Invariant gradients, Hessians and the system Jacobian against central differences."""
    worst = 0.0
    for n in (2, 3, 4):
        y, z = random_element(n, rng), random_element(n, rng)
        for k in range(2, n + 1):
            num = _fd(lambda p: eval_invariant(k, p), y, z)
            ana = trace_form(grad_invariant(k, y), z)
            worst = max(worst, abs(num - ana) / max(abs(ana), 1.0))
            numH = _fd(lambda p: grad_invariant(k, p), y, z)
            anaH = hessian_apply(k, y, z)
            worst = max(worst, np.linalg.norm(numH - anaH) / max(np.linalg.norm(anaH), 1.0))
        sys = new_shift_system(make_shift(n, "generic"))
        alg = algebra(n)
        num = _fd(lambda p: eval_F(sys, p), y, z)
        ana = jacobian_F(sys, y) @ alg.coords(z)
        worst = max(worst, np.linalg.norm(num - ana) / max(np.linalg.norm(ana), 1.0))
    return Check("finite_difference_gradients", worst, f"<= {FD_TOL:g}", worst <= FD_TOL)


def check_perp_involution(rng, tol: float) -> Check:
    """``perp(perp(S)) = S`` and ``dim S + dim perp(S) = dim g`` for random S."""
    worst, dims_ok = 0.0, True
    for n in (2, 3, 4):
        alg = algebra(n)
        for d in range(alg.dim + 1):
            vecs = rng.standard_normal((d, alg.dim)) + 1j * rng.standard_normal((d, alg.dim))
            S = span(vecs, tol, ambient_dim=alg.dim)
            P = perp_trace_form(S, alg.gram)
            PP = perp_trace_form(P, alg.gram)
            dims_ok &= S.dim == d and S.dim + P.dim == alg.dim and PP.dim == S.dim
            if S.dim == PP.dim and S.dim:
                worst = max(worst, max_angle(S, PP))
    passed = dims_ok and worst < 1e-8
    return Check("perp_involution", worst, "< 1e-08 with exact dimensions", passed,
                 "" if dims_ok else "dimension count failed")


def check_interpolation(rng) -> Check:
    """Coefficient extraction from unity nodes and explicit nodes recovers known polynomials."""
    worst = 0.0
    for d in range(1, 6):
        c = rng.standard_normal((d + 1, 3)) + 1j * rng.standard_normal((d + 1, 3))
        for r in (0.1, 1.0, 7.5):
            nodes = unity_nodes(d, r)
            vals = np.array([polyval_coefficients(c, lam) for lam in nodes])
            got = lambda_coefficients(vals, d, radius=r)
            worst = max(worst, np.linalg.norm(got - c) / np.linalg.norm(c))
        nodes = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
        vals = np.array([polyval_coefficients(c, lam) for lam in nodes])
        got = lambda_coefficients(vals, d, nodes=nodes)
        worst = max(worst, np.linalg.norm(got - c) / np.linalg.norm(c))
    return Check("interpolation_round_trip", worst, f"<= {ROUNDTRIP_TOL:g}", worst <= ROUNDTRIP_TOL)


def check_poisson(rng) -> Check:
    worst = 0.0
    for n in (2, 3, 4):
        for spec in ("generic", "nilpotent"):
            sys = new_shift_system(make_shift(n, spec))
            x = random_element(n, rng)
            g = grad_F(sys, x)
            for p in range(sys.b):
                for q in range(p + 1, sys.b):
                    scale = np.linalg.norm(x) * np.linalg.norm(g[p]) * np.linalg.norm(g[q])
                    val = abs(poisson_bracket(sys, sys.labels[p], sys.labels[q], x, grads=g))
                    worst = max(worst, val / scale)
    return Check("poisson_commutativity", worst, f"<= {POISSON_TOL:g}", worst <= POISSON_TOL)


def check_tolerance_floor(rng, tol: float) -> Check:
    """The rank cutoff must clear the roundoff floor and stay under the spectral gap.

    Uses ``ad(x)`` at random regular ``x``, whose kernel dimension is known
    exactly. The floor is the largest would-be-zero singular value relative
    to the largest one; the gap is the smallest genuine one.
    """
    floor, gap = 0.0, np.inf
    rank_ok = True
    for n in (2, 3, 4):
        alg = algebra(n)
        for _ in range(4):
            rep = centralizer_report(random_element(n, rng), tol)
            s = rep.singular_values / rep.singular_values[0]
            r = alg.dim - alg.rank
            floor = max(floor, s[r])
            gap = min(gap, s[r - 1])
            rank_ok &= rep.rank == r
    lo, hi = SAFETY * floor, gap / SAFETY
    passed = rank_ok and lo <= tol <= hi
    detail = ""
    if tol < lo:
        detail = f"tol {tol:g} is below the roundoff floor: need tol >= {lo:.2e}"
    elif tol > hi:
        detail = f"tol {tol:g} exceeds the spectral gap margin: need tol <= {hi:.2e}"
    elif not rank_ok:
        detail = "known centralizer dimensions were not recovered"
    return Check("tolerance_floor", tol, f"in [{lo:.2e}, {hi:.2e}]", passed, detail)


def run_selfcheck(seed: int = 0, tol: float = RANK_TOL) -> list[Check]:
    rng = np.random.default_rng(seed)
    return [
        check_tolerance_floor(rng, tol),
        check_fd_gradients(rng),
        check_perp_involution(rng, tol),
        check_interpolation(rng),
        check_poisson(rng),
    ]
