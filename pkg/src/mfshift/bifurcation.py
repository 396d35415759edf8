"""Restricted-rank analysis on the critical set and codimension certificates
for the bifurcation diagram ``Sigma_a = F_a(g_sing + C a)``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .argshift import (
    ShiftSystem,
    centralizer_span,
    eval_F,
    grad_F,
    jacobian_rank,
    nabla_FA_span,
    new_shift_system,
    poisson_bracket,
    weighted_jacobian,
)
from .errors import NotSmooth, SmoothnessFailed, WrongAlgebra, WrongShiftKind
from .invariants import dchi_rank, nabla_I
from .liealg import (
    algebra,
    center,
    centralizer,
    levi_data,
    random_conjugator,
    regular_nilpotent,
    root_value,
    sample_ker_alpha_circ,
    simple_roots,
)
from .numkernel import (
    RANK_TOL,
    RankReport,
    max_angle,
    span,
    subspace_intersect,
    svd_rank,
)
from .strata import (
    CriticalSample,
    nilpotent_witness_sl3,
    orbit_restricted_rank,
    sample_critical,
)

CODIM_ONE = "CodimOneCertified"
CODIM_TWO = "CodimTwoConsistent"
INCONCLUSIVE = "Inconclusive"

ANGLE_TOL = 1e-6
POISSON_TOL = 1e-8
BOREL_TOL = 1e-10
SINGLETON_TOL = 1e-10


def restricted_rank(sys: ShiftSystem, sample: CriticalSample, tol: float = RANK_TOL) -> RankReport:
    """Rank of the system differential on the tangent space of a smooth critical sample."""
    if not sample.smooth_certified:
        raise NotSmooth("sample is not a certified smooth point")
    return svd_rank(weighted_jacobian(sys, sample.x) @ sample.tangent.basis.T, tol, scale=1.0)


@dataclass
class SampleRecord:
    index: int
    seed: int | None
    alpha: tuple[int, int]
    rank: int | None
    tangent_dim: int | None
    singular_values: list[float] = field(default_factory=list)
    witness: dict | None = None
    failure: str | None = None

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "seed": self.seed,
            "alpha": list(self.alpha),
            "rank": self.rank,
            "tangent_dim": self.tangent_dim,
            "singular_values": self.singular_values,
            "witness": self.witness,
            "failure": self.failure,
        }


@dataclass
class CodimCertificate:
    n: int
    shift_kind: str
    shift_matrix: np.ndarray = field(repr=False)
    samples_used: int
    max_restricted_rank: int
    b: int
    verdict: str
    witness: dict | None
    records: list[SampleRecord] = field(default_factory=list, repr=False)

    @property
    def failures(self) -> list[SampleRecord]:
        return [r for r in self.records if r.failure is not None]

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "max_rank": self.max_restricted_rank,
            "b": self.b,
            "samples_used": self.samples_used,
            "witness": self.witness,
            "samples": [r.as_dict() for r in self.records],
        }


def _sample_seeds(rng, count):
    return [int(s) for s in rng.integers(0, 2**63 - 1, size=count, dtype=np.int64)]


def _draw(sys, index, alpha, seed, tol):
    rng = np.random.default_rng(seed)
    try:
        sample = sample_critical(sys, alpha, rng, seed=seed, tol=tol)
    except SmoothnessFailed as exc:
        return SampleRecord(index, seed, tuple(alpha), None, None, witness=exc.repro,
                            failure=str(exc))
    rep = restricted_rank(sys, sample, tol)
    return SampleRecord(index, seed, tuple(alpha), rep.rank, sample.tangent.dim,
                        [float(v) for v in rep.singular_values], sample.witness.as_dict())


def draw_samples(sys: ShiftSystem, budget: int, rng, tol: float = RANK_TOL,
                 threads: int = 1, alphas=None) -> list[SampleRecord]:
    """Semisimple critical samples cycling through ``alphas`` (default: simple roots).

    Every sample gets its own seed from ``rng`` up front, so the result does not
    depend on ``threads``.
    """
    alphas = list(alphas) if alphas is not None else simple_roots(sys.n)
    seeds = _sample_seeds(rng, budget)
    jobs = [(k, alphas[k % len(alphas)], seeds[k]) for k in range(budget)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda j: _draw(sys, *j, tol), jobs))
    return [_draw(sys, *j, tol) for j in jobs]


def certify_codim(sys: ShiftSystem, sample_budget: int, rng, tol: float = RANK_TOL,
                  threads: int = 1) -> CodimCertificate:
    """Codimension certificate for the bifurcation diagram of ``sys``.

    Codimension one is certified by any smooth sample with restricted rank
    ``b - 1``. Codimension two is only claimed for nilpotent shifts in sl_2,
    where the samples cover the whole critical set ``C a``.
    """
    if sample_budget < 1:
        raise ValueError("sample budget must be >= 1")
    records = []
    if sys.n == 3 and sys.is_nilpotent:
        w = nilpotent_witness_sl3(sys, tol)
        if w.smooth_certified:
            rep = restricted_rank(sys, w, tol)
            records.append(SampleRecord(-1, None, (0, 1), rep.rank, w.tangent.dim,
                                        [float(v) for v in rep.singular_values],
                                        w.witness.as_dict()))
    records.extend(draw_samples(sys, sample_budget, rng, tol, threads))
    ranks = [r.rank for r in records if r.rank is not None]
    max_rank = max(ranks) if ranks else -1
    target = sys.b - 1
    best = next((r for r in records if r.rank == target), None)
    if best is not None:
        verdict, witness = CODIM_ONE, best.witness
    elif sys.n == 2 and sys.is_nilpotent and ranks and max_rank <= sys.b - 2:
        verdict = CODIM_TWO
        witness = next(r for r in records if r.rank == max_rank).witness
    else:
        verdict = INCONCLUSIVE
        witness = next((r.witness for r in records if r.rank == max_rank), None)
    return CodimCertificate(
        n=sys.n, shift_kind=sys.kind, shift_matrix=np.array(sys.a),
        samples_used=len(records), max_restricted_rank=max_rank, b=sys.b,
        verdict=verdict, witness=witness, records=records,
    )


def singleton_check_sl2(sys: ShiftSystem, sample_count: int, rng) -> dict:
    """Largest ``|F_a(t a)|`` over ``t`` in the unit disc, for a nilpotent shift in sl_2."""
    if sys.n != 2:
        raise WrongAlgebra("singleton check is specific to sl_2")
    if not sys.is_nilpotent:
        raise WrongShiftKind("singleton check needs a nilpotent shift")
    dev = 0.0
    for _ in range(sample_count):
        t = np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        dev = max(dev, float(np.linalg.norm(eval_F(sys, t * sys.a))))
    return {"max_deviation": dev, "samples": sample_count}


# ---------------------------------------------------------------------------
# shift construction and the verification suite
# ---------------------------------------------------------------------------


def generic_diagonal(n: int) -> np.ndarray:
    """``(n-1, n-3, ..., 1-n)``: integer, traceless, every root value nonzero."""
    return np.arange(n - 1, -n, -2, dtype=float)


def make_shift(n: int, spec) -> np.ndarray:
    """``xi + diag(y)`` from ``"nilpotent"``, ``"generic"`` or explicit diagonal values.

    Explicit values are shifted by their mean to make them traceless.
    """
    xi = regular_nilpotent(n)
    if isinstance(spec, str) and spec == "nilpotent":
        return xi
    if isinstance(spec, str) and spec == "generic":
        y = generic_diagonal(n)
    else:
        y = np.asarray(spec, dtype=float)
        if y.shape != (n,):
            raise ValueError(f"diagonal spec needs {n} entries, got {y.size}")
        y = y - y.mean()
    return xi + np.diag(y).astype(np.complex128)


def _cplx(z):
    return [float(np.real(z)), float(np.imag(z))]


def random_element(n, rng, scale=1.0):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    z -= np.trace(z) / n * np.eye(n)
    return scale * z


def random_cartan(n, rng):
    d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return np.diag(d - d.mean())


def constructed_singular(n, rng):
    """A random conjugated point of g_sing (semisimple, nilpotent or mixed type)."""
    alpha = simple_roots(n)[rng.integers(n - 1)]
    kind = rng.integers(3)
    if kind == 0:
        x = sample_ker_alpha_circ(n, alpha, rng)
    elif kind == 1:
        # subregular nilpotent: drop one subdiagonal entry of xi
        x = regular_nilpotent(n)
        x[alpha[1], alpha[0]] = 0.0
    else:
        # any element of ker(alpha), coincident eigenvalues allowed
        d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        d[alpha[1]] = d[alpha[0]]
        x = np.diag(d - d.mean())
    return random_conjugator(n, rng).apply(x)


@dataclass
class Assertion:
    name: str
    anchor: str
    expected: object
    measured: object
    passed: bool | None

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "paper_anchor": self.anchor,
            "expected": _plain(self.expected),
            "measured": _plain(self.measured),
            "pass": None if self.passed is None else bool(self.passed),
        }


def _plain(v):
    # numpy scalars and containers to JSON-ready Python values
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    return v


def expected_verdict(n: int, nilpotent: bool) -> str | None:
    """Expected verdict; ``None`` where only exploratory runs are possible."""
    if not nilpotent:
        return CODIM_ONE
    if n == 2:
        return CODIM_TWO
    if n == 3:
        return CODIM_ONE
    return None


def verify_theorem(n: int, shift_spec, budget: int, rng, tol: float = RANK_TOL,
                   threads: int = 1) -> dict:
    """Run the full rank verification suite for one shift and return a structured report."""
    if not 2 <= n <= 4:
        raise ValueError("verification is certified for n = 2, 3, 4 only")
    alg = algebra(n)
    a = make_shift(n, shift_spec)
    # regularity of the shift is an input check, made at the default cutoff
    sys = new_shift_system(a)
    y = np.real(np.diag(a))
    out: list[Assertion] = []
    add = lambda *args: out.append(Assertion(*args))

    add("degree_sum", "degrees of the basic invariants sum to b", alg.b, int(sum(alg.degrees)),
        sum(alg.degrees) == alg.b)

    # Poisson commutativity and integrability at random points
    pts = [random_element(n, rng) for _ in range(budget)]
    worst = 0.0
    min_dim = alg.dim
    for x in pts:
        g = grad_F(sys, x)
        for p in range(sys.b):
            for q in range(p + 1, sys.b):
                scale = np.linalg.norm(x) * np.linalg.norm(g[p]) * np.linalg.norm(g[q])
                val = abs(poisson_bracket(sys, sys.labels[p], sys.labels[q], x, grads=g))
                worst = max(worst, val / scale if scale > 0 else val)
        min_dim = min(min_dim, nabla_FA_span(sys, x, tol).dim)
    add("poisson_commutativity", "generators Poisson-commute", f"<= {POISSON_TOL:g}", worst,
        worst <= POISSON_TOL)
    add("gradient_span_dimension", "b independent generators at generic points", sys.b, min_dim,
        min_dim == sys.b)

    worst = 0.0
    for x in pts[: min(budget, 10)]:
        worst = max(worst, max_angle(nabla_FA_span(sys, x, tol), centralizer_span(sys, x, rng=rng, tol=tol)))
    add("gradient_span_equals_centralizer_span",
        "generator gradients span the sum of centralizers along the shift line",
        f"< {ANGLE_TOL:g}", worst, worst < ANGLE_TOL)

    # adjoint quotient at subregular semisimple points
    ranks, angles = [], []
    for k in range(budget):
        alpha = simple_roots(n)[k % (n - 1)]
        h = sample_ker_alpha_circ(n, alpha, rng)
        x = random_conjugator(n, rng).apply(h)
        ranks.append(dchi_rank(x, tol).rank)
        reg = random_conjugator(n, rng).apply(random_cartan(n, rng))
        for p in (x, reg):
            cen = center(centralizer(p, tol), n, tol)
            angles.append(max_angle(nabla_I(p, tol), cen))
    add("adjoint_quotient_rank_subregular", "d(chi) has rank l-1 at subregular semisimple points",
        alg.rank - 1, sorted(set(ranks)), set(ranks) == {alg.rank - 1})
    add("invariant_gradients_equal_centre", "invariant gradients span the centre of the centralizer",
        f"< {ANGLE_TOL:g}", max(angles), max(angles) < ANGLE_TOL)

    # orbit rank, lower-Borel evaluation, Levi intersection at ker(alpha)° points
    orbit_ranks, levi_dims, levi_angles = [], [], []
    for alpha in simple_roots(n):
        L = levi_data(n, alpha)
        c = root_value(alpha, y) / 2
        d = L.e_neg + c * L.h_alpha
        dspan = span([alg.coords(d)], ambient_dim=alg.dim)
        for _ in range(max(1, budget // (n - 1))):
            h = sample_ker_alpha_circ(n, alpha, rng)
            orbit_ranks.append(orbit_restricted_rank(sys, h, tol).rank)
            inter = subspace_intersect(nabla_FA_span(sys, h, tol), L.levi_comm)
            levi_dims.append(inter.dim)
            if inter.dim == 1:
                levi_angles.append(max_angle(inter, dspan))
    add("orbit_restricted_rank", "F_a restricted to the orbit has rank u-1 at ker(alpha)° points",
        alg.u - 1, sorted(set(orbit_ranks)), set(orbit_ranks) == {alg.u - 1})
    levi_ok = set(levi_dims) == {1} and max(levi_angles, default=np.inf) < ANGLE_TOL
    add("levi_intersection",
        "gradients meet [l_alpha, l_alpha] in the line through e_-alpha + c h_alpha",
        {"dim": 1, "angle": f"< {ANGLE_TOL:g}"},
        {"dims": sorted(set(levi_dims)), "max_angle": max(levi_angles, default=None)}, levi_ok)

    worst = 0.0
    for _ in range(min(budget, 10)):
        x = random_cartan(n, rng)
        for gr in grad_F(sys, x):
            worst = max(worst, np.linalg.norm(np.triu(gr, 1)) / max(np.linalg.norm(gr), 1e-300))
    add("gradients_in_lower_borel", "gradients at Cartan points lie in the lower Borel",
        f"<= {BOREL_TOL:g}", worst, worst <= BOREL_TOL)

    # critical-set characterization
    crit_ranks = [jacobian_rank(sys, constructed_singular(n, rng) + complex(rng.standard_normal()) * a,
                                tol).rank for _ in range(budget)]
    gen_ranks = [jacobian_rank(sys, random_element(n, rng), tol).rank for _ in range(budget)]
    miss = sum(r >= sys.b for r in crit_ranks) + sum(r != sys.b for r in gen_ranks)
    add("critical_set_characterization", "rank dF_a < b exactly on g_sing + C a", 0, miss, miss == 0)

    # restricted ranks on the semisimple strata
    records = draw_samples(sys, budget, rng, tol, threads)
    good_alphas = [al for al in simple_roots(n) if abs(root_value(al, y)) > 1e-12]
    pointwise = [r.rank for r in records if tuple(r.alpha) in good_alphas]
    failures = sum(r.failure is not None for r in records)
    if good_alphas:
        ok = failures == 0 and bool(pointwise) and set(pointwise) == {sys.b - 1}
        add("restricted_rank_pointwise", "rank b-1 at every smooth ker(alpha)° sample with alpha(y) != 0",
            sys.b - 1, sorted(set(r for r in pointwise if r is not None)), ok)
    else:
        add("restricted_rank_pointwise", "exploratory: nilpotent shift, no pointwise claim",
            None, sorted(set(r.rank for r in records if r.rank is not None)), None)

    if n == 3 and sys.is_nilpotent:
        w = nilpotent_witness_sl3(sys, tol)
        rep = restricted_rank(sys, w, tol) if w.smooth_certified else None
        measured = {"rank": rep.rank if rep else None,
                    "kernel_dim": (w.tangent.dim - rep.rank) if rep else None,
                    "tangent_dim": w.tangent.dim}
        add("sl3_nilpotent_witness", "rank four at e_alpha with a two-dimensional kernel in the tangent",
            {"rank": 4, "kernel_dim": 2, "tangent_dim": 6}, measured,
            measured == {"rank": 4, "kernel_dim": 2, "tangent_dim": 6})

    if n == 2 and sys.is_nilpotent:
        dev = singleton_check_sl2(sys, 100, rng)["max_deviation"]
        add("sl2_singleton", "F_xi vanishes on the critical line C xi", f"<= {SINGLETON_TOL:g}", dev,
            dev <= SINGLETON_TOL)

    cert = certify_codim(sys, budget, rng, tol, threads)
    add("max_rank_bound", "restricted rank never exceeds b-1", sys.b - 1, cert.max_restricted_rank,
        cert.max_restricted_rank <= sys.b - 1)
    expected = expected_verdict(n, sys.is_nilpotent)
    if expected is None:
        add("certificate_verdict", "exploratory: nilpotent shift beyond sl_3", None, cert.verdict, None)
    else:
        add("certificate_verdict", "codimension of the bifurcation diagram", expected, cert.verdict,
            cert.verdict == expected)

    return {
        "algebra": alg.as_dict(),
        "shift": {"kind": sys.kind, "matrix": [[_cplx(v) for v in row] for row in sys.a]},
        "assertions": [a_.as_dict() for a_ in out],
        "certificate": cert.as_dict(),
        "verdict": {CODIM_ONE: "codim 1", CODIM_TWO: "codim 2"}.get(cert.verdict, "inconclusive"),
        "all_passed": all(a_.passed is not False for a_ in out),
    }
