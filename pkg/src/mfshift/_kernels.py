"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The active backend is chosen once at import time. Set ``MFSHIFT_NO_NUMBA=1``
to force the numpy path (also used automatically when numba is missing).
Both implementations are always importable as ``numpy_impl`` and
``numba_impl`` (the latter is ``None`` without numba) so tests and the
benchmark can compare them directly.
"""
import os
import time
from types import SimpleNamespace

import numpy as np

# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _power_stack_np(mats, kmax):
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    nb, n, _ = mats.shape
    out = np.empty((nb, kmax + 1, n, n), dtype=np.complex128)
    out[:, 0] = np.eye(n)
    for k in range(1, kmax + 1):
        out[:, k] = out[:, k - 1] @ mats
    return out


def _trace_powers_np(mats, kmax):
    pw = _power_stack_np(mats, kmax)
    return np.trace(pw, axis1=2, axis2=3)


def _minors_jacobian_np(A, dA, subsets):
    A = np.asarray(A, dtype=np.complex128)
    dA = np.asarray(dA, dtype=np.complex128)
    ell = A.shape[1]
    As = A[subsets]                       # (m, ell, ell)
    minors = np.linalg.det(As) if ell else np.ones(len(subsets), np.complex128)
    dAs = dA[:, subsets]                  # (ndir, m, ell, ell)
    jac = np.zeros((len(subsets), dA.shape[0]), dtype=np.complex128)
    for c in range(ell):
        R = np.broadcast_to(As, dAs.shape).copy()
        R[..., c] = dAs[..., c]
        jac += np.linalg.det(R).T
    return minors, jac


numpy_impl = SimpleNamespace(
    name="numpy",
    power_stack=_power_stack_np,
    trace_powers=_trace_powers_np,
    minors_jacobian=_minors_jacobian_np,
)

# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

try:
    import numba
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

numba_impl = None

if numba is not None:

    @njit(cache=True)
    def _power_stack_nb(mats, kmax):
        nb, n, _ = mats.shape
        out = np.zeros((nb, kmax + 1, n, n), dtype=np.complex128)
        for b in range(nb):
            for i in range(n):
                out[b, 0, i, i] = 1.0
            for k in range(1, kmax + 1):
                for i in range(n):
                    for j in range(n):
                        acc = 0j
                        for p in range(n):
                            acc += out[b, k - 1, i, p] * mats[b, p, j]
                        out[b, k, i, j] = acc
        return out

    @njit(cache=True)
    def _trace_powers_nb(mats, kmax):
        pw = _power_stack_nb(mats, kmax)
        nb = mats.shape[0]
        n = mats.shape[1]
        out = np.zeros((nb, kmax + 1), dtype=np.complex128)
        for b in range(nb):
            for k in range(kmax + 1):
                acc = 0j
                for i in range(n):
                    acc += pw[b, k, i, i]
                out[b, k] = acc
        return out

    @njit(cache=True)
    def _small_det(M):
        # Gaussian elimination with partial pivoting on a scratch copy.
        n = M.shape[0]
        W = M.copy()
        det = 1.0 + 0j
        for c in range(n):
            piv = c
            best = abs(W[c, c])
            for r in range(c + 1, n):
                if abs(W[r, c]) > best:
                    best = abs(W[r, c])
                    piv = r
            if best == 0.0:
                return 0j
            if piv != c:
                for k in range(n):
                    tmp = W[c, k]
                    W[c, k] = W[piv, k]
                    W[piv, k] = tmp
                det = -det
            det *= W[c, c]
            for r in range(c + 1, n):
                f = W[r, c] / W[c, c]
                for k in range(c, n):
                    W[r, k] -= f * W[c, k]
        return det

    @njit(cache=True)
    def _minors_jacobian_nb(A, dA, subsets):
        m, ell = subsets.shape
        ndir = dA.shape[0]
        minors = np.empty(m, dtype=np.complex128)
        jac = np.zeros((m, ndir), dtype=np.complex128)
        S = np.empty((ell, ell), dtype=np.complex128)
        R = np.empty((ell, ell), dtype=np.complex128)
        for s in range(m):
            for r in range(ell):
                for c in range(ell):
                    S[r, c] = A[subsets[s, r], c]
            minors[s] = _small_det(S)
            for d in range(ndir):
                acc = 0j
                for c in range(ell):
                    for r in range(ell):
                        for cc in range(ell):
                            R[r, cc] = S[r, cc]
                        R[r, c] = dA[d, subsets[s, r], c]
                    acc += _small_det(R)
                jac[s, d] = acc
        return minors, jac

    def _arg(x, dtype):
        # one compiled signature: C-contiguous and writable (readonly arrays are a separate numba type)
        return np.require(x, dtype=dtype, requirements=["C", "W"])

    def _power_stack_nb_entry(mats, kmax):
        return _power_stack_nb(_arg(mats, np.complex128), int(kmax))

    def _trace_powers_nb_entry(mats, kmax):
        return _trace_powers_nb(_arg(mats, np.complex128), int(kmax))

    def _minors_jacobian_nb_entry(A, dA, subsets):
        return _minors_jacobian_nb(_arg(A, np.complex128), _arg(dA, np.complex128),
                                   _arg(subsets, np.int64))

    numba_impl = SimpleNamespace(
        name="numba",
        power_stack=_power_stack_nb_entry,
        trace_powers=_trace_powers_nb_entry,
        minors_jacobian=_minors_jacobian_nb_entry,
    )


def _select():
    flag = os.environ.get("MFSHIFT_NO_NUMBA", "").strip().lower()
    if numba_impl is None or flag in ("1", "true", "yes", "on"):
        return numpy_impl
    return numba_impl


active = _select()
BACKEND = active.name

power_stack = active.power_stack
trace_powers = active.trace_powers
minors_jacobian = active.minors_jacobian


def warmup() -> float:
    """Call every kernel once on tiny inputs (compiles them under numba); returns seconds."""
    t0 = time.perf_counter()
    m = np.eye(2, dtype=np.complex128)[None]
    power_stack(m, 2)
    trace_powers(m, 2)
    minors_jacobian(np.ones((3, 1), dtype=np.complex128), np.ones((3, 3, 1), dtype=np.complex128),
                    np.array([[0], [1]], dtype=np.int64))
    return time.perf_counter() - t0
