"""Compare the numba and numpy kernel backends.

    python benchmarks/bench_kernels.py --repeat 5 --batch 256

Each kernel is checked for agreement first, then timed with ``timeit`` on
both backends. Compilation happens in an untimed warm-up call.
"""
import argparse
import timeit

import numpy as np

from mfshift import _kernels
from mfshift.invariants import _gradient_columns, _hessian_columns, minor_subsets


def _cases(batch, rng):
    cases = []
    for n in (3, 4):
        mats = rng.standard_normal((batch, n, n)) + 1j * rng.standard_normal((batch, n, n))
        cases.append((f"power_stack n={n} batch={batch}", "power_stack", (mats, n)))
        cases.append((f"trace_powers n={n} batch={batch}", "trace_powers", (mats, n)))
        y = mats[0] - np.trace(mats[0]) / n * np.eye(n)
        args = (_gradient_columns(y), _hessian_columns(y), minor_subsets(n))
        cases.append((f"minors_jacobian n={n} ({len(args[2])} minors)", "minors_jacobian", args))
    return cases


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--number", type=int, default=20)
    p.add_argument("--batch", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    if _kernels.numba_impl is None:
        print("numba is not importable; nothing to compare")
        return 1
    impls = {"numpy": _kernels.numpy_impl, "numba": _kernels.numba_impl}
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':40s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for label, name, fargs in _cases(args.batch, rng):
        outs = {k: getattr(impl, name)(*fargs) for k, impl in impls.items()}   # warm-up
        ref, got = outs["numpy"], outs["numba"]
        ref = ref if isinstance(ref, tuple) else (ref,)
        got = got if isinstance(got, tuple) else (got,)
        for r, g in zip(ref, got):
            scale = max(1.0, float(np.abs(r).max()))
            assert np.allclose(r, g, atol=1e-10 * scale), f"backends disagree on {label}"
        times = {}
        for k, impl in impls.items():
            fn = getattr(impl, name)
            t = timeit.repeat(lambda: fn(*fargs), repeat=args.repeat, number=args.number)
            times[k] = 1000.0 * min(t) / args.number
        print(f"{label:40s} {times['numpy']:10.4f} {times['numba']:10.4f} "
              f"{times['numpy'] / times['numba']:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
