"""Compare the compiled kernels with the numpy fallback.

Run ``python3 benchmarks/bench_kernels.py``.  Kernel timings are taken
in-process through ``_backend.get``; the end-to-end timings run a bootstrap
panel test in a subprocess per backend so the whole package uses one of them.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from panelgranger import _backend

END_TO_END = """
import time
from panelgranger import preset, simulate_panel, dh_block_bootstrap, backend
panel = simulate_panel(preset("experiment2", seed=1)).panel
t0 = time.perf_counter()
dh_block_bootstrap(panel, 1, breps={breps}, seed=3)
print(backend, time.perf_counter() - t0)
"""


def _cases(rng):
    N, T, P = 30, 100, 2
    Y, X = rng.standard_normal((2, N, T))
    A = rng.standard_normal((T, 2 * P + 1))
    b = rng.standard_normal(T)
    coef = np.column_stack([np.zeros(N), np.full((N, P), 0.2)])
    resid = rng.standard_normal((N, T - P))
    init = rng.standard_normal((N, P))
    d = rng.uniform(0.2, 0.8, N)
    eta, eps = rng.standard_normal((2, N, T + 50))
    return {
        "householder_lstsq 100x5": lambda k: k.householder_lstsq(A, b),
        "nested_rss_batch 30x100 P=2": lambda k: k.nested_rss_batch(Y, X, P),
        "simulate_ar1_pair 30x150": lambda k: k.simulate_ar1_pair(d, d, d, eta, eps, False),
        "rebuild_null_ar 30x100 P=2": lambda k: k.rebuild_null_ar(coef, resid, init),
        "betainc_reg": lambda k: k.betainc_reg(3.5, 40.0, 0.3),
    }


def bench_kernels(number: int) -> list[tuple[str, float, float | None]]:
    rng = np.random.default_rng(0)
    backends = ["numpy"] + (["cython"] if _backend.compiled is not None else [])
    rows = []
    for label, fn in _cases(rng).items():
        times = {}
        for b in backends:
            k = _backend.get(b)
            times[b] = min(timeit.repeat(lambda: fn(k), number=number, repeat=3)) / number
        rows.append((label, times["numpy"], times.get("cython")))
    return rows


def bench_end_to_end(breps: int) -> dict[str, float]:
    out = {}
    for b, flag in (("numpy", "1"), ("cython", "0")):
        if b == "cython" and _backend.compiled is None:
            continue
        env = dict(os.environ, PANELGRANGER_PURE_PYTHON=flag)
        res = subprocess.run([sys.executable, "-c", END_TO_END.format(breps=breps)],
                             env=env, capture_output=True, text=True, check=True)
        name, secs = res.stdout.split()
        out[name] = float(secs)
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--number", type=int, default=200, help="calls per kernel timing")
    ap.add_argument("--breps", type=int, default=99, help="bootstrap draws in the end-to-end run")
    args = ap.parse_args(argv)

    print(f"{'kernel':32s} {'numpy us':>10s} {'cython us':>10s} {'speedup':>8s}")
    for label, t_np, t_cy in bench_kernels(args.number):
        cy = f"{t_cy * 1e6:10.1f}" if t_cy is not None else f"{'n/a':>10s}"
        sp = f"{t_np / t_cy:8.1f}" if t_cy else f"{'':>8s}"
        print(f"{label:32s} {t_np * 1e6:10.1f} {cy} {sp}")
    e2e = bench_end_to_end(args.breps)
    print(f"\nbootstrap panel test, N=30, T=100, B={args.breps}:")
    for name, secs in e2e.items():
        print(f"  {name:7s} {secs:.3f} s")


if __name__ == "__main__":
    main()
