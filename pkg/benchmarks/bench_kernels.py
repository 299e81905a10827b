"""Compare the numba and numpy kernel backends.

Each backend runs in its own interpreter because the choice is fixed at
import time by ``THATSTREAM_BACKEND``. A warm-up pass absorbs JIT
compilation before anything is timed.

Usage::

    python3 benchmarks/bench_kernels.py [--repeats 3] [--n 20000]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = "--worker"


def _workloads(n: int):
    import numpy as np

    from thatstream import Adwin, HoeffdingTree, NaiveAdwin, PMU_SCHEMA, SIGNATURES, DriftSpec, SignatureSpec
    from thatstream.pmu import SignatureStream

    bits = (np.random.default_rng(0).random(n) < np.repeat([0.2, 0.8], [n // 2, n - n // 2])).astype(float)
    spec = SignatureSpec(SIGNATURES[0].osc_freq_range, SIGNATURES[0].duration_threshold, n_per_class=n // 2)
    data = list(SignatureStream(spec, DriftSpec((n // 4, n // 2), 200.0), seed=0))

    def adwin_bucketed():
        w = Adwin()
        for x in bits:
            w.add(x)

    def adwin_naive():
        w = NaiveAdwin()
        for x in bits[: n // 10]:
            w.add(x)

    def tree_train():
        t = HoeffdingTree(PMU_SCHEMA)
        for inst in data:
            t.predict(inst)
            t.train(inst)

    return {"adwin_bucketed": adwin_bucketed, "adwin_naive": adwin_naive, "tree_prequential": tree_train}


def worker(n: int, repeats: int) -> None:
    from thatstream import BACKEND

    jobs = _workloads(n)
    for job in jobs.values():
        job()  # warm-up and JIT compile
    result = {"backend": BACKEND}
    for name, job in jobs.items():
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            job()
            best = min(best, time.perf_counter() - t0)
        result[name] = best
    print(json.dumps(result))


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20_000, help="instances per workload")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument(WORKER, action="store_true", help=argparse.SUPPRESS)
    args = p.parse_args(argv)
    if args.worker:
        worker(args.n, args.repeats)
        return 0

    rows = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, THATSTREAM_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, __file__, WORKER, "--n", str(args.n), "--repeats", str(args.repeats)],
            env=env, check=True, capture_output=True, text=True,
        ).stdout
        rows[backend] = json.loads(out.strip().splitlines()[-1])
        assert rows[backend]["backend"] == backend, rows[backend]

    names = [k for k in rows["numba"] if k != "backend"]
    print(f"{'workload':<18} {'numba s':>9} {'numpy s':>9} {'speedup':>8}")
    for name in names:
        a, b = rows["numba"][name], rows["numpy"][name]
        print(f"{name:<18} {a:>9.3f} {b:>9.3f} {b / a:>7.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
