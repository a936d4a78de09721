"""Compare the numba and numpy kernels on the workloads the engine runs.

Usage::

    python benchmarks/bench_kernels.py [--repeat N] [--batch B]

Each kernel is warmed up once (numba compiles on the first call), then timed
as the best of ``--repeat`` runs. Results are checked for equality.
"""

import argparse
import time

import numpy as np

from hybridft import _accel, kernels
from hybridft.codes import make_code
from hybridft.concat import build_concat, preset
from hybridft.decoder import decoder_plan, syndrome_table


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def workloads(batch):
    flat = build_concat(preset("c23")).flat
    L = flat.logical_z

    def coset():
        return kernels.coset_min_weight(flat.gen_x, flat.gen_z, L.x, L.z)

    rm15 = make_code("rm15")
    tab = syndrome_table(rm15)
    spx, spz = kernels._span(rm15.gen_x, rm15.gen_z)
    hyps = tab.hypotheses()
    hx = [h[0] for h in hyps]
    hz = [h[1] for h in hyps]

    def leaf():
        return kernels.leaf_costs(tab.tx[:256], tab.tz[:256], hx, hz, spx, spz)

    cc = build_concat(preset("c49"))
    plan = decoder_plan(cc)
    rng = np.random.default_rng(0)
    mask = (1 << 49) - 1
    xs = [int(v) & mask for v in rng.integers(0, 2**62, batch)]
    zs = [int(v) & mask for v in rng.integers(0, 2**62, batch)]
    ex = kernels.ints_to_words(xs, plan.words)
    ez = kernels.ints_to_words(zs, plan.words)

    def decode():
        return plan.decode_words(ex, ez)

    return {"coset_min_weight c23 (2^22)": coset, "leaf_costs rm15 (256 syndromes)": leaf,
            f"decode c49 batch {batch}": decode}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--batch", type=int, default=1 << 15)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba unavailable (or disabled by HYBRIDFT_DISABLE_NUMBA); nothing to compare")
    jobs = workloads(args.batch)
    print(f"{'kernel':36s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, fn in jobs.items():
        res = {}
        for be in ("numpy", "numba"):
            prev = _accel.set_backend(be)
            try:
                res[be] = best_of(fn, args.repeat)
            finally:
                _accel.set_backend(prev)
        (tn, on), (tb, ob) = res["numpy"], res["numba"]
        assert np.array_equal(np.asarray(on), np.asarray(ob)), name
        print(f"{name:36s} {tn:10.4f} {tb:10.4f} {tn / tb:8.1f}x")


if __name__ == "__main__":
    main()
