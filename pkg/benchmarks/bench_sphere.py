"""Timing comparison of the two sphere-search kernels.

The compiled extension and the NumPy fallback implement the identical
algorithm (same arithmetic, same node visit order); this script measures
how much the compiled tree search buys on realistic decode workloads and
double-checks that the two kernels agree on every instance it times.

Run:  python3 benchmarks/bench_sphere.py [n_instances]
"""

import sys
import time

import numpy as np

from xnetsim import codes, constellations, network
from xnetsim._sphere_py import sphere_search as search_py

try:
    from xnetsim._spherekernel import sphere_search as search_cy
except ImportError:
    search_cy = None

CASES = [
    ("alamouti", "qpsk", 10.0),
    ("alamouti", "qam16", 16.0),
    ("lowdelay3", "qpsk-rot", 12.0),
    ("srinath-rajan", "qpsk", 14.0),
]


def prepared_instances(name, cname, snr_db, n, seed):
    code = codes.code_by_name(name)
    ccode = codes.cc_normalized(code)
    con = constellations.by_name(cname)
    snr = network.Snr.from_db(snr_db)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        ch = network.draw_channel(rng, code.m)
        pre = network.alignment_precoders(ch)
        sym = con.points[rng.integers(0, len(con), size=(4, code.k))]
        x1, x2 = network.assemble_transmit(code, sym[0], sym[1], sym[2], sym[3], pre, snr)
        y1, _ = network.receive(ch, x1, x2, rng, noise_on=True)
        yp = network.cancel_interference(y1, ccode.cc, 1)
        sys_ = network.build_effective_real_system(
            ccode, ch.h11 @ pre.v11, ch.h21 @ pre.v21, yp, snr, 1
        )
        h, y = sys_.whitened()
        q, r = np.linalg.qr(h)
        out.append(
            (
                np.ascontiguousarray(r),
                np.ascontiguousarray(q.T @ y),
                np.ascontiguousarray(con.points.real),
                np.ascontiguousarray(con.points.imag),
            )
        )
    return out


def run_all(kernel, instances):
    t0 = time.perf_counter()
    results = [kernel(*args) for args in instances]
    return time.perf_counter() - t0, results


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    print(f"{'case':34s} {'pure (ms)':>10s} {'ext (ms)':>10s} {'speedup':>8s}  nodes/decode")
    for name, cname, snr_db in CASES:
        instances = prepared_instances(name, cname, snr_db, n, seed=0)
        t_py, res_py = run_all(search_py, instances)
        nodes = np.mean([r[2] for r in res_py])
        label = f"{name}/{cname}@{snr_db:g}dB"
        if search_cy is None:
            print(f"{label:34s} {1e3 * t_py / n:10.3f} {'-':>10s} {'-':>8s}  {nodes:.1f}")
            continue
        t_cy, res_cy = run_all(search_cy, instances)
        for (pi, pm, pn), (ci, cm, cn) in zip(res_py, res_cy):
            assert np.array_equal(np.asarray(pi), np.asarray(ci)) and pm == cm and pn == cn
        print(
            f"{label:34s} {1e3 * t_py / n:10.3f} {1e3 * t_cy / n:10.3f}"
            f" {t_py / t_cy:7.1f}x  {nodes:.1f}"
        )
    if search_cy is None:
        print("\nextension not importable; only the pure kernel was timed")


if __name__ == "__main__":
    main()
