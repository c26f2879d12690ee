"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because TRAPKIT_NUMBA is read at
import time.  Usage:

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
import numpy as np
from trapkit import _accel, deciders, funcgraph
from trapkit.model import Dnf, convert
from trapkit.reductions import gen_dnf_taut_chain
from trapkit.sampling import random_dnf, random_network

repeat = int(sys.argv[1])

def best(fn):
    fn()  # compile / warm caches
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

rng = np.random.default_rng(0)
chain = gen_dnf_taut_chain(random_dnf(rng, 150, 100), 150).network
chain_tt = convert(chain, "tt")
# y1 | !y1 | y2 & y3 | !y4 over 5 variables: tautology, N = 15
phi = Dnf((((1, True),), ((1, False),), ((2, True), (3, True)), ((4, False),)))
taut = convert(gen_dnf_taut_chain(phi, 5).network, "tt")
net12 = random_network(np.random.default_rng(1), 12)
cubes = ["".join(rng.choice(list("01*"), size=8)) for _ in range(200)]
net8 = random_network(np.random.default_rng(2), 8)

rows = {
    "trapspace chain N=352 (tt)": best(lambda: deciders.trapspace(chain_tt, "*" * chain_tt.n)),
    "mintrap chain tautology N=15 (tt)": best(lambda: deciders.mintrap(taut, "*" * taut.n)),
    "mintrap x200 random n=8": best(lambda: [deciders.mintrap(net8, h) for h in cubes]),
    "build graph + terminal SCCs n=12": best(
        lambda: funcgraph.terminal_sccs(funcgraph.build_functional_graph(net12))),
}
print(json.dumps({"backend": _accel.backend(), "rows": rows}))
"""


def run(flag, repeat):
    env = dict(os.environ, TRAPKIT_NUMBA=flag)
    res = subprocess.run(
        [sys.executable, "-c", WORKLOAD, str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = run("1", args.repeat)
    slow = run("0", args.repeat)
    width = max(map(len, fast["rows"]))
    print(f"{'workload':<{width}}  {fast['backend']:>10}  {slow['backend']:>10}  speedup")
    for name, t in fast["rows"].items():
        s = slow["rows"][name]
        print(f"{name:<{width}}  {t * 1000:>8.2f}ms  {s * 1000:>8.2f}ms  {s / t:>6.1f}x")


if __name__ == "__main__":
    main()
