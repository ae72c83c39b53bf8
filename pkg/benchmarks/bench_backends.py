"""Compare the compiled and pure-Python group backends.

Times the primitive kernels directly on each backend module, then runs one
compact spend + verify end to end under each backend in a subprocess.

    python benchmarks/bench_backends.py [--iters N] [--skip-protocol]
"""

from __future__ import annotations

import argparse
import json
import os
import random
import statistics
import subprocess
import sys
import time

from tecash import _purepy

try:
    from tecash import _native
except ImportError:  # extension not built
    _native = None


def _time(fn, iters):
    fn()
    out = []
    for _ in range(iters):
        t0 = time.perf_counter()
        fn()
        out.append((time.perf_counter() - t0) * 1e3)
    return statistics.fmean(out)


def kernels(mod, iters, rng):
    g1, g2 = mod.G1.generator(), mod.G2.generator()
    k = rng.randrange(1, mod.ORDER)
    p1, q2 = g1 ** k, g2 ** k
    e = mod.pairing(g1, g2)
    pts = [g1 ** rng.randrange(1, mod.ORDER) for _ in range(8)]
    ks = [rng.randrange(1, mod.ORDER) for _ in range(8)]
    return {
        "g1_pow": _time(lambda: p1 ** k, iters),
        "g2_pow": _time(lambda: q2 ** k, iters),
        "gt_pow": _time(lambda: e ** k, iters),
        "pairing": _time(lambda: mod.pairing(p1, q2), iters),
        "msm_g1_8": _time(lambda: mod.msm_g1(pts, ks), iters),
        "hash_to_g1": _time(lambda: mod.hash_to_g1(b"BENCH", b"message"), iters),
    }


_PROTOCOL = r"""
import json, random, time
from tecash import compact, threshold
from tecash.wire import make_payment_info
rng = random.Random(1)
params = compact.setup(4, rng)
vk, auths = threshold.ttp_keygen(1, 1, rng)
kp = compact.keygen_user(rng)
req, info = compact.request(params, kp.sk, rng)
w = compact.create_wallet(vk, kp.sk, [compact.withdraw_vf(auths[0][1], kp.sk, compact.withdraw(auths[0][0], req), info)], 1)
pi = make_payment_info("shop", rng.randbytes(16))
t0 = time.perf_counter(); _, pay = compact.spend(params, vk, kp.sk, w, pi, 1, rng); t1 = time.perf_counter()
compact.spend_vf(params, vk, pay, pi); t2 = time.perf_counter()
print(json.dumps({"spend": (t1 - t0) * 1e3, "spend_vf": (t2 - t1) * 1e3}))
"""


def protocol(backend):
    env = dict(os.environ, TECASH_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", _PROTOCOL], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iters", type=int, default=5)
    ap.add_argument("--skip-protocol", action="store_true")
    args = ap.parse_args(argv)
    if _native is None:
        print("native extension not available; nothing to compare", file=sys.stderr)
        return 1
    rng = random.Random(0)
    nat, py = kernels(_native, args.iters * 20, rng), kernels(_purepy, args.iters, rng)
    rows = [(name, nat[name], py[name]) for name in nat]
    if not args.skip_protocol:
        pn, pp = protocol("native"), protocol("python")
        rows += [(f"compact_{k}", pn[k], pp[k]) for k in pn]
    print(f"{'op':<18}\t{'native_ms':>10}\t{'python_ms':>10}\t{'speedup':>8}")
    for name, a, b in rows:
        print(f"{name:<18}\t{a:>10.3f}\t{b:>10.3f}\t{b / a:>8.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
