"""Timing of spend, spend_vf and identify for both schemes.

Absolute numbers depend on the host; the useful output is the ratio
between the schemes for each operation.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass

from . import compact, divisible, threshold
from .wire import make_payment_info

OPS = ("spend", "spend_vf", "identify")


@dataclass(frozen=True)
class Timing:
    scheme: str
    op: str
    iters: int
    mean_ms: float
    stdev_ms: float


class _Fixture:
    """Keys, a wallet and a double-spent pair for one scheme."""

    def __init__(self, scheme: str, L: int, registry: int, rng):
        self.scheme, self.rng = scheme, rng
        if scheme == "compact":
            self.params = compact.setup(L, rng)
            self.up = self.params
        else:
            self.params, _ = divisible.d_setup(L, rng)
            self.up = self.params.user
        self.vk, auths = threshold.ttp_keygen(2, 3, rng)
        users = [compact.keygen_user(rng) for _ in range(registry)]
        # the cheater sits last so identify scans the whole registry
        self.pks = [u.pk for u in users]
        self.cheater = users[-1]
        req, info = compact.request(self.up, self.cheater.sk, rng)
        parts = [compact.withdraw_vf(p, self.cheater.sk, compact.withdraw(s, req), info) for s, p in auths[:2]]
        self.wallet = compact.create_wallet(self.vk, self.cheater.sk, parts, 2, scheme=scheme)
        self.info1 = make_payment_info("bench-a", rng.randbytes(16))
        self.info2 = make_payment_info("bench-b", rng.randbytes(16))
        self.pay1 = self.spend(self.info1)
        self.pay2 = self.spend(self.info2)

    def spend(self, info, V: int = 1):
        if self.scheme == "compact":
            return compact.spend(self.params, self.vk, self.cheater.sk, self.wallet, info, V, self.rng)[1]
        return divisible.d_spend(self.up, self.vk, self.cheater.sk, self.wallet, info, V, self.rng)[1]

    def spend_vf(self):
        if self.scheme == "compact":
            return compact.spend_vf(self.params, self.vk, self.pay1, self.info1)
        return divisible.d_spend_vf(self.up, self.vk, self.pay1, self.info1)

    def identify(self):
        if self.scheme == "compact":
            out = compact.identify(self.params, self.pks, self.pay1, self.pay2, self.info1, self.info2)
        else:
            out = divisible.d_identify(self.params, self.pks, self.pay1, self.pay2, self.info1, self.info2)
        if out.pk != self.cheater.pk:
            raise RuntimeError("benchmark identify did not find the cheater")
        return out


def run(schemes=("compact", "divisible"), ops=OPS, iters: int = 20, L: int = 10,
        registry: int = 100, seed: int = 0) -> list[Timing]:
    rng = random.Random(seed)
    out = []
    for scheme in schemes:
        fx = _Fixture(scheme, L, registry, rng)
        calls = {
            "spend": lambda: fx.spend(fx.info1),
            "spend_vf": fx.spend_vf,
            "identify": fx.identify,
        }
        for op in ops:
            fn = calls[op]
            fn()  # warm caches
            samples = []
            for _ in range(iters):
                t0 = time.perf_counter()
                fn()
                samples.append((time.perf_counter() - t0) * 1e3)
            sd = statistics.stdev(samples) if len(samples) > 1 else 0.0
            out.append(Timing(scheme, op, iters, statistics.fmean(samples), sd))
    return out


def ratios(timings: list[Timing]) -> dict[str, float]:
    """divisible mean / compact mean per operation."""
    by = {(t.scheme, t.op): t.mean_ms for t in timings}
    return {
        op: by[("divisible", op)] / by[("compact", op)]
        for op in OPS
        if ("compact", op) in by and ("divisible", op) in by
    }


def format_tsv(timings: list[Timing]) -> str:
    lines = [f"{'scheme':<10}\t{'op':<9}\t{'iters':>6}\t{'mean_ms':>10}\t{'stdev_ms':>10}"]
    for t in timings:
        lines.append(f"{t.scheme:<10}\t{t.op:<9}\t{t.iters:>6}\t{t.mean_ms:>10.3f}\t{t.stdev_ms:>10.3f}")
    r = ratios(timings)
    if r:
        lines.append("")
        lines.append(f"{'op':<9}\t{'div/compact':>11}")
        for op, v in r.items():
            lines.append(f"{op:<9}\t{v:>11.2f}")
    return "\n".join(lines) + "\n"
