"""Type-3 bilinear group over BLS12-381.

The arithmetic backend is chosen at import time: the compiled ``_native``
module when it is importable, otherwise the pure-Python ``_purepy`` module.
Set ``TECASH_BACKEND`` to ``native``, ``python`` or ``auto`` to override.
Both backends produce identical byte encodings, so artifacts move freely
between them.
"""

from __future__ import annotations

import os
import secrets
import struct
from dataclasses import dataclass
from functools import cached_property
from hashlib import sha256
from typing import Iterable, Sequence

from py_ecc.bls.hash import expand_message_xmd


def _load_backend(choice: str):
    choice = (choice or "auto").lower()
    if choice not in ("auto", "native", "python"):
        raise ImportError(f"unknown TECASH_BACKEND {choice!r}")
    if choice in ("auto", "native"):
        try:
            from . import _native

            return _native
        except ImportError:
            if choice == "native":
                raise
    from . import _purepy

    return _purepy


backend = _load_backend(os.environ.get("TECASH_BACKEND", "auto"))
BACKEND: str = backend.BACKEND

G1 = backend.G1
G2 = backend.G2
GT = backend.GT
ORDER: int = int(backend.ORDER)
p = ORDER

G1_LEN = 48
G2_LEN = 96
GT_LEN = 576
SCALAR_LEN = 32

pairing = backend.pairing
multi_pairing = backend.multi_pairing
msm_g1 = backend.msm_g1
msm_g2 = backend.msm_g2
multi_exp_gt = backend.multi_exp_gt

_system_rng = secrets.SystemRandom()


def default_rng(rng=None):
    return _system_rng if rng is None else rng


def random_scalar(rng=None, nonzero: bool = True) -> int:
    rng = default_rng(rng)
    lo = 1 if nonzero else 0
    return rng.randrange(lo, ORDER)


def inv(a: int) -> int:
    a %= ORDER
    if a == 0:
        raise ZeroDivisionError("scalar 0 has no inverse")
    return pow(a, -1, ORDER)


def scalar_to_bytes(a: int) -> bytes:
    return (a % ORDER).to_bytes(SCALAR_LEN, "little")


def scalar_from_bytes(data: bytes) -> int:
    if len(data) != SCALAR_LEN:
        raise ValueError(f"scalar encoding must be {SCALAR_LEN} bytes")
    v = int.from_bytes(data, "little")
    if v >= ORDER:
        raise ValueError("non-canonical scalar encoding")
    return v


def hash_to_g1(domain_tag: bytes, data: bytes):
    if not domain_tag:
        raise ValueError("domain tag must be non-empty")
    return backend.hash_to_g1(bytes(domain_tag), bytes(data))


def hash_to_scalar(domain_tag: bytes, data: bytes) -> int:
    if not domain_tag:
        raise ValueError("domain tag must be non-empty")
    # 48 bytes keeps the modular bias below 2^-128
    return int.from_bytes(expand_message_xmd(bytes(data), bytes(domain_tag), 48, sha256), "big") % ORDER


def random_g1(rng=None):
    return G1.generator() ** random_scalar(rng)


def random_g2(rng=None):
    return G2.generator() ** random_scalar(rng)


def group_id(elem) -> int:
    if isinstance(elem, G1):
        return 1
    if isinstance(elem, G2):
        return 2
    if isinstance(elem, GT):
        return 3
    raise TypeError(f"not a group element: {type(elem).__name__}")


def encode(*items) -> bytes:
    """Length-prefixed canonical encoding of elements, scalars and bytes."""
    out = bytearray()
    for it in items:
        if isinstance(it, (bytes, bytearray)):
            b = bytes(it)
        elif isinstance(it, int):
            b = scalar_to_bytes(it)
        else:
            b = it.to_bytes()
        out += struct.pack(">I", len(b)) + b
    return bytes(out)


def pairing_product_is_one(pairs: Iterable[tuple]) -> bool:
    ps, qs = [], []
    for a, b in pairs:
        ps.append(a)
        qs.append(b)
    return multi_pairing(ps, qs).is_identity()


def g1_product(points: Sequence, scalars: Sequence[int]):
    if len(points) == 1:
        return points[0] ** scalars[0]
    return msm_g1(list(points), [s % ORDER for s in scalars])


def g2_product(points: Sequence, scalars: Sequence[int]):
    if len(points) == 1:
        return points[0] ** scalars[0]
    return msm_g2(list(points), [s % ORDER for s in scalars])


@dataclass(frozen=True)
class GroupContext:
    p: int
    g: object
    g_tilde: object

    def pairing(self, a, b):
        return pairing(a, b)

    @cached_property
    def gt(self):
        return pairing(self.g, self.g_tilde)


_ctx = None


def context() -> GroupContext:
    global _ctx
    if _ctx is None:
        _ctx = GroupContext(ORDER, G1.generator(), G2.generator())
    return _ctx
