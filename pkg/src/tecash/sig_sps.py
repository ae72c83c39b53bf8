"""AGHO structure-preserving signatures on two G1 elements."""

from __future__ import annotations

from dataclasses import dataclass

from . import groups as grp


@dataclass(frozen=True)
class SpsSecretKey:
    y: int
    w1: int
    w2: int
    z: int


@dataclass(frozen=True)
class SpsPublicKey:
    Y: object
    W1: object
    W2: object
    Z: object


@dataclass(frozen=True)
class SpsSignature:
    R: object
    S: object
    T: object


def sps_keygen(rng=None):
    sk = SpsSecretKey(*(grp.random_scalar(rng) for _ in range(4)))
    gt = grp.G2.generator()
    return sk, SpsPublicKey(gt ** sk.y, gt ** sk.w1, gt ** sk.w2, gt ** sk.z)


def sps_sign(sk: SpsSecretKey, m1, m2, rng=None) -> SpsSignature:
    r = grp.random_scalar(rng)
    g = grp.G1.generator()
    R = g ** r
    S = grp.g1_product([g, m1, m2], [sk.z - r * sk.y, -sk.w1, -sk.w2])
    T = grp.G2.generator() ** grp.inv(r)
    return SpsSignature(R, S, T)


def sps_verify(pk: SpsPublicKey, sig: SpsSignature, m1, m2) -> bool:
    if sig.R.is_identity():
        return False
    g, gt = grp.G1.generator(), grp.G2.generator()
    ok1 = grp.pairing_product_is_one(
        [(sig.R, pk.Y), (sig.S, gt), (m1, pk.W1), (m2, pk.W2), (g.inverse(), pk.Z)]
    )
    if not ok1:
        return False
    return grp.pairing_product_is_one([(sig.R, sig.T), (g.inverse(), gt)])
