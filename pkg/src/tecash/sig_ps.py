"""Pointcheval-Sanders signatures on scalar vectors.

The signing base is supplied by the caller; in the random-oracle variant it
is the hash of a commitment.  ``ps_sign`` picks a random base for the
range-proof signatures issued at setup.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import groups as grp


@dataclass(frozen=True)
class PsSecretKey:
    x: int
    ys: tuple


@dataclass(frozen=True)
class PsPublicKey:
    alpha_tilde: object
    betas: tuple  # ((beta_j, beta_tilde_j), ...)

    @property
    def q(self) -> int:
        return len(self.betas)

    def consistent(self) -> bool:
        g, gt = grp.G1.generator(), grp.G2.generator()
        # e(g, bt) e(b, gt)^-1 == 1
        return all(
            grp.pairing_product_is_one([(g, bt), (b.inverse(), gt)]) for b, bt in self.betas
        )


@dataclass(frozen=True)
class PsSignature:
    h: object
    s: object


def ps_keygen(q: int, rng=None):
    if q < 1:
        raise ValueError("PS keys need q >= 1")
    x = grp.random_scalar(rng)
    ys = tuple(grp.random_scalar(rng) for _ in range(q))
    return PsSecretKey(x, ys), public_from_secret(x, ys)


def public_from_secret(x: int, ys: Sequence[int]) -> PsPublicKey:
    g, gt = grp.G1.generator(), grp.G2.generator()
    return PsPublicKey(gt ** x, tuple((g ** y, gt ** y) for y in ys))


def ps_sign_on_base(sk: PsSecretKey, h, msgs: Sequence[int]) -> PsSignature:
    if h.is_identity():
        raise ValueError("PS signing base must not be the identity")
    if len(msgs) != len(sk.ys):
        raise ValueError(f"expected {len(sk.ys)} messages, got {len(msgs)}")
    e = (sk.x + sum(y * m for y, m in zip(sk.ys, msgs))) % grp.ORDER
    return PsSignature(h, h ** e)


def ps_sign(sk: PsSecretKey, msgs: Sequence[int], rng=None) -> PsSignature:
    return ps_sign_on_base(sk, grp.random_g1(rng), msgs)


def message_key(pk: PsPublicKey, msgs: Sequence[int]):
    """alpha_tilde * prod beta_tilde_j^{m_j}."""
    if len(msgs) != pk.q:
        raise ValueError(f"expected {pk.q} messages, got {len(msgs)}")
    return grp.g2_product([pk.alpha_tilde, *(bt for _, bt in pk.betas)], [1, *msgs])


def verify_with_key(sig: PsSignature, kappa) -> bool:
    """e(h, kappa) == e(s, g~) and h != 1."""
    if sig.h.is_identity():
        return False
    return grp.pairing_product_is_one([(sig.h, kappa), (sig.s.inverse(), grp.G2.generator())])


def ps_verify(pk: PsPublicKey, sig: PsSignature, msgs: Sequence[int]) -> bool:
    return verify_with_key(sig, message_key(pk, msgs))


def ps_randomize(sig: PsSignature, r: int, r_prime: int):
    """Returns (sigma', g~^r); sigma' verifies against kappa * g~^r."""
    if r_prime % grp.ORDER == 0:
        raise ValueError("r' must be non-zero")
    h2 = sig.h ** r_prime
    s2 = (sig.s ** r_prime) * (h2 ** r)
    return PsSignature(h2, s2), grp.G2.generator() ** r
