"""Trusted-dealer threshold keys for the issuing authorities.

Each authority i holds evaluations (v(i), w_1(i), w_2(i)) of random
polynomials of degree t-1; the verification key carries the same values at
zero in the exponent.  Partial signatures are combined with Lagrange
coefficients at zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import groups as grp
from .sig_ps import PsPublicKey, PsSecretKey, PsSignature, public_from_secret

# The aggregate key has the shape of a PS public key on (sk, sn).
VerificationKey = PsPublicKey


@dataclass(frozen=True)
class AuthorityKeyShare:
    index: int
    x: int
    ys: tuple

    @property
    def ps_secret(self) -> PsSecretKey:
        return PsSecretKey(self.x, self.ys)


@dataclass(frozen=True)
class AuthorityPublicShare:
    index: int
    pk: PsPublicKey


def _eval(coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % grp.ORDER
    return acc


def ttp_keygen(t: int, n: int, rng=None, q: int = 2):
    if t < 1 or n < 1 or t > n:
        raise ValueError(f"need 1 <= t <= n, got t={t} n={n}")
    polys = [[grp.random_scalar(rng) for _ in range(t)] for _ in range(q + 1)]
    vk = public_from_secret(polys[0][0], [poly[0] for poly in polys[1:]])
    out = []
    for i in range(1, n + 1):
        vals = [_eval(poly, i) for poly in polys]
        share = AuthorityKeyShare(i, vals[0], tuple(vals[1:]))
        out.append((share, AuthorityPublicShare(i, public_from_secret(vals[0], vals[1:]))))
    return vk, out


def lagrange_at_zero(indices: Sequence[int]) -> list[int]:
    idx = list(indices)
    if not idx:
        raise ValueError("need at least one index")
    if len(set(idx)) != len(idx):
        raise ValueError("duplicate indices")
    if any(i <= 0 for i in idx):
        raise ValueError("indices must be positive")
    p = grp.ORDER
    out = []
    for i in idx:
        num, den = 1, 1
        for j in idx:
            if j != i:
                num = num * (-j) % p
                den = den * (i - j) % p
        out.append(num * pow(den, -1, p) % p)
    return out


def aggregate_signature_shares(indices: Sequence[int], shares: Sequence[PsSignature], t: int | None = None) -> PsSignature:
    if len(indices) != len(shares) or not shares:
        raise ValueError("need one share per index")
    if t is not None and len(shares) != t:
        raise ValueError(f"expected exactly {t} shares, got {len(shares)}")
    h = shares[0].h
    if any(s.h != h for s in shares[1:]):
        raise ValueError("signature shares carry different bases")
    ls = lagrange_at_zero(indices)
    return PsSignature(h, grp.g1_product([s.s for s in shares], ls))


def aggregate_public_shares(publics: Sequence[AuthorityPublicShare]) -> PsPublicKey:
    """Interpolates public shares in the exponent (used for cross-checks)."""
    ls = lagrange_at_zero([a.index for a in publics])
    alpha = grp.g2_product([a.pk.alpha_tilde for a in publics], ls)
    q = publics[0].pk.q
    betas = []
    for j in range(q):
        b = grp.g1_product([a.pk.betas[j][0] for a in publics], ls)
        bt = grp.g2_product([a.pk.betas[j][1] for a in publics], ls)
        betas.append((b, bt))
    return PsPublicKey(alpha, tuple(betas))
