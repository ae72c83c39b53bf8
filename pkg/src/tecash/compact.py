"""Compact threshold e-cash.

Wallets hold a PS signature on (sk, sn) issued by t of n authorities.  A
wallet of L coins is spent in batches; coin l gets the serial number
delta^{1/(sn+l+1)} and a double-spending tag that reveals pk when the same
coin is spent against two different payment_info values.  Coin indices are
proven in range by showing possession of a setup-time PS signature on the
index.

The withdrawal half (request, withdraw, withdraw_vf, create_wallet) is shared
with the divisible scheme.
"""

from __future__ import annotations

import base64
import enum
import struct
from dataclasses import dataclass, replace
from typing import Sequence

from . import groups as grp
from . import nizk, sig_ps, threshold
from .commit import PedersenParams, commit
from .sig_ps import PsPublicKey, PsSignature
from .wire import DecodeError, Reader, pack, provider_of

TAG_REQ = b"TECASH-REQ"
TAG_SPEND = b"TECASH-SPEND-COMPACT"
TAG_RK = b"TECASH-RK"
TAG_H = b"TECASH-H"


class SpendRejected(Exception):
    """Raised by the spend verifiers; ``reason`` is a short code."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


class OutcomeKind(enum.Enum):
    DISTINCT = "distinct"
    DOUBLE_DEPOSIT = "double-deposit"
    GUILTY = "guilty"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    pk: object = None
    info: bytes | None = None


# ---------------------------------------------------------------- setup


@dataclass(frozen=True)
class CompactParams:
    L: int
    gamma1: object
    gamma2: object
    delta: object
    alpha_sm: object
    beta_sm: object
    range_sigs: tuple

    @property
    def g(self):
        return grp.G1.generator()

    @property
    def pedersen(self) -> PedersenParams:
        return PedersenParams(self.g, (self.gamma1, self.gamma2))

    @property
    def range_pk(self) -> PsPublicKey:
        # beta_sm in G1 is never needed by verifiers; identity stands in for it
        return PsPublicKey(self.alpha_sm, ((grp.G1.identity(), self.beta_sm),))

    def to_bytes(self) -> bytes:
        sigs = b"".join(pack(s.h, s.s) for s in self.range_sigs)
        return struct.pack(">I", self.L) + pack(
            self.gamma1, self.gamma2, self.delta, self.alpha_sm, self.beta_sm
        ) + sigs

    @staticmethod
    def from_bytes(data: bytes) -> "CompactParams":
        r = Reader(data)
        L = r.u32()
        if L < 1:
            raise DecodeError("L must be >= 1")
        g1, g2, d, a, b = r.g1(), r.g1(), r.g1(), r.g2(), r.g2()
        sigs = tuple(PsSignature(r.g1(), r.g1()) for _ in range(L))
        r.done()
        return CompactParams(L, g1, g2, d, a, b, sigs)


def _generators(count: int, rng):
    return [grp.random_g1(rng) for _ in range(count)]


def setup(L: int, rng=None) -> CompactParams:
    if L < 1:
        raise ValueError("L must be >= 1")
    gamma1, gamma2, delta = _generators(3, rng)
    sk, pk = sig_ps.ps_keygen(1, rng)
    sigs = tuple(sig_ps.ps_sign(sk, [l], rng) for l in range(L))
    return CompactParams(L, gamma1, gamma2, delta, pk.alpha_tilde, pk.betas[0][1], sigs)


def params_valid(params: CompactParams) -> bool:
    pk = params.range_pk
    return len(params.range_sigs) == params.L and all(
        sig_ps.ps_verify(pk, s, [l]) for l, s in enumerate(params.range_sigs)
    )


# ---------------------------------------------------------------- users


@dataclass(frozen=True)
class UserKeyPair:
    sk: int
    pk: object


def keygen_user(rng=None) -> UserKeyPair:
    sk = grp.random_scalar(rng)
    return UserKeyPair(sk, grp.G1.generator() ** sk)


# ---------------------------------------------------------------- withdrawal


@dataclass(frozen=True)
class WithdrawalRequest:
    h: object
    com: object
    com1: object
    com2: object
    proof: nizk.Proof

    N_WIT = 5

    def to_bytes(self) -> bytes:
        return pack(self.h, self.com, self.com1, self.com2) + self.proof.to_bytes()

    @staticmethod
    def from_bytes(data: bytes) -> "WithdrawalRequest":
        r = Reader(data)
        h, com, c1, c2 = r.g1(), r.g1(), r.g1(), r.g1()
        proof = nizk.Proof.from_bytes(r.take(grp.SCALAR_LEN * (WithdrawalRequest.N_WIT + 1)), WithdrawalRequest.N_WIT)
        r.done()
        return WithdrawalRequest(h, com, c1, c2, proof)


@dataclass(frozen=True)
class RequestInfo:
    h: object
    o1: int
    o2: int
    sn: int

    def to_bytes(self) -> bytes:
        return pack(self.h, self.o1, self.o2, self.sn)

    @staticmethod
    def from_bytes(data: bytes) -> "RequestInfo":
        r = Reader(data)
        out = RequestInfo(r.g1(), r.scalar(), r.scalar(), r.scalar())
        r.done()
        return out


@dataclass(frozen=True)
class BlindShare:
    index: int
    h: object
    c: object

    def to_bytes(self) -> bytes:
        return struct.pack(">I", self.index) + pack(self.h, self.c)

    @staticmethod
    def from_bytes(data: bytes) -> "BlindShare":
        r = Reader(data)
        out = BlindShare(r.u32(), r.g1(), r.g1())
        r.done()
        return out


@dataclass(frozen=True)
class PartialWallet:
    index: int
    sigma: PsSignature
    sn: int


@dataclass(frozen=True)
class Wallet:
    sigma: PsSignature
    sn: int
    l: int
    scheme: str = "compact"

    def to_dict(self) -> dict:
        def b64(b):
            return base64.b64encode(b).decode()

        return {
            "scheme": f"{self.scheme}/v1",
            "sigma": {"h": b64(self.sigma.h.to_bytes()), "s": b64(self.sigma.s.to_bytes())},
            "sn": b64(grp.scalar_to_bytes(self.sn)),
            "l": self.l,
        }

    @staticmethod
    def from_dict(d: dict) -> "Wallet":
        scheme = str(d["scheme"]).split("/")[0]
        sig = PsSignature(
            grp.G1.from_bytes(base64.b64decode(d["sigma"]["h"])),
            grp.G1.from_bytes(base64.b64decode(d["sigma"]["s"])),
        )
        return Wallet(sig, grp.scalar_from_bytes(base64.b64decode(d["sn"])), int(d["l"]), scheme)


def _hash_com(com) -> object:
    return grp.hash_to_g1(TAG_H, com.to_bytes())


def _request_statement(ped: PedersenParams, pk, req_h, com, com1, com2) -> nizk.Statement:
    g = ped.g
    g1, g2 = ped.bases
    eqs = [
        nizk.Equation(com, [("o", g), ("m1", g1), ("m2", g2)]),
        nizk.Equation(pk, [("m1", g)]),
        nizk.Equation(com1, [("o1", g), ("m1", req_h)]),
        nizk.Equation(com2, [("o2", g), ("m2", req_h)]),
    ]
    return nizk.Statement(TAG_REQ, ["m1", "m2", "o", "o1", "o2"], eqs)


def request(ped: PedersenParams, user_sk: int, rng=None):
    """Works for both schemes: only the Pedersen bases are used."""
    if not isinstance(ped, PedersenParams):
        ped = ped.pedersen
    g = ped.g
    sn = grp.random_scalar(rng)
    o = grp.random_scalar(rng)
    com = commit(ped, [user_sk, sn], o)
    h = _hash_com(com)
    o1, o2 = grp.random_scalar(rng), grp.random_scalar(rng)
    com1 = grp.g1_product([g, h], [o1, user_sk])
    com2 = grp.g1_product([g, h], [o2, sn])
    st = _request_statement(ped, g ** user_sk, h, com, com1, com2)
    proof = nizk.prove(st, {"m1": user_sk, "m2": sn, "o": o, "o1": o1, "o2": o2}, rng)
    return WithdrawalRequest(h, com, com1, com2, proof), RequestInfo(h, o1, o2, sn)


def request_vf(ped: PedersenParams, req: WithdrawalRequest, user_pk) -> bool:
    if not isinstance(ped, PedersenParams):
        ped = ped.pedersen
    if req.h.is_identity() or _hash_com(req.com) != req.h:
        return False
    st = _request_statement(ped, user_pk, req.h, req.com, req.com1, req.com2)
    return nizk.verify(st, req.proof)


def withdraw(share: threshold.AuthorityKeyShare, req: WithdrawalRequest) -> BlindShare:
    y1, y2 = share.ys
    c = grp.g1_product([req.h, req.com1, req.com2], [share.x, y1, y2])
    return BlindShare(share.index, req.h, c)


def withdraw_vf(pub: threshold.AuthorityPublicShare, user_sk: int, resp: BlindShare, info: RequestInfo):
    """Returns a PartialWallet, or None when the response is invalid."""
    if resp.h != info.h or resp.index != pub.index:
        return None
    (b1, _), (b2, _) = pub.pk.betas
    s = grp.g1_product([resp.c, b1, b2], [1, -info.o1, -info.o2])
    sigma = PsSignature(resp.h, s)
    if not sig_ps.ps_verify(pub.pk, sigma, [user_sk, info.sn]):
        return None
    return PartialWallet(pub.index, sigma, info.sn)


def create_wallet(vk: PsPublicKey, user_sk: int, partials: Sequence[PartialWallet], t: int, scheme: str = "compact"):
    """Aggregates exactly t partial wallets; returns None on failure."""
    partials = list(partials)
    if len(partials) != t:
        return None
    idx = [p.index for p in partials]
    if len(set(idx)) != len(idx) or len({p.sn for p in partials}) != 1:
        return None
    try:
        sigma = threshold.aggregate_signature_shares(idx, [p.sigma for p in partials], t)
    except ValueError:
        return None
    sn = partials[0].sn
    if not sig_ps.ps_verify(vk, sigma, [user_sk, sn]):
        return None
    return Wallet(sigma, sn, 0 if scheme == "compact" else 1, scheme)


# ---------------------------------------------------------------- spend


@dataclass(frozen=True)
class CoinRecord:
    S: object
    T: object
    A: object
    kappa: object
    sigma: PsSignature


@dataclass(frozen=True)
class CompactPayment:
    kappa: object
    sigma: PsSignature
    coins: tuple
    C: object
    proof: nizk.Proof

    @property
    def V(self) -> int:
        return len(self.coins)

    @property
    def serials(self) -> list:
        return [c.S for c in self.coins]

    def to_bytes(self) -> bytes:
        out = struct.pack(">H", self.V) + pack(self.kappa, self.sigma.h, self.sigma.s, self.C)
        for c in self.coins:
            out += pack(c.S, c.T, c.A, c.kappa, c.sigma.h, c.sigma.s)
        return out + self.proof.to_bytes()

    @staticmethod
    def from_bytes(data: bytes) -> "CompactPayment":
        r = Reader(data)
        V = r.u16()
        if V < 1:
            raise DecodeError("payment must spend at least one coin")
        kappa, h, s, C = r.g2(), r.g1(), r.g1(), r.g1()
        coins = []
        for _ in range(V):
            S, T, A, kk, hk, sk = r.g1(), r.g1(), r.g1(), r.g2(), r.g1(), r.g1()
            coins.append(CoinRecord(S, T, A, kk, PsSignature(hk, sk)))
        nw = _spend_witness_count(V)
        proof = nizk.Proof.from_bytes(r.take(grp.SCALAR_LEN * (nw + 1)), nw)
        r.done()
        return CompactPayment(kappa, PsSignature(h, s), tuple(coins), C, proof)


def _spend_witness_count(V: int) -> int:
    return 4 + 5 * V


def coin_rk(info: bytes, k: int) -> int:
    return grp.hash_to_scalar(TAG_RK, bytes(info) + k.to_bytes(8, "big"))


def _spend_statement(params: CompactParams, vk: PsPublicKey, pay: CompactPayment, info: bytes) -> nizk.Statement:
    g, gt = grp.G1.generator(), grp.G2.generator()
    (_, bt1), (_, bt2) = vk.betas
    names = ["sk", "sn", "r", "oc"]
    eqs = [
        nizk.Equation(pay.kappa / vk.alpha_tilde, [("sk", bt1), ("sn", bt2), ("r", gt)]),
        nizk.Equation(pay.C, [("oc", g), ("sn", params.gamma1)]),
    ]
    for k, c in enumerate(pay.coins):
        lk, rk, oa, mu, om = (f"{n}{k}" for n in ("l", "r", "oa", "mu", "om"))
        names += [lk, rk, oa, mu, om]
        Rk = coin_rk(info, k)
        eqs += [
            nizk.Equation(c.A, [(oa, g), (lk, params.gamma1)]),
            nizk.Equation(c.kappa / params.alpha_sm, [(lk, params.beta_sm), (rk, gt)]),
            nizk.Equation(c.S, [(mu, params.delta)]),
            nizk.Equation(params.gamma1, [(mu, c.A * pay.C * params.gamma1), (om, g)]),
            nizk.Equation(c.T, [("sk", g), (mu, g ** Rk)]),
        ]
    return nizk.Statement(TAG_SPEND, names, eqs, bytes(info))


def spend(params: CompactParams, vk: PsPublicKey, user_sk: int, wallet: Wallet, info: bytes, V: int, rng=None, *, _skip_range_guard: bool = False):
    """Returns (updated wallet, payment).  Raises ValueError when the wallet
    cannot cover V coins.  ``_skip_range_guard`` exists only so tests can try
    to spend past the last coin."""
    if wallet.scheme != "compact":
        raise ValueError("wallet belongs to a different scheme")
    L = params.L
    if V < 1 or V > L:
        raise ValueError(f"V must be in [1, {L}]")
    l = wallet.l
    if l < 0 or (l + V - 1 >= L and not _skip_range_guard):
        raise ValueError(f"wallet has {max(L - l, 0)} coins left, cannot spend {V}")
    p = grp.ORDER
    g, gt = grp.G1.generator(), grp.G2.generator()
    sn = wallet.sn
    (_, bt1), (_, bt2) = vk.betas

    r, r_prime = grp.random_scalar(rng), grp.random_scalar(rng)
    sigma2, _ = sig_ps.ps_randomize(wallet.sigma, r, r_prime)
    kappa = grp.g2_product([vk.alpha_tilde, bt1, bt2, gt], [1, user_sk, sn, r])
    oc = grp.random_scalar(rng)
    C = grp.g1_product([g, params.gamma1], [oc, sn])

    witness = {"sk": user_sk, "sn": sn, "r": r, "oc": oc}
    coins = []
    for k in range(V):
        lk = l + k
        Rk = coin_rk(info, k)
        oa = grp.random_scalar(rng)
        A = grp.g1_product([g, params.gamma1], [oa, lk])
        mu = grp.inv(sn + lk + 1)
        S = params.delta ** mu
        T = g ** ((user_sk + Rk * mu) % p)
        om = (-(oa + oc) * mu) % p
        rk, rk_prime = grp.random_scalar(rng), grp.random_scalar(rng)
        base_sig = params.range_sigs[min(lk, L - 1)]
        sig_k, _ = sig_ps.ps_randomize(base_sig, rk, rk_prime)
        kappa_k = grp.g2_product([params.alpha_sm, params.beta_sm, gt], [1, lk, rk])
        coins.append(CoinRecord(S, T, A, kappa_k, sig_k))
        witness.update({f"l{k}": lk, f"r{k}": rk, f"oa{k}": oa, f"mu{k}": mu, f"om{k}": om})

    draft = CompactPayment(kappa, sigma2, tuple(coins), C, nizk.Proof(0, ()))
    st = _spend_statement(params, vk, draft, info)
    proof = nizk.prove(st, witness, rng)
    return replace(wallet, l=l + V), replace(draft, proof=proof)


def spend_vf(params: CompactParams, vk: PsPublicKey, pay: CompactPayment, info: bytes) -> int:
    """Returns V for a valid payment, raises SpendRejected otherwise."""
    try:
        provider_of(info)
    except DecodeError as exc:
        raise SpendRejected("bad-info", str(exc)) from None
    if pay.V < 1 or pay.V > params.L:
        raise SpendRejected("bad-info", "coin count out of range")
    if not sig_ps.verify_with_key(pay.sigma, pay.kappa):
        raise SpendRejected("bad-signature", "wallet signature")
    for k, c in enumerate(pay.coins):
        if not sig_ps.verify_with_key(c.sigma, c.kappa):
            raise SpendRejected("bad-signature", f"range signature of coin {k}")
    serials = [c.S.to_bytes() for c in pay.coins]
    if len(set(serials)) != len(serials):
        raise SpendRejected("duplicate-serial")
    if not nizk.verify(_spend_statement(params, vk, pay, info), pay.proof):
        raise SpendRejected("bad-proof")
    return pay.V


def identify(params: CompactParams, pk_list, pay1: CompactPayment, pay2: CompactPayment, info1: bytes, info2: bytes) -> Outcome:
    pos2 = {c.S.to_bytes(): j for j, c in enumerate(pay2.coins)}
    hits = [(k, pos2[c.S.to_bytes()]) for k, c in enumerate(pay1.coins) if c.S.to_bytes() in pos2]
    if not hits:
        return Outcome(OutcomeKind.DISTINCT)
    if bytes(info1) == bytes(info2):
        return Outcome(OutcomeKind.DOUBLE_DEPOSIT, info=bytes(info1))
    registry = {bytes(pk.to_bytes()): pk for pk in pk_list}
    for k, j in hits:
        r1, r2 = coin_rk(info1, k), coin_rk(info2, j)
        if (r1 - r2) % grp.ORDER == 0:
            continue
        t1, t2 = pay1.coins[k].T, pay2.coins[j].T
        cand = grp.g1_product([t2, t1], [r1, -r2]) ** grp.inv(r1 - r2)
        hit = registry.get(cand.to_bytes())
        if hit is not None:
            return Outcome(OutcomeKind.GUILTY, pk=hit)
    return Outcome(OutcomeKind.UNKNOWN)
