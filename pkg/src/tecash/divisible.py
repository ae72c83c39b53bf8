"""Divisible threshold e-cash.

A wallet is worth L coins and any V consecutive coins l..l+V-1 are spent
with a payment whose size does not depend on V.  The payment carries an
ElGamal-style encryption phi of varsigma_l^sn under eta_V, which only the
authority can expand into the V serial numbers

    SN_k = e(phi[2], delta~_k) e(phi[1], eta~_{V,k}) = e(varsigma, g~)^{sn y^{l+k}}

using the quadratic authority parameters.  The double-spending tag phi' is
built the same way from theta_l with g^{R sk} mixed in.

Withdrawal reuses the compact functions; wallets count from 1.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

from . import groups as grp
from . import nizk, sig_ps, sig_sps
from .commit import PedersenParams
from .compact import Outcome, OutcomeKind, SpendRejected, Wallet
from .sig_ps import PsPublicKey, PsSignature
from .sig_sps import SpsPublicKey, SpsSignature
from .wire import DecodeError, Reader, pack, provider_of

TAG_SPEND = b"TECASH-SPEND-DIV"
TAG_RD = b"TECASH-RD"


@dataclass(frozen=True)
class DivUserParams:
    L: int
    eta: object
    gamma1: object
    gamma2: object
    psi: object
    psi_tilde: object
    sps_pk: SpsPublicKey
    eta_l: tuple  # index l-1 holds eta_l
    varsigma_l: tuple
    theta_l: tuple
    tau_l: tuple
    delta_tilde: tuple  # index k holds delta~_k
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def g(self):
        return grp.G1.generator()

    @property
    def pedersen(self) -> PedersenParams:
        return PedersenParams(self.g, (self.gamma1, self.gamma2))

    def level(self, l: int):
        """(eta_l, varsigma_l, theta_l, tau_l) for 1 <= l <= L."""
        i = l - 1
        return self.eta_l[i], self.varsigma_l[i], self.theta_l[i], self.tau_l[i]

    def const(self, name: str, a, b):
        # constant pairings reused across spends and verifications
        v = self._cache.get(name)
        if v is None:
            v = grp.pairing(a, b)
            self._cache[name] = v
        return v

    def to_bytes(self) -> bytes:
        pk = self.sps_pk
        out = struct.pack(">I", self.L) + pack(
            self.eta, self.gamma1, self.gamma2, self.psi, self.psi_tilde, pk.Y, pk.W1, pk.W2, pk.Z
        )
        for e, s, t, tau in zip(self.eta_l, self.varsigma_l, self.theta_l, self.tau_l):
            out += pack(e, s, t, tau.R, tau.S, tau.T)
        return out + pack(*self.delta_tilde)

    @staticmethod
    def from_bytes(data: bytes) -> "DivUserParams":
        r = Reader(data)
        L = r.u32()
        if L < 1:
            raise DecodeError("L must be >= 1")
        eta, g1, g2, psi = r.g1(), r.g1(), r.g1(), r.g1()
        psi_t = r.g2()
        pk = SpsPublicKey(r.g2(), r.g2(), r.g2(), r.g2())
        el, sl, tl, taus = [], [], [], []
        for _ in range(L):
            el.append(r.g1())
            sl.append(r.g1())
            tl.append(r.g1())
            taus.append(SpsSignature(r.g1(), r.g1(), r.g2()))
        dt = tuple(r.g2() for _ in range(L))
        r.done()
        return DivUserParams(L, eta, g1, g2, psi, psi_t, pk, tuple(el), tuple(sl), tuple(tl), tuple(taus), dt)


@dataclass(frozen=True)
class DivAuthorityParams:
    L: int
    eta_tilde: tuple  # eta_tilde[l-1][k] for k < l

    def row(self, V: int):
        if V < 1 or V > self.L:
            raise ValueError(f"no eta~ row for V={V}")
        return self.eta_tilde[V - 1]

    @property
    def entry_count(self) -> int:
        return sum(len(r) for r in self.eta_tilde)

    def to_bytes(self) -> bytes:
        return struct.pack(">I", self.L) + b"".join(pack(*row) for row in self.eta_tilde)

    @staticmethod
    def from_bytes(data: bytes) -> "DivAuthorityParams":
        r = Reader(data)
        L = r.u32()
        if L < 1:
            raise DecodeError("L must be >= 1")
        rows = tuple(tuple(r.g2() for _ in range(l)) for l in range(1, L + 1))
        r.done()
        return DivAuthorityParams(L, rows)


@dataclass(frozen=True)
class DivisibleParams:
    user: DivUserParams
    authority: DivAuthorityParams


@dataclass(frozen=True)
class TestTrapdoors:
    y: int
    z: int
    a: tuple  # a[l-1] = a_l
    sps_sk: object


def d_setup(L: int, rng=None):
    if L < 1:
        raise ValueError("L must be >= 1")
    p = grp.ORDER
    g, gt = grp.G1.generator(), grp.G2.generator()
    eta, gamma1, gamma2, psi = (grp.random_g1(rng) for _ in range(4))
    psi_t = grp.random_g2(rng)
    z, y = grp.random_scalar(rng), grp.random_scalar(rng)
    a = tuple(grp.random_scalar(rng) for _ in range(L))
    ypow = [pow(y, i, p) for i in range(L + 1)]
    vs, th = g ** z, eta ** z
    varsigma_l = tuple(vs ** ypow[l] for l in range(1, L + 1))
    theta_l = tuple(th ** ypow[l] for l in range(1, L + 1))
    delta_t = tuple(gt ** ypow[k] for k in range(L))
    eta_l = tuple(g ** a[l - 1] for l in range(1, L + 1))
    eta_t = tuple(
        tuple(gt ** (-a[l - 1] * ypow[k] % p) for k in range(l)) for l in range(1, L + 1)
    )
    sps_sk, sps_pk = sig_sps.sps_keygen(rng)
    taus = tuple(sig_sps.sps_sign(sps_sk, s, t, rng) for s, t in zip(varsigma_l, theta_l))
    user = DivUserParams(L, eta, gamma1, gamma2, psi, psi_t, sps_pk, eta_l, varsigma_l, theta_l, taus, delta_t)
    return DivisibleParams(user, DivAuthorityParams(L, eta_t)), TestTrapdoors(y, z, a, sps_sk)


# ---------------------------------------------------------------- payments


@dataclass(frozen=True)
class DivisiblePayment:
    V: int
    kappa: object
    sigma: PsSignature
    phi: tuple
    tag: tuple  # the phi' ciphertext
    vs_l: object  # blinded varsigma_l
    th_l: object
    vs_e: object  # blinded varsigma_{l+V-1}
    th_e: object
    R_sig: object
    S_sig: object
    T_sig: object
    R: int
    proof: nizk.Proof

    N_WIT = 15

    def to_bytes(self) -> bytes:
        return struct.pack(">H", self.V) + pack(
            self.kappa, self.sigma.h, self.sigma.s, *self.phi, *self.tag,
            self.vs_l, self.th_l, self.vs_e, self.th_e, self.R_sig, self.S_sig, self.T_sig, self.R,
        ) + self.proof.to_bytes()

    @staticmethod
    def from_bytes(data: bytes) -> "DivisiblePayment":
        r = Reader(data)
        V = r.u16()
        if V < 1:
            raise DecodeError("payment must spend at least one coin")
        kappa, h, s = r.g2(), r.g1(), r.g1()
        phi = (r.g1(), r.g1())
        tag = (r.g1(), r.g1())
        vs_l, th_l, vs_e, th_e, Rs, Ss = (r.g1() for _ in range(6))
        Ts = r.g2()
        R = r.scalar()
        n = DivisiblePayment.N_WIT
        proof = nizk.Proof.from_bytes(r.take(grp.SCALAR_LEN * (n + 1)), n)
        r.done()
        return DivisiblePayment(V, kappa, PsSignature(h, s), phi, tag, vs_l, th_l, vs_e, th_e, Rs, Ss, Ts, R, proof)


def info_scalar(info: bytes) -> int:
    return grp.hash_to_scalar(TAG_RD, bytes(info))


_WITNESSES = [
    "sk", "sn", "r", "r1", "r2",
    "rho_vs_l", "rho_th_l", "rho_vs_e", "rho_th_e", "rho_R", "rho_S", "rho_T",
    "rho1", "rho2", "rho3",
]


def _spend_statement(up: DivUserParams, vk: PsPublicKey, pay: DivisiblePayment, info: bytes) -> nizk.Statement:
    V = pay.V
    g, gt = grp.G1.generator(), grp.G2.generator()
    psi, psi_t = up.psi, up.psi_tilde
    pk = up.sps_pk
    (_, bt1), (_, bt2) = vk.betas
    eta_V = up.eta_l[V - 1]
    dV = up.delta_tilde[V - 1]

    e_psi_g = up.const("psi,g~", psi, gt)
    e_psi_g_inv = up._cache.get("psi,g~^-1")
    if e_psi_g_inv is None:
        e_psi_g_inv = up._cache["psi,g~^-1"] = e_psi_g.inverse()
    e_psi_d = up.const(f"psi,d{V - 1}", psi, dV)
    e_psi_Y = up.const("psi,Y", psi, pk.Y)
    e_psi_W1 = up.const("psi,W1", psi, pk.W1)
    e_psi_W2 = up.const("psi,W2", psi, pk.W2)
    e_psi_psit = up.const("psi,psi~", psi, psi_t)
    e_g_Z = up.const("g,Z", g, pk.Z)
    e_g_g = up.const("g,g~", g, gt)

    t4 = grp.multi_pairing([pay.vs_l, pay.vs_e.inverse()], [dV, gt])
    t5 = grp.multi_pairing([pay.th_l, pay.th_e.inverse()], [dV, gt])
    t6 = grp.multi_pairing(
        [pay.R_sig, pay.S_sig, pay.vs_e, pay.th_e], [pk.Y, gt, pk.W1, pk.W2]
    ) / e_g_Z
    t7 = grp.pairing(pay.R_sig, pay.T_sig) / e_g_g
    e_R_psit = grp.pairing(pay.R_sig, psi_t)
    e_psi_T = grp.pairing(psi, pay.T_sig)

    eqs = [
        nizk.Equation(pay.kappa / vk.alpha_tilde, [("sk", bt1), ("sn", bt2), ("r", gt)]),
        nizk.Equation(pay.phi[0], [("r1", g)]),
        nizk.Equation(pay.phi[1], [("sn", pay.vs_l), ("rho1", psi), ("r1", eta_V)]),
        nizk.Equation(pay.tag[0], [("r2", g)]),
        nizk.Equation(pay.tag[1], [("sk", g ** pay.R), ("sn", pay.th_l), ("rho2", psi), ("r2", eta_V)]),
        nizk.Equation(t4, [("rho_vs_l", e_psi_d), ("rho_vs_e", e_psi_g_inv)]),
        nizk.Equation(t5, [("rho_th_l", e_psi_d), ("rho_th_e", e_psi_g_inv)]),
        nizk.Equation(
            t6,
            [("rho_R", e_psi_Y), ("rho_S", e_psi_g), ("rho_vs_e", e_psi_W1), ("rho_th_e", e_psi_W2)],
        ),
        nizk.Equation(t7, [("rho_T", e_R_psit), ("rho_R", e_psi_T), ("rho3", e_psi_psit.inverse())]),
    ]
    return nizk.Statement(TAG_SPEND, _WITNESSES, eqs, bytes(info))


def d_spend(up: DivUserParams, vk: PsPublicKey, user_sk: int, wallet: Wallet, info: bytes, V: int, rng=None):
    """Returns (updated wallet, payment); raises ValueError when fewer than V
    coins remain."""
    if wallet.scheme != "divisible":
        raise ValueError("wallet belongs to a different scheme")
    L = up.L
    l = wallet.l
    if V < 1 or V > L:
        raise ValueError(f"V must be in [1, {L}]")
    if l < 1 or l + V - 1 > L:
        raise ValueError(f"wallet has {max(L - l + 1, 0)} coins left, cannot spend {V}")
    p = grp.ORDER
    g, gt = grp.G1.generator(), grp.G2.generator()
    psi, psi_t = up.psi, up.psi_tilde
    sn = wallet.sn
    (_, bt1), (_, bt2) = vk.betas

    def rnd():
        return grp.random_scalar(rng)

    r, r_prime = rnd(), rnd()
    sigma2, _ = sig_ps.ps_randomize(wallet.sigma, r, r_prime)
    kappa = grp.g2_product([vk.alpha_tilde, bt1, bt2, gt], [1, user_sk, sn, r])

    _, vs_l, th_l, _ = up.level(l)
    _, vs_e, th_e, tau = up.level(l + V - 1)
    eta_V = up.eta_l[V - 1]
    r1, r2 = rnd(), rnd()
    phi = (g ** r1, grp.g1_product([vs_l, eta_V], [sn, r1]))
    R = info_scalar(info)
    tag = (g ** r2, grp.g1_product([g, th_l, eta_V], [R * user_sk, sn, r2]))

    rho = {k: rnd() for k in ("rho_vs_l", "rho_th_l", "rho_vs_e", "rho_th_e", "rho_R", "rho_S", "rho_T")}
    blind = nizk.blind_secret_base
    draft = DivisiblePayment(
        V, kappa, sigma2, phi, tag,
        blind(vs_l, rho["rho_vs_l"], psi),
        blind(th_l, rho["rho_th_l"], psi),
        blind(vs_e, rho["rho_vs_e"], psi),
        blind(th_e, rho["rho_th_e"], psi),
        blind(tau.R, rho["rho_R"], psi),
        blind(tau.S, rho["rho_S"], psi),
        blind(tau.T, rho["rho_T"], psi_t),
        R, nizk.Proof(0, ()),
    )
    witness = dict(rho)
    witness.update(
        sk=user_sk, sn=sn, r=r, r1=r1, r2=r2,
        rho1=(-sn * rho["rho_vs_l"]) % p,
        rho2=(-sn * rho["rho_th_l"]) % p,
        rho3=(rho["rho_R"] * rho["rho_T"]) % p,
    )
    proof = nizk.prove(_spend_statement(up, vk, draft, info), witness, rng)
    return replace(wallet, l=l + V), replace(draft, proof=proof)


def d_spend_vf(up: DivUserParams, vk: PsPublicKey, pay: DivisiblePayment, info: bytes) -> int:
    """Returns V for a valid payment, raises SpendRejected otherwise."""
    if pay.V < 1 or pay.V > up.L:
        raise SpendRejected("bad-info", "coin count out of range")
    if not sig_ps.verify_with_key(pay.sigma, pay.kappa):
        raise SpendRejected("bad-signature", "wallet signature")
    if pay.R != info_scalar(info):
        raise SpendRejected("bad-info", "R does not match payment_info")
    try:
        provider_of(info)
    except DecodeError as exc:
        raise SpendRejected("bad-info", str(exc)) from None
    if not nizk.verify(_spend_statement(up, vk, pay, info), pay.proof):
        raise SpendRejected("bad-proof")
    return pay.V


def d_serial_numbers(up: DivUserParams, ap: DivAuthorityParams, pay: DivisiblePayment) -> list:
    row = ap.row(pay.V)
    return [
        grp.multi_pairing([pay.phi[1], pay.phi[0]], [up.delta_tilde[k], row[k]]) for k in range(pay.V)
    ]


def _tag_value(up, ap, pay: DivisiblePayment, k: int):
    row = ap.row(pay.V)
    return grp.multi_pairing([pay.tag[1], pay.tag[0]], [up.delta_tilde[k], row[k]])


def d_identify(params: DivisibleParams, pk_list, pay1: DivisiblePayment, pay2: DivisiblePayment,
               info1: bytes, info2: bytes, sn1=None, sn2=None) -> Outcome:
    """``sn1``/``sn2`` may carry precomputed serial numbers."""
    up, ap = params.user, params.authority
    sn1 = sn1 if sn1 is not None else d_serial_numbers(up, ap, pay1)
    sn2 = sn2 if sn2 is not None else d_serial_numbers(up, ap, pay2)
    pos2 = {s.to_bytes(): j for j, s in enumerate(sn2)}
    hit = next(((k, pos2[s.to_bytes()]) for k, s in enumerate(sn1) if s.to_bytes() in pos2), None)
    if hit is None:
        return Outcome(OutcomeKind.DISTINCT)
    if bytes(info1) == bytes(info2):
        return Outcome(OutcomeKind.DOUBLE_DEPOSIT, info=bytes(info1))
    k1, k2 = hit
    quotient = _tag_value(up, ap, pay1, k1) / _tag_value(up, ap, pay2, k2)
    probe = grp.g2_product([up.delta_tilde[k1], up.delta_tilde[k2]], [pay1.R, -pay2.R])
    for pk in pk_list:
        if grp.pairing(pk, probe) == quotient:
            return Outcome(OutcomeKind.GUILTY, pk=pk)
    return Outcome(OutcomeKind.UNKNOWN)
