"""Fiat-Shamir proofs of knowledge of discrete-log representations.

A statement is a list of equations ``target = prod base_i ^ w_{k_i}`` over
G1, G2 or GT, all sharing one witness vector and one challenge.  Public
constants and inversions are folded into the bases or the target by the
caller, and products of witnesses are expressed through auxiliary witnesses,
so every exponent is a single witness.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import groups as grp


@dataclass(frozen=True)
class Equation:
    target: object
    terms: tuple  # ((witness_name, base), ...)

    def __init__(self, target, terms):
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "terms", tuple((n, b) for n, b in terms))


@dataclass
class Statement:
    tag: bytes
    witnesses: Sequence[str]
    equations: Sequence[Equation]
    message: bytes = b""
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if not self.tag:
            raise ValueError("statement tag must be non-empty")
        self.witnesses = tuple(self.witnesses)
        if len(set(self.witnesses)) != len(self.witnesses):
            raise ValueError("witness names must be declared once")
        self._index = {n: i for i, n in enumerate(self.witnesses)}
        # an unconstrained response would make proofs malleable
        used = {name for eq in self.equations for name, _ in eq.terms}
        if set(self.witnesses) - used:
            raise ValueError(f"witnesses in no equation: {sorted(set(self.witnesses) - used)}")
        for eq in self.equations:
            if not eq.terms:
                raise ValueError("equation without terms")
            gid = grp.group_id(eq.target)
            for name, base in eq.terms:
                if name not in self._index:
                    raise ValueError(f"undeclared witness {name!r}")
                if grp.group_id(base) != gid:
                    raise ValueError("base and target in different groups")

    def encode(self) -> bytes:
        out = bytearray(struct.pack(">I", len(self.equations)))
        for eq in self.equations:
            out += bytes([grp.group_id(eq.target)]) + eq.target.to_bytes()
            out += struct.pack(">I", len(eq.terms))
            for name, base in eq.terms:
                out += base.to_bytes() + struct.pack(">I", self._index[name])
        return bytes(out)


@dataclass(frozen=True)
class Proof:
    challenge: int
    responses: tuple

    def to_bytes(self) -> bytes:
        return b"".join(grp.scalar_to_bytes(v) for v in (self.challenge, *self.responses))

    @staticmethod
    def from_bytes(data: bytes, n_witnesses: int) -> "Proof":
        size = grp.SCALAR_LEN
        if len(data) != size * (n_witnesses + 1):
            raise ValueError("proof length does not match witness count")
        vals = [grp.scalar_from_bytes(data[i : i + size]) for i in range(0, len(data), size)]
        return Proof(vals[0], tuple(vals[1:]))


def _multi_exp(bases, scalars):
    gid = grp.group_id(bases[0])
    scalars = [s % grp.ORDER for s in scalars]
    if len(bases) == 1:
        return bases[0] ** scalars[0]
    if gid == 1:
        return grp.msm_g1(list(bases), scalars)
    if gid == 2:
        return grp.msm_g2(list(bases), scalars)
    return grp.multi_exp_gt(list(bases), scalars)


def _evaluate(eq: Equation, values: Mapping[str, int]):
    return _multi_exp([b for _, b in eq.terms], [values[n] for n, _ in eq.terms])


def _challenge(st: Statement, commitments) -> int:
    data = st.encode() + grp.encode(*commitments) + grp.encode(bytes(st.message))
    return grp.hash_to_scalar(st.tag, data)


def holds(st: Statement, witness: Mapping[str, int]) -> bool:
    return all(_evaluate(eq, witness) == eq.target for eq in st.equations)


def prove(st: Statement, witness: Mapping[str, int], rng=None) -> Proof:
    missing = [n for n in st.witnesses if n not in witness]
    if missing:
        raise ValueError(f"missing witness values: {missing}")
    for i, eq in enumerate(st.equations):
        if _evaluate(eq, witness) != eq.target:
            raise ValueError(f"witness does not satisfy equation {i}")
    nonces = {n: grp.random_scalar(rng) for n in st.witnesses}
    commitments = [_evaluate(eq, nonces) for eq in st.equations]
    c = _challenge(st, commitments)
    responses = tuple((nonces[n] - c * witness[n]) % grp.ORDER for n in st.witnesses)
    return Proof(c, responses)


def verify(st: Statement, proof: Proof) -> bool:
    if len(proof.responses) != len(st.witnesses):
        return False
    values = dict(zip(st.witnesses, proof.responses))
    commitments = []
    for eq in st.equations:
        bases = [eq.target] + [b for _, b in eq.terms]
        scalars = [proof.challenge] + [values[n] for n, _ in eq.terms]
        commitments.append(_multi_exp(bases, scalars))
    return _challenge(st, commitments) == proof.challenge % grp.ORDER


def blind_secret_base(base, rho: int, blinder):
    return base * (blinder ** rho)
