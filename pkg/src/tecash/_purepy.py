"""Pure-Python BLS12-381 backend built on py_ecc.

Mirrors the API of the compiled ``_native`` module (same class and function
names, same byte encodings) so either can sit behind ``tecash.groups``.

Two conventions differ between py_ecc and arkworks and are normalised here:

* py_ecc represents Fq12 as Fq[w]/(w^12 - 2w^6 + 2); arkworks uses the tower
  Fq2[u]/(u^2+1) -> Fq6[v]/(v^3-(u+1)) -> Fq12[w]/(w^2-v).  With u = w^6 - 1
  the two bases line up coefficient by coefficient.
* The arkworks final exponentiation yields the py_ecc pairing value raised to
  -3.  Outputs of the final exponentiation are unitary, so the inverse is the
  conjugate and the cube is two multiplications.
"""

from __future__ import annotations

from hashlib import sha256

import py_ecc.optimized_bls12_381 as _b
from py_ecc.bls.hash_to_curve import hash_to_G1 as _hash_to_G1
from py_ecc.bls.point_compression import (
    compress_G1,
    compress_G2,
    decompress_G1,
    decompress_G2,
)
from py_ecc.optimized_bls12_381.optimized_pairing import final_exponentiate, miller_loop

BACKEND = "python"
ORDER = _b.curve_order
_Q = _b.field_modulus
_FQ12 = _b.FQ12


def _in_subgroup(pt) -> bool:
    return _b.is_inf(_b.multiply(pt, ORDER))


class _Point:
    __slots__ = ("p",)
    _gen = None
    _zero = None

    def __init__(self, p):
        self.p = p

    @classmethod
    def generator(cls):
        return cls(cls._gen)

    @classmethod
    def identity(cls):
        return cls(cls._zero)

    def is_identity(self) -> bool:
        return _b.is_inf(self.p)

    def inverse(self):
        return type(self)(_b.neg(self.p))

    def __mul__(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        return type(self)(_b.add(self.p, other.p))

    def __truediv__(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        return type(self)(_b.add(self.p, _b.neg(other.p)))

    def __pow__(self, k, modulo=None):
        k %= ORDER
        if k == 0 or _b.is_inf(self.p):
            return type(self)(self._zero)
        return type(self)(_b.multiply(self.p, k))

    def __eq__(self, other):
        return type(other) is type(self) and _b.eq(self.p, other.p)

    def __hash__(self):
        return hash(self.to_bytes())

    def __bytes__(self):
        return self.to_bytes()

    def __repr__(self):
        return f"{type(self).__name__}({self.to_bytes().hex()})"


class G1(_Point):
    __slots__ = ()
    _gen = _b.G1
    _zero = _b.Z1

    @staticmethod
    def from_bytes(data: bytes) -> "G1":
        data = bytes(data)
        if len(data) != 48:
            raise ValueError("G1 encoding must be 48 bytes")
        try:
            pt = decompress_G1(int.from_bytes(data, "big"))
        except ValueError as exc:
            raise ValueError(f"invalid G1 encoding: {exc}") from None
        out = G1(pt)
        if out.to_bytes() != data:
            raise ValueError("non-canonical G1 encoding")
        if not _in_subgroup(pt):
            raise ValueError("invalid G1 encoding: not in the prime-order subgroup")
        return out

    def to_bytes(self) -> bytes:
        return compress_G1(self.p).to_bytes(48, "big")


class G2(_Point):
    __slots__ = ()
    _gen = _b.G2
    _zero = _b.Z2

    @staticmethod
    def from_bytes(data: bytes) -> "G2":
        data = bytes(data)
        if len(data) != 96:
            raise ValueError("G2 encoding must be 96 bytes")
        try:
            pt = decompress_G2((int.from_bytes(data[:48], "big"), int.from_bytes(data[48:], "big")))
        except ValueError as exc:
            raise ValueError(f"invalid G2 encoding: {exc}") from None
        out = G2(pt)
        if out.to_bytes() != data:
            raise ValueError("non-canonical G2 encoding")
        if not _in_subgroup(pt):
            raise ValueError("invalid G2 encoding: not in the prime-order subgroup")
        return out

    def to_bytes(self) -> bytes:
        z1, z2 = compress_G2(self.p)
        return z1.to_bytes(48, "big") + z2.to_bytes(48, "big")


def _conj(f):
    # w -> -w, the Frobenius^6 map; equals the inverse on unitary elements
    return _FQ12([c if i % 2 == 0 else -c for i, c in enumerate(f.coeffs)])


def _gt_encode(f) -> bytes:
    c = [int(x) % _Q for x in f.coeffs]
    fq2 = [((c[i] + c[i + 6]) % _Q, c[i + 6]) for i in range(6)]
    out = bytearray()
    for idx in (0, 2, 4, 1, 3, 5):
        a, b = fq2[idx]
        out += a.to_bytes(48, "little") + b.to_bytes(48, "little")
    return bytes(out)


def _gt_decode(data: bytes):
    vals = [int.from_bytes(data[i : i + 48], "little") for i in range(0, 576, 48)]
    if any(v >= _Q for v in vals):
        raise ValueError("non-canonical GT encoding")
    fq2 = {}
    for slot, idx in enumerate((0, 2, 4, 1, 3, 5)):
        fq2[idx] = (vals[2 * slot], vals[2 * slot + 1])
    c = [0] * 12
    for i in range(6):
        a, b = fq2[i]
        c[i + 6] = b
        c[i] = (a - b) % _Q
    return _FQ12(c)


class GT:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    @staticmethod
    def identity() -> "GT":
        return GT(_FQ12.one())

    @staticmethod
    def from_bytes(data: bytes) -> "GT":
        data = bytes(data)
        if len(data) != 576:
            raise ValueError("GT encoding must be 576 bytes")
        v = _gt_decode(data)
        if v == _FQ12.zero():
            raise ValueError("invalid GT encoding: zero")
        if v ** ORDER != _FQ12.one():
            raise ValueError("GT element outside the order-r subgroup")
        return GT(v)

    def to_bytes(self) -> bytes:
        return _gt_encode(self.v)

    def __bytes__(self):
        return self.to_bytes()

    def is_identity(self) -> bool:
        return self.v == _FQ12.one()

    def inverse(self) -> "GT":
        return GT(_conj(self.v))

    def __mul__(self, other):
        if type(other) is not GT:
            raise TypeError("GT can only be multiplied by GT")
        return GT(self.v * other.v)

    def __truediv__(self, other):
        if type(other) is not GT:
            raise TypeError("GT can only be divided by GT")
        return GT(self.v * _conj(other.v))

    def __pow__(self, k, modulo=None):
        k %= ORDER
        if k == 0:
            return GT.identity()
        if k > ORDER // 2:
            return GT(_conj(self.v) ** (ORDER - k))
        return GT(self.v ** k)

    def __eq__(self, other):
        return type(other) is GT and self.v == other.v

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return f"GT({self.to_bytes()[:16].hex()}..)"


def _normalise(f) -> GT:
    # arkworks convention: e_ark = e_pyecc^-3
    inv = _conj(final_exponentiate(f))
    return GT(inv * inv * inv)


def _miller(p: G1, q: G2):
    if _b.is_inf(p.p) or _b.is_inf(q.p):
        return None
    return miller_loop(q.p, p.p, final_exponentiate=False)


def pairing(p: G1, q: G2) -> GT:
    f = _miller(p, q)
    if f is None:
        return GT.identity()
    return _normalise(f)


def multi_pairing(ps, qs) -> GT:
    ps, qs = list(ps), list(qs)
    if len(ps) != len(qs):
        raise ValueError("multi_pairing needs equal-length inputs")
    acc = None
    for p, q in zip(ps, qs):
        f = _miller(p, q)
        if f is not None:
            acc = f if acc is None else acc * f
    if acc is None:
        return GT.identity()
    return _normalise(acc)


def _msm(cls, points, scalars):
    points, scalars = list(points), list(scalars)
    if len(points) != len(scalars):
        raise ValueError("msm needs equal-length inputs")
    acc = cls.identity()
    for p, k in zip(points, scalars):
        acc = acc * (p ** k)
    return acc


def msm_g1(points, scalars) -> G1:
    return _msm(G1, points, scalars)


def msm_g2(points, scalars) -> G2:
    return _msm(G2, points, scalars)


def multi_exp_gt(elems, scalars) -> GT:
    elems, scalars = list(elems), list(scalars)
    if len(elems) != len(scalars):
        raise ValueError("multi_exp_gt needs equal-length inputs")
    acc = GT.identity()
    for e, k in zip(elems, scalars):
        acc = acc * (e ** k)
    return acc


def hash_to_g1(dst: bytes, msg: bytes) -> G1:
    if not dst:
        raise ValueError("domain tag must be non-empty")
    return G1(_hash_to_G1(bytes(msg), bytes(dst), sha256))
