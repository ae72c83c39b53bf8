"""Versioned JSON envelopes for everything the CLI writes to disk."""

from __future__ import annotations

import base64
import json
import struct

from . import compact, divisible
from . import groups as grp
from .sig_ps import PsPublicKey
from .threshold import AuthorityKeyShare, AuthorityPublicShare
from .wire import DecodeError, Reader, pack

VERSION = 1
SCHEMES = ("compact", "divisible")
KINDS = (
    "params", "vk", "authority-share", "user-key", "wallet", "payment", "board-entry",
    "request", "request-info", "response",
)

# params payloads start with a part byte so divisible params can be split
PART_FULL, PART_USER, PART_AUTHORITY = 0, 1, 2
# user-key payloads start with a flag byte
KEY_SECRET, KEY_PUBLIC = 0, 1


class ArtifactError(ValueError):
    pass


def dump(kind: str, scheme: str, payload: bytes) -> str:
    if kind not in KINDS:
        raise ArtifactError(f"unknown artifact kind {kind!r}")
    if scheme not in SCHEMES:
        raise ArtifactError(f"unknown scheme {scheme!r}")
    env = {
        "kind": kind,
        "scheme": scheme,
        "version": f"{scheme}/v{VERSION}",
        "payload_b64": base64.b64encode(payload).decode(),
    }
    return json.dumps(env, sort_keys=True, indent=1) + "\n"


def load(text: str, kind: str, scheme: str | None = None) -> tuple[str, bytes]:
    """Returns (scheme, payload) after checking kind, scheme and version."""
    try:
        env = json.loads(text)
        got_kind, got_scheme, version = env["kind"], env["scheme"], env["version"]
        payload = base64.b64decode(env["payload_b64"], validate=True)
    except (ValueError, KeyError, TypeError) as exc:
        raise ArtifactError(f"not an artifact file: {exc}") from None
    if got_kind != kind:
        raise ArtifactError(f"expected a {kind} artifact, found {got_kind}")
    if got_scheme not in SCHEMES or (scheme is not None and got_scheme != scheme):
        raise ArtifactError(f"scheme mismatch: expected {scheme}, found {got_scheme}")
    if version != f"{got_scheme}/v{VERSION}":
        raise ArtifactError(f"unsupported version {version!r}")
    return got_scheme, payload


def _lp(b: bytes) -> bytes:
    return struct.pack(">I", len(b)) + b


def _take_lp(r: Reader) -> bytes:
    return r.take(r.u32())


# ---------------------------------------------------------------- params


def params_payload(params, part: int = PART_FULL) -> bytes:
    if isinstance(params, compact.CompactParams):
        return bytes([PART_FULL]) + params.to_bytes()
    if part == PART_USER:
        return bytes([PART_USER]) + params.user.to_bytes()
    if part == PART_AUTHORITY:
        return bytes([PART_AUTHORITY]) + params.authority.to_bytes()
    return bytes([PART_FULL]) + _lp(params.user.to_bytes()) + _lp(params.authority.to_bytes())


def params_from_payload(scheme: str, payload: bytes, need_authority: bool = False):
    """Compact: CompactParams.  Divisible: DivisibleParams, or DivUserParams
    when only the user half is present."""
    if not payload:
        raise ArtifactError("empty params payload")
    part, body = payload[0], payload[1:]
    if scheme == "compact":
        if part != PART_FULL:
            raise ArtifactError("bad compact params part")
        return compact.CompactParams.from_bytes(body)
    if part == PART_USER:
        if need_authority:
            raise ArtifactError("these divisible params lack the authority half")
        return divisible.DivUserParams.from_bytes(body)
    if part != PART_FULL:
        raise ArtifactError("authority-only params cannot be used here")
    r = Reader(body)
    up = divisible.DivUserParams.from_bytes(_take_lp(r))
    ap = divisible.DivAuthorityParams.from_bytes(_take_lp(r))
    r.done()
    if ap.L != up.L:
        raise ArtifactError("user and authority params disagree on L")
    return divisible.DivisibleParams(up, ap)


def user_params(params):
    return params.user if isinstance(params, divisible.DivisibleParams) else params


# ---------------------------------------------------------------- keys


def _ps_pk_bytes(pk: PsPublicKey) -> bytes:
    out = struct.pack(">H", pk.q) + pk.alpha_tilde.to_bytes()
    for b, bt in pk.betas:
        out += b.to_bytes() + bt.to_bytes()
    return out


def _read_ps_pk(r: Reader) -> PsPublicKey:
    q = r.u16()
    at = r.g2()
    betas = tuple((r.g1(), r.g2()) for _ in range(q))
    return PsPublicKey(at, betas)


def vk_payload(t: int, vk: PsPublicKey, publics) -> bytes:
    out = struct.pack(">HH", t, len(publics)) + _ps_pk_bytes(vk)
    for p in publics:
        out += struct.pack(">I", p.index) + _ps_pk_bytes(p.pk)
    return out


def vk_from_payload(payload: bytes):
    """Returns (t, vk, {index: AuthorityPublicShare})."""
    r = Reader(payload)
    t, n = struct.unpack(">HH", r.take(4))
    vk = _read_ps_pk(r)
    publics = {}
    for _ in range(n):
        i = r.u32()
        publics[i] = AuthorityPublicShare(i, _read_ps_pk(r))
    r.done()
    if not 1 <= t <= n:
        raise DecodeError("threshold out of range")
    return t, vk, publics


def share_payload(share: AuthorityKeyShare) -> bytes:
    return struct.pack(">IH", share.index, len(share.ys)) + pack(share.x, *share.ys)


def share_from_payload(payload: bytes) -> AuthorityKeyShare:
    r = Reader(payload)
    idx, q = struct.unpack(">IH", r.take(6))
    x = r.scalar()
    ys = tuple(r.scalar() for _ in range(q))
    r.done()
    return AuthorityKeyShare(idx, x, ys)


def user_key_payload(user_id: str, kp: compact.UserKeyPair, public_only: bool = False) -> bytes:
    uid = _lp(user_id.encode())
    if public_only:
        return bytes([KEY_PUBLIC]) + uid + kp.pk.to_bytes()
    return bytes([KEY_SECRET]) + uid + kp.pk.to_bytes() + grp.scalar_to_bytes(kp.sk)


def user_key_from_payload(payload: bytes):
    """Returns (user_id, pk, sk or None)."""
    r = Reader(payload)
    flag = r.take(1)[0]
    uid = _take_lp(r).decode()
    pk = r.g1()
    sk = None
    if flag == KEY_SECRET:
        sk = r.scalar()
        if grp.G1.generator() ** sk != pk:
            raise DecodeError("user secret key does not match its public key")
    elif flag != KEY_PUBLIC:
        raise DecodeError("bad user-key flag")
    r.done()
    return uid, pk, sk


# ---------------------------------------------------------------- withdrawal and payments


def request_payload(user_id: str, pk, req: compact.WithdrawalRequest) -> bytes:
    return _lp(user_id.encode()) + pk.to_bytes() + req.to_bytes()


def request_from_payload(payload: bytes):
    r = Reader(payload)
    uid = _take_lp(r).decode()
    pk = r.g1()
    req = compact.WithdrawalRequest.from_bytes(r.take(len(payload) - r.pos))
    return uid, pk, req


def payment_payload(info: bytes, payment_bytes: bytes) -> bytes:
    return _lp(info) + payment_bytes


def payment_from_payload(scheme: str, payload: bytes):
    """Returns (info, payment object, raw payment bytes)."""
    r = Reader(payload)
    info = _take_lp(r)
    raw = r.take(len(payload) - r.pos)
    if scheme == "compact":
        return info, compact.CompactPayment.from_bytes(raw), raw
    return info, divisible.DivisiblePayment.from_bytes(raw), raw
