"""Append-only bulletin board and the authority-side deposit checks.

The board is a JSON-lines file (or purely in memory).  Authorities keep a
read cursor, re-verify each new entry once, and index verified payments by
serial number so that a deposit only needs ``identify`` against payments it
actually collides with.
"""

from __future__ import annotations

import base64
import enum
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Mapping

from . import compact, divisible
from .compact import OutcomeKind, SpendRejected
from .wire import DecodeError, provider_of

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoardEntry:
    idx: int
    provider: str
    scheme: str
    payment: bytes
    info: bytes

    def to_json(self) -> str:
        return json.dumps(
            {
                "idx": self.idx,
                "provider": self.provider,
                "scheme": self.scheme,
                "payment_b64": base64.b64encode(self.payment).decode(),
                "info_b64": base64.b64encode(self.info).decode(),
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(line: str) -> "BoardEntry":
        d = json.loads(line)
        return BoardEntry(
            int(d["idx"]), str(d["provider"]), str(d["scheme"]),
            base64.b64decode(d["payment_b64"]), base64.b64decode(d["info_b64"]),
        )


class BulletinBoard:
    """Entries are numbered densely from 1.  With a path, every append is
    written through to the file; a torn last line left by a crash is dropped
    on load."""

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = os.fspath(path) if path is not None else None
        self._entries: list[BoardEntry] = []
        if self.path and os.path.exists(self.path):
            self._load()

    def _load(self):
        with open(self.path, "rb") as fh:
            raw = fh.read()
        end = raw.rfind(b"\n") + 1
        if end < len(raw):
            log.warning("dropping %d bytes of a partial board line", len(raw) - end)
            with open(self.path, "r+b") as fh:
                fh.truncate(end)
        for line in raw[:end].decode().splitlines():
            if line.strip():
                e = BoardEntry.from_json(line)
                if e.idx != len(self._entries) + 1:
                    raise ValueError(f"board index gap at entry {e.idx}")
                self._entries.append(e)

    @property
    def counter(self) -> int:
        return len(self._entries)

    def __len__(self):
        return len(self._entries)

    def append(self, provider: str, scheme: str, payment: bytes, info: bytes) -> int:
        e = BoardEntry(len(self._entries) + 1, provider, scheme, bytes(payment), bytes(info))
        if self.path:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(e.to_json() + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        self._entries.append(e)
        return e.idx

    def read(self, idx: int) -> BoardEntry | None:
        if 1 <= idx <= len(self._entries):
            return self._entries[idx - 1]
        return None

    def serialize(self) -> bytes:
        return "".join(e.to_json() + "\n" for e in self._entries).encode()


class DuplicateDeposit(Exception):
    pass


class Provider:
    """Local bookkeeping of received payments and their deposit flag."""

    def __init__(self, provider_id: str):
        self.id = provider_id
        self._payments: dict[int, list] = {}

    def record(self, scheme: str, payment: bytes, info: bytes) -> int:
        pid = len(self._payments) + 1
        self._payments[pid] = [scheme, bytes(payment), bytes(info), False]
        return pid

    def deposit(self, bb: BulletinBoard, payment_id: int) -> int:
        rec = self._payments.get(payment_id)
        if rec is None:
            raise KeyError(f"unknown payment id {payment_id}")
        if rec[3]:
            raise DuplicateDeposit(f"payment {payment_id} already deposited")
        idx = bb.append(self.id, rec[0], rec[1], rec[2])
        rec[3] = True
        return idx


def deposit(bb: BulletinBoard, provider: Provider, scheme: str, payment: bytes, info: bytes) -> int:
    return provider.deposit(bb, provider.record(scheme, payment, info))


class VerdictKind(enum.Enum):
    NO_DEPOSIT = "NoDeposit"
    GUILTY_PROVIDERS = "GuiltyProviders"
    CLEARED = "Cleared"
    GUILTY_USER = "GuiltyUser"
    UNDETECTED = "Undetected"


@dataclass(frozen=True)
class DepositVerdict:
    kind: VerdictKind
    providers: tuple = ()
    user_id: str | None = None
    pk: object = None

    def describe(self) -> dict:
        out = {"verdict": self.kind.value}
        if self.kind is VerdictKind.GUILTY_PROVIDERS:
            out["providers"] = list(self.providers)
        if self.kind is VerdictKind.GUILTY_USER:
            out["user"] = self.user_id
            out["pk"] = self.pk.to_bytes().hex()
        return out


class _CompactScheme:
    name = "compact"

    def __init__(self, params, vk):
        self.params, self.vk = params, vk

    def load(self, entry: BoardEntry):
        pay = compact.CompactPayment.from_bytes(entry.payment)
        compact.spend_vf(self.params, self.vk, pay, entry.info)
        return pay, [s.to_bytes() for s in pay.serials], None

    def identify(self, pks, a, b):
        return compact.identify(self.params, pks, a.payment, b.payment, a.info, b.info)


class _DivisibleScheme:
    name = "divisible"

    def __init__(self, params: divisible.DivisibleParams, vk):
        self.params, self.vk = params, vk

    def load(self, entry: BoardEntry):
        pay = divisible.DivisiblePayment.from_bytes(entry.payment)
        divisible.d_spend_vf(self.params.user, self.vk, pay, entry.info)
        sns = divisible.d_serial_numbers(self.params.user, self.params.authority, pay)
        return pay, [s.to_bytes() for s in sns], sns

    def identify(self, pks, a, b):
        return divisible.d_identify(
            self.params, pks, a.payment, b.payment, a.info, b.info, sn1=a.extra, sn2=b.extra
        )


@dataclass
class _Verified:
    idx: int
    provider: str
    info: bytes
    payment: object
    serials: list
    extra: object


@dataclass
class AuthorityState:
    scheme: object
    cursor: int = 1
    verified: list = field(default_factory=list)
    by_serial: dict = field(default_factory=dict)
    by_info: dict = field(default_factory=dict)
    skipped: int = 0

    @staticmethod
    def for_compact(params, vk) -> "AuthorityState":
        return AuthorityState(_CompactScheme(params, vk))

    @staticmethod
    def for_divisible(params, vk) -> "AuthorityState":
        return AuthorityState(_DivisibleScheme(params, vk))

    def sync(self, bb: BulletinBoard, upto: int | None = None) -> int:
        """Reads entries from the cursor up to ``upto``; returns how many."""
        last = bb.counter if upto is None else upto
        n = 0
        while self.cursor <= last:
            entry = bb.read(self.cursor)
            self.cursor += 1
            n += 1
            if entry.scheme != self.scheme.name:
                continue
            try:
                pay, serials, extra = self.scheme.load(entry)
            except (DecodeError, SpendRejected, ValueError) as exc:
                self.skipped += 1
                log.warning("skipping board entry %d: %s", entry.idx, exc)
                continue
            rec = _Verified(entry.idx, entry.provider, entry.info, pay, serials, extra)
            self.verified.append(rec)
            self.by_info.setdefault(entry.info, []).append(rec)
            for s in serials:
                self.by_serial.setdefault(s, []).append(rec)
        return n


def deposit_verify(bb: BulletinBoard, state: AuthorityState, registry: Mapping[str, object], info: bytes) -> DepositVerdict:
    state.sync(bb, bb.counter)
    info = bytes(info)
    matches = state.by_info.get(info, [])
    if not matches:
        return DepositVerdict(VerdictKind.NO_DEPOSIT)
    try:
        named = provider_of(info)
    except DecodeError:
        named = None
    if len(matches) > 1:
        counts: dict[str, int] = {}
        for m in matches:
            counts[m.provider] = counts.get(m.provider, 0) + 1
        guilty = [p for p, c in counts.items() if c > 1 or p != named]
        return DepositVerdict(VerdictKind.GUILTY_PROVIDERS, tuple(sorted(guilty)))
    rec = matches[0]
    if rec.provider != named:
        return DepositVerdict(VerdictKind.GUILTY_PROVIDERS, (rec.provider,))
    others = []
    seen = {rec.idx}
    for s in rec.serials:
        for other in state.by_serial.get(s, []):
            if other.idx not in seen:
                seen.add(other.idx)
                others.append(other)
    others.sort(key=lambda r: r.idx)
    ids = list(registry)
    pks = [registry[i] for i in ids]
    for other in others:
        out = state.scheme.identify(pks, rec, other)
        if out.kind is OutcomeKind.DISTINCT:
            continue
        if out.kind is OutcomeKind.GUILTY:
            uid = ids[pks.index(out.pk)]
            return DepositVerdict(VerdictKind.GUILTY_USER, user_id=uid, pk=out.pk)
        if out.kind is OutcomeKind.UNKNOWN:
            return DepositVerdict(VerdictKind.UNDETECTED)
        # equal payment_info would have produced K > 1 above
        return DepositVerdict(VerdictKind.GUILTY_PROVIDERS, (rec.provider, other.provider))
    return DepositVerdict(VerdictKind.CLEARED)
