"""Deterministic multi-actor scenarios over the real protocol code.

A scenario is a dict (or JSON file) such as::

    {"scheme": "compact", "t": 3, "n": 5, "L": 10,
     "users": ["alice"], "providers": ["shop"],
     "actions": [
        {"op": "withdraw", "user": "alice"},
        {"op": "spend", "user": "alice", "provider": "shop", "V": 2, "payment": "p1"},
        {"op": "deposit", "payment": "p1"},
        {"op": "depvf", "payment": "p1", "expect": "Cleared"}]}

Every message crossing an actor boundary is serialized and parsed again.
Supported ops: withdraw, spend, clone-wallet, deposit, raw-append, depvf.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

from . import compact, divisible, ledger, threshold
from .wire import make_payment_info


class ScenarioError(Exception):
    pass


@dataclass
class ScenarioResult:
    transcript: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.transcript)


def _digest(b: bytes) -> str:
    return hashlib.sha256(b).hexdigest()[:16]


class _World:
    def __init__(self, sc: dict, rng: random.Random):
        self.rng = rng
        self.scheme = sc.get("scheme", "compact")
        if self.scheme not in ("compact", "divisible"):
            raise ScenarioError(f"unknown scheme {self.scheme!r}")
        self.t, self.n, self.L = int(sc.get("t", 2)), int(sc.get("n", 3)), int(sc.get("L", 10))
        if self.scheme == "compact":
            self.params = compact.setup(self.L, rng)
            self.up = self.params
        else:
            self.params, _ = divisible.d_setup(self.L, rng)
            self.up = self.params.user
        self.vk, self.authorities = threshold.ttp_keygen(self.t, self.n, rng)
        self.users = {u: compact.keygen_user(rng) for u in sc.get("users", [])}
        self.unregistered = set(sc.get("unregistered", []))
        self.providers = {p: ledger.Provider(p) for p in sc.get("providers", [])}
        self.wallets: dict[str, compact.Wallet] = {}
        self.payments: dict[str, dict] = {}
        self.board = ledger.BulletinBoard()
        if self.scheme == "compact":
            self.auth_state = ledger.AuthorityState.for_compact(self.params, self.vk)
        else:
            self.auth_state = ledger.AuthorityState.for_divisible(self.params, self.vk)

    def registry(self) -> dict:
        return {u: kp.pk for u, kp in self.users.items() if u not in self.unregistered}

    def user(self, name):
        if name not in self.users:
            raise ScenarioError(f"undeclared user {name!r}")
        return self.users[name]

    def provider(self, name):
        if name not in self.providers:
            raise ScenarioError(f"undeclared provider {name!r}")
        return self.providers[name]

    # -- actions

    def withdraw(self, a):
        kp = self.user(a["user"])
        wname = a.get("wallet", a["user"])
        req, info = compact.request(self.up, kp.sk, self.rng)
        wire_req = req.to_bytes()
        chosen = a.get("authorities", list(range(1, self.t + 1)))
        partials = []
        for i in chosen:
            share, pub = self.authorities[i - 1]
            got = compact.WithdrawalRequest.from_bytes(wire_req)
            if not compact.request_vf(self.up, got, kp.pk):
                raise ScenarioError(f"authority {i} rejected the request")
            resp = compact.BlindShare.from_bytes(compact.withdraw(share, got).to_bytes())
            part = compact.withdraw_vf(pub, kp.sk, resp, info)
            if part is None:
                raise ScenarioError(f"response of authority {i} failed verification")
            partials.append(part)
        w = compact.create_wallet(self.vk, kp.sk, partials, self.t, scheme=self.scheme)
        if w is None:
            raise ScenarioError("wallet aggregation failed")
        self.wallets[wname] = compact.Wallet.from_dict(w.to_dict())
        return {"wallet": wname, "request": _digest(wire_req)}

    def clone(self, a):
        self.wallets[a["to"]] = self.wallets[a["from"]]
        return {"from": a["from"], "to": a["to"]}

    def spend(self, a):
        kp = self.user(a["user"])
        prov = self.provider(a["provider"])
        wname = a.get("wallet", a["user"])
        V = int(a.get("V", 1))
        named = a.get("info_provider", prov.id)
        info = make_payment_info(named, self.rng.randbytes(16))
        nym = "nym-" + self.rng.randbytes(4).hex()
        w = self.wallets[wname]
        if self.scheme == "compact":
            w2, pay = compact.spend(self.params, self.vk, kp.sk, w, info, V, self.rng)
            wire = pay.to_bytes()
            got = compact.CompactPayment.from_bytes(wire)
            accepted = compact.spend_vf(self.params, self.vk, got, info)
        else:
            w2, pay = divisible.d_spend(self.up, self.vk, kp.sk, w, info, V, self.rng)
            wire = pay.to_bytes()
            got = divisible.DivisiblePayment.from_bytes(wire)
            accepted = divisible.d_spend_vf(self.up, self.vk, got, info)
        self.wallets[wname] = w2
        pid = prov.record(self.scheme, wire, info)
        self.payments[a["payment"]] = {"provider": prov.id, "pid": pid, "bytes": wire, "info": info}
        return {"payment": a["payment"], "V": accepted, "nym": nym, "digest": _digest(wire)}

    def deposit(self, a):
        rec = self.payments[a["payment"]]
        prov = self.provider(a.get("provider", rec["provider"]))
        idx = prov.deposit(self.board, rec["pid"])
        return {"payment": a["payment"], "index": idx}

    def raw_append(self, a):
        # a misbehaving provider writes straight to the board
        rec = self.payments[a["payment"]]
        who = a.get("provider", rec["provider"])
        idx = self.board.append(who, self.scheme, rec["bytes"], rec["info"])
        return {"payment": a["payment"], "index": idx, "writer": who}

    def depvf(self, a):
        rec = self.payments[a["payment"]]
        v = ledger.deposit_verify(self.board, self.auth_state, self.registry(), rec["info"])
        out = v.describe()
        if v.kind is ledger.VerdictKind.GUILTY_USER:
            out.pop("pk", None)
        return out


_OPS = {
    "withdraw": _World.withdraw,
    "clone-wallet": _World.clone,
    "spend": _World.spend,
    "deposit": _World.deposit,
    "raw-append": _World.raw_append,
    "depvf": _World.depvf,
}


def run_scenario(sc: dict, seed: int = 0) -> ScenarioResult:
    rng = random.Random(seed)
    world = _World(sc, rng)
    res = ScenarioResult()
    for step, a in enumerate(sc.get("actions", [])):
        op = a.get("op")
        if op not in _OPS:
            raise ScenarioError(f"step {step}: unknown op {op!r}")
        out = _OPS[op](world, a)
        rec = {"step": step, "op": op, **out}
        res.transcript.append(rec)
        if op == "depvf":
            res.verdicts[a["payment"]] = out
            want = a.get("expect")
            if want is not None and out["verdict"] != want:
                res.failures.append(f"step {step}: expected {want}, got {out['verdict']}")
            if "expect_user" in a and out.get("user") != a["expect_user"]:
                res.failures.append(f"step {step}: expected user {a['expect_user']}, got {out.get('user')}")
            if "expect_providers" in a and sorted(out.get("providers", [])) != sorted(a["expect_providers"]):
                res.failures.append(
                    f"step {step}: expected providers {a['expect_providers']}, got {out.get('providers')}"
                )
    return res


def honest(scheme: str = "compact", t: int = 3, n: int = 5, L: int = 10, V: int = 2) -> dict:
    return {
        "scheme": scheme, "t": t, "n": n, "L": L,
        "users": ["alice"], "providers": ["shop"],
        "actions": [
            {"op": "withdraw", "user": "alice"},
            {"op": "spend", "user": "alice", "provider": "shop", "V": V, "payment": "p1"},
            {"op": "deposit", "payment": "p1"},
            {"op": "depvf", "payment": "p1", "expect": "Cleared"},
        ],
    }


def double_spend(scheme: str = "compact", t: int = 2, n: int = 3, L: int = 10,
                 V1: int = 1, V2: int = 1, bystanders: int = 2) -> dict:
    others = [f"user{i}" for i in range(bystanders)]
    acts = [{"op": "withdraw", "user": u} for u in ["mallory", *others]]
    acts += [
        {"op": "clone-wallet", "from": "mallory", "to": "mallory-copy"},
        {"op": "spend", "user": "mallory", "provider": "shop-a", "V": V1, "payment": "p1"},
        {"op": "spend", "user": "mallory", "wallet": "mallory-copy", "provider": "shop-b", "V": V2, "payment": "p2"},
    ]
    for i, u in enumerate(others):
        acts.append({"op": "spend", "user": u, "provider": "shop-a", "V": 1, "payment": f"h{i}"})
        acts.append({"op": "deposit", "payment": f"h{i}"})
    acts += [
        {"op": "deposit", "payment": "p1"},
        # alone on the board the first copy looks honest
        {"op": "depvf", "payment": "p1", "expect": "Cleared"},
        {"op": "deposit", "payment": "p2"},
        {"op": "depvf", "payment": "p2", "expect": "GuiltyUser", "expect_user": "mallory"},
        {"op": "depvf", "payment": "p1", "expect": "GuiltyUser", "expect_user": "mallory"},
    ]
    acts += [{"op": "depvf", "payment": f"h{i}", "expect": "Cleared"} for i in range(len(others))]
    return {
        "scheme": scheme, "t": t, "n": n, "L": L,
        "users": ["mallory", *others], "providers": ["shop-a", "shop-b"], "actions": acts,
    }


def double_deposit(scheme: str = "compact") -> dict:
    return {
        "scheme": scheme, "t": 2, "n": 3, "L": 4,
        "users": ["alice"], "providers": ["shop"],
        "actions": [
            {"op": "withdraw", "user": "alice"},
            {"op": "spend", "user": "alice", "provider": "shop", "V": 1, "payment": "p1"},
            {"op": "deposit", "payment": "p1"},
            {"op": "raw-append", "payment": "p1"},
            {"op": "depvf", "payment": "p1", "expect": "GuiltyProviders", "expect_providers": ["shop"]},
        ],
    }


def clearance_violation(scheme: str = "compact") -> dict:
    return {
        "scheme": scheme, "t": 2, "n": 3, "L": 4,
        "users": ["alice"], "providers": ["shop", "thief"],
        "actions": [
            {"op": "withdraw", "user": "alice"},
            {"op": "spend", "user": "alice", "provider": "shop", "V": 1, "payment": "p1"},
            {"op": "raw-append", "payment": "p1", "provider": "thief"},
            {"op": "depvf", "payment": "p1", "expect": "GuiltyProviders", "expect_providers": ["thief"]},
        ],
    }


BUILTIN = {
    "honest": honest,
    "double-spend": double_spend,
    "double-deposit": double_deposit,
    "clearance": clearance_violation,
}
