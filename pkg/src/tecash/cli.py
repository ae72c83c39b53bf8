"""tecash command line.

Exit codes: 0 success, 1 a verification or protocol check failed,
2 usage error or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys

from . import artifacts as art
from . import bench, compact, denom, divisible, harness, ledger, threshold
from .compact import SpendRejected
from .wire import DecodeError, make_payment_info

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


def _rng(args):
    return random.Random(args.seed) if args.seed is not None else None


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _load(path, kind, scheme=None):
    return art.load(_read(path), kind, scheme)


def _params(args, need_authority=False):
    scheme, payload = _load(args.params, "params", args.scheme)
    return scheme, art.params_from_payload(scheme, payload, need_authority)


def _vk(path):
    _, payload = _load(path, "vk")
    return art.vk_from_payload(payload)


def _user(path, need_secret=True):
    _, payload = _load(path, "user-key")
    uid, pk, sk = art.user_key_from_payload(payload)
    if need_secret and sk is None:
        raise UsageError(f"{path} holds only a public key")
    return uid, pk, sk


def _parse_denoms(text: str) -> tuple:
    try:
        return denom.check_denoms(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --denoms: {exc}") from None


# ---------------------------------------------------------------- commands


def cmd_setup(args):
    rng = _rng(args)
    if args.scheme == "compact":
        params = compact.setup(args.coins, rng)
        _write(args.out, art.dump("params", "compact", art.params_payload(params)))
        return
    params, _ = divisible.d_setup(args.coins, rng)
    _write(args.out, art.dump("params", "divisible", art.params_payload(params)))
    if args.user_out:
        _write(args.user_out, art.dump("params", "divisible", art.params_payload(params, art.PART_USER)))


def cmd_keygen_authorities(args):
    vk, pairs = threshold.ttp_keygen(args.threshold, args.authorities, _rng(args))
    os.makedirs(args.out, exist_ok=True)
    publics = [p for _, p in pairs]
    _write(os.path.join(args.out, "vk.json"), art.dump("vk", args.scheme, art.vk_payload(args.threshold, vk, publics)))
    for share, _ in pairs:
        path = os.path.join(args.out, f"share-{share.index}.json")
        _write(path, art.dump("authority-share", args.scheme, art.share_payload(share)))
    print(f"wrote vk.json and {len(pairs)} shares to {args.out}")


def cmd_keygen_user(args):
    kp = compact.keygen_user(_rng(args))
    _write(args.out, art.dump("user-key", args.scheme, art.user_key_payload(args.id, kp)))
    if args.pub_out:
        _write(args.pub_out, art.dump("user-key", args.scheme, art.user_key_payload(args.id, kp, True)))


def cmd_request(args):
    scheme, params = _params(args)
    uid, pk, sk = _user(args.user)
    req, info = compact.request(art.user_params(params), sk, _rng(args))
    _write(args.out, art.dump("request", scheme, art.request_payload(uid, pk, req)))
    _write(args.state_out, art.dump("request-info", scheme, info.to_bytes()))


def cmd_issue(args):
    scheme, params = _params(args)
    _, payload = _load(args.share, "authority-share")
    share = art.share_from_payload(payload)
    _, rp = _load(args.request, "request", scheme)
    uid, pk, req = art.request_from_payload(rp)
    if not compact.request_vf(art.user_params(params), req, pk):
        raise CheckFailed(f"request from {uid} rejected: bad-proof")
    _write(args.out, art.dump("response", scheme, compact.withdraw(share, req).to_bytes()))


def cmd_aggregate(args):
    scheme, _params_obj = _params(args)
    t, vk, publics = _vk(args.vk)
    _, _, sk = _user(args.user)
    _, ip = _load(args.state, "request-info", scheme)
    info = compact.RequestInfo.from_bytes(ip)
    partials = []
    for path in args.responses:
        _, rp = _load(path, "response", scheme)
        resp = compact.BlindShare.from_bytes(rp)
        pub = publics.get(resp.index)
        if pub is None:
            raise CheckFailed(f"{path}: no authority with index {resp.index}")
        part = compact.withdraw_vf(pub, sk, resp, info)
        if part is None:
            raise CheckFailed(f"{path}: response of authority {resp.index} does not verify")
        partials.append(part)
    if len(partials) < t:
        raise CheckFailed(f"need {t} valid responses, have {len(partials)}")
    wallet = compact.create_wallet(vk, sk, partials[:t], t, scheme=scheme)
    if wallet is None:
        raise CheckFailed("aggregated signature does not verify")
    payload = json.dumps(wallet.to_dict(), sort_keys=True).encode()
    _write(args.out, art.dump("wallet", scheme, payload))


def _load_wallet(path, scheme):
    _, payload = _load(path, "wallet", scheme)
    try:
        return compact.Wallet.from_dict(json.loads(payload))
    except (ValueError, KeyError, TypeError) as exc:
        raise DecodeError(f"bad wallet: {exc}") from None


def cmd_spend(args):
    scheme, params = _params(args)
    _, vk, _ = _vk(args.vk)
    _, _, sk = _user(args.user)
    wallet = _load_wallet(args.wallet, scheme)
    rng = _rng(args)
    nonce = rng.randbytes(16) if rng is not None else None
    info = make_payment_info(args.provider, nonce)
    try:
        if scheme == "compact":
            w2, pay = compact.spend(params, vk, sk, wallet, info, args.value, rng)
        else:
            w2, pay = divisible.d_spend(art.user_params(params), vk, sk, wallet, info, args.value, rng)
    except ValueError as exc:
        raise CheckFailed(str(exc)) from None
    _write(args.out, art.dump("payment", scheme, art.payment_payload(info, pay.to_bytes())))
    wallet_out = args.wallet_out or args.wallet
    _write(wallet_out, art.dump("wallet", scheme, json.dumps(w2.to_dict(), sort_keys=True).encode()))


def _verify(scheme, params, vk, info, pay):
    if scheme == "compact":
        return compact.spend_vf(params, vk, pay, info)
    return divisible.d_spend_vf(art.user_params(params), vk, pay, info)


def cmd_verify_payment(args):
    scheme, params = _params(args)
    _, vk, _ = _vk(args.vk)
    try:
        _, payload = _load(args.inp, "payment", scheme)
        info, pay, _ = art.payment_from_payload(scheme, payload)
        V = _verify(scheme, params, vk, info, pay)
    except SpendRejected as exc:
        raise CheckFailed(f"rejected: {exc.reason}") from None
    except (DecodeError, art.ArtifactError) as exc:
        raise CheckFailed(f"rejected: malformed ({exc})") from None
    print(json.dumps({"valid": True, "V": V}))


def cmd_deposit(args):
    scheme, params = _params(args)
    _, vk, _ = _vk(args.vk)
    _, payload = _load(args.inp, "payment", scheme)
    info, pay, raw = art.payment_from_payload(scheme, payload)
    try:
        _verify(scheme, params, vk, info, pay)
    except SpendRejected as exc:
        raise CheckFailed(f"not depositing an invalid payment: {exc.reason}") from None
    bb = ledger.BulletinBoard(args.board)
    idx = ledger.deposit(bb, ledger.Provider(args.provider), scheme, raw, info)
    print(json.dumps({"index": idx}))


def cmd_depvf(args):
    scheme, params = _params(args, need_authority=True)
    _, vk, _ = _vk(args.vk)
    _, payload = _load(args.inp, "payment", scheme)
    info, _, _ = art.payment_from_payload(scheme, payload)
    registry = {}
    for path in args.registry:
        uid, pk, _ = _user(path, need_secret=False)
        registry[uid] = pk
    if scheme == "compact":
        state = ledger.AuthorityState.for_compact(params, vk)
    else:
        state = ledger.AuthorityState.for_divisible(params, vk)
    bb = ledger.BulletinBoard(args.board)
    verdict = ledger.deposit_verify(bb, state, registry, info)
    out = verdict.describe()
    if state.skipped:
        out["skipped_entries"] = state.skipped
    print(json.dumps(out, sort_keys=True))


def cmd_denom_avg(args):
    ds = _parse_denoms(args.denoms)
    if args.pmax < 1:
        raise UsageError("--pmax must be at least 1")
    avg = denom.average_coins(ds, args.pmax)
    print(f"{float(avg):.4f}" if avg.denominator != 1 else str(avg.numerator))


def cmd_denom_plan(args):
    ds = _parse_denoms(args.denoms)
    if args.price < 1:
        raise UsageError("--price must be at least 1")
    plan = denom.greedy_decompose(args.price, ds)
    print(json.dumps({
        "price": args.price,
        "plan": [{"denomination": d, "count": n} for d, n in plan],
        "coins": sum(n for _, n in plan),
        "spend_calls": len(plan),
    }))


def cmd_bench(args):
    schemes = ("compact", "divisible") if args.scheme == "both" else (args.scheme,)
    ops = bench.OPS if args.op == "all" else (args.op,)
    seed = args.seed if args.seed is not None else 0
    timings = bench.run(schemes, ops, args.iters, args.coins, args.registry, seed)
    sys.stdout.write(bench.format_tsv(timings))


def cmd_scenario(args):
    if args.builtin:
        sc = harness.BUILTIN[args.builtin](args.scheme)
    elif args.inp:
        try:
            sc = json.loads(_read(args.inp))
        except ValueError as exc:
            raise UsageError(f"bad scenario file: {exc}") from None
    else:
        raise UsageError("give --in FILE or --builtin NAME")
    try:
        res = harness.run_scenario(sc, args.seed if args.seed is not None else 0)
    except (harness.ScenarioError, KeyError) as exc:
        raise UsageError(f"bad scenario: {exc}") from None
    _write(args.out, res.jsonl())
    for f in res.failures:
        print(f, file=sys.stderr)
    if not res.ok:
        raise CheckFailed(f"{len(res.failures)} scenario assertion(s) failed")


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tecash", description="Threshold-issued offline e-cash tools.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, fn, help_, scheme=True, seed=False):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        if scheme:
            sp.add_argument("--scheme", choices=art.SCHEMES, default="compact")
        if seed:
            sp.add_argument("--seed", type=int, default=None, help="deterministic randomness (testing only)")
        return sp

    sp = cmd("setup", cmd_setup, "generate public parameters", seed=True)
    sp.add_argument("--coins", type=int, default=10, help="wallet size L")
    sp.add_argument("--out", required=True)
    sp.add_argument("--user-out", help="divisible: also write the user half of the params")

    sp = cmd("keygen-authorities", cmd_keygen_authorities, "trusted-dealer threshold keys", seed=True)
    sp.add_argument("--threshold", "-t", type=int, required=True)
    sp.add_argument("--authorities", "-n", type=int, required=True)
    sp.add_argument("--out", required=True, help="output directory")

    sp = cmd("keygen-user", cmd_keygen_user, "user key pair", seed=True)
    sp.add_argument("--id", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--pub-out")

    sp = cmd("request", cmd_request, "start a withdrawal", seed=True)
    sp.add_argument("--params", required=True)
    sp.add_argument("--user", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--state-out", required=True, help="secret request state kept by the user")

    sp = cmd("issue", cmd_issue, "authority answers a withdrawal request")
    sp.add_argument("--params", required=True)
    sp.add_argument("--share", required=True)
    sp.add_argument("--request", "--in", dest="request", required=True)
    sp.add_argument("--out", required=True)

    sp = cmd("aggregate", cmd_aggregate, "combine t responses into a wallet")
    sp.add_argument("--params", required=True)
    sp.add_argument("--vk", required=True)
    sp.add_argument("--user", required=True)
    sp.add_argument("--state", required=True)
    sp.add_argument("--responses", nargs="+", required=True)
    sp.add_argument("--out", required=True)

    sp = cmd("spend", cmd_spend, "pay V coins to a provider", seed=True)
    sp.add_argument("--params", required=True)
    sp.add_argument("--vk", required=True)
    sp.add_argument("--user", required=True)
    sp.add_argument("--wallet", required=True)
    sp.add_argument("--wallet-out", help="defaults to overwriting --wallet")
    sp.add_argument("--provider", required=True)
    sp.add_argument("--value", "-V", type=int, default=1)
    sp.add_argument("--out", required=True)

    sp = cmd("verify-payment", cmd_verify_payment, "provider-side payment check")
    sp.add_argument("--params", required=True)
    sp.add_argument("--vk", required=True)
    sp.add_argument("--in", dest="inp", required=True)

    sp = cmd("deposit", cmd_deposit, "append a verified payment to the board")
    sp.add_argument("--params", required=True)
    sp.add_argument("--vk", required=True)
    sp.add_argument("--board", required=True)
    sp.add_argument("--provider", required=True)
    sp.add_argument("--in", dest="inp", required=True)

    sp = cmd("depvf", cmd_depvf, "authority-side deposit verification")
    sp.add_argument("--params", required=True)
    sp.add_argument("--vk", required=True)
    sp.add_argument("--board", required=True)
    sp.add_argument("--in", dest="inp", required=True, help="payment whose payment_info is queried")
    sp.add_argument("--registry", nargs="*", default=[], help="user-key files (public or secret)")

    sp = cmd("denom-avg", cmd_denom_avg, "average coins per price over [1, pmax]", scheme=False)
    sp.add_argument("--denoms", required=True)
    sp.add_argument("--pmax", type=int, required=True)

    sp = cmd("denom-plan", cmd_denom_plan, "greedy spend plan for a price", scheme=False)
    sp.add_argument("--denoms", default=",".join(map(str, denom.EURO)))
    sp.add_argument("--price", type=int, required=True)

    sp = cmd("bench", cmd_bench, "time spend, spend_vf and identify", scheme=False, seed=True)
    sp.add_argument("--scheme", choices=(*art.SCHEMES, "both"), default="both")
    sp.add_argument("--op", choices=(*bench.OPS, "all"), default="all")
    sp.add_argument("--iters", type=int, default=20)
    sp.add_argument("--coins", type=int, default=10)
    sp.add_argument("--registry", type=int, default=100)

    sp = cmd("scenario", cmd_scenario, "run a scripted multi-actor scenario", seed=True)
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--builtin", choices=sorted(harness.BUILTIN))
    sp.add_argument("--out", help="transcript path (default stdout)")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"tecash: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.fn(args)
    except CheckFailed as exc:
        print(f"tecash: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, art.ArtifactError, DecodeError, ValueError) as exc:
        print(f"tecash: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
