import base64
import json

import pytest

from tecash import artifacts as art
from tecash.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(params=["compact", "divisible"])
def pipeline(request, tmp_path, capsys):
    """Runs setup through aggregate and returns the working paths."""
    s = request.param
    d = tmp_path
    P = dict(params=d / "params.json", vk=d / "auth" / "vk.json", user=d / "alice.json", pub=d / "alice.pub.json",
             wallet=d / "wallet.json", scheme=s, dir=d)
    assert run(capsys, "setup", "--scheme", s, "--coins", 5, "--seed", 1, "--out", P["params"])[0] == 0
    assert run(capsys, "keygen-authorities", "--scheme", s, "-t", 2, "-n", 3, "--seed", 2, "--out", d / "auth")[0] == 0
    assert run(capsys, "keygen-user", "--scheme", s, "--id", "alice", "--seed", 3, "--out", P["user"], "--pub-out", P["pub"])[0] == 0
    assert run(capsys, "request", "--scheme", s, "--params", P["params"], "--user", P["user"], "--seed", 4,
               "--out", d / "req.json", "--state-out", d / "state.json")[0] == 0
    for i in (1, 3):
        code, _, err = run(capsys, "issue", "--scheme", s, "--params", P["params"], "--share", d / "auth" / f"share-{i}.json",
                           "--in", d / "req.json", "--out", d / f"resp{i}.json")
        assert code == 0, err
    code, _, err = run(capsys, "aggregate", "--scheme", s, "--params", P["params"], "--vk", P["vk"], "--user", P["user"],
                       "--state", d / "state.json", "--responses", d / "resp1.json", d / "resp3.json", "--out", P["wallet"])
    assert code == 0, err
    return P


def _spend(capsys, P, provider, out, V=1, wallet=None, seed=None):
    args = ["spend", "--scheme", P["scheme"], "--params", P["params"], "--vk", P["vk"], "--user", P["user"],
            "--wallet", wallet or P["wallet"], "--provider", provider, "-V", V, "--out", out]
    if seed is not None:
        args += ["--seed", seed]
    return run(capsys, *args)


def test_full_pipeline(pipeline, capsys):
    P, d, s = pipeline, pipeline["dir"], pipeline["scheme"]
    clone = d / "clone.json"
    clone.write_text(P["wallet"].read_text())
    assert _spend(capsys, P, "shop", d / "pay.json", V=2)[0] == 0
    code, out, _ = run(capsys, "verify-payment", "--scheme", s, "--params", P["params"], "--vk", P["vk"], "--in", d / "pay.json")
    assert code == 0 and json.loads(out) == {"valid": True, "V": 2}
    board = d / "board.jsonl"
    common = ["--scheme", s, "--params", P["params"], "--vk", P["vk"], "--board", board]
    code, out, _ = run(capsys, "deposit", *common, "--provider", "shop", "--in", d / "pay.json")
    assert code == 0 and json.loads(out) == {"index": 1}
    code, out, _ = run(capsys, "depvf", *common, "--in", d / "pay.json", "--registry", P["pub"])
    assert json.loads(out)["verdict"] == "Cleared"
    # the cloned wallet spends the same coins again elsewhere
    assert _spend(capsys, P, "cafe", d / "pay2.json", wallet=clone)[0] == 0
    assert run(capsys, "deposit", *common, "--provider", "cafe", "--in", d / "pay2.json")[0] == 0
    code, out, _ = run(capsys, "depvf", *common, "--in", d / "pay2.json", "--registry", P["pub"])
    v = json.loads(out)
    assert code == 0 and v["verdict"] == "GuiltyUser" and v["user"] == "alice"


def test_wallet_counter_persists(pipeline, capsys):
    P, d = pipeline, pipeline["dir"]
    assert _spend(capsys, P, "shop", d / "a.json", V=4)[0] == 0
    code, _, err = _spend(capsys, P, "shop", d / "b.json", V=2)
    assert code == 1 and "cannot spend" in err


def test_tampered_payment_exits_1(pipeline, capsys):
    P, d, s = pipeline, pipeline["dir"], pipeline["scheme"]
    assert _spend(capsys, P, "shop", d / "pay.json")[0] == 0
    env = json.loads((d / "pay.json").read_text())
    raw = bytearray(base64.b64decode(env["payload_b64"]))
    raw[len(raw) - 10] ^= 0x01
    env["payload_b64"] = base64.b64encode(bytes(raw)).decode()
    (d / "bad.json").write_text(json.dumps(env))
    code, _, err = run(capsys, "verify-payment", "--scheme", s, "--params", P["params"], "--vk", P["vk"], "--in", d / "bad.json")
    assert code == 1 and "rejected" in err


def test_kind_and_scheme_mismatch(pipeline, capsys):
    P, s = pipeline, pipeline["scheme"]
    other = "divisible" if s == "compact" else "compact"
    code, _, err = run(capsys, "verify-payment", "--scheme", other, "--params", P["params"], "--vk", P["vk"], "--in", P["wallet"])
    assert code == 2 and "scheme mismatch" in err
    code, _, err = run(capsys, "verify-payment", "--scheme", s, "--params", P["params"], "--vk", P["vk"], "--in", P["wallet"])
    assert code == 1 and "expected a payment" in err


def test_public_key_cannot_spend(pipeline, capsys):
    P, d = pipeline, pipeline["dir"]
    args = ["spend", "--scheme", P["scheme"], "--params", P["params"], "--vk", P["vk"], "--user", P["pub"],
            "--wallet", P["wallet"], "--provider", "x", "--out", d / "p.json"]
    assert run(capsys, *args)[0] == 2


def test_divisible_user_params_split(tmp_path, capsys):
    full, user = tmp_path / "full.json", tmp_path / "user.json"
    assert run(capsys, "setup", "--scheme", "divisible", "--coins", 3, "--seed", 1, "--out", full, "--user-out", user)[0] == 0
    _, payload = art.load(user.read_text(), "params", "divisible")
    assert payload[0] == art.PART_USER
    assert len(user.read_text()) < len(full.read_text())
    with pytest.raises(art.ArtifactError):
        art.params_from_payload("divisible", payload, need_authority=True)


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "setup", "--scheme", "barter", "--out", "x")[0] == 2
    assert run(capsys, "verify-payment", "--params", "/nonexistent", "--vk", "x", "--in", "y")[0] == 2
    assert run(capsys, "denom-avg", "--denoms", "2,5", "--pmax", 10)[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_denom_commands(capsys):
    code, out, _ = run(capsys, "denom-avg", "--denoms", "1,2,5", "--pmax", 10)
    assert code == 0 and out.strip() == "1.9000"
    code, out, _ = run(capsys, "denom-plan", "--denoms", "1,2,5,10,20,50,100,500,1000", "--price", 1267)
    plan = json.loads(out)
    assert plan["coins"] == 7 and plan["spend_calls"] == 6
    assert {"denomination": 100, "count": 2} in plan["plan"]


def test_scenario_command(tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    code, _, _ = run(capsys, "scenario", "--builtin", "clearance", "--scheme", "compact", "--seed", 2, "--out", out)
    assert code == 0
    last = json.loads(out.read_text().splitlines()[-1])
    assert last["verdict"] == "GuiltyProviders" and last["providers"] == ["thief"]
    sc = {"scheme": "compact", "t": 1, "n": 1, "L": 2, "users": ["a"], "providers": ["s"],
          "actions": [{"op": "withdraw", "user": "a"},
                      {"op": "spend", "user": "a", "provider": "s", "payment": "p"},
                      {"op": "deposit", "payment": "p"},
                      {"op": "depvf", "payment": "p", "expect": "GuiltyUser"}]}
    f = tmp_path / "sc.json"
    f.write_text(json.dumps(sc))
    assert run(capsys, "scenario", "--in", f, "--out", tmp_path / "o.jsonl")[0] == 1
    assert run(capsys, "scenario")[0] == 2


def test_bench_prints_tsv(capsys):
    code, out, _ = run(capsys, "bench", "--scheme", "both", "--op", "spend_vf", "--iters", 2, "--coins", 3, "--registry", 5)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split("\t")[0].strip() == "scheme"
    assert any(l.startswith("compact") for l in lines) and any(l.startswith("divisible") for l in lines)
    assert any(l.startswith("spend_vf") for l in lines)


def test_artifact_envelope_checks():
    text = art.dump("payment", "compact", b"abc")
    assert art.load(text, "payment", "compact") == ("compact", b"abc")
    env = json.loads(text)
    env["version"] = "compact/v9"
    with pytest.raises(art.ArtifactError):
        art.load(json.dumps(env), "payment")
    with pytest.raises(art.ArtifactError):
        art.load("not json", "payment")
    with pytest.raises(art.ArtifactError):
        art.dump("mystery", "compact", b"")
