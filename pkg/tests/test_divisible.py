import random
from dataclasses import replace

import pytest

from tecash import divisible, sig_sps
from tecash import groups as grp
from tecash.compact import OutcomeKind, SpendRejected

from _util import World


def sn_oracle(world, wallet, pay):
    """e(varsigma, g~)^(sn y^(l+k)) straight from the setup trapdoors."""
    p = grp.ORDER
    base = grp.pairing(grp.G1.generator(), grp.G2.generator()) ** world.trap.z
    return [base ** (wallet.sn * pow(world.trap.y, wallet.l + k, p) % p) for k in range(pay.V)]


def test_setup_structure(div_world):
    w = div_world
    up, ap, trap = w.params.user, w.params.authority, w.trap
    assert ap.entry_count == w.L * (w.L + 1) // 2
    for l in range(1, w.L + 1):
        _, vs, th, tau = up.level(l)
        assert sig_sps.sps_verify(up.sps_pk, tau, vs, th)
    vs1 = up.level(1)[1]
    g, gt = grp.G1.generator(), grp.G2.generator()
    for k in range(w.L):
        want = grp.pairing(g ** (trap.z * pow(trap.y, 1 + k, grp.ORDER) % grp.ORDER), gt)
        assert grp.pairing(vs1, up.delta_tilde[k]) == want
    with pytest.raises(ValueError):
        ap.row(0)
    with pytest.raises(ValueError):
        divisible.d_setup(0)


def test_params_bytes_round_trip(div_world):
    up, ap = div_world.params.user, div_world.params.authority
    assert divisible.DivUserParams.from_bytes(up.to_bytes()) == up
    assert divisible.DivAuthorityParams.from_bytes(ap.to_bytes()) == ap
    # user params grow linearly with L, authority params quadratically
    small, _ = divisible.d_setup(3, random.Random(1))
    assert len(ap.to_bytes()) > len(small.authority.to_bytes()) * 5


def test_wallet_interop_with_compact_withdrawal(div_world):
    wal = div_world.wallet()
    assert wal.scheme == "divisible" and wal.l == 1
    with pytest.raises(ValueError):
        divisible.d_spend(div_world.up, div_world.vk, div_world.users[0].sk, replace(wal, scheme="compact"), div_world.info(), 1)


def test_spend_round_trip(div_world):
    w = div_world
    wal = w.wallet()
    w2, pay, info = w.spend(wal, V=3)
    assert w2.l == 4
    assert w.verify(pay, info) == 3
    again = divisible.DivisiblePayment.from_bytes(pay.to_bytes())
    assert again == pay and w.verify(again, info) == 3


def test_serial_numbers_match_trapdoor_oracle(div_world):
    w = div_world
    wal = w.wallet()
    for V in (1, 2, 3):
        nxt, pay, _ = w.spend(wal, V=V)
        sns = divisible.d_serial_numbers(w.params.user, w.params.authority, pay)
        assert len(sns) == V
        assert sns == sn_oracle(w, wal, pay)
        wal = nxt


def test_disjoint_and_cloned_serials(div_world):
    w = div_world
    up, ap = w.params.user, w.params.authority
    wal = w.wallet()
    mid, p1, _ = w.spend(wal, V=2)
    _, p2, _ = w.spend(mid, V=2)
    s1 = {s.to_bytes() for s in divisible.d_serial_numbers(up, ap, p1)}
    s2 = {s.to_bytes() for s in divisible.d_serial_numbers(up, ap, p2)}
    assert not s1 & s2
    _, p3, _ = w.spend(wal, V=2)
    s3 = {s.to_bytes() for s in divisible.d_serial_numbers(up, ap, p3)}
    assert s3 == s1


def test_wallet_boundary_one_based(div_world):
    w = div_world
    wal = w.wallet()
    full, pay, info = w.spend(wal, V=w.L)
    assert full.l == w.L + 1 and w.verify(pay, info) == w.L
    with pytest.raises(ValueError):
        w.spend(full, V=1)
    part, _, _ = w.spend(wal, V=w.L - 1)
    w.spend(part, V=1)
    with pytest.raises(ValueError):
        w.spend(part, V=2)


def test_constant_payment_size(div_world):
    w = div_world
    wal = w.wallet()
    sizes = {len(w.spend(wal, V=V)[1].to_bytes()) for V in (1, 2, 5, w.L)}
    assert len(sizes) == 1


def test_spend_vf_rejections(div_world):
    w = div_world
    wal = w.wallet()
    _, pay, info = w.spend(wal, V=2)
    with pytest.raises(SpendRejected) as exc:
        w.verify(replace(pay, R=(pay.R + 1) % grp.ORDER), info)
    assert exc.value.reason == "bad-info"
    g = grp.G1.generator()
    with pytest.raises(SpendRejected) as exc:
        w.verify(replace(pay, vs_l=pay.vs_l * g), info)
    assert exc.value.reason == "bad-proof"
    # the proof pins V: changing it moves the serial rows
    with pytest.raises(SpendRejected):
        w.verify(replace(pay, V=3), info)
    with pytest.raises(SpendRejected):
        w.verify(replace(pay, V=w.L + 1), info)
    other = bytearray(info)
    other[-1] ^= 1
    with pytest.raises(SpendRejected):
        w.verify(pay, bytes(other))


def test_identify_outcomes(div_world):
    w = div_world
    cheat, honest = w.users[0], w.users[1]
    pks = [u.pk for u in w.users]
    wal = w.wallet(cheat)
    after, p1, i1 = w.spend(wal, V=3, user=cheat)
    _, p2, i2 = w.spend(wal, V=1, user=cheat, info=w.info("other"))
    out = w.identify(pks, p1, p2, i1, i2)
    assert out.kind is OutcomeKind.GUILTY and out.pk == cheat.pk
    # overlapping but shifted ranges still identify
    shifted, _, _ = w.spend(wal, V=1, user=cheat)
    _, p4, i4 = w.spend(shifted, V=3, user=cheat, info=w.info("third"))
    assert w.identify(pks, p1, p4, i1, i4).pk == cheat.pk
    _, p3, i3 = w.spend(after, V=2, user=cheat)
    assert w.identify(pks, p1, p3, i1, i3).kind is OutcomeKind.DISTINCT
    assert w.identify(pks, p1, p1, i1, i1).kind is OutcomeKind.DOUBLE_DEPOSIT
    assert w.identify([honest.pk], p1, p2, i1, i2).kind is OutcomeKind.UNKNOWN


def test_identify_cheater_last_in_100_keys():
    w = World("divisible", L=4, t=1, n=1, users=100, seed=5)
    cheat = w.users[-1]
    wal = w.wallet(cheat)
    _, p1, i1 = w.spend(wal, V=1, user=cheat)
    _, p2, i2 = w.spend(wal, V=1, user=cheat, info=w.info("b"))
    out = w.identify([u.pk for u in w.users], p1, p2, i1, i2)
    assert out.kind is OutcomeKind.GUILTY and out.pk == cheat.pk


def test_payment_decode_rejects_truncation(div_world):
    w = div_world
    _, pay, _ = w.spend(w.wallet(), V=1)
    raw = pay.to_bytes()
    with pytest.raises(ValueError):
        divisible.DivisiblePayment.from_bytes(raw[:-1])
    with pytest.raises(ValueError):
        divisible.DivisiblePayment.from_bytes(raw + b"\x00")
