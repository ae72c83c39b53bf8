import random

import pytest

from tecash import groups as grp
from tecash import sig_ps


@pytest.fixture
def keys(rng):
    return sig_ps.ps_keygen(2, rng)


def test_key_consistency(rng):
    _, pk = sig_ps.ps_keygen(1, rng)
    assert pk.consistent()
    b, bt = pk.betas[0]
    assert grp.pairing(grp.G1.generator(), bt) == grp.pairing(b, grp.G2.generator())


def test_sign_verify_and_cross_key(rng, keys):
    sk, pk = keys
    _, pk2 = sig_ps.ps_keygen(2, rng)
    msgs = [grp.random_scalar(rng), grp.random_scalar(rng)]
    sig = sig_ps.ps_sign(sk, msgs, rng)
    assert sig_ps.ps_verify(pk, sig, msgs)
    assert not sig_ps.ps_verify(pk2, sig, msgs)


def test_sign_on_base_oracle(rng, keys):
    sk, pk = keys
    h = grp.random_g1(rng)
    sig = sig_ps.ps_sign_on_base(sk, h, [0, 0])
    assert sig.s == h ** sk.x
    assert sig_ps.ps_verify(pk, sig, [0, 0])
    m = [5, 7]
    s1 = sig_ps.ps_sign_on_base(sk, h, m)
    assert s1 == sig_ps.ps_sign_on_base(sk, h, m)
    assert s1.s == h ** ((sk.x + sk.ys[0] * 5 + sk.ys[1] * 7) % grp.ORDER)


def test_sign_on_base_rejects_bad_input(keys):
    sk, _ = keys
    with pytest.raises(ValueError):
        sig_ps.ps_sign_on_base(sk, grp.G1.identity(), [1, 2])
    with pytest.raises(ValueError):
        sig_ps.ps_sign_on_base(sk, grp.G1.generator(), [1])


def test_verify_rejections(rng, keys):
    sk, pk = keys
    msgs = [11, 12]
    sig = sig_ps.ps_sign(sk, msgs, rng)
    assert not sig_ps.ps_verify(pk, sig_ps.PsSignature(grp.G1.identity(), grp.G1.identity()), msgs)
    assert not sig_ps.ps_verify(pk, sig, [12, 12])
    assert not sig_ps.ps_verify(pk, sig, [11, 13])
    assert not sig_ps.ps_verify(pk, sig_ps.PsSignature(sig.h, sig.s * grp.G1.generator()), msgs)


def test_single_scalar_mutation_sweep(rng, keys):
    sk, pk = keys
    for _ in range(20):
        msgs = [grp.random_scalar(rng), grp.random_scalar(rng)]
        sig = sig_ps.ps_sign(sk, msgs, rng)
        assert sig_ps.ps_verify(pk, sig, msgs)
        i = rng.randrange(2)
        bad = list(msgs)
        bad[i] = (bad[i] + rng.randrange(1, grp.ORDER)) % grp.ORDER
        assert not sig_ps.ps_verify(pk, sig, bad)


def test_randomize_identity_and_kappa(rng, keys):
    sk, pk = keys
    msgs = [21, 22]
    sig = sig_ps.ps_sign(sk, msgs, rng)
    same, comp = sig_ps.ps_randomize(sig, 0, 1)
    assert same == sig and comp == grp.G2.identity()
    r, rp = grp.random_scalar(rng), grp.random_scalar(rng)
    sig2, comp2 = sig_ps.ps_randomize(sig, r, rp)
    assert comp2 == grp.G2.generator() ** r
    kappa = sig_ps.message_key(pk, msgs) * comp2
    assert sig_ps.verify_with_key(sig2, kappa)
    assert not sig_ps.verify_with_key(sig2, sig_ps.message_key(pk, msgs))
    sig3, _ = sig_ps.ps_randomize(sig, r, grp.random_scalar(rng))
    assert sig3.h != sig2.h and sig3.s != sig2.s
    with pytest.raises(ValueError):
        sig_ps.ps_randomize(sig, 1, 0)


def test_randomized_signatures_always_verify(rng, keys):
    sk, pk = keys
    msgs = [grp.random_scalar(rng), grp.random_scalar(rng)]
    sig = sig_ps.ps_sign(sk, msgs, rng)
    mk = sig_ps.message_key(pk, msgs)
    for _ in range(10):
        r, rp = grp.random_scalar(rng), grp.random_scalar(rng)
        s2, comp = sig_ps.ps_randomize(sig, r, rp)
        assert sig_ps.verify_with_key(s2, mk * comp)
