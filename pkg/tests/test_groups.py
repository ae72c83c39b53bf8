import random
from hashlib import sha256

import pytest
from py_ecc.bls.hash import expand_message_xmd

from tecash import groups as grp

P_FIELD = 0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB

# RFC 9380 J.9.1, BLS12381G1_XMD:SHA-256_SSWU_RO_
RFC_DST = b"QUUX-V01-CS02-with-BLS12381G1_XMD:SHA-256_SSWU_RO_"
RFC_VECTORS = [
    (
        b"",
        0x052926ADD2207B76CA4FA57A8734416C8DC95E24501772C814278700EED6D1E4E8CF62D9C09DB0FAC349612B759E79A1,
        0x08BA738453BFED09CB546DBB0783DBB3A5F1F566ED67BB6BE0E8C67E2E81A4CC68EE29813BB7994998F3EAE0C9C6A265,
    ),
    (
        b"abc",
        0x03567BC5EF9C690C2AB2ECDF6A96EF1C139CC0B2F284DCA0A9A7943388A49A3AEE664BA5379A7655D3C68900BE2F6903,
        0x0B9C15F3FE6E5CF4211F346271D7B01C8F3B28BE689C8429C85B67AF215533311F0B8DFAAA154FA6B88176C229F2885D,
    ),
]


def _decode_compressed_x(data: bytes):
    flags = data[0] >> 5
    x = int.from_bytes(bytes([data[0] & 0x1F]) + data[1:], "big")
    return x, flags


@pytest.mark.parametrize("msg,x,y", RFC_VECTORS)
def test_hash_to_g1_rfc_vectors(msg, x, y):
    got_x, flags = _decode_compressed_x(grp.hash_to_g1(RFC_DST, msg).to_bytes())
    assert got_x == x
    assert flags & 0b100  # compressed
    assert bool(flags & 0b001) == (y > (P_FIELD - 1) // 2)


def test_hash_to_scalar_is_xmd_reduced():
    # expand_message_xmd from py_ecc is the oracle here
    data, tag = b"some input", b"TECASH-TEST"
    want = int.from_bytes(expand_message_xmd(data, tag, 48, sha256), "big") % grp.ORDER
    assert grp.hash_to_scalar(tag, data) == want


def test_hash_determinism_and_separation():
    rng = random.Random(5)
    pts, scs = set(), set()
    for _ in range(200):
        m = rng.randbytes(rng.randrange(0, 40))
        a = grp.hash_to_g1(b"T", m)
        assert a == grp.hash_to_g1(b"T", m)
        assert a != grp.hash_to_g1(b"T", m + b"\x00")
        pts.add(a.to_bytes())
        s1, s2 = grp.hash_to_scalar(b"A", m), grp.hash_to_scalar(b"B", m)
        assert s1 != s2 and 0 <= s1 < grp.ORDER
        scs.add(s1)
    assert len(pts) == len(scs)


def test_empty_domain_tag_rejected():
    with pytest.raises(ValueError):
        grp.hash_to_g1(b"", b"x")
    with pytest.raises(ValueError):
        grp.hash_to_scalar(b"", b"x")


def test_hash_to_g1_lands_in_subgroup():
    h = grp.hash_to_g1(b"T", b"subgroup")
    assert (h ** (grp.ORDER - 1)) * h == grp.G1.identity()
    assert not h.is_identity()


def test_pairing_non_degenerate():
    e = grp.pairing(grp.G1.generator(), grp.G2.generator())
    assert not e.is_identity()
    assert (e ** grp.ORDER).is_identity()


def test_bilinearity():
    rng = random.Random(8)
    g, gt = grp.G1.generator(), grp.G2.generator()
    base = grp.pairing(g, gt)
    for _ in range(100):
        a, b = grp.random_scalar(rng), grp.random_scalar(rng)
        assert grp.pairing(g ** a, gt ** b) == base ** (a * b % grp.ORDER)


def test_multi_pairing_matches_product():
    rng = random.Random(9)
    ps = [grp.random_g1(rng) for _ in range(3)]
    qs = [grp.random_g2(rng) for _ in range(3)]
    prod = grp.GT.identity()
    for p, q in zip(ps, qs):
        prod = prod * grp.pairing(p, q)
    assert grp.multi_pairing(ps, qs) == prod


def test_msm_matches_naive():
    rng = random.Random(10)
    for cls, msm in ((grp.G1, grp.msm_g1), (grp.G2, grp.msm_g2)):
        pts = [cls.generator() ** grp.random_scalar(rng) for _ in range(5)]
        ks = [grp.random_scalar(rng, nonzero=False) for _ in range(5)]
        acc = cls.identity()
        for p, k in zip(pts, ks):
            acc = acc * (p ** k)
        assert msm(pts, ks) == acc
    e = grp.pairing(grp.G1.generator(), grp.G2.generator())
    elems = [e ** grp.random_scalar(rng) for _ in range(4)]
    ks = [grp.random_scalar(rng) for _ in range(4)]
    acc = grp.GT.identity()
    for x, k in zip(elems, ks):
        acc = acc * (x ** k)
    assert grp.multi_exp_gt(elems, ks) == acc


def test_group_laws():
    rng = random.Random(3)
    for cls in (grp.G1, grp.G2):
        a = cls.generator() ** grp.random_scalar(rng)
        assert a * a.inverse() == cls.identity()
        assert (a / a).is_identity()
        assert a ** 0 == cls.identity()
        assert a ** grp.ORDER == cls.identity()
        assert a ** (grp.ORDER + 2) == a * a


def test_serialization_round_trip_1000_each():
    rng = random.Random(4)
    g, gt = grp.G1.generator(), grp.G2.generator()
    e = grp.pairing(g, gt)
    for _ in range(1000):
        k = grp.random_scalar(rng)
        for x, cls, n in ((g ** k, grp.G1, grp.G1_LEN), (gt ** k, grp.G2, grp.G2_LEN), (e ** k, grp.GT, grp.GT_LEN)):
            b = x.to_bytes()
            assert len(b) == n
            assert cls.from_bytes(b) == x
        assert grp.scalar_from_bytes(grp.scalar_to_bytes(k)) == k
    for cls in (grp.G1, grp.G2, grp.GT):
        assert cls.from_bytes(cls.identity().to_bytes()) == cls.identity()


def test_deserialize_rejects_garbage():
    g = grp.G1.generator().to_bytes()
    with pytest.raises(ValueError):
        grp.G1.from_bytes(g[:-1])
    with pytest.raises(ValueError):
        grp.G1.from_bytes(b"\xff" * grp.G1_LEN)
    # compressed x = 1 is off the curve
    bad = bytearray(grp.G1_LEN)
    bad[0] = 0x80
    bad[-1] = 0x01
    with pytest.raises(ValueError):
        grp.G1.from_bytes(bytes(bad))
    with pytest.raises(ValueError):
        grp.G2.from_bytes(b"\x00" * grp.G2_LEN)
    # a random Fq12 value is almost never in the order-r subgroup
    junk = bytearray(grp.pairing(grp.G1.generator(), grp.G2.generator()).to_bytes())
    junk[5] ^= 1
    with pytest.raises(ValueError):
        grp.GT.from_bytes(bytes(junk))


def test_scalar_encoding_rejects_non_canonical():
    with pytest.raises(ValueError):
        grp.scalar_from_bytes(grp.ORDER.to_bytes(32, "little"))
    with pytest.raises(ValueError):
        grp.scalar_from_bytes(b"\x00" * 31)
    assert grp.scalar_to_bytes(grp.ORDER + 5) == grp.scalar_to_bytes(5)


def test_encode_is_length_prefixed():
    assert grp.encode(b"ab", b"c") != grp.encode(b"a", b"bc")
    assert grp.encode(b"") == b"\x00\x00\x00\x00"


def test_inv():
    assert grp.inv(2) * 2 % grp.ORDER == 1
    with pytest.raises(ZeroDivisionError):
        grp.inv(grp.ORDER)


def test_group_id():
    assert grp.group_id(grp.G1.generator()) == 1
    assert grp.group_id(grp.G2.generator()) == 2
    assert grp.group_id(grp.GT.identity()) == 3
    with pytest.raises(TypeError):
        grp.group_id(5)
