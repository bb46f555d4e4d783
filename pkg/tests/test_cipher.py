"""Whole-string encryption: permutation property, config knobs, tweaks."""

import pytest

from fpekit import (
    BadParameter,
    CipherConfig,
    Concat,
    Fe1Backend,
    FixedString,
    IntFpeKey,
    NotInFormat,
    Ssn,
    Union,
    VarString,
    WalkRecorder,
    contains,
    decrypt,
    encrypt,
    enumerate_members,
    format_fingerprint,
    keygen,
    size,
    unrank,
)

DIGITS = "0123456789"

KEY_A = IntFpeKey(bytes(range(32)))
KEY_B = IntFpeKey(bytes(range(1, 33)))

SMALL = Union((FixedString(("abc", "01")), VarString(1, 2, "xy")))


def test_encrypt_is_a_permutation_of_the_format():
    cfg = CipherConfig()
    members = list(enumerate_members(SMALL))
    for key in (KEY_A, KEY_B):
        images = [encrypt(cfg, key, SMALL, m) for m in members]
        assert sorted(images) == sorted(members)
        for m, c in zip(members, images):
            assert contains(SMALL, c)
            assert decrypt(cfg, key, SMALL, c) == m


def test_determinism_and_key_separation():
    cfg = CipherConfig()
    members = list(enumerate_members(SMALL))
    first = [encrypt(cfg, KEY_A, SMALL, m) for m in members]
    again = [encrypt(cfg, KEY_A, SMALL, m) for m in members]
    other = [encrypt(cfg, KEY_B, SMALL, m) for m in members]
    assert first == again
    assert first != other


def test_tweak_separates_and_str_equals_utf8_bytes():
    cfg = CipherConfig()
    members = list(enumerate_members(SMALL))
    plain = [encrypt(cfg, KEY_A, SMALL, m) for m in members]
    tagged = [encrypt(cfg, KEY_A, SMALL, m, tweak=b"col") for m in members]
    assert plain != tagged
    for m in members:
        assert encrypt(cfg, KEY_A, SMALL, m, tweak="col") == encrypt(
            cfg, KEY_A, SMALL, m, tweak=b"col"
        )
        assert decrypt(cfg, KEY_A, SMALL, encrypt(cfg, KEY_A, SMALL, m, tweak=b"col"), tweak=b"col") == m


def test_round_count_changes_the_mapping():
    members = list(enumerate_members(SMALL))
    base = [encrypt(CipherConfig(), KEY_A, SMALL, m) for m in members]
    short = [encrypt(CipherConfig(rounds=6), KEY_A, SMALL, m) for m in members]
    assert base != short
    for m in members:
        c = encrypt(CipherConfig(rounds=6), KEY_A, SMALL, m)
        assert decrypt(CipherConfig(rounds=6), KEY_A, SMALL, c) == m


def test_slot_bound_changes_the_mapping_but_not_the_format():
    spec = FixedString((DIGITS,) * 4)
    whole = CipherConfig()
    split = CipherConfig(max_size=100)
    members = [f"{i:04d}" for i in (0, 7, 1234, 9999, 4242)]
    w = [encrypt(whole, KEY_A, spec, m) for m in members]
    s = [encrypt(split, KEY_A, spec, m) for m in members]
    assert w != s
    for m, c in zip(members, s):
        assert contains(spec, c)
        assert decrypt(split, KEY_A, spec, c) == m


def test_fingerprint_binds_format_and_bound():
    spec = FixedString((DIGITS,) * 4)
    other = FixedString((DIGITS,) * 5)
    assert format_fingerprint(spec, None) != format_fingerprint(spec, 100)
    assert format_fingerprint(spec, None) != format_fingerprint(other, None)
    assert len(format_fingerprint(spec, None)) == 32
    assert format_fingerprint(spec, 100) == format_fingerprint(FixedString((DIGITS,) * 4), 100)


def test_injected_backend_sees_only_bounded_domains():
    spec = FixedString((DIGITS,) * 4)
    rec = WalkRecorder()
    cfg = CipherConfig(max_size=100)
    c = encrypt(cfg, KEY_A, spec, "4242", backend=Fe1Backend(recorder=rec))
    assert contains(spec, c)
    assert len(rec.events) == 2
    assert all(domain <= 100 for domain, _ in rec.events)


def test_split_ssn_round_trip(rng):
    cfg = CipherConfig(max_size=10**4)
    for _ in range(25):
        m = unrank(Ssn(), rng.randrange(size(Ssn())))
        c = encrypt(cfg, KEY_A, Ssn(), m)
        assert contains(Ssn(), c)
        assert decrypt(cfg, KEY_A, Ssn(), c) == m


def test_compound_round_trip_under_every_bound(rng):
    spec = Concat((FixedString(("AB",)), VarString(1, 3, "abc"), FixedString((DIGITS,))))
    members = list(enumerate_members(spec))
    sample = [members[rng.randrange(len(members))] for _ in range(30)]
    for bound in (3, 26, None):
        cfg = CipherConfig(max_size=bound, rounds=8)
        for m in sample:
            c = encrypt(cfg, KEY_A, spec, m)
            assert contains(spec, c)
            assert decrypt(cfg, KEY_A, spec, c) == m


def test_rejects_non_members():
    with pytest.raises(NotInFormat):
        encrypt(CipherConfig(), KEY_A, SMALL, "zz")
    with pytest.raises(NotInFormat):
        decrypt(CipherConfig(), KEY_A, SMALL, "zz")


def test_config_validation():
    with pytest.raises(BadParameter):
        CipherConfig(max_size=1)
    with pytest.raises(BadParameter):
        CipherConfig(rounds=2)


def test_keygen_shapes():
    k = keygen()
    assert isinstance(k, IntFpeKey)
    assert len(k.secret) == 32
    assert len(keygen(128).secret) == 32
    assert keygen().secret != keygen().secret
    with pytest.raises(BadParameter):
        keygen(192)
