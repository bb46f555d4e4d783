"""Format tree validation, counting, membership, parsing, enumeration."""

from datetime import datetime

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fpekit import (
    Ccn,
    Concat,
    Date,
    DelimStringSet,
    DelimVarString,
    FixedString,
    IntegralDomain,
    InvalidFormat,
    Range,
    Ssn,
    StringSet,
    Union,
    VarString,
    alphabet,
    contains,
    ensure_valid,
    enumerate_members,
    is_rigid,
    luhn_digit,
    parse,
    reassemble,
    size,
    validate,
)
from fpekit.errors import BadLength, NonDigit, ParseFailure

from corpus import PREFIX_SPECS, SMALL_SPECS


def codes(spec):
    return {v.code for v in validate(spec)}


# ---------------------------------------------------------------------------
# validation


def test_corpus_is_clean():
    for name, spec in SMALL_SPECS + PREFIX_SPECS:
        assert validate(spec) == [], name


def test_small_corpus_is_small_and_large_enough():
    assert len(SMALL_SPECS) >= 25
    for name, spec in SMALL_SPECS:
        assert size(spec) <= 10**4, name


def test_empty_charset_rejected():
    assert "EmptyAlphabet" in codes(FixedString(("ab", "")))
    assert "EmptyAlphabet" in codes(VarString(1, 2, ""))


def test_no_positions_rejected():
    assert "BadParameter" in codes(FixedString(()))


def test_bad_length_bounds():
    assert "BadBounds" in codes(VarString(3, 2, "ab"))
    assert "BadBounds" in codes(VarString(-1, 2, "ab"))
    assert "BadBounds" in codes(IntegralDomain(5, 4))
    assert "BadBounds" in codes(Range(FixedString(("ab",)), "-", 0, 2))
    assert "BadBounds" in codes(Range(FixedString(("ab",)), "-", 3, 2))


def test_delimiter_rules():
    assert "BadDelimiter" in codes(DelimVarString(1, 2, "ab", "xy"))
    assert "DelimiterInAlphabet" in codes(DelimVarString(1, 2, "ab", "a"))
    assert "DelimiterInAlphabet" in codes(Range(FixedString(("ab",)), "a", 1, 2))
    assert "BadDelimiter" in codes(
        Concat((FixedString(("ab",)), FixedString(("cd",))), ("--",))
    )
    assert "DelimiterInAlphabet" in codes(
        Concat((FixedString(("ab",)), FixedString(("cd",))), ("a",))
    )


def test_concat_delim_count():
    bad = Concat((FixedString(("ab",)), FixedString(("cd",))), ("-", "-"))
    assert "BadParameter" in codes(bad)


def test_table_rules():
    assert "EmptyFormat" in codes(StringSet(()))
    assert "EmptyFormat" in codes(DelimStringSet((), "|"))
    assert "BadParameter" in codes(DelimStringSet(("a",)))
    assert "BadParameter" in codes(DelimStringSet(("a|",), "|", prefix_free=True))
    assert "BadDelimiter" in codes(DelimStringSet(("ab",), "|"))
    assert "BadDelimiter" in codes(DelimStringSet(("a|b|",), "|"))
    assert "NotPrefixFree" in codes(DelimStringSet(("car", "carpet"), prefix_free=True))


def test_table_duplicates_collapse():
    t = StringSet(("a", "b", "a"))
    assert t.strings == ("a", "b")


def test_union_overlap_rejected():
    u = Union((FixedString(("abc",)), FixedString(("cde",))))
    assert "OverlappingUnionAlphabets" in codes(u)


def test_union_double_empty_rejected():
    u = Union((VarString(0, 1, "ab"), VarString(0, 1, "01")))
    assert "AmbiguousUnion" in codes(u)


def test_concat_inseparable_rejected():
    c = Concat((VarString(1, 2, "ab"), VarString(1, 2, "bc")))
    assert "InseparableConcat" in codes(c)


def test_rigid_left_part_separates_shared_alphabet():
    c = Concat((FixedString(("ab", "ab")), VarString(0, 2, "ab")))
    assert validate(c) == []


def test_date_rules():
    assert "BadParameter" in codes(Date(datetime(2000, 1, 1), datetime(2000, 1, 2), "week"))
    assert "BadBounds" in codes(Date(datetime(2000, 1, 2), datetime(2000, 1, 1)))
    assert "BadParameter" in codes(Date(datetime(2000, 1, 1, 12), datetime(2000, 1, 2)))
    assert "BadParameter" in codes(
        Date(datetime(2000, 1, 1), datetime(2000, 1, 1, 0, 0, 0, 500), "second")
    )
    assert validate(Date(datetime(2000, 1, 1, 12), datetime(2000, 1, 2), "second")) == []


def test_violation_paths_point_at_subtrees():
    spec = Concat((FixedString(("ab",)), Union((VarString(2, 1, "xy"),))))
    paths = {v.path for v in validate(spec)}
    assert ".parts[1].parts[0]" in paths


def test_ensure_valid_raises_with_details():
    with pytest.raises(InvalidFormat) as exc:
        ensure_valid(VarString(3, 1, "ab"))
    assert "BadBounds" in str(exc.value)


def test_non_node_rejected():
    assert "BadParameter" in codes("not a spec")


# ---------------------------------------------------------------------------
# rigidity, size, alphabet


def test_rigid_table():
    assert is_rigid(Ssn())
    assert is_rigid(Ccn())
    assert is_rigid(Date(datetime(2000, 1, 1), datetime(2000, 1, 2)))
    assert is_rigid(FixedString(("ab",)))
    assert is_rigid(DelimVarString(1, 2, "ab", "-"))
    assert is_rigid(DelimStringSet(("a|",), "|"))
    assert not is_rigid(VarString(2, 2, "ab"))
    assert not is_rigid(StringSet(("a",)))
    assert not is_rigid(IntegralDomain(0, 9))
    assert not is_rigid(Union((FixedString(("ab",)),)))
    assert not is_rigid(Concat((FixedString(("ab",)),)))
    assert not is_rigid(Range(FixedString(("ab",)), "-", 1, 2))


def test_size_matches_enumeration():
    for name, spec in SMALL_SPECS:
        members = list(enumerate_members(spec))
        assert len(members) == size(spec), name
        assert len(set(members)) == len(members), name


def test_size_pins():
    assert size(Ssn()) == 898 * 99 * 9999 == 888_931_098
    assert size(Ccn()) == 10**15
    assert size(Date(datetime(2000, 1, 1), datetime(2000, 1, 1))) == 1
    assert size(Date(datetime(1900, 1, 1), datetime(1900, 12, 31))) == 365
    assert size(VarString(0, 3, "ab")) == 1 + 2 + 4 + 8
    assert size(IntegralDomain(-5, 5)) == 11


def test_alphabet_covers_members():
    for name, spec in SMALL_SPECS:
        alpha = alphabet(spec)
        for s in enumerate_members(spec, limit=200):
            assert set(s) <= alpha, name


def test_charsets_normalize():
    f = FixedString(("bbaa", "10"))
    assert f.charsets == ("ab", "01")
    v = VarString(1, 2, "zza")
    assert v.alphabet == "az"


# ---------------------------------------------------------------------------
# membership


def test_membership_agrees_with_enumeration():
    for name, spec in SMALL_SPECS:
        for s in enumerate_members(spec, limit=300):
            assert contains(spec, s), (name, s)


def test_membership_rejects_near_misses():
    assert not contains(Ssn(), "66612345")
    assert not contains(Ssn(), "666123456")
    assert not contains(Ssn(), "000123456")
    assert not contains(Ssn(), "900123456")
    assert not contains(Ssn(), "123003456")
    assert not contains(Ssn(), "123450000")
    assert not contains(Ssn(), "12345678a")
    assert contains(Ssn(), "899999999")

    assert not contains(Ccn(), "0" * 15)
    assert not contains(Ccn(), "0" * 17)
    assert contains(Ccn(), "0" * 16)
    assert not contains(Ccn(), "0" * 15 + "5")

    d = Date(datetime(2000, 1, 1), datetime(2000, 12, 31))
    assert contains(d, "29.02.2000")
    assert not contains(d, "30.02.2000")
    assert not contains(d, "29.2.2000")
    assert not contains(d, "2000-02-29")
    assert not contains(d, "01.01.2001")

    i = IntegralDomain(-5, 120)
    assert contains(i, "-5")
    assert contains(i, "0")
    assert not contains(i, "05")
    assert not contains(i, "+5")
    assert not contains(i, "-0")
    assert not contains(i, "121")

    v = DelimVarString(1, 3, "ab", "-")
    assert contains(v, "ab-")
    assert not contains(v, "ab")
    assert not contains(v, "-")
    assert not contains(v, "abab-")


def test_compound_membership_is_parse_success():
    spec = Concat((VarString(1, 2, "ab"), VarString(1, 2, "01")))
    assert contains(spec, "ab01")
    assert not contains(spec, "ab")
    assert not contains(spec, "01ab0")

    r = Range(FixedString(("ab",)), "-", 1, 2)
    assert contains(r, "a-b-")
    assert not contains(r, "a-b")
    assert not contains(r, "a--")
    assert not contains(r, "a-b-a-")


# ---------------------------------------------------------------------------
# check digits


def independent_luhn_ok(s):
    """Right-to-left doubling, the textbook way; deliberately not the
    library's left-indexed formula."""
    total = 0
    for pos, ch in enumerate(reversed(s)):
        d = int(ch)
        if pos % 2 == 1:
            d = sum(divmod(2 * d, 10))
        total += d
    return total % 10 == 0


def test_luhn_pins():
    assert luhn_digit("0" * 15) == "0"
    assert luhn_digit("453201511283036") == "6"


@given(st.text(alphabet="0123456789", min_size=15, max_size=15))
def test_luhn_agrees_with_independent_validator(payload):
    assert independent_luhn_ok(payload + luhn_digit(payload))


def test_luhn_rejects_bad_input():
    with pytest.raises(BadLength):
        luhn_digit("123")
    with pytest.raises(NonDigit):
        luhn_digit("12345678901234x")


# ---------------------------------------------------------------------------
# parsing


def test_parse_reassemble_round_trip():
    for name, spec in SMALL_SPECS:
        for s in enumerate_members(spec, limit=300):
            assert reassemble(spec, parse(spec, s)) == s, (name, s)


def test_parse_failures():
    spec = Concat((VarString(1, 2, "ab"), VarString(1, 2, "cd")), ("-",))
    with pytest.raises(ParseFailure):
        parse(spec, "ab_cd")
    with pytest.raises(ParseFailure):
        parse(spec, "abc-cd")
    with pytest.raises(ParseFailure):
        parse(Union((FixedString(("ab",)),)), "z")
    with pytest.raises(ParseFailure):
        parse(Range(FixedString(("ab",)), "-", 2, 3), "a-")


def test_parse_tags_union_branch():
    u = Union((FixedString(("ab",)), FixedString(("01",))))
    assert parse(u, "1").pieces == (("1", 1),)


def test_parse_range_counts_pieces():
    r = Range(FixedString(("ab",)), "-", 1, 3)
    assert parse(r, "a-b-a-").repetitions == 3


# ---------------------------------------------------------------------------
# enumeration order


def test_enumeration_prefix_is_stable():
    got = list(enumerate_members(VarString(1, 2, "ab"), limit=6))
    assert got == ["a", "b", "aa", "ba", "ab", "bb"]


def test_enumeration_first_position_varies_fastest():
    got = list(enumerate_members(FixedString(("ab", "01"))))
    assert got == ["a0", "b0", "a1", "b1"]


def test_ssn_enumeration_starts_at_first_valid():
    got = list(enumerate_members(Ssn(), limit=3))
    assert got == ["001010001", "001010002", "001010003"]


def test_ccn_enumeration_carries_check_digit():
    got = list(enumerate_members(Ccn(), limit=3))
    assert got == ["0000000000000000", "0000000000000018", "0000000000000026"]
    assert all(independent_luhn_ok(s) for s in got)


def test_enumeration_respects_limit():
    assert len(list(enumerate_members(Ccn(), limit=10))) == 10
