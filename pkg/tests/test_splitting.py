"""Slot plans: bounded domains, exhaustive round trips, path signatures."""

from datetime import datetime

import pytest

from fpekit import (
    BadParameter,
    Ccn,
    Concat,
    Date,
    DelimStringSet,
    ExampleFormatMismatch,
    FixedString,
    IntegralDomain,
    RankVector,
    Ssn,
    StringSet,
    Union,
    UnsplittableAtom,
    VarString,
    VectorShapeMismatch,
    build_plan,
    contains,
    enumerate_members,
    path_signature,
    rank,
    rank_multi,
    size,
    unrank,
    unrank_multi,
)
from fpekit.errors import NotInFormat
from fpekit.splitting import (
    CcnBlocks,
    CharBlocks,
    LengthBands,
    RankWindow,
    SsnComponents,
    WholeSlot,
    _greedy_groups,
    _mul,
)

from corpus import SMALL_SPECS

DIGITS = "0123456789"
BOUNDS = (2, 3, 7, 10, 64)

# table-backed formats cannot split, so they sit out the tight-bound sweeps
UNSPLITTABLE_OVER = {
    name: size(spec)
    for name, spec in SMALL_SPECS
    if isinstance(spec, (StringSet, DelimStringSet))
}


def test_greedy_grouping():
    assert _greedy_groups([2, 2, 2, 2], 8, _mul) == [(0, 3), (3, 4)]
    assert _greedy_groups([5, 100, 5], 30, _mul) == [(0, 1), (1, 2), (2, 3)]
    assert _greedy_groups([2, 2], 100, _mul) == [(0, 2)]


def test_whole_slot_when_it_fits():
    spec = FixedString(("ab", "01"))
    assert isinstance(build_plan(spec, 4), WholeSlot)
    assert isinstance(build_plan(spec, None), WholeSlot)
    assert isinstance(build_plan(Ssn(), None), WholeSlot)


def test_bound_must_be_sane():
    with pytest.raises(BadParameter):
        build_plan(FixedString(("ab",)), 1)


def test_tables_cannot_split():
    with pytest.raises(UnsplittableAtom):
        build_plan(StringSet(("a", "b", "c")), 2)
    with pytest.raises(UnsplittableAtom):
        build_plan(DelimStringSet(("a|", "b|", "c|"), "|"), 2)


# ---------------------------------------------------------------------------
# exhaustive slot round trips


def test_exhaustive_split_round_trips():
    for name, spec in SMALL_SPECS:
        for bound in BOUNDS:
            if UNSPLITTABLE_OVER.get(name, 0) > bound:
                continue
            for s in enumerate_members(spec, limit=400):
                vec = rank_multi(spec, bound, s)
                assert all(n <= bound for n in vec.sizes), (name, bound, s)
                assert unrank_multi(spec, bound, vec, s) == s, (name, bound, s)


def test_member_determines_signature_and_vector():
    for name, spec in SMALL_SPECS:
        if UNSPLITTABLE_OVER.get(name, 0) > 7:
            continue
        seen = {}
        for s in enumerate_members(spec, limit=400):
            vec = rank_multi(spec, 7, s)
            key = (path_signature(spec, 7, s), vec.ranks, vec.sizes)
            assert seen.setdefault(key, s) == s, (name, s, seen[key])


def test_unbounded_plan_is_plain_ranking():
    for name, spec in SMALL_SPECS[:8]:
        for s in enumerate_members(spec, limit=50):
            vec = rank_multi(spec, None, s)
            assert len(vec) == 1
            assert vec.ranks[0] == rank(spec, s).value
            assert vec.sizes[0] == size(spec)


def test_slot_surgery_stays_in_format(rng):
    """Replacing slot ranks under the same example yields another member."""
    for name, spec in SMALL_SPECS:
        if UNSPLITTABLE_OVER.get(name, 0) > 7:
            continue
        members = list(enumerate_members(spec, limit=120))
        for s in members[:: max(1, len(members) // 8)]:
            vec = rank_multi(spec, 7, s)
            new_ranks = tuple(rng.randrange(n) for n in vec.sizes)
            rebuilt = unrank_multi(spec, 7, RankVector(new_ranks, vec.sizes), s)
            assert contains(spec, rebuilt), (name, s, rebuilt)
            assert rank_multi(spec, 7, rebuilt).ranks == new_ranks, (name, s)


# ---------------------------------------------------------------------------
# vector shape checks


def test_rank_vector_validation():
    with pytest.raises(VectorShapeMismatch):
        RankVector((0, 1), (2,))
    with pytest.raises(VectorShapeMismatch):
        RankVector((2,), (2,))
    with pytest.raises(VectorShapeMismatch):
        RankVector((-1,), (2,))


def test_vector_must_match_plan():
    spec = FixedString(("ab", "01", "xy"))
    s = "a0x"
    vec = rank_multi(spec, 2, s)
    assert vec.sizes == (2, 2, 2)
    with pytest.raises(VectorShapeMismatch):
        unrank_multi(spec, 2, RankVector(vec.ranks[:2], vec.sizes[:2]), s)
    with pytest.raises(VectorShapeMismatch):
        unrank_multi(spec, 2, RankVector(vec.ranks + (0,), vec.sizes + (2,)), s)
    with pytest.raises(VectorShapeMismatch):
        unrank_multi(spec, 2, RankVector((0, 0, 0), (2, 2, 3)), s)


def test_example_must_be_a_member():
    spec = FixedString(("ab",))
    with pytest.raises(ExampleFormatMismatch):
        unrank_multi(spec, None, RankVector((0,), (2,)), "z")
    with pytest.raises(NotInFormat):
        rank_multi(spec, None, "z")


# ---------------------------------------------------------------------------
# plan shapes for the wide primitives


def test_ssn_plan_shapes():
    plan = build_plan(Ssn(), 10**4)
    assert isinstance(plan, SsnComponents)
    assert plan.groups == ((0, 1, None), (1, 2, None), (2, 3, None))

    plan = build_plan(Ssn(), 10**6)
    assert plan.groups == ((0, 2, None), (2, 3, None))

    plan = build_plan(Ssn(), 100)
    assert plan.groups == ((0, 1, 100), (1, 2, None), (2, 3, 100))


def test_ssn_components_compose_to_the_closed_form_rank(rng):
    # slots at the full component bound line up with plain ranking,
    # where the serial varies fastest and the area slowest
    for _ in range(200):
        s = unrank(Ssn(), rng.randrange(size(Ssn())))
        vec = rank_multi(Ssn(), 10**4, s)
        assert vec.sizes == (898, 99, 9999)
        a, g, r = vec.ranks
        assert rank(Ssn(), s).value == r + g * 9999 + a * 9999 * 99


def test_ssn_split_round_trip(rng):
    for bound in (50, 898, 10**4, 10**6):
        for _ in range(60):
            s = unrank(Ssn(), rng.randrange(size(Ssn())))
            vec = rank_multi(Ssn(), bound, s)
            assert all(n <= bound for n in vec.sizes)
            assert unrank_multi(Ssn(), bound, vec, s) == s
            new_ranks = tuple(rng.randrange(n) for n in vec.sizes)
            rebuilt = unrank_multi(Ssn(), bound, RankVector(new_ranks, vec.sizes), s)
            assert contains(Ssn(), rebuilt), (bound, s, rebuilt)


def test_ccn_plan_shape_and_round_trip(rng):
    plan = build_plan(Ccn(), 10**6)
    assert isinstance(plan, CcnBlocks)
    assert [(lo, hi) for lo, hi, _ in plan.blocks] == [(0, 6), (6, 12), (12, 15)]
    for _ in range(100):
        s = unrank(Ccn(), rng.randrange(10**15))
        vec = rank_multi(Ccn(), 10**6, s)
        assert vec.sizes == (10**6, 10**6, 10**3)
        assert unrank_multi(Ccn(), 10**6, vec, s) == s
        new_ranks = tuple(rng.randrange(n) for n in vec.sizes)
        rebuilt = unrank_multi(Ccn(), 10**6, RankVector(new_ranks, vec.sizes), s)
        assert contains(Ccn(), rebuilt), (s, rebuilt)


def test_date_splits_into_rank_windows():
    spec = Date(datetime(2000, 1, 1), datetime(2000, 4, 9))
    plan = build_plan(spec, 7)
    assert isinstance(plan, RankWindow)
    sizes = set()
    for s in enumerate_members(spec):
        vec = rank_multi(spec, 7, s)
        sizes.add(vec.sizes[0])
        assert unrank_multi(spec, 7, vec, s) == s
    assert sizes == {7, 100 - 14 * 7}


def test_fixed_string_splits_positionally():
    spec = FixedString((DIGITS,) * 6)
    plan = build_plan(spec, 10**2)
    assert isinstance(plan, CharBlocks)
    assert [(lo, hi) for lo, hi, _ in plan.blocks] == [(0, 2), (2, 4), (4, 6)]
    vec = rank_multi(spec, 10**2, "123456")
    assert vec.sizes == (100, 100, 100)
    # each block ranks its slice with the leftmost digit least significant
    assert vec.ranks == (21, 43, 65)


def test_var_string_bands_split_by_length():
    spec = VarString(1, 40, "ab")
    plan = build_plan(spec, 2**10)
    assert isinstance(plan, LengthBands)
    s = "ab" * 12
    vec = rank_multi(spec, 2**10, s)
    assert all(n <= 2**10 for n in vec.sizes)
    assert unrank_multi(spec, 2**10, vec, s) == s


def test_union_and_concat_plans_nest():
    spec = Concat(
        (Union((FixedString(("ab",) * 8), FixedString(("01",) * 8))), VarString(1, 9, "xy")),
    )
    for bound in (16, 256):
        for s in ("abababab" + "xyx", "01010101" + "y"):
            vec = rank_multi(spec, bound, s)
            assert all(n <= bound for n in vec.sizes)
            assert unrank_multi(spec, bound, vec, s) == s


# ---------------------------------------------------------------------------
# path signatures


def test_signature_separates_union_branches():
    spec = Union((FixedString(("ab",)), FixedString(("01",))))
    assert path_signature(spec, 2, "a") == path_signature(spec, 2, "b")
    assert path_signature(spec, 2, "a") != path_signature(spec, 2, "0")


def test_signature_separates_length_bands():
    spec = VarString(1, 40, "ab")
    sig = lambda s: path_signature(spec, 2**10, s)  # noqa: E731
    assert sig("a" * 3) == sig("b" * 3)
    assert sig("a" * 3) != sig("a" * 30)


def test_signature_tracks_rank_windows():
    spec = IntegralDomain(0, 99)
    assert path_signature(spec, 10, "42") == (("w", 4),)
    assert path_signature(spec, 10, "47") == (("w", 4),)
    assert path_signature(spec, 10, "52") == (("w", 5),)


def test_signature_empty_for_whole_slot():
    assert path_signature(FixedString(("ab",)), None, "a") == ()


def test_signatures_nest_without_flattening():
    # two adjacent groups must not be confusable with one wider group
    spec = Concat((VarString(1, 2, "ab"), VarString(1, 2, "01")))
    sig = path_signature(spec, 2, "ab01")
    assert isinstance(sig, tuple)
    assert all(isinstance(t, tuple) for t in sig)
    assert path_signature(spec, 2, "ab01") != path_signature(spec, 2, "a01")
