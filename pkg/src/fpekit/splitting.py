"""Splitting oversized formats into vectors of bounded rank slots.

A plan is built once per (format, bound) pair. Ranking a member walks the
plan and emits (rank, slot_size) pairs with every slot size at most the
bound; unranking consumes such a vector and needs an example member to pin
down the value-dependent choices (union branch, length band, rank window)
that the vector itself does not encode. Greedy grouping keeps adjacent
units together while the aggregate stays within the bound, which uses the
fewest groups possible for a left-to-right partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    BadParameter,
    ExampleFormatMismatch,
    NotInFormat,
    UnsplittableAtom,
    VectorShapeMismatch,
)
from .formats import (
    Ccn,
    Concat,
    Date,
    DelimStringSet,
    DelimVarString,
    FixedString,
    IntegralDomain,
    Range,
    Ssn,
    StringSet,
    Union,
    VarString,
    contains,
    ensure_valid,
    luhn_digit,
    parse,
    size,
)
from .ranking import _rank_value, _unrank_value

__all__ = ["RankVector", "build_plan", "rank_multi", "unrank_multi", "path_signature"]


@dataclass(frozen=True)
class RankVector:
    """Per-slot ranks and domain sizes, in plan order."""

    ranks: tuple
    sizes: tuple

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(self.ranks))
        object.__setattr__(self, "sizes", tuple(self.sizes))
        if len(self.ranks) != len(self.sizes):
            raise VectorShapeMismatch(
                f"{len(self.ranks)} ranks against {len(self.sizes)} sizes"
            )
        for i, (r, n) in enumerate(zip(self.ranks, self.sizes)):
            if not 0 <= r < n:
                raise VectorShapeMismatch(f"slot {i}: rank {r} not in [0, {n})")

    def __len__(self):
        return len(self.ranks)


class _Cursor:
    def __init__(self, vector: RankVector):
        self._pairs = list(zip(vector.ranks, vector.sizes))
        self._pos = 0

    def take(self, expected_size: int) -> int:
        if self._pos >= len(self._pairs):
            raise VectorShapeMismatch("rank vector exhausted")
        r, n = self._pairs[self._pos]
        if n != expected_size:
            raise VectorShapeMismatch(
                f"slot {self._pos}: vector size {n}, plan expects {expected_size}"
            )
        self._pos += 1
        return r

    def finish(self) -> None:
        if self._pos != len(self._pairs):
            raise VectorShapeMismatch(
                f"{len(self._pairs) - self._pos} slots left unconsumed"
            )


def _add(a, b):
    return a + b


def _mul(a, b):
    return a * b


def _greedy_groups(sizes, max_size, combine):
    """Left-to-right grouping: extend while the aggregate fits the bound.

    An element larger than the bound becomes its own group and is split
    further downstream.
    """
    groups = []
    start = 0
    agg = None
    for i, sz in enumerate(sizes):
        if sz > max_size:
            if agg is not None:
                groups.append((start, i))
            groups.append((i, i + 1))
            agg = None
            start = i + 1
        elif agg is None:
            agg = sz
            start = i
        else:
            nxt = combine(agg, sz)
            if nxt > max_size:
                groups.append((start, i))
                start = i
                agg = sz
            else:
                agg = nxt
    if agg is not None:
        groups.append((start, len(sizes)))
    return groups


# ---------------------------------------------------------------------------
# plan nodes


@dataclass(frozen=True)
class WholeSlot:
    """The whole format fits in one slot."""

    spec: object

    def rank_into(self, s, out):
        out.append((_rank_value(self.spec, s), size(self.spec)))

    def unrank_from(self, cursor, f):
        return _unrank_value(self.spec, cursor.take(size(self.spec)))

    def path_signature(self, s):
        return ()


@dataclass(frozen=True)
class UnionGroups:
    """Consecutive union parts grouped by summed size.

    A member is ranked within its group only; which group applies is read
    off the example during unranking, so the slot never encodes it.
    """

    spec: object
    groups: tuple

    def _group_of(self, s):
        part_idx = parse(self.spec, s).pieces[0][1]
        for gi, (lo, hi, _) in enumerate(self.groups):
            if lo <= part_idx < hi:
                return gi
        raise NotInFormat(f"{s!r} matches no plan group")

    def rank_into(self, s, out):
        self.groups[self._group_of(s)][2].rank_into(s, out)

    def unrank_from(self, cursor, f):
        return self.groups[self._group_of(f)][2].unrank_from(cursor, f)

    def path_signature(self, s):
        gi = self._group_of(s)
        return (("u", gi),) + self.groups[gi][2].path_signature(s)


@dataclass(frozen=True)
class ConcatGroups:
    """Consecutive concat parts grouped by multiplied size.

    Delimiters inside a group stay part of the group's sub-format; border
    delimiters between groups are re-attached here.
    """

    spec: object
    groups: tuple

    def _group_texts(self, s):
        pieces = parse(self.spec, s).pieces
        texts = []
        for lo, hi, _ in self.groups:
            chunk = []
            for i in range(lo, hi):
                if i > lo and self.spec.delims is not None:
                    chunk.append(self.spec.delims[i - 1])
                chunk.append(pieces[i][0])
            texts.append("".join(chunk))
        return texts

    def rank_into(self, s, out):
        for (_, _, sub), text in zip(self.groups, self._group_texts(s)):
            sub.rank_into(text, out)

    def unrank_from(self, cursor, f):
        out = []
        for gi, ((_, _, sub), ft) in enumerate(zip(self.groups, self._group_texts(f))):
            if gi > 0 and self.spec.delims is not None:
                out.append(self.spec.delims[self.groups[gi - 1][1] - 1])
            out.append(sub.unrank_from(cursor, ft))
        return "".join(out)

    def path_signature(self, s):
        return tuple(
            ("g", gi, sub.path_signature(text))
            for gi, ((_, _, sub), text) in enumerate(
                zip(self.groups, self._group_texts(s))
            )
        )


@dataclass(frozen=True)
class LengthBands:
    """Members routed by length (or repetition count) into sub-format bands."""

    spec: object
    bands: tuple

    def _measure(self, s):
        sp = self.spec
        if isinstance(sp, Range):
            k = s.count(sp.delim)
            return k if sp.last_delimited else k + 1
        if isinstance(sp, DelimVarString):
            return len(s) - 1
        return len(s)

    def _band_of(self, s):
        m = self._measure(s)
        for bi, (lo, hi, _) in enumerate(self.bands):
            if lo <= m <= hi:
                return bi
        raise NotInFormat(f"measure {m} falls outside every band")

    def rank_into(self, s, out):
        self.bands[self._band_of(s)][2].rank_into(s, out)

    def unrank_from(self, cursor, f):
        return self.bands[self._band_of(f)][2].unrank_from(cursor, f)

    def path_signature(self, s):
        bi = self._band_of(s)
        return (("len", bi),) + self.bands[bi][2].path_signature(s)


@dataclass(frozen=True)
class RepeatGroups:
    """A fixed repetition count split into runs of adjacent pieces.

    Every group keeps its own delimiters, so the rebuilt group strings
    concatenate directly.
    """

    spec: object
    groups: tuple

    def _piece_texts(self, s):
        if self.spec.last_delimited:
            return s[:-1].split(self.spec.delim)
        return s.split(self.spec.delim)

    def _group_text(self, texts, lo, hi):
        sp = self.spec
        delimited = hi < sp.min or sp.last_delimited
        body = sp.delim.join(texts[lo:hi])
        return body + sp.delim if delimited else body

    def rank_into(self, s, out):
        texts = self._piece_texts(s)
        for lo, hi, sub in self.groups:
            sub.rank_into(self._group_text(texts, lo, hi), out)

    def unrank_from(self, cursor, f):
        f_texts = self._piece_texts(f)
        return "".join(
            sub.unrank_from(cursor, self._group_text(f_texts, lo, hi))
            for lo, hi, sub in self.groups
        )

    def path_signature(self, s):
        texts = self._piece_texts(s)
        return tuple(
            ("g", gi, sub.path_signature(self._group_text(texts, lo, hi)))
            for gi, (lo, hi, sub) in enumerate(self.groups)
        )


@dataclass(frozen=True)
class CharBlocks:
    """A fixed-length body cut into positional blocks."""

    spec: object
    blocks: tuple

    def rank_into(self, s, out):
        for lo, hi, sub in self.blocks:
            sub.rank_into(s[lo:hi], out)

    def unrank_from(self, cursor, f):
        return "".join(
            sub.unrank_from(cursor, f[lo:hi]) for lo, hi, sub in self.blocks
        )

    def path_signature(self, s):
        return tuple(
            ("g", bi, sub.path_signature(s[lo:hi]))
            for bi, (lo, hi, sub) in enumerate(self.blocks)
        )


@dataclass(frozen=True)
class TrailingDelim:
    """Strip a trailing delimiter before the sub-plan, re-attach after."""

    sub: object
    delim: str

    def rank_into(self, s, out):
        self.sub.rank_into(s[:-1], out)

    def unrank_from(self, cursor, f):
        return self.sub.unrank_from(cursor, f[:-1]) + self.delim

    def path_signature(self, s):
        return self.sub.path_signature(s[:-1])


@dataclass(frozen=True)
class RankWindow:
    """Contiguous windows of the rank space, window chosen by the example.

    The fallback for primitives with no positional structure to cut:
    integer ranges, dates, single oversized character positions.
    """

    spec: object
    width: int

    def _window_size(self, win):
        return min(self.width, size(self.spec) - win * self.width)

    def rank_into(self, s, out):
        r = _rank_value(self.spec, s)
        win = r // self.width
        out.append((r - win * self.width, self._window_size(win)))

    def unrank_from(self, cursor, f):
        win = _rank_value(self.spec, f) // self.width
        off = cursor.take(self._window_size(win))
        return _unrank_value(self.spec, win * self.width + off)

    def path_signature(self, s):
        return (("w", _rank_value(self.spec, s) // self.width),)


_SSN_COMP_SIZES = (898, 99, 9999)


def _ssn_components(s):
    area, group, serial = int(s[:3]), int(s[3:5]), int(s[5:])
    return (area - 1 - (1 if area > 666 else 0), group - 1, serial - 1)


def _ssn_from_components(comp):
    ai, gi, ri = comp
    area = ai + 1 if ai + 1 < 666 else ai + 2
    return f"{area:03d}{gi + 1:02d}{ri + 1:04d}"


@dataclass(frozen=True)
class SsnComponents:
    """Area, group, and serial as mixed-radix components, grouped greedily.

    A component whose own size exceeds the bound degrades to rank windows
    over that component.
    """

    groups: tuple

    @staticmethod
    def build(max_size):
        groups = []
        for lo, hi in _greedy_groups(_SSN_COMP_SIZES, max_size, _mul):
            if hi - lo == 1 and _SSN_COMP_SIZES[lo] > max_size:
                groups.append((lo, hi, max_size))
            else:
                groups.append((lo, hi, None))
        return SsnComponents(tuple(groups))

    def rank_into(self, s, out):
        comp = _ssn_components(s)
        for lo, hi, width in self.groups:
            if width is None:
                r = 0
                w = 1
                for i in range(lo, hi):
                    r += comp[i] * w
                    w *= _SSN_COMP_SIZES[i]
                out.append((r, w))
            else:
                win = comp[lo] // width
                out.append(
                    (
                        comp[lo] - win * width,
                        min(width, _SSN_COMP_SIZES[lo] - win * width),
                    )
                )

    def unrank_from(self, cursor, f):
        fc = _ssn_components(f)
        comp = [0, 0, 0]
        for lo, hi, width in self.groups:
            if width is None:
                w = 1
                for i in range(lo, hi):
                    w *= _SSN_COMP_SIZES[i]
                v = cursor.take(w)
                for i in range(lo, hi):
                    v, comp[i] = divmod(v, _SSN_COMP_SIZES[i])
            else:
                win = fc[lo] // width
                wsize = min(width, _SSN_COMP_SIZES[lo] - win * width)
                comp[lo] = win * width + cursor.take(wsize)
        return _ssn_from_components(comp)

    def path_signature(self, s):
        comp = _ssn_components(s)
        return tuple(
            ("w", lo, comp[lo] // width)
            for lo, _, width in self.groups
            if width is not None
        )


@dataclass(frozen=True)
class CcnBlocks:
    """Payload digits in positional blocks; the check digit is recomputed."""

    blocks: tuple

    @staticmethod
    def build(max_size):
        blocks = []
        for lo, hi in _greedy_groups([10] * 15, max_size, _mul):
            if hi - lo == 1 and 10 > max_size:
                blocks.append((lo, hi, max_size))
            else:
                blocks.append((lo, hi, None))
        return CcnBlocks(tuple(blocks))

    def rank_into(self, s, out):
        for lo, hi, width in self.blocks:
            v = int(s[lo:hi])
            if width is None:
                out.append((v, 10 ** (hi - lo)))
            else:
                win = v // width
                out.append((v - win * width, min(width, 10 - win * width)))

    def unrank_from(self, cursor, f):
        digits = []
        for lo, hi, width in self.blocks:
            if width is None:
                v = cursor.take(10 ** (hi - lo))
                digits.append(f"{v:0{hi - lo}d}")
            else:
                win = int(f[lo:hi]) // width
                wsize = min(width, 10 - win * width)
                digits.append(str(win * width + cursor.take(wsize)))
        payload = "".join(digits)
        return payload + luhn_digit(payload)

    def path_signature(self, s):
        return tuple(
            ("w", lo, int(s[lo:hi]) // width)
            for lo, hi, width in self.blocks
            if width is not None
        )


# ---------------------------------------------------------------------------
# plan construction


@lru_cache(maxsize=None)
def build_plan(spec, max_size):
    """The slot plan for a format under a slot-size bound (None = unbounded)."""
    ensure_valid(spec)
    if max_size is not None and max_size < 2:
        raise BadParameter(f"slot bound must be at least 2, got {max_size}")
    if max_size is None or size(spec) <= max_size:
        return WholeSlot(spec)
    if isinstance(spec, Union):
        return _split_union(spec, max_size)
    if isinstance(spec, Concat):
        return _split_concat(spec, max_size)
    if isinstance(spec, Range):
        return _split_range(spec, max_size)
    if isinstance(spec, (VarString, DelimVarString)):
        return _split_var(spec, max_size)
    if isinstance(spec, FixedString):
        return _split_fixed(spec, max_size)
    if isinstance(spec, Ssn):
        return SsnComponents.build(max_size)
    if isinstance(spec, Ccn):
        return CcnBlocks.build(max_size)
    if isinstance(spec, (Date, IntegralDomain)):
        return RankWindow(spec, max_size)
    raise UnsplittableAtom(
        f"a table of {size(spec)} strings cannot be split below {max_size}"
    )


def _split_union(spec, max_size):
    sizes = [size(p) for p in spec.parts]
    groups = []
    for lo, hi in _greedy_groups(sizes, max_size, _add):
        sub_spec = spec.parts[lo] if hi - lo == 1 else Union(spec.parts[lo:hi])
        groups.append((lo, hi, build_plan(sub_spec, max_size)))
    return UnionGroups(spec, tuple(groups))


def _split_concat(spec, max_size):
    sizes = [size(p) for p in spec.parts]
    groups = []
    for lo, hi in _greedy_groups(sizes, max_size, _mul):
        if hi - lo == 1:
            sub_spec = spec.parts[lo]
        else:
            delims = spec.delims[lo : hi - 1] if spec.delims is not None else None
            sub_spec = Concat(spec.parts[lo:hi], delims)
        groups.append((lo, hi, build_plan(sub_spec, max_size)))
    return ConcatGroups(spec, tuple(groups))


def _split_range(spec, max_size):
    if spec.min == spec.max:
        return _split_fixed_count(spec, max_size)
    inner_n = size(spec.inner)
    sizes = [inner_n**k for k in range(spec.min, spec.max + 1)]
    bands = []
    for lo, hi in _greedy_groups(sizes, max_size, _add):
        klo, khi = spec.min + lo, spec.min + hi - 1
        band_spec = Range(spec.inner, spec.delim, klo, khi, spec.last_delimited)
        bands.append((klo, khi, build_plan(band_spec, max_size)))
    return LengthBands(spec, tuple(bands))


def _split_fixed_count(spec, max_size):
    # spec is a Range with min == max, too big to fit whole
    k = spec.min
    if k == 1:
        sub = build_plan(spec.inner, max_size)
        return TrailingDelim(sub, spec.delim) if spec.last_delimited else sub
    inner_n = size(spec.inner)
    groups = []
    for lo, hi in _greedy_groups([inner_n] * k, max_size, _mul):
        cnt = hi - lo
        delimited = hi < k or spec.last_delimited
        group_spec = Range(spec.inner, spec.delim, cnt, cnt, delimited)
        groups.append((lo, hi, build_plan(group_spec, max_size)))
    return RepeatGroups(spec, tuple(groups))


def _split_var(spec, max_size):
    if spec.min == spec.max:
        body = FixedString((spec.alphabet,) * spec.min)
        sub = build_plan(body, max_size)
        if isinstance(spec, DelimVarString):
            return TrailingDelim(sub, spec.delim)
        return sub
    base = len(spec.alphabet)
    sizes = [base**L for L in range(spec.min, spec.max + 1)]
    bands = []
    for lo, hi in _greedy_groups(sizes, max_size, _add):
        llo, lhi = spec.min + lo, spec.min + hi - 1
        if isinstance(spec, DelimVarString):
            band_spec = DelimVarString(llo, lhi, spec.alphabet, spec.delim)
        else:
            band_spec = VarString(llo, lhi, spec.alphabet)
        bands.append((llo, lhi, build_plan(band_spec, max_size)))
    return LengthBands(spec, tuple(bands))


def _split_fixed(spec, max_size):
    if len(spec.charsets) == 1:
        return RankWindow(spec, max_size)
    sizes = [len(cs) for cs in spec.charsets]
    blocks = []
    for lo, hi in _greedy_groups(sizes, max_size, _mul):
        blocks.append((lo, hi, build_plan(FixedString(spec.charsets[lo:hi]), max_size)))
    return CharBlocks(spec, tuple(blocks))


# ---------------------------------------------------------------------------
# entry points


def rank_multi(spec, max_size, s: str) -> RankVector:
    """Rank s into bounded slots. With max_size None this is plain ranking."""
    ensure_valid(spec)
    if not contains(spec, s):
        raise NotInFormat(f"{s!r} is not in the format")
    plan = build_plan(spec, max_size)
    out: list = []
    plan.rank_into(s, out)
    ranks, sizes = zip(*out)
    return RankVector(tuple(ranks), tuple(sizes))


def unrank_multi(spec, max_size, vector: RankVector, example: str) -> str:
    """Rebuild a member from slot ranks, using the example member to choose
    every branch the vector does not encode."""
    ensure_valid(spec)
    if not contains(spec, example):
        raise ExampleFormatMismatch(f"example {example!r} is not in the format")
    plan = build_plan(spec, max_size)
    cursor = _Cursor(vector)
    result = plan.unrank_from(cursor, example)
    cursor.finish()
    return result


def path_signature(spec, max_size, s: str):
    """The variant path a member takes through the plan; hashable."""
    ensure_valid(spec)
    if not contains(spec, s):
        raise NotInFormat(f"{s!r} is not in the format")
    return build_plan(spec, max_size).path_signature(s)
