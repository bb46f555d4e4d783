"""Format definitions and the operations every other layer builds on.

A format is an immutable tree of primitive and composite nodes describing a
finite set of strings. This module validates a tree, counts its members
exactly, tests membership, splits a member into the pieces the tree
prescribes, and streams members in canonical order. Canonical order is
mixed-radix with the first (leftmost) unit least significant, and character
sets are ordered by ascending code point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from datetime import date as _date
from datetime import datetime, time, timedelta
from functools import lru_cache

from .errors import BadLength, InvalidFormat, NonDigit, ParseFailure

DIGITS = "0123456789"

SSN_SIZE = 898 * 99 * 9999
CCN_SIZE = 10**15


def _charset(chars) -> str:
    """Normalize a character collection to a sorted, duplicate-free string."""
    return "".join(sorted(set(chars)))


@dataclass(frozen=True)
class Ssn:
    """Nine decimal digits under the area/group/serial exclusion rules."""


@dataclass(frozen=True)
class Ccn:
    """Sixteen decimal digits, the last being the Luhn check digit."""


@dataclass(frozen=True)
class Date:
    """Calendar dates between two bounds, rendered as dd.mm.yyyy.

    granularity "day" counts days; "second" counts seconds and renders as
    dd.mm.yyyy hh:mm:ss. Bounds are proleptic Gregorian datetimes.
    """

    min: datetime
    max: datetime
    granularity: str = "day"

    def __post_init__(self):
        for name in ("min", "max"):
            v = getattr(self, name)
            if isinstance(v, _date) and not isinstance(v, datetime):
                object.__setattr__(self, name, datetime(v.year, v.month, v.day))


@dataclass(frozen=True)
class FixedString:
    """Fixed-length strings with one character set per position."""

    charsets: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "charsets", tuple(_charset(cs) for cs in self.charsets)
        )


@dataclass(frozen=True)
class DelimVarString:
    """Strings over one alphabet, length min..max, plus a trailing delimiter."""

    min: int
    max: int
    alphabet: str
    delim: str

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _charset(self.alphabet))


@dataclass(frozen=True)
class VarString:
    """Strings over one alphabet with length between min and max. Non-rigid."""

    min: int
    max: int
    alphabet: str

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _charset(self.alphabet))


@dataclass(frozen=True)
class DelimStringSet:
    """An explicit string table, made prefix-parsable.

    Either every string ends with `delim` (which appears nowhere else in
    it), or `prefix_free` is set and no string is a prefix of another.
    The declared order is the rank order; duplicates are dropped.
    """

    strings: tuple
    delim: str | None = None
    prefix_free: bool = False

    def __post_init__(self):
        object.__setattr__(self, "strings", tuple(dict.fromkeys(self.strings)))


@dataclass(frozen=True)
class StringSet:
    """An explicit string table with no parsability guarantee. Non-rigid."""

    strings: tuple

    def __post_init__(self):
        object.__setattr__(self, "strings", tuple(dict.fromkeys(self.strings)))


@dataclass(frozen=True)
class IntegralDomain:
    """Canonical decimal renderings of the integers min..max. Non-rigid."""

    min: int
    max: int


@dataclass(frozen=True)
class Union:
    """Strings belonging to any one of several alphabet-disjoint parts."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class Concat:
    """Concatenation of parts, optionally joined by one-character delimiters.

    Without delimiters every boundary must be separable: the left part is a
    rigid primitive, or the two parts have disjoint alphabets.
    """

    parts: tuple
    delims: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if self.delims is not None:
            object.__setattr__(self, "delims", tuple(self.delims))


@dataclass(frozen=True)
class Range:
    """min..max repetitions of an inner format joined by a delimiter.

    With last_delimited the final piece also carries the delimiter.
    """

    inner: object
    delim: str
    min: int
    max: int
    last_delimited: bool = True


FormatSpec = (
    Ssn
    | Ccn
    | Date
    | FixedString
    | DelimVarString
    | VarString
    | DelimStringSet
    | StringSet
    | IntegralDomain
    | Union
    | Concat
    | Range
)

_RIGID = (Ssn, Ccn, Date, FixedString, DelimVarString, DelimStringSet)


def is_rigid(spec) -> bool:
    """Prefix-parsable primitives. Compound formats are treated as non-rigid."""
    return isinstance(spec, _RIGID)


@dataclass(frozen=True)
class Violation:
    path: str
    code: str
    message: str


@dataclass(frozen=True)
class ParsePieces:
    """The substrings of one member, each tagged with its sub-format index.

    For Range, `repetitions` carries the piece count; delimiters are not
    included in the pieces and are re-attached by `reassemble`.
    """

    pieces: tuple
    repetitions: int | None = None


# ---------------------------------------------------------------------------
# validation


def validate(spec) -> list:
    """Collect every invariant violation in the tree, with node paths."""
    out: list[Violation] = []
    _validate(spec, "", out)
    return out


@lru_cache(maxsize=None)
def _cached_violations(spec):
    return tuple(validate(spec))


def ensure_valid(spec) -> None:
    """Raise InvalidFormat unless the spec satisfies every invariant."""
    violations = _cached_violations(spec)
    if violations:
        raise InvalidFormat(violations)


def _validate(spec, path, out) -> bool:
    ok = True

    def bad(code, message, sub=None):
        nonlocal ok
        out.append(Violation(sub if sub is not None else path, code, message))
        ok = False

    if isinstance(spec, (Ssn, Ccn)):
        pass

    elif isinstance(spec, Date):
        if spec.granularity not in ("day", "second"):
            bad("BadParameter", f"unknown granularity {spec.granularity!r}")
        elif spec.min > spec.max:
            bad("BadBounds", "min date is after max date")
        elif spec.granularity == "day":
            for b in (spec.min, spec.max):
                if b.time() != time(0):
                    bad("BadParameter", "day granularity needs midnight bounds")
                    break
        else:
            for b in (spec.min, spec.max):
                if b.microsecond:
                    bad("BadParameter", "sub-second bounds are not representable")
                    break

    elif isinstance(spec, FixedString):
        if not spec.charsets:
            bad("BadParameter", "needs at least one position")
        for i, cs in enumerate(spec.charsets):
            if not cs:
                bad("EmptyAlphabet", "empty character set", f"{path}.charsets[{i}]")

    elif isinstance(spec, (VarString, DelimVarString)):
        if not 0 <= spec.min <= spec.max:
            bad("BadBounds", f"bad length bounds {spec.min}..{spec.max}")
        if not spec.alphabet:
            bad("EmptyAlphabet", "empty alphabet")
        if isinstance(spec, DelimVarString):
            if len(spec.delim) != 1:
                bad("BadDelimiter", "delimiter must be a single character")
            elif spec.delim in spec.alphabet:
                bad("DelimiterInAlphabet", f"delimiter {spec.delim!r} is in the alphabet")

    elif isinstance(spec, StringSet):
        if not spec.strings:
            bad("EmptyFormat", "empty string set")

    elif isinstance(spec, DelimStringSet):
        if not spec.strings:
            bad("EmptyFormat", "empty string set")
        if spec.delim is None and not spec.prefix_free:
            bad("BadParameter", "needs a delimiter or the prefix_free flag")
        elif spec.delim is not None and spec.prefix_free:
            bad("BadParameter", "delimiter and prefix_free are mutually exclusive")
        elif spec.delim is not None:
            if len(spec.delim) != 1:
                bad("BadDelimiter", "delimiter must be a single character")
            else:
                for s in spec.strings:
                    if not s.endswith(spec.delim) or spec.delim in s[:-1]:
                        bad(
                            "BadDelimiter",
                            f"{s!r} must end with {spec.delim!r} and contain it nowhere else",
                        )
        else:
            for i, a in enumerate(spec.strings):
                for b in spec.strings[i + 1 :]:
                    if a.startswith(b) or b.startswith(a):
                        bad("NotPrefixFree", f"{a!r} and {b!r} are prefix-related")

    elif isinstance(spec, IntegralDomain):
        if spec.min > spec.max:
            bad("BadBounds", "min exceeds max")

    elif isinstance(spec, Union):
        if not spec.parts:
            bad("EmptyFormat", "union with no parts")
        clean = True
        for i, part in enumerate(spec.parts):
            clean &= _validate(part, f"{path}.parts[{i}]", out)
        if spec.parts and clean:
            alphas = [alphabet(p) for p in spec.parts]
            for i in range(len(alphas)):
                for j in range(i + 1, len(alphas)):
                    shared = alphas[i] & alphas[j]
                    if shared:
                        sample = "".join(sorted(shared)[:5])
                        bad(
                            "OverlappingUnionAlphabets",
                            f"parts {i} and {j} share characters {sample!r}",
                        )
            with_empty = [i for i, p in enumerate(spec.parts) if contains(p, "")]
            if len(with_empty) > 1:
                bad(
                    "AmbiguousUnion",
                    f"parts {with_empty} all contain the empty string",
                )
        ok &= clean

    elif isinstance(spec, Concat):
        if not spec.parts:
            bad("EmptyFormat", "concatenation with no parts")
        clean = True
        for i, part in enumerate(spec.parts):
            clean &= _validate(part, f"{path}.parts[{i}]", out)
        if spec.delims is not None and len(spec.delims) != len(spec.parts) - 1:
            bad(
                "BadParameter",
                f"{len(spec.parts)} parts need {len(spec.parts) - 1} delimiters, got {len(spec.delims)}",
            )
        elif spec.delims is not None:
            for i, d in enumerate(spec.delims):
                if len(d) != 1:
                    bad("BadDelimiter", f"delimiter {i} must be a single character")
                elif clean and d in alphabet(spec.parts[i]):
                    bad(
                        "DelimiterInAlphabet",
                        f"delimiter {d!r} appears in the alphabet of part {i}",
                    )
        elif clean:
            for i in range(len(spec.parts) - 1):
                cur, nxt = spec.parts[i], spec.parts[i + 1]
                if not is_rigid(cur) and alphabet(cur) & alphabet(nxt):
                    bad(
                        "InseparableConcat",
                        f"part {i + 1} is not separable from part {i}: "
                        "neither rigid nor alphabet-disjoint",
                    )
        ok &= clean

    elif isinstance(spec, Range):
        clean = _validate(spec.inner, f"{path}.inner", out)
        if not 1 <= spec.min <= spec.max:
            bad("BadBounds", f"bad repetition bounds {spec.min}..{spec.max}")
        if len(spec.delim) != 1:
            bad("BadDelimiter", "delimiter must be a single character")
        elif clean and spec.delim in alphabet(spec.inner):
            bad(
                "DelimiterInAlphabet",
                f"delimiter {spec.delim!r} appears in the inner alphabet",
            )
        ok &= clean

    else:
        bad("BadParameter", f"not a format node: {type(spec).__name__}")

    return ok


# ---------------------------------------------------------------------------
# size and alphabet


def _count_up_to(base: int, lo: int, stop: int) -> int:
    # number of tuples with piece-count in [lo, stop) over `base` choices
    if stop <= lo:
        return 0
    if base == 1:
        return stop - lo
    return (base**stop - base**lo) // (base - 1)


@lru_cache(maxsize=None)
def size(spec) -> int:
    """Exact member count. The spec must already be valid."""
    if isinstance(spec, Ssn):
        return SSN_SIZE
    if isinstance(spec, Ccn):
        return CCN_SIZE
    if isinstance(spec, Date):
        if spec.granularity == "day":
            return spec.max.toordinal() - spec.min.toordinal() + 1
        delta = spec.max - spec.min
        return delta.days * 86400 + delta.seconds + 1
    if isinstance(spec, FixedString):
        n = 1
        for cs in spec.charsets:
            n *= len(cs)
        return n
    if isinstance(spec, (VarString, DelimVarString)):
        return _count_up_to(len(spec.alphabet), spec.min, spec.max + 1)
    if isinstance(spec, (StringSet, DelimStringSet)):
        return len(spec.strings)
    if isinstance(spec, IntegralDomain):
        return spec.max - spec.min + 1
    if isinstance(spec, Union):
        return sum(size(p) for p in spec.parts)
    if isinstance(spec, Concat):
        n = 1
        for p in spec.parts:
            n *= size(p)
        return n
    if isinstance(spec, Range):
        return _count_up_to(size(spec.inner), spec.min, spec.max + 1)
    raise TypeError(f"not a format node: {type(spec).__name__}")


@lru_cache(maxsize=None)
def alphabet(spec) -> frozenset:
    """Characters that can appear in members (a conservative cover)."""
    if isinstance(spec, (Ssn, Ccn)):
        return frozenset(DIGITS)
    if isinstance(spec, Date):
        extra = " :" if spec.granularity == "second" else ""
        return frozenset(DIGITS + "." + extra)
    if isinstance(spec, FixedString):
        return frozenset().union(*map(frozenset, spec.charsets))
    if isinstance(spec, VarString):
        return frozenset(spec.alphabet)
    if isinstance(spec, DelimVarString):
        return frozenset(spec.alphabet) | {spec.delim}
    if isinstance(spec, (StringSet, DelimStringSet)):
        return frozenset().union(*(frozenset(s) for s in spec.strings))
    if isinstance(spec, IntegralDomain):
        extra = "-" if spec.min < 0 else ""
        return frozenset(DIGITS + extra)
    if isinstance(spec, Union):
        return frozenset().union(*(alphabet(p) for p in spec.parts))
    if isinstance(spec, Concat):
        out = frozenset().union(*(alphabet(p) for p in spec.parts))
        if spec.delims:
            out |= frozenset(spec.delims)
        return out
    if isinstance(spec, Range):
        return alphabet(spec.inner) | {spec.delim}
    raise TypeError(f"not a format node: {type(spec).__name__}")


# ---------------------------------------------------------------------------
# membership


def luhn_digit(digits: str) -> str:
    """The check digit that makes digits + check Luhn-valid (16 total)."""
    if len(digits) != 15:
        raise BadLength(f"expected 15 digits, got {len(digits)}")
    total = 0
    for i, ch in enumerate(digits):
        if not "0" <= ch <= "9":
            raise NonDigit(f"not a decimal digit: {ch!r}")
        d = ord(ch) - 48
        if i % 2 == 0:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return str((10 - total % 10) % 10)


def _all_decimal(s: str) -> bool:
    return all("0" <= c <= "9" for c in s)


def _ssn_ok(s: str) -> bool:
    return (
        len(s) == 9
        and _all_decimal(s)
        and s[:3] not in ("000", "666")
        and s[:3] < "900"
        and s[3:5] != "00"
        and s[5:] != "0000"
    )


def _parse_date_string(s: str, granularity: str):
    """Strict dd.mm.yyyy [hh:mm:ss] reader; None when malformed."""
    width = 10 if granularity == "day" else 19
    if len(s) != width:
        return None
    digit_at = [0, 1, 3, 4, 6, 7, 8, 9]
    if s[2] != "." or s[5] != ".":
        return None
    if width == 19:
        if s[10] != " " or s[13] != ":" or s[16] != ":":
            return None
        digit_at += [11, 12, 14, 15, 17, 18]
    if not all("0" <= s[i] <= "9" for i in digit_at):
        return None
    day, month, year = int(s[0:2]), int(s[3:5]), int(s[6:10])
    try:
        if width == 10:
            return datetime(year, month, day)
        return datetime(
            year, month, day, int(s[11:13]), int(s[14:16]), int(s[17:19])
        )
    except ValueError:
        return None


def format_date_string(dt: datetime, granularity: str) -> str:
    out = f"{dt.day:02d}.{dt.month:02d}.{dt.year:04d}"
    if granularity == "second":
        out += f" {dt.hour:02d}:{dt.minute:02d}:{dt.second:02d}"
    return out


def _canonical_int(s: str) -> int | None:
    # accepts exactly the strings str() produces for an int
    try:
        n = int(s)
    except ValueError:
        return None
    return n if str(n) == s else None


def contains(spec, s: str) -> bool:
    """True iff s is a member of the format."""
    if isinstance(spec, Ssn):
        return _ssn_ok(s)
    if isinstance(spec, Ccn):
        return (
            len(s) == 16 and _all_decimal(s) and luhn_digit(s[:15]) == s[15]
        )
    if isinstance(spec, Date):
        dt = _parse_date_string(s, spec.granularity)
        return dt is not None and spec.min <= dt <= spec.max
    if isinstance(spec, FixedString):
        return len(s) == len(spec.charsets) and all(
            c in cs for c, cs in zip(s, spec.charsets)
        )
    if isinstance(spec, VarString):
        return spec.min <= len(s) <= spec.max and all(
            c in spec.alphabet for c in s
        )
    if isinstance(spec, DelimVarString):
        if not s.endswith(spec.delim):
            return False
        body = s[:-1]
        return spec.min <= len(body) <= spec.max and all(
            c in spec.alphabet for c in body
        )
    if isinstance(spec, (StringSet, DelimStringSet)):
        return s in _member_set(spec)
    if isinstance(spec, IntegralDomain):
        n = _canonical_int(s)
        return n is not None and spec.min <= n <= spec.max
    if isinstance(spec, Union):
        return any(contains(p, s) for p in spec.parts)
    if isinstance(spec, (Concat, Range)):
        try:
            parse(spec, s)
            return True
        except ParseFailure:
            return False
    raise TypeError(f"not a format node: {type(spec).__name__}")


@lru_cache(maxsize=None)
def _member_set(spec) -> frozenset:
    return frozenset(spec.strings)


# ---------------------------------------------------------------------------
# parsing


def _take(spec, s: str, pos: int) -> int:
    """Consume one member of a rigid primitive at pos; returns the end index."""
    if isinstance(spec, (Ssn, Ccn, Date, FixedString)):
        if isinstance(spec, Ssn):
            width = 9
        elif isinstance(spec, Ccn):
            width = 16
        elif isinstance(spec, Date):
            width = 10 if spec.granularity == "day" else 19
        else:
            width = len(spec.charsets)
        end = pos + width
        if end > len(s) or not contains(spec, s[pos:end]):
            raise ParseFailure(f"no {type(spec).__name__} member at offset {pos}")
        return end
    if isinstance(spec, DelimVarString):
        idx = s.find(spec.delim, pos)
        if idx < 0 or not contains(spec, s[pos : idx + 1]):
            raise ParseFailure(f"no delimited string at offset {pos}")
        return idx + 1
    if isinstance(spec, DelimStringSet):
        if spec.delim is not None:
            idx = s.find(spec.delim, pos)
            if idx < 0 or s[pos : idx + 1] not in _member_set(spec):
                raise ParseFailure(f"no table entry at offset {pos}")
            return idx + 1
        for t in spec.strings:
            if t and s.startswith(t, pos):
                return pos + len(t)
        raise ParseFailure(f"no table entry at offset {pos}")
    raise ParseFailure(f"{type(spec).__name__} is not prefix-parsable")


def parse(spec, s: str) -> ParsePieces:
    """Split a member into pieces; raises ParseFailure when s is no member."""
    if isinstance(spec, Union):
        for i, part in enumerate(spec.parts):
            if contains(part, s):
                return ParsePieces(((s, i),))
        raise ParseFailure(f"{s!r} matches no union part")
    if isinstance(spec, Concat):
        return _parse_concat(spec, s)
    if isinstance(spec, Range):
        return _parse_range(spec, s)
    if not contains(spec, s):
        raise ParseFailure(f"{s!r} is not in the format")
    return ParsePieces(((s, 0),))


def _parse_concat(spec, s: str) -> ParsePieces:
    pieces = []
    pos = 0
    last = len(spec.parts) - 1
    for i, part in enumerate(spec.parts):
        if i == last:
            piece = s[pos:]
            pos = len(s)
        elif spec.delims is not None:
            idx = s.find(spec.delims[i], pos)
            if idx < 0:
                raise ParseFailure(f"missing delimiter {spec.delims[i]!r} after piece {i}")
            piece = s[pos:idx]
            pos = idx + 1
        elif is_rigid(part):
            end = _take(part, s, pos)
            piece = s[pos:end]
            pos = end
        else:
            alpha = alphabet(part)
            end = pos
            while end < len(s) and s[end] in alpha:
                end += 1
            piece = s[pos:end]
            pos = end
        pieces.append((piece, i))
    for piece, i in pieces:
        if not contains(spec.parts[i], piece):
            raise ParseFailure(f"piece {i} ({piece!r}) fails its sub-format")
    return ParsePieces(tuple(pieces))


def _parse_range(spec, s: str) -> ParsePieces:
    if spec.last_delimited:
        if not s.endswith(spec.delim):
            raise ParseFailure("missing final delimiter")
        texts = s[:-1].split(spec.delim)
    else:
        texts = s.split(spec.delim)
    k = len(texts)
    if not spec.min <= k <= spec.max:
        raise ParseFailure(f"{k} repetitions, expected {spec.min}..{spec.max}")
    for t in texts:
        if not contains(spec.inner, t):
            raise ParseFailure(f"piece {t!r} fails the inner format")
    return ParsePieces(tuple((t, 0) for t in texts), repetitions=k)


def reassemble(spec, pp: ParsePieces) -> str:
    """Invert parse: stitch pieces (and the spec's delimiters) back together."""
    if isinstance(spec, Concat):
        texts = [p for p, _ in pp.pieces]
        if spec.delims:
            out = [texts[0]]
            for d, t in zip(spec.delims, texts[1:]):
                out.append(d)
                out.append(t)
            return "".join(out)
        return "".join(texts)
    if isinstance(spec, Range):
        body = spec.delim.join(p for p, _ in pp.pieces)
        return body + spec.delim if spec.last_delimited else body
    return pp.pieces[0][0]


# ---------------------------------------------------------------------------
# enumeration (the independent oracle: generative, never via unranking)


def enumerate_members(spec, limit: int | None = None):
    """Stream members in rank order: the i-th string yielded has rank i."""
    it = _stream(spec)
    if limit is not None:
        it = itertools.islice(it, limit)
    return it


def _fixed_stream(charsets):
    # first position varies fastest
    for tup in itertools.product(*reversed(charsets)):
        yield "".join(reversed(tup))


def _tuple_stream(factories):
    """Cartesian product of piece streams, factor 0 least significant."""

    def gen(i):
        if i == len(factories):
            yield ()
            return
        for rest in gen(i + 1):
            for piece in factories[i]():
                yield (piece,) + rest

    return gen(0)


def _stream(spec):
    if isinstance(spec, Ssn):
        for area in itertools.chain(range(1, 666), range(667, 900)):
            for group in range(1, 100):
                for serial in range(1, 10000):
                    yield f"{area:03d}{group:02d}{serial:04d}"
    elif isinstance(spec, Ccn):
        for payload in range(CCN_SIZE):
            body = f"{payload:015d}"
            yield body + luhn_digit(body)
    elif isinstance(spec, Date):
        step = timedelta(days=1) if spec.granularity == "day" else timedelta(seconds=1)
        cur = spec.min
        for _ in range(size(spec)):
            yield format_date_string(cur, spec.granularity)
            cur += step
    elif isinstance(spec, FixedString):
        yield from _fixed_stream(spec.charsets)
    elif isinstance(spec, (VarString, DelimVarString)):
        suffix = spec.delim if isinstance(spec, DelimVarString) else ""
        for length in range(spec.min, spec.max + 1):
            for body in _fixed_stream((spec.alphabet,) * length):
                yield body + suffix
    elif isinstance(spec, (StringSet, DelimStringSet)):
        yield from spec.strings
    elif isinstance(spec, IntegralDomain):
        for n in range(spec.min, spec.max + 1):
            yield str(n)
    elif isinstance(spec, Union):
        for part in spec.parts:
            yield from _stream(part)
    elif isinstance(spec, Concat):
        factories = [lambda p=part: _stream(p) for part in spec.parts]
        if spec.delims:
            for tup in _tuple_stream(factories):
                out = [tup[0]]
                for d, t in zip(spec.delims, tup[1:]):
                    out.append(d)
                    out.append(t)
                yield "".join(out)
        else:
            for tup in _tuple_stream(factories):
                yield "".join(tup)
    elif isinstance(spec, Range):
        inner_factory = lambda: _stream(spec.inner)  # noqa: E731
        tail = spec.delim if spec.last_delimited else ""
        for k in range(spec.min, spec.max + 1):
            for tup in _tuple_stream([inner_factory] * k):
                yield spec.delim.join(tup) + tail
    else:
        raise TypeError(f"not a format node: {type(spec).__name__}")
