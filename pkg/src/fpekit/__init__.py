"""Format-preserving encryption over rankable string formats.

Formats are composed from primitives (fixed and variable strings, dates,
identification and card numbers, finite sets, integer ranges) and the
combinators union, concatenation, and repetition. Members rank to integers,
integers encipher through a Feistel-plus-cycle-walk permutation, and large
formats split into bounded slots first.
"""

from .errors import (
    BadLength,
    BadParameter,
    CsvFieldError,
    EntropyUnavailable,
    ExampleFormatMismatch,
    FpeError,
    InputOutOfDomain,
    InvalidFormat,
    NonDigit,
    NotInFormat,
    NotSubset,
    OutOfRange,
    ParseFailure,
    RankOutOfRange,
    SpecSyntaxError,
    UnknownBackend,
    UnknownNodeType,
    UnsplittableAtom,
    VectorShapeMismatch,
    WalkBudgetExceeded,
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
    Violation,
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
from .ranking import Rank, count_invalid_ssn_below, date_offset, offset_to_date, rank, unrank
from .dsl import parse_charset, parse_spec, serialize_charset, serialize_spec
from .intfpe import (
    Fe1Backend,
    IntFpeKey,
    WalkRecorder,
    balanced_factor,
    cycle_walk_decrypt,
    cycle_walk_encrypt,
    feistel_decrypt,
    feistel_encrypt,
    get_backend,
    read_key_file,
    write_key_file,
)
from .splitting import RankVector, build_plan, path_signature, rank_multi, unrank_multi
from .cipher import CipherConfig, decrypt, encrypt, format_fingerprint, keygen

__version__ = "0.1.0"

__all__ = [
    "BadLength",
    "BadParameter",
    "CsvFieldError",
    "EntropyUnavailable",
    "ExampleFormatMismatch",
    "FpeError",
    "InputOutOfDomain",
    "InvalidFormat",
    "NonDigit",
    "NotInFormat",
    "NotSubset",
    "OutOfRange",
    "ParseFailure",
    "RankOutOfRange",
    "SpecSyntaxError",
    "UnknownBackend",
    "UnknownNodeType",
    "UnsplittableAtom",
    "VectorShapeMismatch",
    "WalkBudgetExceeded",
    "Ccn",
    "Concat",
    "Date",
    "DelimStringSet",
    "DelimVarString",
    "FixedString",
    "IntegralDomain",
    "Range",
    "Ssn",
    "StringSet",
    "Union",
    "VarString",
    "Violation",
    "alphabet",
    "contains",
    "ensure_valid",
    "enumerate_members",
    "is_rigid",
    "luhn_digit",
    "parse",
    "reassemble",
    "size",
    "validate",
    "Rank",
    "count_invalid_ssn_below",
    "date_offset",
    "offset_to_date",
    "rank",
    "unrank",
    "parse_charset",
    "parse_spec",
    "serialize_charset",
    "serialize_spec",
    "Fe1Backend",
    "IntFpeKey",
    "WalkRecorder",
    "balanced_factor",
    "cycle_walk_decrypt",
    "cycle_walk_encrypt",
    "feistel_decrypt",
    "feistel_encrypt",
    "get_backend",
    "read_key_file",
    "write_key_file",
    "RankVector",
    "build_plan",
    "path_signature",
    "rank_multi",
    "unrank_multi",
    "CipherConfig",
    "decrypt",
    "encrypt",
    "format_fingerprint",
    "keygen",
]
