"""Keyed permutations of integer ranges [0, N).

A balanced Feistel network runs over [0, N') where N' >= N is the nearest
integer with a usable two-factor decomposition; cycle walking re-applies
the permutation until the output lands inside [0, N). Round outputs come
from SHAKE-256 over the key, the tweak, the round number, and the opposite
half, with rejection sampling to keep them uniform.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

from .errors import (
    BadParameter,
    InputOutOfDomain,
    UnknownBackend,
    WalkBudgetExceeded,
)

__all__ = [
    "IntFpeKey",
    "balanced_factor",
    "feistel_encrypt",
    "feistel_decrypt",
    "cycle_walk_encrypt",
    "cycle_walk_decrypt",
    "WalkRecorder",
    "Fe1Backend",
    "BACKENDS",
    "get_backend",
    "read_key_file",
    "write_key_file",
]

# above this, trial division to the square root stops being a desk-scale cost
_EXACT_FACTOR_LIMIT = 2**32


@dataclass(frozen=True)
class IntFpeKey:
    """A 32-byte secret plus the Feistel round count."""

    secret: bytes
    rounds: int = 12

    def __post_init__(self):
        if not isinstance(self.secret, bytes) or len(self.secret) != 32:
            raise BadParameter("secret must be exactly 32 bytes")
        if self.rounds < 3:
            raise BadParameter("need at least 3 rounds")


def write_key_file(path, key: IntFpeKey) -> None:
    """Store the secret as one hex line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(key.secret.hex() + "\n")


def read_key_file(path) -> IntFpeKey:
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read().strip()
    try:
        secret = bytes.fromhex(text)
    except ValueError:
        raise BadParameter(f"{path}: not a hex key file") from None
    if len(secret) != 32:
        raise BadParameter(f"{path}: expected 32 key bytes, got {len(secret)}")
    return IntFpeKey(secret)


# ---------------------------------------------------------------------------
# factoring the working range


def _largest_small_divisor(m: int):
    for d in range(isqrt(m), 1, -1):
        if m % d == 0:
            return d
    return None


@lru_cache(maxsize=None)
def balanced_factor(n: int):
    """(a, b, n') with a*b = n' >= n, 1 < a <= b, and b/a as small as possible.

    Below 2**32 the decomposition is exact: the first n' at or above n that
    has a nontrivial divisor pair. Above it, trial division is replaced by
    a = isqrt(n), b = ceil(n / a), which stays near-square and expands the
    range by less than one part in a.
    """
    if n < 2:
        raise BadParameter(f"domain must have at least two values, got {n}")
    if n > _EXACT_FACTOR_LIMIT:
        a = isqrt(n)
        b = -(-n // a)
        return a, b, a * b
    m = max(n, 4)
    while True:
        a = _largest_small_divisor(m)
        if a is not None:
            return a, m // a, m
        m += 1


# ---------------------------------------------------------------------------
# the Feistel permutation on [0, n')


@lru_cache(maxsize=4096)
def _base_state(secret: bytes, tweak: bytes):
    h = hashlib.shake_256()
    h.update(secret)
    h.update(len(tweak).to_bytes(4, "big"))
    h.update(tweak)
    return h


def _round_output(base, round_no: int, modulus: int, value: int) -> int:
    bits = (modulus - 1).bit_length()
    if bits == 0:
        return 0
    nbytes = (bits + 7) // 8
    shift = nbytes * 8 - bits
    ctr = 0
    while True:
        h = base.copy()
        h.update(round_no.to_bytes(2, "big"))
        h.update(ctr.to_bytes(4, "big"))
        h.update(value.to_bytes(max(1, (value.bit_length() + 7) // 8), "big"))
        out = int.from_bytes(h.digest(nbytes), "big") >> shift
        if out < modulus:
            return out
        ctr += 1


def feistel_encrypt(key: IntFpeKey, tweak: bytes, n: int, x: int) -> int:
    """One pass of the permutation over [0, n') where n' >= n."""
    a, b, n2 = balanced_factor(n)
    if not 0 <= x < n2:
        raise InputOutOfDomain(f"{x} not in [0, {n2})")
    q, r = divmod(x, a)
    base = _base_state(key.secret, tweak)
    for i in range(1, key.rounds + 1):
        if i % 2:
            r = (r + _round_output(base, i, a, q)) % a
        else:
            q = (q + _round_output(base, i, b, r)) % b
    return a * q + r


def feistel_decrypt(key: IntFpeKey, tweak: bytes, n: int, x: int) -> int:
    a, b, n2 = balanced_factor(n)
    if not 0 <= x < n2:
        raise InputOutOfDomain(f"{x} not in [0, {n2})")
    q, r = divmod(x, a)
    base = _base_state(key.secret, tweak)
    for i in range(key.rounds, 0, -1):
        if i % 2:
            r = (r - _round_output(base, i, a, q)) % a
        else:
            q = (q - _round_output(base, i, b, r)) % b
    return a * q + r


# ---------------------------------------------------------------------------
# cycle walking down to [0, m)


class WalkRecorder:
    """Collects (domain size, walk length) pairs for instrumentation."""

    def __init__(self):
        self.events = []

    def record(self, domain: int, steps: int) -> None:
        self.events.append((domain, steps))

    def steps_histogram(self) -> dict:
        out: dict[int, int] = {}
        for _, steps in self.events:
            out[steps] = out.get(steps, 0) + 1
        return out


def cycle_walk_encrypt(
    key, tweak: bytes, m_size: int, x: int, walk_budget: int = 10**6, recorder=None
) -> int:
    """Permute [0, m_size) by iterating the Feistel pass until it lands inside."""
    if m_size < 1:
        raise BadParameter(f"empty domain {m_size}")
    if not 0 <= x < m_size:
        raise InputOutOfDomain(f"{x} not in [0, {m_size})")
    if m_size == 1:
        if recorder is not None:
            recorder.record(m_size, 0)
        return 0
    y = x
    steps = 0
    while True:
        y = feistel_encrypt(key, tweak, m_size, y)
        steps += 1
        if y < m_size:
            break
        if steps >= walk_budget:
            raise WalkBudgetExceeded(
                f"no landing in [0, {m_size}) within {walk_budget} applications"
            )
    if recorder is not None:
        recorder.record(m_size, steps)
    return y


def cycle_walk_decrypt(
    key, tweak: bytes, m_size: int, x: int, walk_budget: int = 10**6, recorder=None
) -> int:
    if m_size < 1:
        raise BadParameter(f"empty domain {m_size}")
    if not 0 <= x < m_size:
        raise InputOutOfDomain(f"{x} not in [0, {m_size})")
    if m_size == 1:
        if recorder is not None:
            recorder.record(m_size, 0)
        return 0
    y = x
    steps = 0
    while True:
        y = feistel_decrypt(key, tweak, m_size, y)
        steps += 1
        if y < m_size:
            break
        if steps >= walk_budget:
            raise WalkBudgetExceeded(
                f"no landing in [0, {m_size}) within {walk_budget} applications"
            )
    if recorder is not None:
        recorder.record(m_size, steps)
    return y


# ---------------------------------------------------------------------------
# backend registry


class Fe1Backend:
    """Feistel-then-walk enciphering of integer ranges."""

    name = "fe1"

    def __init__(self, walk_budget: int = 10**6, recorder=None):
        self.walk_budget = walk_budget
        self.recorder = recorder

    def encrypt(self, key, tweak: bytes, domain: int, x: int) -> int:
        return cycle_walk_encrypt(key, tweak, domain, x, self.walk_budget, self.recorder)

    def decrypt(self, key, tweak: bytes, domain: int, x: int) -> int:
        return cycle_walk_decrypt(key, tweak, domain, x, self.walk_budget, self.recorder)


BACKENDS = {"fe1": Fe1Backend}


def get_backend(name: str, **kwargs):
    cls = BACKENDS.get(name)
    if cls is None:
        raise UnknownBackend(f"no backend named {name!r}")
    return cls(**kwargs)
