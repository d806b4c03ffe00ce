"""Finite characteristic vectors of subsets of N.

A :class:`BitWindow` stores ``S ∩ [lo, hi)`` as packed little-endian
64-bit words.  Windows are immutable; all set operations return new
windows.  The on-disk form is an ASCII header ``BW1 <lo> <hi>\\n``
followed by ``ceil((hi - lo) / 8)`` raw bytes, bit 0 of each byte first.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import FormatError, InputError, OutOfWindowError

MAX_INDEX = 2**63 - 1
_HEADER = re.compile(rb"BW1 (\d+) (\d+)\n")


def _nwords(nbits: int) -> int:
    return (nbits + 63) >> 6


def _pack(bools: np.ndarray) -> np.ndarray:
    nbits = bools.size
    padded = np.zeros(_nwords(nbits) * 64, dtype=np.uint8)
    padded[:nbits] = bools
    return np.packbits(padded, bitorder="little").view("<u8").astype(np.uint64, copy=False)


class BitWindow:
    __slots__ = ("lo", "hi", "_words")

    def __init__(self, lo: int, hi: int, words: np.ndarray):
        lo, hi = int(lo), int(hi)
        if lo < 0 or hi > MAX_INDEX:
            raise InputError(f"window [{lo}, {hi}) outside [0, 2^63)")
        if lo >= hi:
            raise InputError(f"empty window [{lo}, {hi})")
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.size != _nwords(hi - lo):
            raise InputError("word count does not match window length")
        tail = (hi - lo) & 63
        if tail and words[-1] >> np.uint64(tail):
            words = words.copy()
            words[-1] &= np.uint64((1 << tail) - 1)
        words.setflags(write=False)
        self.lo = lo
        self.hi = hi
        self._words = words

    # construction -------------------------------------------------------

    @classmethod
    def from_bools(cls, lo: int, bools) -> BitWindow:
        bools = np.asarray(bools, dtype=bool)
        return cls(lo, lo + bools.size, _pack(bools))

    @classmethod
    def from_members(cls, lo: int, hi: int, members) -> BitWindow:
        bools = np.zeros(hi - lo, dtype=bool)
        m = np.asarray(list(members) if not isinstance(members, np.ndarray) else members, dtype=np.int64)
        if m.size and (m.min() < lo or m.max() >= hi):
            raise OutOfWindowError(f"member outside [{lo}, {hi})")
        bools[m - lo] = True
        return cls.from_bools(lo, bools)

    @classmethod
    def empty(cls, lo: int, hi: int) -> BitWindow:
        return cls(lo, hi, np.zeros(_nwords(hi - lo), dtype=np.uint64))

    @classmethod
    def full(cls, lo: int, hi: int) -> BitWindow:
        return cls.empty(lo, hi).complement()

    @classmethod
    def concat(cls, parts) -> BitWindow:
        """Join windows that tile a range left to right."""
        parts = list(parts)
        for left, right in zip(parts, parts[1:]):
            if left.hi != right.lo:
                raise InputError("windows are not adjacent")
        return cls.from_bools(parts[0].lo, np.concatenate([p.to_bools() for p in parts]))

    # basic queries ------------------------------------------------------

    @property
    def words(self) -> np.ndarray:
        return self._words

    @property
    def size(self) -> int:
        return self.hi - self.lo

    def covers(self, a: int, b: int) -> bool:
        """True when every integer of the closed range ``[a, b]`` is in the window."""
        return self.lo <= a and b < self.hi

    def __contains__(self, n) -> bool:
        n = int(n)
        if not self.lo <= n < self.hi:
            raise OutOfWindowError(f"{n} outside window [{self.lo}, {self.hi})")
        i = n - self.lo
        return bool((int(self._words[i >> 6]) >> (i & 63)) & 1)

    def _check_range(self, a, b):
        a = self.lo if a is None else int(a)
        b = self.hi if b is None else int(b)
        if a < self.lo or b > self.hi or a > b:
            raise OutOfWindowError(f"range [{a}, {b}) not inside [{self.lo}, {self.hi})")
        return a, b

    def count(self, a: int | None = None, b: int | None = None) -> int:
        """Number of members in ``[a, b)`` (default: the whole window)."""
        a, b = self._check_range(a, b)
        return int(_kernels.popcount_range(self._words, a - self.lo, b - self.lo))

    def to_bools(self, a: int | None = None, b: int | None = None) -> np.ndarray:
        a, b = self._check_range(a, b)
        ia, ib = a - self.lo, b - self.lo
        wa, wb = ia >> 6, _nwords(ib)
        raw = np.unpackbits(self._words[wa:wb].view(np.uint8), bitorder="little")
        off = ia - 64 * wa
        return raw[off:off + (ib - ia)].astype(bool)

    def dense(self, a: int, b: int) -> np.ndarray:
        """uint8 indicator of ``[a, b)`` with zeros where the window does not reach."""
        out = np.zeros(b - a, dtype=np.uint8)
        lo, hi = max(a, self.lo), min(b, self.hi)
        if lo < hi:
            out[lo - a:hi - a] = self.to_bools(lo, hi)
        return out

    def members(self) -> np.ndarray:
        return np.flatnonzero(self.to_bools()).astype(np.int64) + self.lo

    def slice(self, a: int, b: int) -> BitWindow:
        return BitWindow.from_bools(a, self.to_bools(a, b))

    def reversed_words(self) -> np.ndarray:
        """Packed bits in reverse order: bit ``t`` is the member test for ``hi - 1 - t``."""
        return _kernels.reverse_bits(self._words, self.size)

    # set algebra --------------------------------------------------------

    def _same_frame(self, other: BitWindow):
        if (self.lo, self.hi) != (other.lo, other.hi):
            raise InputError("set operation on windows with different ranges")

    def __or__(self, other: BitWindow) -> BitWindow:
        self._same_frame(other)
        return BitWindow(self.lo, self.hi, self._words | other._words)

    def __and__(self, other: BitWindow) -> BitWindow:
        self._same_frame(other)
        return BitWindow(self.lo, self.hi, self._words & other._words)

    def __sub__(self, other: BitWindow) -> BitWindow:
        self._same_frame(other)
        return BitWindow(self.lo, self.hi, self._words & ~other._words)

    def __xor__(self, other: BitWindow) -> BitWindow:
        self._same_frame(other)
        return BitWindow(self.lo, self.hi, self._words ^ other._words)

    def complement(self) -> BitWindow:
        return BitWindow(self.lo, self.hi, ~self._words)

    def issubset(self, other: BitWindow) -> bool:
        self._same_frame(other)
        return not np.any(self._words & ~other._words)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitWindow):
            return NotImplemented
        return (self.lo, self.hi) == (other.lo, other.hi) and np.array_equal(self._words, other._words)

    __hash__ = None

    def __repr__(self) -> str:
        return f"BitWindow([{self.lo}, {self.hi}), count={self.count()})"

    # serialization ------------------------------------------------------

    def encode(self) -> bytes:
        nbytes = (self.size + 7) >> 3
        return f"BW1 {self.lo} {self.hi}\n".encode("ascii") + self._words.view(np.uint8)[:nbytes].tobytes()

    @classmethod
    def decode(cls, data: bytes) -> BitWindow:
        m = _HEADER.match(data[:64])
        if m is None:
            raise FormatError("missing or malformed BW1 header")
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo >= hi:
            raise FormatError(f"header declares empty window [{lo}, {hi})")
        nbits = hi - lo
        payload = data[m.end():]
        if len(payload) != (nbits + 7) >> 3:
            raise FormatError(f"length mismatch: expected {(nbits + 7) >> 3} bytes, got {len(payload)}")
        buf = np.zeros(_nwords(nbits) * 8, dtype=np.uint8)
        buf[:len(payload)] = np.frombuffer(payload, dtype=np.uint8)
        if nbits & 7 and buf[len(payload) - 1] >> (nbits & 7):
            raise FormatError("padding bits past the window end are set")
        return cls(lo, hi, buf.view("<u8").astype(np.uint64))

    def save(self, path) -> None:
        Path(path).write_bytes(self.encode())

    @classmethod
    def load(cls, path) -> BitWindow:
        return cls.decode(Path(path).read_bytes())


def encode(window: BitWindow) -> bytes:
    return window.encode()


def decode(data: bytes) -> BitWindow:
    return BitWindow.decode(data)
