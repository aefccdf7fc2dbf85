"""Bit-level writer/reader, LEB128 varints and combinatorial-number-system ranks."""

from __future__ import annotations

from math import comb

from .errors import MalformedStream, RankOutOfRange


def width(x: int) -> int:
    """Bits needed for an integer in ``[0, x]`` style fields: ``1 + floor(log2 x)``.

    ``width(0)`` is 1 so that every field occupies at least one bit.
    """
    if x < 0:
        raise ValueError("width of a negative number")
    return max(1, x.bit_length())


class BitWriter:
    """Append-only big-endian bit buffer."""

    def __init__(self):
        self._parts: list[str] = []
        self._len = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits < 0 or value < 0 or value >> nbits:
            raise ValueError(f"value {value} does not fit in {nbits} bits")
        if nbits:
            self._parts.append(format(value, f"0{nbits}b"))
            self._len += nbits

    def write_bits(self, bits: str) -> None:
        self._parts.append(bits)
        self._len += len(bits)

    def __len__(self) -> int:
        return self._len

    def bitstring(self) -> str:
        return "".join(self._parts)

    def to_bytes(self) -> bytes:
        """Bits padded with zeros up to the next byte boundary."""
        s = self.bitstring()
        pad = (-len(s)) % 8
        s += "0" * pad
        if not s:
            return b""
        return int(s, 2).to_bytes(len(s) // 8, "big")


class BitReader:
    def __init__(self, data: bytes, nbits: int | None = None):
        total = len(data) * 8
        if nbits is None:
            nbits = total
        if nbits > total:
            raise MalformedStream("declared bit length exceeds payload")
        self._bits = "".join(format(b, "08b") for b in data)[:nbits]
        self.pos = 0

    @property
    def remaining(self) -> int:
        return len(self._bits) - self.pos

    def read(self, nbits: int) -> int:
        if nbits == 0:
            return 0
        end = self.pos + nbits
        if end > len(self._bits):
            raise MalformedStream("unexpected end of bit stream")
        v = int(self._bits[self.pos:end], 2)
        self.pos = end
        return v

    def skip(self, nbits: int) -> None:
        if self.pos + nbits > len(self._bits):
            raise MalformedStream("unexpected end of bit stream")
        self.pos += nbits


def encode_varint(x: int) -> bytes:
    if x < 0:
        raise ValueError("varints are unsigned")
    out = bytearray()
    while True:
        byte = x & 0x7F
        x >>= 7
        if x:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def decode_varint(data: bytes, pos: int = 0) -> tuple[int, int]:
    """Return ``(value, next_position)``."""
    shift = value = 0
    while True:
        if pos >= len(data):
            raise MalformedStream("truncated varint")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7


def rank_subset(items) -> int:
    """Colex rank of a set of distinct non-negative integers: sum of C(c_i, i)."""
    return sum(comb(c, i) for i, c in enumerate(sorted(items), start=1))


def unrank_subset(rank: int, size: int, universe: int | None = None) -> list[int]:
    """Inverse of :func:`rank_subset` for subsets of the given size."""
    if rank < 0 or (universe is not None and rank >= comb(universe, size)):
        raise RankOutOfRange(f"subset rank {rank} out of range")
    out = []
    for i in range(size, 0, -1):
        # largest c with C(c, i) <= rank
        lo, hi = i - 1, max(i - 1, 1)
        while comb(hi, i) <= rank:
            hi *= 2
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if comb(mid, i) <= rank:
                lo = mid
            else:
                hi = mid - 1
        out.append(lo)
        rank -= comb(lo, i)
    return out[::-1]
