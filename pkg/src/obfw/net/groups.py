"""Bit-exact payload codec.

Message payloads are sequences of group elements packed at fixed bit
widths, least significant bit first, with zero padding to a whole byte.
Each group carries two widths: the raw wire width actually serialized and
the accounting width used by the complexity ledgers (the two differ only
for comparison-domain Z_N elements, which the ledgers count at l bits
while the wire needs l+1).
"""
from __future__ import annotations

from dataclasses import dataclass


class CodecError(Exception):
    pass


class OutOfRange(CodecError):
    pass


class TruncatedPayload(CodecError):
    pass


def ceil_log2(n: int) -> int:
    if n < 1:
        raise ValueError("ceil_log2 needs n >= 1")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class Group:
    """An element domain plus its wire and accounting widths in bits."""
    name: str
    modulus: int
    raw_bits: int
    accounting_bits: int

    def check(self, v: int) -> None:
        if not 0 <= v < self.modulus:
            raise OutOfRange(f"{v} outside {self.name} range [0, {self.modulus})")


def group_z2() -> Group:
    return Group("z2", 2, 1, 1)


def group_zn2(n2: int, lbits: int) -> Group:
    w = 2 + ceil_log2(lbits)
    return Group("zn2", n2, w, w)


def group_zn_compare(n: int, lbits: int) -> Group:
    # Ledger convention: a Z_N element counts l bits although the smallest
    # prime above 2^l needs l+1 on the wire.
    return Group("zn", n, lbits + 1, lbits)


def group_shift(lbits: int) -> Group:
    w = 1 + ceil_log2(lbits)
    return Group("shift", lbits + 1, w, w)


def group_zp(p: int) -> Group:
    w = max(1, (p - 1).bit_length())
    return Group("zp", p, w, w)


def group_addr32() -> Group:
    return Group("addr", 1 << 32, 32, 32)


def group_index(limit: int) -> Group:
    w = max(1, (limit - 1).bit_length())
    return Group("index", limit, w, w)


Segment = tuple[Group, list[int]]


def encode_elements(segments: list[Segment]) -> bytes:
    """Pack segment values into bytes, LSB-first, zero pad bits."""
    acc = 0
    nbits = 0
    for group, values in segments:
        w = group.raw_bits
        for v in values:
            group.check(v)
            acc |= v << nbits
            nbits += w
    return acc.to_bytes((nbits + 7) // 8, "little") if nbits else b""


def decode_elements(payload: bytes, schema: list[tuple[Group, int]]) -> list[list[int]]:
    """Inverse of encode_elements given the declared (group, count) list."""
    total_bits = sum(g.raw_bits * n for g, n in schema)
    if len(payload) != (total_bits + 7) // 8:
        raise TruncatedPayload(
            f"payload {len(payload)}B does not match schema {(total_bits + 7) // 8}B")
    acc = int.from_bytes(payload, "little")
    if total_bits and acc >> total_bits:
        raise TruncatedPayload("nonzero padding bits")
    out = []
    pos = 0
    for group, count in schema:
        w = group.raw_bits
        mask = (1 << w) - 1
        vals = []
        for _ in range(count):
            v = (acc >> pos) & mask
            group.check(v)
            vals.append(v)
            pos += w
        out.append(vals)
    return out


def segments_accounting_bits(segments: list[Segment]) -> int:
    return sum(g.accounting_bits * len(vs) for g, vs in segments)


def segments_raw_bits(segments: list[Segment]) -> int:
    return sum(g.raw_bits * len(vs) for g, vs in segments)
