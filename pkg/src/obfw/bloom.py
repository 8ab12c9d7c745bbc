"""Bloom filter, keyed hash family and parameter derivation.

The hash family is SipHash-2-4 keyed per index: instance t gets a 128-bit
key derived from the 16-byte master key by PRF calls on the index.  Index
mapping is hash_t(item) mod beta.  Plaintext filters belong on the admin
machine only; servers ever see secret shares of the bit array.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass

MAGIC = b"OBFW1"
_MASK = 0xFFFFFFFFFFFFFFFF


class BloomError(Exception):
    pass


class BadParams(BloomError):
    pass


class IoError(BloomError):
    pass


def _rotl(x: int, b: int) -> int:
    return ((x << b) | (x >> (64 - b))) & _MASK


def siphash24(key: bytes, data: bytes) -> int:
    """SipHash-2-4 with a 128-bit key; returns a 64-bit integer."""
    if len(key) != 16:
        raise BadParams("SipHash key must be 16 bytes")
    k0, k1 = struct.unpack("<QQ", key)
    v0 = k0 ^ 0x736F6D6570736575
    v1 = k1 ^ 0x646F72616E646F6D
    v2 = k0 ^ 0x6C7967656E657261
    v3 = k1 ^ 0x7465646279746573

    def rounds(n: int) -> None:
        nonlocal v0, v1, v2, v3
        for _ in range(n):
            v0 = (v0 + v1) & _MASK
            v1 = _rotl(v1, 13) ^ v0
            v0 = _rotl(v0, 32)
            v2 = (v2 + v3) & _MASK
            v3 = _rotl(v3, 16) ^ v2
            v0 = (v0 + v3) & _MASK
            v3 = _rotl(v3, 21) ^ v0
            v2 = (v2 + v1) & _MASK
            v1 = _rotl(v1, 17) ^ v2
            v2 = _rotl(v2, 32)

    padded = data + b"\x00" * (7 - (len(data) % 8)) + bytes([len(data) % 256])
    for off in range(0, len(padded), 8):
        m = struct.unpack_from("<Q", padded, off)[0]
        v3 ^= m
        rounds(2)
        v0 ^= m
    v2 ^= 0xFF
    rounds(4)
    return v0 ^ v1 ^ v2 ^ v3


def derive_instance_key(master: bytes, t: int) -> bytes:
    """128-bit key for hash instance t from the master key."""
    lo = siphash24(master, struct.pack("<Q", t))
    hi = siphash24(master, struct.pack("<QB", t, 1))
    return struct.pack("<QQ", lo, hi)


class SipHashFamily:
    """kappa keyed SipHash instances; index = hash_t(item) mod beta."""

    def __init__(self, master_key: bytes, kappa: int):
        if len(master_key) != 16:
            raise BadParams("master key must be 16 bytes")
        if not 1 <= kappa <= 64:
            raise BadParams("hash count must be in [1, 64]")
        self.master_key = master_key
        self.kappa = kappa
        self._keys = [derive_instance_key(master_key, t) for t in range(1, kappa + 1)]

    def indices(self, item: bytes, beta: int) -> list[int]:
        return [siphash24(k, item) % beta for k in self._keys]


class FixedHashFamily:
    """Test stub mapping chosen items to chosen index sets."""

    def __init__(self, table: dict[bytes, list[int]], kappa: int):
        self.table = table
        self.kappa = kappa

    def indices(self, item: bytes, beta: int) -> list[int]:
        return [i % beta for i in self.table[item]]


@dataclass(frozen=True)
class BloomParams:
    beta: int
    kappa: int
    eta: int
    target_fp: float

    def __post_init__(self):
        if self.kappa < 1 or self.beta < self.kappa:
            raise BadParams("need kappa >= 1 and beta >= kappa")

    def fp_estimate(self) -> float:
        # (1 - e^(-kappa*eta/beta))^kappa
        return (1.0 - math.exp(-self.kappa * self.eta / self.beta)) ** self.kappa


def derive_params(eta: int, target_fp: float) -> BloomParams:
    """Size the filter from the expected load and false-positive budget.

    beta from fp ~= 0.6185^(beta/eta), kappa from the (beta/eta) ln 2
    optimum, clamped to at least one hash.
    """
    if eta < 1:
        raise BadParams("expected element count must be >= 1")
    if not 0.0 < target_fp < 1.0:
        raise BadParams("false-positive target must be in (0, 1)")
    beta = math.ceil(eta * math.log(target_fp) / math.log(0.6185))
    kappa = max(1, round(beta / eta * math.log(2)))
    kappa = min(kappa, 64)
    beta = max(beta, kappa)
    return BloomParams(beta=beta, kappa=kappa, eta=eta, target_fp=target_fp)


class BloomFilter:
    """Plaintext beta-bit filter with kappa hashed indices per item."""

    def __init__(self, params: BloomParams, master_key: bytes,
                 family=None):
        self.params = params
        self.master_key = master_key
        self.family = family if family is not None else SipHashFamily(
            master_key, params.kappa)
        self.bits = bytearray((params.beta + 7) // 8)

    # -- bit plumbing ----------------------------------------------------
    def _get(self, i: int) -> int:
        return (self.bits[i >> 3] >> (i & 7)) & 1

    def _set(self, i: int) -> None:
        self.bits[i >> 3] |= 1 << (i & 7)

    def bit(self, i: int) -> int:
        if not 0 <= i < self.params.beta:
            raise IndexError(i)
        return self._get(i)

    def bit_vector(self) -> list[int]:
        return [self._get(i) for i in range(self.params.beta)]

    def set_bit_count(self) -> int:
        return sum(bin(b).count("1") for b in self.bits)

    # -- operations --------------------------------------------------------
    def hash_indices(self, item: bytes) -> list[int]:
        return self.family.indices(item, self.params.beta)

    def insert(self, item: bytes) -> None:
        for i in self.hash_indices(item):
            self._set(i)

    def query(self, item: bytes) -> bool:
        return all(self._get(i) for i in self.hash_indices(item))

    # -- admin-side file format ---------------------------------------------
    def save(self, path: str) -> None:
        try:
            with open(path, "wb") as fh:
                fh.write(MAGIC)
                fh.write(self.params.beta.to_bytes(8, "little"))
                fh.write(self.params.kappa.to_bytes(2, "little"))
                fh.write(self.master_key)
                fh.write(bytes(self.bits))
        except OSError as exc:
            raise IoError(str(exc)) from exc

    @classmethod
    def load(cls, path: str, eta: int = 1, target_fp: float = 0.5) -> "BloomFilter":
        try:
            with open(path, "rb") as fh:
                blob = fh.read()
        except OSError as exc:
            raise IoError(str(exc)) from exc
        if blob[:5] != MAGIC:
            raise IoError("bad filter magic")
        beta = int.from_bytes(blob[5:13], "little")
        kappa = int.from_bytes(blob[13:15], "little")
        key = blob[15:31]
        bits = blob[31:]
        if len(bits) != (beta + 7) // 8:
            raise IoError("truncated bit array")
        flt = cls(BloomParams(beta=beta, kappa=kappa, eta=eta, target_fp=target_fp), key)
        flt.bits = bytearray(bits)
        return flt
