"""Deterministic randomness source for share generation and protocol replay.

Every protocol in this package draws randomness through a RandomSource so
that a fixed 32-byte seed reproduces the exact same share streams, message
payloads and transcripts.  The construction is SHA-256 in counter mode,
which is portable across Python versions (unlike the Mersenne state of
``random.Random``).
"""
from __future__ import annotations

import hashlib


class RandomSource:
    """SHA-256 counter-mode generator keyed by a 32-byte seed."""

    __slots__ = ("seed", "counter", "_buf", "_pos")

    def __init__(self, seed: bytes | int | str = 0):
        if isinstance(seed, int):
            seed = seed.to_bytes(32, "little", signed=False)
        elif isinstance(seed, str):
            seed = hashlib.sha256(seed.encode()).digest()
        if len(seed) != 32:
            seed = hashlib.sha256(seed).digest()
        self.seed = seed
        self.counter = 0
        self._buf = b""
        self._pos = 0

    def child(self, label: int | str) -> "RandomSource":
        """Derive an independent stream; used to give each party its own."""
        tag = label.to_bytes(8, "little") if isinstance(label, int) else label.encode()
        return RandomSource(hashlib.sha256(self.seed + b"/" + tag).digest())

    def _refill(self) -> None:
        block = self.counter.to_bytes(8, "little")
        self._buf = hashlib.sha256(self.seed + block).digest()
        self._pos = 0
        self.counter += 1

    def bytes(self, k: int) -> bytes:
        out = bytearray()
        while len(out) < k:
            if self._pos >= len(self._buf):
                self._refill()
            take = min(k - len(out), len(self._buf) - self._pos)
            out += self._buf[self._pos:self._pos + take]
            self._pos += take
        return bytes(out)

    def randbits(self, k: int) -> int:
        nbytes = (k + 7) // 8
        val = int.from_bytes(self.bytes(nbytes), "little")
        return val >> (nbytes * 8 - k)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        k = (n - 1).bit_length() or 1
        while True:
            v = self.randbits(k)
            if v < n:
                return v

    def randrange(self, lo: int, hi: int) -> int:
        return lo + self.randbelow(hi - lo)

    def shuffle_amount(self, length: int) -> int:
        return self.randbelow(length)
