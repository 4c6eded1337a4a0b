"""Bloom filter used as a prefilter for edge-membership queries.

Keys are arbitrary byte strings. Bit positions come from double hashing
(two 64-bit halves of a blake2b digest), so any number of probes needs
only one digest per key. Zero false negatives by construction.
"""

import hashlib
import math

import numpy as np

DEFAULT_BITS_PER_KEY = 10
DEFAULT_NUM_HASHES = 7


class BloomFilter:
    def __init__(self, capacity: int, bits_per_key: int = DEFAULT_BITS_PER_KEY,
                 num_hashes: int = DEFAULT_NUM_HASHES):
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        if bits_per_key < 1 or num_hashes < 1:
            raise ValueError("bits_per_key and num_hashes must be >= 1")
        self.capacity = capacity
        self.bits_per_key = bits_per_key
        self.num_hashes = num_hashes
        self.num_bits = max(8, capacity * bits_per_key)
        self._bits = np.zeros(self.num_bits, dtype=bool)
        self.num_added = 0

    def _positions(self, key: bytes) -> list[int]:
        digest = hashlib.blake2b(key, digest_size=16).digest()
        h1 = int.from_bytes(digest[:8], "little")
        h2 = int.from_bytes(digest[8:], "little") | 1
        m = self.num_bits
        return [(h1 + i * h2) % m for i in range(self.num_hashes)]

    def add(self, key: bytes) -> None:
        self._bits[self._positions(key)] = True
        self.num_added += 1

    def might_contain(self, key: bytes) -> bool:
        bits = self._bits
        for pos in self._positions(key):
            if not bits[pos]:
                return False
        return True

    @property
    def design_false_positive_rate(self) -> float:
        """Expected false-positive rate at the configured capacity."""
        if self.capacity == 0:
            return 0.0
        k = self.num_hashes
        fill = 1.0 - math.exp(-k * self.capacity / self.num_bits)
        return fill ** k
