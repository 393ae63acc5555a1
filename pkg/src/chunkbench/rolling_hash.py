"""Rabin, Buzhash and Gear rolling hashes and the shared byte table.

The functions here are the reference arithmetic in plain Python integers.
The chunking kernels in :mod:`chunkbench.chunkers` repeat the same update
rules over numpy words.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .spec import DEFAULT_TABLE_SEED

RABIN_BASE = 1_000_000_007
MASK32 = (1 << 32) - 1
MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def xorshift64star(seed: int, n: int) -> list[int]:
    """``n`` outputs of xorshift64* whose state is seeded through splitmix64."""
    state = _splitmix64(seed & MASK64) or 0x9E3779B97F4A7C15
    out = []
    for _ in range(n):
        state ^= state >> 12
        state ^= (state << 25) & MASK64
        state ^= state >> 27
        out.append((state * 0x2545F4914F6CDD1D) & MASK64)
    return out


@dataclass(frozen=True)
class ByteTable:
    """Deterministic byte -> word table shared by Buzhash and Gear."""

    seed: int
    entries: np.ndarray = field(repr=False)  # uint32[256]
    entries64: np.ndarray = field(repr=False)  # uint64[256]

    def __getitem__(self, byte: int) -> int:
        return int(self.entries[byte])

    def bit_balance(self, bits: int = 32) -> np.ndarray:
        """Number of entries with each bit set, least significant bit first."""
        words = self.entries if bits == 32 else self.entries64
        return np.array([int(((words >> np.uint64(k)) & 1).sum()) for k in range(bits)])


@lru_cache(maxsize=16)
def make_byte_table(seed: int = DEFAULT_TABLE_SEED) -> ByteTable:
    raw = xorshift64star(seed, 256)
    e64 = np.array(raw, dtype=np.uint64)
    e32 = (e64 >> np.uint64(32)).astype(np.uint32)
    e32.setflags(write=False)
    e64.setflags(write=False)
    return ByteTable(seed=seed, entries=e32, entries64=e64)


def rotl32(x: int, r: int) -> int:
    r %= 32
    return ((x << r) | (x >> (32 - r))) & MASK32 if r else x


@lru_cache(maxsize=None)
def rabin_top_power(w: int) -> int:
    """x^(w-1) mod 2^64, removed from the hash when a byte leaves the window."""
    return pow(RABIN_BASE, w - 1, 1 << 64)


def rabin_init(window: Sequence[int]) -> int:
    h = 0
    for b in window:
        h = (h * RABIN_BASE + b) & MASK64
    return h


def rabin_roll(h: int, out_byte: int, in_byte: int, w: int) -> int:
    return ((h - out_byte * rabin_top_power(w)) * RABIN_BASE + in_byte) & MASK64


def buzhash_init(window: Sequence[int], table: ByteTable) -> int:
    h = 0
    for b in window:
        h = rotl32(h, 1) ^ table[b]
    return h


def buzhash_roll(h: int, out_byte: int, in_byte: int, w: int, table: ByteTable) -> int:
    return rotl32(h, 1) ^ rotl32(table[out_byte], w) ^ table[in_byte]


def gear_update(h: int, in_byte: int, table: ByteTable, bits: int = 32) -> int:
    if bits == 32:
        return ((h << 1) + table[in_byte]) & MASK32
    return ((h << 1) + int(table.entries64[in_byte])) & MASK64


class RollingState:
    """A rolling hash over the last ``window`` bytes, updated one byte at a time.

    For Gear the window is implicit (the word width) and no bytes are kept.
    """

    def __init__(self, kind: str, window: int = 32, table: ByteTable | None = None, bits: int = 32):
        if kind not in ("rabin", "buzhash", "gear"):
            raise ValueError(f"unknown rolling hash {kind!r}")
        if window < 1:
            raise ValueError("window must be positive")
        self.kind = kind
        self.window = bits if kind == "gear" else window
        self.bits = bits
        self.table = table if table is not None else make_byte_table()
        self.ring: deque[int] = deque()
        self.value = 0

    @property
    def full(self) -> bool:
        return self.kind == "gear" or len(self.ring) == self.window

    def push(self, byte: int) -> int:
        if self.kind == "gear":
            self.value = gear_update(self.value, byte, self.table, self.bits)
            return self.value
        if len(self.ring) < self.window:
            if self.kind == "rabin":
                self.value = (self.value * RABIN_BASE + byte) & MASK64
            else:
                self.value = rotl32(self.value, 1) ^ self.table[byte]
        else:
            out = self.ring.popleft()
            if self.kind == "rabin":
                self.value = rabin_roll(self.value, out, byte, self.window)
            else:
                self.value = buzhash_roll(self.value, out, byte, self.window, self.table)
        self.ring.append(byte)
        return self.value
