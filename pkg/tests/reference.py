"""Slow, literal reimplementations used as oracles.

Each ``*_first`` function scans one chunk from the start of ``d`` and returns
the 1-indexed cut position, or ``None``. Hashes are recomputed from scratch
at every position instead of being rolled.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from chunkbench.rolling_hash import MASK64, RABIN_BASE, make_byte_table, rotl32

First = Callable[[Sequence[int]], Optional[int]]


def rabin_direct(window: Sequence[int]) -> int:
    w = len(window)
    return sum(b * pow(RABIN_BASE, w - 1 - j, 1 << 64) for j, b in enumerate(window)) & MASK64


def buzhash_direct(window: Sequence[int], table) -> int:
    w = len(window)
    h = 0
    for j, b in enumerate(window):
        h ^= rotl32(table[b], w - 1 - j)
    return h


def gear_direct(prefix: Sequence[int], table, bits: int = 32) -> int:
    words = table.entries if bits == 32 else table.entries64
    total = 0
    n = len(prefix)
    # terms shifted past the word width vanish
    for j in range(max(0, n - bits), n):
        total += int(words[prefix[j]]) << (n - 1 - j)
    return total & ((1 << bits) - 1)


def bsw_first(d, w: int, b: int, H) -> Optional[int]:
    mask = (1 << b) - 1
    for i in range(w, len(d) + 1):
        if H(d[i - w : i]) & mask == 0:
            return i
    return None


def gear_first(d, b: int, table, level: int = 0, switch: int = 0, bits: int = 32) -> Optional[int]:
    for i in range(1, len(d) + 1):
        eff = b + level if i < switch else b - level
        top = ((1 << eff) - 1) << (bits - eff)
        if gear_direct(d[:i], table, bits) & top == 0:
            return i
    return None


def ae_first(d, h: int) -> Optional[int]:
    # The maximum starts below every byte, so the first byte always seeds it.
    x_val, x_pos = -1, 0
    for i in range(1, len(d) + 1):
        if d[i - 1] <= x_val:
            if i == x_pos + h:
                return i
        else:
            x_val, x_pos = d[i - 1], i
    return None


def ram_first(d, h: int) -> Optional[int]:
    x = 0
    for i in range(1, len(d) + 1):
        if i <= h:
            if d[i - 1] > x:
                x = d[i - 1]
        elif d[i - 1] >= x:
            return i
    return None


def mii_first(d, w: int) -> Optional[int]:
    c = 0
    for i in range(2, len(d) + 1):
        if d[i - 1] > d[i - 2]:
            c += 1
            if c == w:
                return i
        else:
            c = 0
    return None


def pci_first(d, w: int, theta: int) -> Optional[int]:
    v = [0] * w
    p = 0
    for i in range(1, len(d) + 1):
        p += bin(d[i - 1]).count("1") - bin(v[i % w]).count("1")
        v[i % w] = d[i - 1]
        if i >= w and p >= theta:
            return i
    return None


def bfbc_first(d, divisors: set[tuple[int, int]], min_chunk: int) -> Optional[int]:
    for i in range(2, len(d) + 1):
        if i > min_chunk and (d[i - 2], d[i - 1]) in divisors:
            return i
    return None


def fsc_first(d, size: int) -> Optional[int]:
    return size if len(d) >= size else None


def all_cuts(first: First, data: Sequence[int]) -> list[int]:
    """Apply a single-chunk scanner repeatedly, restarting after each cut."""
    d = list(data)
    cuts = []
    start = 0
    while True:
        r = first(d[start:])
        if r is None:
            return cuts
        start += r
        cuts.append(start)


def oracle_for(spec) -> First:
    """Single-chunk oracle matching a :class:`ChunkerSpec`."""
    alg = spec.algorithm.value
    if alg == "fsc":
        return lambda d: fsc_first(d, spec.fixed_size)
    if alg == "rabin":
        return lambda d: bsw_first(d, spec.window, spec.mask_bits, rabin_direct)
    if alg == "buzhash":
        table = make_byte_table(spec.table_seed)
        return lambda d: bsw_first(d, spec.window, spec.mask_bits, lambda win: buzhash_direct(win, table))
    if alg in ("gear", "gear-nc"):
        table = make_byte_table(spec.table_seed)
        level = spec.nc_level or 0
        switch = spec.target if level else 0
        return lambda d: gear_first(d, spec.mask_bits, table, level, switch, spec.word_bits)
    if alg == "ae":
        return lambda d: ae_first(d, spec.horizon)
    if alg == "ram":
        return lambda d: ram_first(d, spec.horizon)
    if alg == "mii":
        return lambda d: mii_first(d, spec.window)
    if alg == "pci":
        return lambda d: pci_first(d, spec.window, spec.threshold)
    if alg in ("bfbc", "bfbc-star"):
        pairs = {(p >> 8, p & 0xFF) for p in spec.divisors.members}
        return lambda d: bfbc_first(d, pairs, spec.min_chunk)
    raise ValueError(alg)

