"""Boundary-detection state machines, one per chunking algorithm.

Each chunker scans a block of bytes and reports where chunks end, carrying
its state over to the next block. Positions are chunk-relative and 1-based:
a cut at position ``i`` means the chunk's last byte is its ``i``-th byte,
and the state resets before the next byte. The per-byte loops are compiled
with numba; everything around them is plain Python.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .rolling_hash import RABIN_BASE, make_byte_table, rabin_top_power, rotl32
from .spec import Algorithm, ChunkerSpec, ConfigError

_OUT_CAPACITY = 1 << 16
_EMPTY = np.zeros(0, dtype=np.int64)
_EMPTY_BYTES = np.zeros(0, dtype=np.uint8)

_X = np.uint64(RABIN_BASE)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_S63 = np.uint64(63)

POPCOUNT = np.array([bin(v).count("1") for v in range(256)], dtype=np.int64)


# --- kernels ---------------------------------------------------------------
# Every kernel has the shape (data, start, out, state..., params...) -> (n_cuts, stop).
# It writes block-relative end offsets of completed chunks into ``out`` and
# returns early when ``out`` fills up. Kernels of windowed algorithms read the
# outgoing byte as data[k - w]; the caller guarantees those bytes are present
# (see Chunker.history). Indices are unsigned so numba emits no wraparound
# checks, and each chunk is scanned by a tight inner loop that breaks on a cut.


@njit(cache=True, nogil=True)
def _rabin_kernel(data, start, out, st, hst, w, mask, xpow):
    n = np.uint64(data.shape[0])
    W = np.uint64(w)
    cap = out.shape[0]
    k = np.uint64(start)
    i = np.uint64(st[0])
    h = hst[0]
    m = 0
    while k < n:
        found = False
        if i < W:
            h = h * _X + np.uint64(data[k])
            k += _ONE
            i += _ONE
            found = i == W and (h & mask) == _ZERO
        else:
            while k < n:
                h = (h - np.uint64(data[k - W]) * xpow) * _X + np.uint64(data[k])
                k += _ONE
                i += _ONE
                if (h & mask) == _ZERO:
                    found = True
                    break
        if found:
            out[m] = k
            m += 1
            i = _ZERO
            h = _ZERO
            if m == cap:
                break
    st[0] = i
    hst[0] = h
    return m, k


@njit(cache=True, nogil=True)
def _buzhash_kernel(data, start, out, st, hst, w, mask, t_in, t_out):
    # 32-bit Buzhash held as two identical halves of a 64-bit word: a 64-bit
    # rotation by one then equals the 32-bit rotation in each half.
    n = np.uint64(data.shape[0])
    W = np.uint64(w)
    cap = out.shape[0]
    k = np.uint64(start)
    i = np.uint64(st[0])
    h = hst[0]
    m = 0
    while k < n:
        found = False
        if i < W:
            h = ((h << _ONE) | (h >> _S63)) ^ t_in[data[k]]
            k += _ONE
            i += _ONE
            found = i == W and (h & mask) == _ZERO
        else:
            while k < n:
                h = ((h << _ONE) | (h >> _S63)) ^ (t_out[data[k - W]] ^ t_in[data[k]])
                k += _ONE
                i += _ONE
                if (h & mask) == _ZERO:
                    found = True
                    break
        if found:
            out[m] = k
            m += 1
            i = _ZERO
            h = _ZERO
            if m == cap:
                break
    st[0] = i
    hst[0] = h
    return m, k


@njit(cache=True, nogil=True)
def _gear_kernel(data, start, out, st, hst, table, mask_small, mask_large, switch):
    # The hash is kept unmasked in 64 bits; its low 32 bits are exactly the
    # 32-bit Gear value, so 32-bit masks sit below bit 32.
    n = np.uint64(data.shape[0])
    cap = out.shape[0]
    k = np.uint64(start)
    i = np.uint64(st[0])
    h = hst[0]
    sw = np.uint64(switch)
    m = 0
    while k < n:
        found = False
        while k < n and i + _ONE < sw:
            h = (h << _ONE) + table[data[k]]
            k += _ONE
            i += _ONE
            if (h & mask_small) == _ZERO:
                found = True
                break
        if not found:
            while k < n:
                h = (h << _ONE) + table[data[k]]
                k += _ONE
                i += _ONE
                if (h & mask_large) == _ZERO:
                    found = True
                    break
        if not found:
            break
        out[m] = k
        m += 1
        i = _ZERO
        h = _ZERO
        if m == cap:
            break
    st[0] = i
    hst[0] = h
    return m, k


@njit(cache=True, nogil=True)
def _ae_kernel(data, start, out, st, horizon):
    n = np.uint64(data.shape[0])
    cap = out.shape[0]
    k = np.uint64(start)
    i = st[0]
    x_val = st[1]
    x_pos = st[2]
    m = 0
    while k < n:
        found = False
        while k < n:
            b = np.int64(data[k])
            k += _ONE
            i += 1
            if b <= x_val:
                if i == x_pos + horizon:
                    found = True
                    break
            else:
                x_val = b
                x_pos = i
        if not found:
            break
        out[m] = k
        m += 1
        i = 0
        x_val = -1
        x_pos = 0
        if m == cap:
            break
    st[0] = i
    st[1] = x_val
    st[2] = x_pos
    return m, k


@njit(cache=True, nogil=True)
def _ram_kernel(data, start, out, st, horizon):
    n = np.uint64(data.shape[0])
    cap = out.shape[0]
    k = np.uint64(start)
    i = st[0]
    x = st[1]
    m = 0
    while k < n:
        while i < horizon and k < n:
            b = np.int64(data[k])
            k += _ONE
            i += 1
            if b > x:
                x = b
        found = False
        while k < n:
            b = np.int64(data[k])
            k += _ONE
            i += 1
            if b >= x:
                found = True
                break
        if not found:
            break
        out[m] = k
        m += 1
        i = 0
        x = 0
        if m == cap:
            break
    st[0] = i
    st[1] = x
    return m, k


@njit(cache=True, nogil=True)
def _mii_kernel(data, start, out, st, w):
    # prev = 256 after a cut: no byte exceeds it, so the run restarts at the
    # chunk's first byte without a position test.
    n = np.uint64(data.shape[0])
    cap = out.shape[0]
    k = np.uint64(start)
    i = st[0]
    c = st[1]
    prev = st[2]
    m = 0
    while k < n:
        found = False
        while k < n:
            b = np.int64(data[k])
            k += _ONE
            i += 1
            if b > prev:
                c += 1
                if c == w:
                    found = True
                    break
            else:
                c = 0
            prev = b
        if not found:
            break
        out[m] = k
        m += 1
        i = 0
        c = 0
        prev = 256
        if m == cap:
            break
    st[0] = i
    st[1] = c
    st[2] = prev
    return m, k


@njit(cache=True, nogil=True)
def _pci_kernel(data, start, out, st, w, threshold, popcount):
    n = np.uint64(data.shape[0])
    W = np.uint64(w)
    cap = out.shape[0]
    k = np.uint64(start)
    i = np.uint64(st[0])
    p = st[1]
    m = 0
    while k < n:
        found = False
        if i < W:
            p += popcount[data[k]]
            k += _ONE
            i += _ONE
            found = i == W and p >= threshold
        else:
            while k < n:
                p += popcount[data[k]] - popcount[data[k - W]]
                k += _ONE
                i += _ONE
                if p >= threshold:
                    found = True
                    break
        if found:
            out[m] = k
            m += 1
            i = _ZERO
            p = 0
            if m == cap:
                break
    st[0] = i
    st[1] = p
    return m, k


@njit(cache=True, nogil=True)
def _bfbc_kernel(data, start, out, st, bits, min_chunk):
    # prev = 256 after a cut maps every pair into the zero padding past the
    # 8 KiB bitset, so a chunk's first byte never completes a divisor.
    n = np.uint64(data.shape[0])
    cap = out.shape[0]
    k = np.uint64(start)
    i = st[0]
    prev = st[1]
    m = 0
    while k < n:
        if i < min_chunk:
            skip = min(np.uint64(min_chunk - i), n - k)
            k += skip
            i += np.int64(skip)
            prev = np.int64(data[k - _ONE])
            if i < min_chunk:
                break
        found = False
        while k < n:
            b = np.int64(data[k])
            k += _ONE
            i += 1
            pair = (prev << 8) | b
            prev = b
            if (bits[pair >> 3] >> (pair & 7)) & 1:
                found = True
                break
        if not found:
            break
        out[m] = k
        m += 1
        i = 0
        prev = 256
        if m == cap:
            break
    st[0] = i
    st[1] = prev
    return m, k


# --- chunker objects ---------------------------------------------------------


class Chunker:
    """Incremental boundary detector for one :class:`ChunkerSpec`.

    Subclasses wrap one kernel. ``history`` is how many trailing bytes of the
    current chunk the kernel must be able to look back at; the base class
    keeps them between blocks and replays them in front of the next block.
    """

    min_length = 1
    history = 0

    def __init__(self, spec: ChunkerSpec) -> None:
        self.spec = spec
        self._out = np.empty(_OUT_CAPACITY, dtype=np.int64)
        self.reset()

    def reset(self) -> None:
        self._tail = _EMPTY_BYTES
        self._reset_state()

    def _reset_state(self) -> None:
        raise NotImplementedError

    def _run(self, data: np.ndarray, start: int) -> tuple[int, int]:
        raise NotImplementedError

    @property
    def position(self) -> int:
        """Bytes consumed since the last cut."""
        return int(self._st[0])

    def _scan_from(self, data: np.ndarray, start: int, parts: list[np.ndarray], shift: int) -> None:
        n = data.shape[0]
        k = start
        while k < n:
            m, k = self._run(data, k)
            k = int(k)
            if m:
                parts.append(self._out[:m] - shift)

    def scan(self, data: np.ndarray) -> np.ndarray:
        """Feed ``data`` and return block-relative end offsets of finished chunks."""
        n = data.shape[0]
        if n == 0:
            return _EMPTY
        parts: list[np.ndarray] = []
        w = self.history
        if w and self._tail.shape[0]:
            head = min(w, n)
            t = self._tail.shape[0]
            self._scan_from(np.concatenate([self._tail, data[:head]]), t, parts, t)
            self._scan_from(data, head, parts, 0)
        else:
            self._scan_from(data, 0, parts, 0)
        if w:
            keep = min(self.position, w)
            if keep == 0:
                self._tail = _EMPTY_BYTES
            elif keep <= n:
                self._tail = data[n - keep :].copy()
            else:
                self._tail = np.concatenate([self._tail, data])[-keep:]
        if not parts:
            return _EMPTY
        return parts[0] if len(parts) == 1 else np.concatenate(parts)

    def step(self, byte: int) -> bool:
        """Feed one byte; True when it completes a chunk."""
        return self.scan(np.array([byte], dtype=np.uint8)).shape[0] == 1


class FixedSizeChunker(Chunker):
    def __init__(self, spec: ChunkerSpec) -> None:
        self.fixed = spec.fixed_size
        self.min_length = spec.fixed_size
        super().__init__(spec)

    def _reset_state(self) -> None:
        self._pos = 0

    @property
    def position(self) -> int:
        return self._pos

    def scan(self, data: np.ndarray) -> np.ndarray:
        # Content-independent: cut positions follow from arithmetic alone.
        n = data.shape[0]
        cuts = np.arange(self.fixed - self._pos, n + 1, self.fixed, dtype=np.int64)
        self._pos = (self._pos + n) % self.fixed
        return cuts


class RabinChunker(Chunker):
    def __init__(self, spec: ChunkerSpec) -> None:
        if spec.mask_bits > 64:
            raise ConfigError("Rabin mask cannot exceed 64 bits")
        self.window = self.history = self.min_length = spec.window
        self.mask = np.uint64((1 << spec.mask_bits) - 1)
        self.xpow = np.uint64(rabin_top_power(spec.window))
        super().__init__(spec)

    def _reset_state(self) -> None:
        self._st = np.zeros(1, dtype=np.int64)
        self._hst = np.zeros(1, dtype=np.uint64)

    @property
    def hash_value(self) -> int:
        return int(self._hst[0])

    def _run(self, data, start):
        return _rabin_kernel(data, start, self._out, self._st, self._hst, self.window, self.mask, self.xpow)


class BuzhashChunker(Chunker):
    def __init__(self, spec: ChunkerSpec) -> None:
        if spec.mask_bits > 32:
            raise ConfigError("Buzhash mask cannot exceed the 32-bit word")
        self.window = self.history = self.min_length = spec.window
        self.mask = np.uint64((1 << spec.mask_bits) - 1)
        table = make_byte_table(spec.table_seed)
        t_in = table.entries.astype(np.uint64)
        t_out = np.array([rotl32(int(v), spec.window) for v in table.entries], dtype=np.uint64)
        self.t_in = t_in | (t_in << np.uint64(32))
        self.t_out = t_out | (t_out << np.uint64(32))
        super().__init__(spec)

    def _reset_state(self) -> None:
        self._st = np.zeros(1, dtype=np.int64)
        self._hst = np.zeros(1, dtype=np.uint64)

    @property
    def hash_value(self) -> int:
        return int(self._hst[0]) & 0xFFFFFFFF

    def _run(self, data, start):
        return _buzhash_kernel(data, start, self._out, self._st, self._hst, self.window, self.mask, self.t_in, self.t_out)


def gear_top_mask(bits: int, word_bits: int = 32) -> int:
    """Mask selecting the ``bits`` most significant bits of a Gear word."""
    return ((1 << bits) - 1) << (word_bits - bits)


class GearChunker(Chunker):
    """Gear hash with a most-significant-bits mask, optionally normalized.

    With normalization level ``x`` the mask has ``b + x`` bits while the chunk
    is shorter than the target and ``b - x`` bits from then on.
    """

    def __init__(self, spec: ChunkerSpec) -> None:
        self.word_bits = spec.word_bits
        table = make_byte_table(spec.table_seed)
        self.table = table.entries.astype(np.uint64) if spec.word_bits == 32 else table.entries64.copy()
        level = spec.nc_level or 0
        self.small_bits = spec.mask_bits + level
        self.large_bits = spec.mask_bits - level
        self.mask_small = np.uint64(gear_top_mask(self.small_bits, spec.word_bits))
        self.mask_large = np.uint64(gear_top_mask(self.large_bits, spec.word_bits))
        self.switch = spec.target if level else 1
        super().__init__(spec)

    def _reset_state(self) -> None:
        self._st = np.zeros(1, dtype=np.int64)
        self._hst = np.zeros(1, dtype=np.uint64)

    @property
    def hash_value(self) -> int:
        h = int(self._hst[0])
        return h & 0xFFFFFFFF if self.word_bits == 32 else h

    def _run(self, data, start):
        return _gear_kernel(
            data, start, self._out, self._st, self._hst, self.table, self.mask_small, self.mask_large, self.switch
        )


class AEChunker(Chunker):
    """Asymmetric extremum: cut ``h`` bytes after a maximum nothing has exceeded.

    The first byte of every chunk seeds the running maximum, so a chunk is
    never shorter than ``h + 1`` bytes, runs of zero bytes included.
    """

    def __init__(self, spec: ChunkerSpec) -> None:
        self.horizon = spec.horizon
        self.min_length = spec.horizon + 1
        super().__init__(spec)

    def _reset_state(self) -> None:
        self._st = np.array([0, -1, 0], dtype=np.int64)

    def _run(self, data, start):
        return _ae_kernel(data, start, self._out, self._st, self.horizon)


class RAMChunker(Chunker):
    def __init__(self, spec: ChunkerSpec) -> None:
        self.horizon = spec.horizon
        self.min_length = spec.horizon + 1
        super().__init__(spec)

    def _reset_state(self) -> None:
        self._st = np.zeros(2, dtype=np.int64)

    def _run(self, data, start):
        return _ram_kernel(data, start, self._out, self._st, self.horizon)


class MIIChunker(Chunker):
    def __init__(self, spec: ChunkerSpec) -> None:
        self.window = spec.window
        self.min_length = spec.window + 1
        super().__init__(spec)

    def _reset_state(self) -> None:
        self._st = np.array([0, 0, 256], dtype=np.int64)

    def _run(self, data, start):
        return _mii_kernel(data, start, self._out, self._st, self.window)


class PCIChunker(Chunker):
    def __init__(self, spec: ChunkerSpec) -> None:
        self.window = self.history = self.min_length = spec.window
        self.threshold = spec.threshold
        super().__init__(spec)

    def _reset_state(self) -> None:
        self._st = np.zeros(2, dtype=np.int64)

    @property
    def popcount(self) -> int:
        return int(self._st[1])

    def _run(self, data, start):
        return _pci_kernel(data, start, self._out, self._st, self.window, self.threshold, POPCOUNT)


class BFBCChunker(Chunker):
    def __init__(self, spec: ChunkerSpec) -> None:
        if spec.divisors is None or len(spec.divisors) == 0:
            raise ConfigError("BFBC needs a non-empty divisor set")
        # 32 zero bytes of padding absorb the pair codes 256 * 256 + b.
        self.bits = np.concatenate([np.asarray(spec.divisors.bits), np.zeros(33, dtype=np.uint8)])
        self.min_chunk = spec.min_chunk
        self.min_length = max(spec.min_chunk + 1, 2)
        super().__init__(spec)

    def _reset_state(self) -> None:
        self._st = np.array([0, 256], dtype=np.int64)

    def _run(self, data, start):
        return _bfbc_kernel(data, start, self._out, self._st, self.bits, self.min_chunk)


_CHUNKERS: dict[Algorithm, type[Chunker]] = {
    Algorithm.FSC: FixedSizeChunker,
    Algorithm.BSW_RABIN: RabinChunker,
    Algorithm.BSW_BUZHASH: BuzhashChunker,
    Algorithm.BSW_GEAR: GearChunker,
    Algorithm.GEAR_NC: GearChunker,
    Algorithm.AE: AEChunker,
    Algorithm.RAM: RAMChunker,
    Algorithm.MII: MIIChunker,
    Algorithm.PCI: PCIChunker,
    Algorithm.BFBC: BFBCChunker,
    Algorithm.BFBC_STAR: BFBCChunker,
}


def make_chunker(spec: ChunkerSpec) -> Chunker:
    return _CHUNKERS[spec.algorithm](spec)
