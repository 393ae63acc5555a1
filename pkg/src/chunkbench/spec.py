"""Chunker configuration records and the byte-pair divisor set."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields
from typing import Any, Iterable, Sequence

import numpy as np

MIN_TARGET = 64
MAX_TARGET = 1 << 30
DEFAULT_TABLE_SEED = 0x5EED_CDC0_2024_0001


class ConfigError(ValueError):
    """Invalid or inconsistent chunker configuration."""


class UnsupportedTargetError(ConfigError):
    """No parameterization is known for the requested target size."""


class TuningError(RuntimeError):
    """A parameter search found no acceptable candidate."""


class StreamStateError(RuntimeError):
    """A chunk stream was used after it was finalized."""


class Algorithm(str, enum.Enum):
    FSC = "fsc"
    BSW_RABIN = "rabin"
    BSW_BUZHASH = "buzhash"
    BSW_GEAR = "gear"
    GEAR_NC = "gear-nc"
    AE = "ae"
    RAM = "ram"
    MII = "mii"
    PCI = "pci"
    BFBC = "bfbc"
    BFBC_STAR = "bfbc-star"

    @classmethod
    def parse(cls, name: str) -> "Algorithm":
        key = name.strip().lower().replace("_", "-")
        aliases = {"bfbc*": "bfbc-star", "bsw-rabin": "rabin", "bsw-buzhash": "buzhash", "bsw-gear": "gear"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown algorithm {name!r}") from None


class DivisorSet:
    """Membership over the 65536 byte pairs, stored as an 8 KiB bitset.

    ``source_frequencies`` keeps the ordered ``(pair, count)`` list the members
    were drawn from, most frequent first.
    """

    __slots__ = ("bits", "source_frequencies", "_members")

    def __init__(
        self,
        pairs: Iterable[int],
        source_frequencies: Sequence[tuple[int, int]] = (),
    ) -> None:
        members = sorted({int(p) for p in pairs})
        for p in members:
            if not 0 <= p < 65536:
                raise ConfigError(f"byte pair {p} out of range")
        freq_pairs = {int(p) for p, _ in source_frequencies}
        if source_frequencies and not set(members) <= freq_pairs:
            raise ConfigError("divisors must be drawn from the source frequency list")
        bits = np.zeros(8192, dtype=np.uint8)
        for p in members:
            bits[p >> 3] |= np.uint8(1 << (p & 7))
        self.bits = bits
        self.bits.setflags(write=False)
        self.source_frequencies = tuple((int(p), int(c)) for p, c in source_frequencies)
        self._members = tuple(members)

    @staticmethod
    def pair(first: int, second: int) -> int:
        return (first << 8) | second

    @property
    def members(self) -> tuple[int, ...]:
        return self._members

    def __contains__(self, pair: object) -> bool:
        if isinstance(pair, tuple):
            pair = self.pair(*pair)
        if not isinstance(pair, (int, np.integer)) or not 0 <= pair < 65536:
            return False
        return bool(self.bits[pair >> 3] >> (pair & 7) & 1)

    def __len__(self) -> int:
        return len(self._members)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DivisorSet) and self._members == other._members

    def __hash__(self) -> int:
        return hash(self._members)

    def __repr__(self) -> str:
        shown = ", ".join(f"{p >> 8:02x}{p & 0xFF:02x}" for p in self._members[:8])
        more = ", ..." if len(self._members) > 8 else ""
        return f"DivisorSet([{shown}{more}], n={len(self)})"


# Parameter fields each algorithm consumes; everything else must stay None.
_RELEVANT: dict[Algorithm, frozenset[str]] = {
    Algorithm.FSC: frozenset({"fixed_size"}),
    Algorithm.BSW_RABIN: frozenset({"window", "mask_bits"}),
    Algorithm.BSW_BUZHASH: frozenset({"window", "mask_bits", "table_seed"}),
    Algorithm.BSW_GEAR: frozenset({"mask_bits", "table_seed", "word_bits"}),
    Algorithm.GEAR_NC: frozenset({"mask_bits", "nc_level", "table_seed", "word_bits"}),
    Algorithm.AE: frozenset({"horizon"}),
    Algorithm.RAM: frozenset({"horizon"}),
    Algorithm.MII: frozenset({"window"}),
    Algorithm.PCI: frozenset({"window", "threshold"}),
    Algorithm.BFBC: frozenset({"divisors", "min_chunk"}),
    Algorithm.BFBC_STAR: frozenset({"divisors", "min_chunk"}),
}

_DEFAULTS: dict[str, Any] = {"table_seed": DEFAULT_TABLE_SEED, "word_bits": 32}

PARAM_FIELDS = (
    "window",
    "mask_bits",
    "horizon",
    "threshold",
    "nc_level",
    "min_chunk",
    "divisors",
    "fixed_size",
    "table_seed",
    "word_bits",
)


@dataclass(frozen=True)
class ChunkerSpec:
    """Algorithm identifier plus its fully resolved parameters.

    ``target`` is the size the parameters were tuned for; it is descriptive
    only and may be left unset for hand-built configurations.
    """

    algorithm: Algorithm
    target: int | None = None
    window: int | None = None
    mask_bits: int | None = None
    horizon: int | None = None
    threshold: int | None = None
    nc_level: int | None = None
    min_chunk: int | None = None
    divisors: DivisorSet | None = field(default=None, compare=True)
    fixed_size: int | None = None
    table_seed: int | None = None
    word_bits: int | None = None

    def __post_init__(self) -> None:
        alg = Algorithm.parse(self.algorithm) if isinstance(self.algorithm, str) else self.algorithm
        object.__setattr__(self, "algorithm", alg)
        relevant = _RELEVANT[alg]
        for name, default in _DEFAULTS.items():
            if name in relevant and getattr(self, name) is None:
                object.__setattr__(self, name, default)
        stray = [f for f in PARAM_FIELDS if f not in relevant and getattr(self, f) is not None]
        if stray:
            raise ConfigError(f"{alg.name} does not take parameter(s) {', '.join(stray)}")
        missing = [f for f in relevant if getattr(self, f) is None]
        if missing:
            raise ConfigError(f"{alg.name} requires parameter(s) {', '.join(sorted(missing))}")
        self._validate()

    def _validate(self) -> None:
        alg = self.algorithm
        if self.target is not None and not MIN_TARGET <= self.target <= MAX_TARGET:
            raise ConfigError(f"target size must lie in [{MIN_TARGET}, 2^30], got {self.target}")
        if alg is Algorithm.FSC and self.fixed_size < 1:
            raise ConfigError("fixed_size must be positive")
        if alg in (Algorithm.BSW_RABIN, Algorithm.BSW_BUZHASH, Algorithm.PCI) and self.window < 1:
            raise ConfigError("window must be positive")
        if alg is Algorithm.MII and not 1 <= self.window <= 256:
            raise ConfigError("MII window must lie in [1, 256]")
        if self.word_bits is not None and self.word_bits not in (32, 64):
            raise ConfigError("Gear word width must be 32 or 64")
        if self.mask_bits is not None:
            limit = self.word_bits if self.word_bits is not None else 64
            if not 1 <= self.mask_bits <= limit:
                raise ConfigError(f"mask_bits must lie in [1, {limit}]")
        if alg is Algorithm.BSW_BUZHASH and self.mask_bits > 32:
            raise ConfigError("Buzhash mask cannot exceed the 32-bit word")
        if alg is Algorithm.GEAR_NC:
            if self.nc_level not in (1, 2, 3):
                raise ConfigError("nc_level must be 1, 2 or 3")
            if self.mask_bits - self.nc_level < 1 or self.mask_bits + self.nc_level > self.word_bits:
                raise ConfigError("normalized mask widths fall outside the hash word")
            if self.target is None:
                raise ConfigError("normalized chunking needs a target size as its switch point")
        if alg in (Algorithm.AE, Algorithm.RAM) and self.horizon < 1:
            raise ConfigError("horizon must be positive")
        if alg is Algorithm.PCI and not 0 <= self.threshold <= 8 * self.window:
            raise ConfigError("PCI threshold must lie in [0, 8w]")
        if alg in (Algorithm.BFBC, Algorithm.BFBC_STAR):
            if self.min_chunk < 0:
                raise ConfigError("min_chunk must be non-negative")
            if len(self.divisors) == 0:
                raise ConfigError("BFBC needs at least one divisor")

    def params(self) -> dict[str, Any]:
        """Relevant parameters as plain JSON-friendly values."""
        out: dict[str, Any] = {}
        for name in PARAM_FIELDS:
            value = getattr(self, name)
            if value is None:
                continue
            if isinstance(value, DivisorSet):
                value = [f"{p >> 8:02x}{p & 0xFF:02x}" for p in value.members]
            out[name] = value
        return out

    def to_dict(self) -> dict[str, Any]:
        return {"algorithm": self.algorithm.value, "target": self.target, "params": self.params()}

    def replace(self, **changes: Any) -> "ChunkerSpec":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ChunkerSpec(**values)
