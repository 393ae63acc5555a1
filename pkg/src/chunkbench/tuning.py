"""Map a target mean chunk size to algorithm parameters.

Covers the distribution of the maximum of ``h`` uniform random bytes (which
drives AE and RAM), the closed-form means for RAM, MII and BFBC, the
empirical AE and PCI tables, and a simulation search for PCI.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from .spec import (
    Algorithm,
    ChunkerSpec,
    ConfigError,
    DivisorSet,
    TuningError,
    UnsupportedTargetError,
)

# --- maximum of h uniform bytes ------------------------------------------------


def _check_byte(name: str, v: int) -> None:
    if not 0 <= v <= 255:
        raise ValueError(f"{name} must lie in [0, 255], got {v}")


def mh_cdf(h: int, m: int) -> float:
    """P(max of h uniform bytes <= m)."""
    if h < 1:
        raise ValueError("h must be positive")
    _check_byte("m", m)
    return ((m + 1) / 256) ** h


def mh_pmf(h: int, m: int) -> float:
    """P(max of h uniform bytes == m)."""
    if h < 1:
        raise ValueError("h must be positive")
    _check_byte("m", m)
    return ((m + 1) / 256) ** h - (m / 256) ** h


def mh_pmf_conditioned(h: int, m: int, x: int) -> float:
    """PMF of the maximum when the bytes are bounded below by ``x``."""
    if h < 1:
        raise ValueError("h must be positive")
    _check_byte("m", m)
    _check_byte("x", x)
    if m < x:
        return 0.0
    span = 256 - x
    return ((m - x + 1) / span) ** h - ((m - x) / span) ** h


@dataclass(frozen=True)
class MhDistribution:
    horizon: int
    lower_bound: int = 0
    pmf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.lower_bound:
            values = [mh_pmf_conditioned(self.horizon, m, self.lower_bound) for m in range(256)]
        else:
            values = [mh_pmf(self.horizon, m) for m in range(256)]
        pmf = np.array(values)
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)

    @property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.pmf)

    def mean(self) -> float:
        return float(np.dot(np.arange(256), self.pmf))


def expected_max(h: int) -> float:
    """E(M_h) as the PMF-weighted sum over all byte values."""
    return math.fsum(m * mh_pmf(h, m) for m in range(256))


# --- AE ----------------------------------------------------------------------

AE_TABLE = {512: 348, 770: 563, 1024: 793}
AE_FORMULA_FROM = 2048


def ae_h_source(mu: int) -> str:
    if mu < 512:
        raise UnsupportedTargetError(f"AE has no horizon for targets below 512 bytes (got {mu})")
    if mu in AE_TABLE:
        return "table"
    if mu >= AE_FORMULA_FROM:
        return "formula"
    return "interpolated"


def ae_h_for_target(mu: int) -> int:
    """Horizon for AE: the empirical table below 2 KiB, ``mu - 256`` from there on.

    Targets between table rows (or between 1024 and 2048) interpolate
    linearly; :func:`ae_h_source` reports them as ``"interpolated"``.
    """
    source = ae_h_source(mu)
    if source == "table":
        return AE_TABLE[mu]
    if source == "formula":
        return mu - 256
    xs = sorted(AE_TABLE) + [AE_FORMULA_FROM]
    ys = [AE_TABLE[x] for x in xs[:-1]] + [AE_FORMULA_FROM - 256]
    return int(round(float(np.interp(mu, xs, ys))))


# --- RAM ---------------------------------------------------------------------


def ram_mu_of_h(h: int) -> float:
    """Expected RAM chunk size for horizon ``h`` on uniform random bytes."""
    return h + 1.0 / (1.0 - expected_max(h) / 256)


def ram_mu_exact(h: int) -> float:
    """Exact expected RAM chunk size on uniform bytes.

    The wait after the horizon is geometric with success probability
    ``(256 - M_h) / 256``, so its mean is E[256 / (256 - M_h)]. By Jensen's
    inequality this exceeds the inverse of the mean probability used by
    :func:`ram_mu_of_h`; the gap is visible only for short horizons.
    """
    return h + math.fsum(mh_pmf(h, m) * 256 / (256 - m) for m in range(256))


@lru_cache(maxsize=None)
def ram_h_for_target(mu: float) -> int:
    """Integer horizon whose predicted mean is closest to ``mu``."""
    if mu <= ram_mu_of_h(1):
        return 1
    lo, hi = 1, 2
    while ram_mu_of_h(hi) < mu:
        lo, hi = hi, hi * 2
    # invariant: mu(lo) < mu <= mu(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ram_mu_of_h(mid) < mu:
            lo = mid
        else:
            hi = mid
    return min((lo, hi), key=lambda h: (abs(ram_mu_of_h(h) - mu), h))


# --- MII ---------------------------------------------------------------------


def mii_mu_of_w(w: int) -> float:
    """Predicted mean for a strictly increasing interval of ``w`` bytes.

    Evaluated in log space: 256^w / C(256, w) + w.
    """
    if not 1 <= w <= 256:
        raise ValueError("w must lie in [1, 256]")
    log_comb = math.lgamma(257) - math.lgamma(w + 1) - math.lgamma(257 - w)
    log_mu = w * math.log(256) - log_comb
    if log_mu > 700:
        return math.inf
    return math.exp(log_mu) + w


def mii_w_for_target(mu: float) -> int:
    return min(range(1, 257), key=lambda w: (abs(mii_mu_of_w(w) - mu), w))


def mii_window_for_interval(w: int) -> int:
    """Chunker window (number of consecutive ascents) for an interval of ``w`` bytes."""
    if w < 2:
        raise ConfigError("an increasing interval needs at least two bytes")
    return w - 1


# --- PCI ---------------------------------------------------------------------

PCI_TABLE = {
    512: (58, 253),
    770: (40, 181),
    1024: (34, 157),
    2048: (61, 273),
    4096: (39, 183),
    5482: (56, 256),
    8192: (57, 262),
}
PCI_WINDOWS = range(32, 65)
DEFAULT_SIM_LEN = 10_000_000


def popcount_pmf(w: int, theta: int) -> float:
    """Probability that a window of ``w`` random bytes has exactly ``theta`` one-bits."""
    return math.comb(8 * w, theta) / 2 ** (8 * w)


def pci_candidates(mu: int, windows: Sequence[int] = PCI_WINDOWS, full_grid: bool = False) -> list[tuple[int, int]]:
    """(w, theta) pairs worth simulating for target ``mu``.

    Unless ``full_grid`` is set, only thresholds whose popcount probability
    lies in [1/(4 mu), 4/mu] are kept.
    """
    lo, hi = 1 / (4 * mu), 4 / mu
    out = []
    for w in windows:
        for theta in range(4 * w, 8 * w + 1):
            if full_grid or lo <= popcount_pmf(w, theta) <= hi:
                out.append((w, theta))
    return out


@dataclass(frozen=True)
class PciTuning:
    window: int
    threshold: int
    mean: float
    evaluated: tuple[tuple[int, int, float], ...] = field(repr=False, default=())


def pci_tune(
    mu: int,
    sim_len: int = DEFAULT_SIM_LEN,
    seed: int = 0,
    *,
    windows: Sequence[int] = PCI_WINDOWS,
    full_grid: bool = False,
) -> PciTuning:
    """Simulate PCI on seeded random data and pick the pair whose mean is nearest ``mu``."""
    from .core import chunk_lengths
    from .datasets import generate_random

    if mu < 64:
        raise UnsupportedTargetError("PCI tuning needs mu >= 64")
    if sim_len < 1 << 20:
        raise ConfigError("simulation length must be at least 1 MiB")
    data = generate_random(seed, sim_len)
    results = []
    for w, theta in pci_candidates(mu, windows, full_grid):
        lengths, _ = chunk_lengths(ChunkerSpec(Algorithm.PCI, window=w, threshold=theta), data)
        mean = float(lengths.mean()) if lengths.shape[0] else math.inf
        results.append((w, theta, mean))
    if not results:
        raise TuningError(f"no PCI candidates for target {mu}")
    w, theta, mean = min(results, key=lambda r: (abs(r[2] - mu), r[0], r[1]))
    if abs(mean - mu) > 0.5 * mu:
        raise TuningError(f"best PCI candidate ({w}, {theta}) has mean {mean:.0f}, too far from {mu}")
    return PciTuning(w, theta, mean, tuple(results))


# --- BFBC --------------------------------------------------------------------


def pair_frequencies(data) -> list[tuple[int, int]]:
    """Counts of overlapping byte pairs, most frequent first, ties by pair value."""
    from .core import as_array

    arr = as_array(data)
    if arr.shape[0] < 2:
        raise ValueError("need at least two bytes to count pairs")
    codes = (arr[:-1].astype(np.int64) << 8) | arr[1:]
    counts = np.bincount(codes, minlength=65536)
    present = np.flatnonzero(counts)
    order = np.lexsort((present, -counts[present]))
    return [(int(p), int(counts[p])) for p in present[order]]


def bfbc_mean(counts: Sequence[int], chosen: Sequence[int], length: int, min_chunk: int) -> float:
    """Expected chunk size when the pairs at ``chosen`` indices act as divisors."""
    return length / (1 + sum(counts[i] for i in chosen)) + min_chunk


def select_divisor_indices(counts: Sequence[int], mu: float, length: int, min_chunk: int = 0) -> list[int]:
    """Greedy divisor selection over a descending frequency list (0-based indices)."""
    chosen: list[int] = []
    total = 0
    for i, c in enumerate(counts):
        if not chosen:
            if length / (1 + c) + min_chunk >= mu:
                chosen.append(i)
                total = c
        else:
            current = length / (1 + total) + min_chunk
            extended = length / (1 + total + c) + min_chunk
            if abs(mu - extended) < abs(mu - current):
                chosen.append(i)
                total += c
    return chosen


def bfbc_divisors(
    frequencies: Sequence[tuple[int, int]], mu: float, length: int, min_chunk: int = 0
) -> DivisorSet:
    if not frequencies:
        raise ConfigError("empty pair frequency list")
    if length <= 0:
        raise ConfigError("length must be positive")
    counts = [c for _, c in frequencies]
    chosen = select_divisor_indices(counts, mu, length, min_chunk)
    if not chosen:
        raise ConfigError("no byte pair is rare enough to reach the target size")
    return DivisorSet((frequencies[i][0] for i in chosen), frequencies)


def bfbc_top_divisors(frequencies: Sequence[tuple[int, int]], k: int = 3) -> DivisorSet:
    if not frequencies:
        raise ConfigError("empty pair frequency list")
    return DivisorSet((p for p, _ in frequencies[:k]), frequencies)


# --- resolution ----------------------------------------------------------------

BSW_WINDOW = 32
GEAR_NC_DEFAULT_LEVEL = 2


def log2_round(x: float) -> int:
    """Nearest integer to log2(x), ties rounding down."""
    v = math.log2(x)
    lo = math.floor(v)
    return lo if v - lo <= 0.5 else lo + 1


@dataclass(frozen=True)
class Resolved:
    spec: ChunkerSpec
    provenance: str
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out = self.spec.to_dict()
        out["provenance"] = self.provenance
        out.update(self.details)
        return out


def resolve_spec(
    algorithm: Algorithm | str,
    mu: int,
    *,
    data=None,
    overrides: dict[str, Any] | None = None,
    seed: int = 0,
    sim_len: int = DEFAULT_SIM_LEN,
) -> Resolved:
    """Tuned parameters for ``algorithm`` at target ``mu``; ``overrides`` win.

    BFBC variants need ``data`` for their pair statistics.
    """
    alg = Algorithm.parse(algorithm) if isinstance(algorithm, str) else algorithm
    overrides = dict(overrides or {})
    params: dict[str, Any] = {}
    details: dict[str, Any] = {}
    if alg is Algorithm.FSC:
        params["fixed_size"] = mu
        provenance = "formula"
    elif alg in (Algorithm.BSW_RABIN, Algorithm.BSW_BUZHASH):
        w = int(overrides.get("window", BSW_WINDOW))
        if mu - w < 2:
            raise UnsupportedTargetError("target too small for the window")
        params.update(window=w, mask_bits=log2_round(mu - w))
        provenance = "formula"
    elif alg in (Algorithm.BSW_GEAR, Algorithm.GEAR_NC):
        params["mask_bits"] = log2_round(mu)
        if alg is Algorithm.GEAR_NC:
            params["nc_level"] = GEAR_NC_DEFAULT_LEVEL
        provenance = "formula"
    elif alg is Algorithm.AE:
        params["horizon"] = ae_h_for_target(mu)
        provenance = ae_h_source(mu)
    elif alg is Algorithm.RAM:
        h = ram_h_for_target(mu)
        params["horizon"] = h
        details["predicted_mean"] = ram_mu_of_h(h)
        provenance = "formula"
    elif alg is Algorithm.MII:
        w = mii_w_for_target(mu)
        params["window"] = mii_window_for_interval(w)
        details["interval_length"] = w
        details["predicted_mean"] = mii_mu_of_w(w)
        provenance = "formula"
    elif alg is Algorithm.PCI:
        if mu in PCI_TABLE:
            params["window"], params["threshold"] = PCI_TABLE[mu]
            provenance = "table"
        else:
            tuned = pci_tune(mu, sim_len, seed)
            params.update(window=tuned.window, threshold=tuned.threshold)
            details["simulated_mean"] = tuned.mean
            provenance = "simulation"
    elif alg in (Algorithm.BFBC, Algorithm.BFBC_STAR):
        if "divisors" in overrides:
            params["divisors"] = overrides.pop("divisors")
            params["min_chunk"] = int(overrides.pop("min_chunk", 0 if alg is Algorithm.BFBC_STAR else mu - 128))
            provenance = "override"
        else:
            if data is None:
                raise ConfigError(f"{alg.name} needs the input data to derive divisors")
            from .core import as_array

            arr = as_array(data)
            freqs = pair_frequencies(arr)
            if alg is Algorithm.BFBC:
                params["min_chunk"] = int(overrides.pop("min_chunk", mu - 128))
                params["divisors"] = bfbc_top_divisors(freqs, int(overrides.pop("k", 3)))
                provenance = "formula"
            else:
                params["min_chunk"] = int(overrides.pop("min_chunk", 0))
                params["divisors"] = bfbc_divisors(freqs, mu, arr.shape[0], params["min_chunk"])
                details["predicted_mean"] = bfbc_mean(
                    [c for _, c in freqs],
                    [i for i, (p, _) in enumerate(freqs) if p in params["divisors"]],
                    arr.shape[0],
                    params["min_chunk"],
                )
                provenance = "formula"
    else:  # pragma: no cover - exhaustive over Algorithm
        raise ConfigError(f"unsupported algorithm {alg}")
    if overrides:
        params.update(overrides)
        provenance = f"{provenance}+override"
    try:
        spec = ChunkerSpec(alg, target=mu, **params)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return Resolved(spec, provenance, details)


def tuning_document(entries: Sequence[Resolved]) -> str:
    """JSON mapping ``"<algorithm>@<target>"`` to resolved parameters."""
    doc = {f"{r.spec.algorithm.value}@{r.spec.target}": r.to_dict() for r in entries}
    return json.dumps(doc, indent=2, sort_keys=True)
