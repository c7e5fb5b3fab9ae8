"""Fuzzy stratified sampling.

Per-stratum categorical distributions are smoothed with a symmetric-Dirichlet
MAP estimate so rare bins keep a configurable minimum share of the pool;
per-song importance weights multiply the smoothed-to-empirical ratios across
strata, and draws use exponential-key weighted reservoir sampling with
per-song seeded streams (order- and parallelism-independent).
"""

from __future__ import annotations

import hashlib
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyBin,
    EmptyPopulation,
    InvalidConcentration,
    SampleTooLarge,
    UnreachableTarget,
)
from .model import N_GENRE_TOPICS, N_LYRIC_TOPICS, RELEASE_YEAR_MIN, SongRecord

STRATUM_NAMES = ("release_year", "popularity", "genre_topic", "lyric_topic")

# Cumulative quantile fractions for the default 7 popularity bins: the lowest
# 40% form bin 1 and the top 9% form bin 7, with the middle split evenly.
DEFAULT_POPULARITY_QUANTILES = (0.40, 0.502, 0.604, 0.706, 0.808, 0.91)


@dataclass(frozen=True)
class StratumSpec:
    """One stratum: a name, a bin count, and a bin-assignment rule."""

    name: str
    n_bins: int
    edges: tuple[float, ...] | None = None  # cut points for numeric strata

    def __post_init__(self):
        if self.n_bins < 2:
            raise ValueError("a stratum needs at least 2 bins")
        if self.edges is not None and len(self.edges) != self.n_bins - 1:
            raise ValueError("need n_bins - 1 cut points")

    def bin_of(self, song: SongRecord) -> int:
        if self.name == "release_year":
            return (song.release_year - RELEASE_YEAR_MIN) // 10
        if self.name == "popularity":
            # value == cut point goes to the lower bin
            return bisect_left(self.edges, song.popularity)
        if self.name == "genre_topic":
            return song.genre_topic
        if self.name == "lyric_topic":
            return song.lyric_topic
        raise ValueError(f"unknown stratum '{self.name}'")


def release_year_stratum() -> StratumSpec:
    return StratumSpec("release_year", 14)


def genre_stratum() -> StratumSpec:
    return StratumSpec("genre_topic", N_GENRE_TOPICS)


def lyric_topic_stratum() -> StratumSpec:
    return StratumSpec("lyric_topic", N_LYRIC_TOPICS)


def popularity_stratum(edges: Sequence[float]) -> StratumSpec:
    return StratumSpec("popularity", len(edges) + 1, tuple(float(e) for e in edges))


def popularity_edges_from_catalog(
    catalog: Sequence[SongRecord],
    quantiles: Sequence[float] = DEFAULT_POPULARITY_QUANTILES,
) -> tuple[float, ...]:
    values = np.array([s.popularity for s in catalog], dtype=float)
    return tuple(float(q) for q in np.quantile(values, list(quantiles)))


def default_strata(
    catalog: Sequence[SongRecord],
    popularity_quantiles: Sequence[float] = DEFAULT_POPULARITY_QUANTILES,
) -> list[StratumSpec]:
    return [
        release_year_stratum(),
        popularity_stratum(popularity_edges_from_catalog(catalog, popularity_quantiles)),
        genre_stratum(),
        lyric_topic_stratum(),
    ]


def stratum_counts(catalog: Sequence[SongRecord], spec: StratumSpec) -> np.ndarray:
    counts = np.zeros(spec.n_bins, dtype=np.int64)
    for song in catalog:
        counts[spec.bin_of(song)] += 1
    return counts


@dataclass(frozen=True)
class SmoothedDistribution:
    """MAP-smoothed categorical distribution of one stratum."""

    stratum: str
    k: int
    counts: tuple[int, ...]
    concentration: float
    q: tuple[float, ...]


def map_smooth(counts, a: float, stratum: str = "") -> SmoothedDistribution:
    """Symmetric-Dirichlet MAP smoothing: q_i = (n_i + a - 1) / (N + K(a - 1)).

    a = 1 reproduces the empirical proportions; larger a pulls the
    distribution toward uniform.
    """
    if a < 1.0:
        raise InvalidConcentration(f"concentration {a} < 1")
    n = np.asarray(counts, dtype=float)
    if n.ndim != 1 or n.size < 2:
        raise ValueError("counts must be a vector with at least 2 bins")
    if np.any(n < 0) or np.any(n != np.floor(n)):
        raise ValueError("counts must be non-negative integers")
    total = n.sum()
    if total == 0:
        raise EmptyPopulation("all bin counts are zero")
    k = n.size
    q = (n + (a - 1.0)) / (total + k * (a - 1.0))
    return SmoothedDistribution(
        stratum=stratum,
        k=int(k),
        counts=tuple(int(c) for c in n),
        concentration=float(a),
        q=tuple(float(x) for x in q),
    )


def choose_concentration(counts, target_min_share: float, tol: float = 1e-6) -> float:
    """Smallest a >= 1 with min_i q_i(a) >= target_min_share, by bisection.

    min_i q_i is attained at the least-populated bin and is non-decreasing in
    a with limit 1/K, so any target below 1/K is reachable.
    """
    n = np.asarray(counts, dtype=float)
    k = n.size
    if not 0.0 < target_min_share < 1.0 / k:
        raise UnreachableTarget(
            f"target {target_min_share} not in (0, 1/{k})")

    def min_q(a: float) -> float:
        return min(map_smooth(n, a).q)

    if min_q(1.0) >= target_min_share:
        return 1.0
    lo, hi = 1.0, 2.0
    while min_q(hi) < target_min_share:
        lo, hi = hi, hi * 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if min_q(mid) >= target_min_share:
            hi = mid
        else:
            lo = mid
    return hi


def song_weights(
    catalog: Sequence[SongRecord],
    smoothed: Sequence[tuple[StratumSpec, SmoothedDistribution]],
) -> np.ndarray:
    """Per-song sampling weights, normalized to sum 1.

    Each song's unnormalized weight is the product over strata of
    q(bin) / p_hat(bin), with empirical proportions taken from this catalog,
    so a uniform stratum contributes a factor of 1.
    """
    if not catalog:
        raise EmptyPopulation("empty catalog")
    w = np.ones(len(catalog), dtype=float)
    for spec, dist in smoothed:
        if dist.k != spec.n_bins:
            raise ValueError(
                f"distribution for '{spec.name}' has {dist.k} bins, spec has {spec.n_bins}")
        counts = stratum_counts(catalog, spec)
        p_hat = counts / counts.sum()
        bins = np.array([spec.bin_of(s) for s in catalog])
        if np.any(p_hat[bins] == 0):
            raise EmptyBin(f"stratum '{spec.name}' maps a song to an empty bin")
        w *= np.asarray(dist.q)[bins] / p_hat[bins]
    return w / w.sum()


# ---------------------------------------------------------------------------
# seeded weighted sampling without replacement

_U64 = np.uint64
_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, vectorized over uint64."""
    x = (x + _U64(0x9E3779B97F4A7C15)) & _MASK64
    x = ((x ^ (x >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)) & _MASK64
    x = ((x ^ (x >> _U64(27))) * _U64(0x94D049BB133111EB)) & _MASK64
    return x ^ (x >> _U64(31))


@lru_cache(maxsize=8)
def _song_digests(song_ids: tuple[str, ...]) -> np.ndarray:
    out = np.empty(len(song_ids), dtype=np.uint64)
    for i, sid in enumerate(song_ids):
        h = hashlib.blake2b(sid.encode("utf-8"), digest_size=8).digest()
        out[i] = int.from_bytes(h, "big")
    return out


def _per_song_uniforms(song_ids: tuple[str, ...], seed: int) -> np.ndarray:
    """One uniform in (0, 1) per song, a pure function of (seed, song_id)."""
    digests = _song_digests(song_ids)
    with np.errstate(over="ignore"):
        seed_mix = _splitmix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
        mixed = _splitmix64(digests ^ seed_mix)
    return (mixed.astype(np.float64) + 0.5) * 2.0**-64


def sample_songs(
    catalog: Sequence[SongRecord],
    weights,
    n: int,
    seed: int,
) -> list[str]:
    """Draw n distinct songs by exponential-key weighted reservoir.

    Each song gets key u^(1/w) from its own (seed, song_id)-derived uniform;
    the n largest keys win. The draw is reproducible from the seed alone and
    independent of catalog order or any parallel evaluation of keys.
    """
    w = np.asarray(weights, dtype=float)
    if len(catalog) != w.size:
        raise ValueError("weights length does not match catalog")
    if n > len(catalog):
        raise SampleTooLarge(f"requested {n} of {len(catalog)} songs")
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    ids = tuple(s.song_id for s in catalog)
    u = _per_song_uniforms(ids, seed)
    keys = u ** (1.0 / w)
    order = np.argsort(-keys, kind="stable")[:n]
    return [ids[i] for i in order]


def realized_shares(
    sampled_ids: Sequence[str],
    catalog: Sequence[SongRecord],
    strata: Sequence[StratumSpec],
) -> dict[str, dict[int, float]]:
    """Fraction of the sample landing in each bin, per stratum."""
    by_id: Mapping[str, SongRecord] = {s.song_id: s for s in catalog}
    sampled = [by_id[sid] for sid in sampled_ids]
    out: dict[str, dict[int, float]] = {}
    for spec in strata:
        counts = stratum_counts(sampled, spec)
        shares = counts / max(1, counts.sum())
        out[spec.name] = {i: float(shares[i]) for i in range(spec.n_bins) if counts[i] > 0}
    return out
