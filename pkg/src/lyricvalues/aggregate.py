"""Aggregation of rater annotations into per-song value rankings.

Each rater's ten scores become a midranked list (rank 1 = highest score).
Per value, the m normalized ranks are scored by the minimum over k of the
binomial tail P(Binomial(m, r(k)) >= k), i.e. the probability that the k-th
smallest rank of a uniformly shuffled item would be at most the observed one.
That score, multiplied by a Bonferroni factor (the number of input lists by
default), gives the per-value p-value; values above the significance
threshold share a tied bottom midrank ("truncated" ranking).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from . import _kernels
from .errors import (
    EmptyInput,
    InconsistentLists,
    NoAnnotations,
    NonFiniteScore,
    RankOutOfRange,
)
from .model import (
    AnnotationRecord,
    N_VALUES,
    VALUES,
    ValueId,
    array_to_profile,
)

DEFAULT_ALPHA = 0.05


def confidence_weighted_mean(scores, confidences) -> float:
    """Mean of scores weighted by confidence/100; unweighted if all zero."""
    x = np.asarray(scores, dtype=float)
    c = np.asarray(confidences, dtype=float)
    if x.size == 0:
        raise NoAnnotations("no scores to aggregate")
    if x.shape != c.shape:
        raise ValueError("scores and confidences differ in length")
    w = c / 100.0
    total = w.sum()
    if total == 0.0:
        return float(x.mean())
    return float((w * x).sum() / total)


def scores_to_ranking(profile) -> np.ndarray:
    """Ranks with 1 for the highest score; equal scores get midranks."""
    x = np.asarray(profile, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NonFiniteScore("profile contains non-finite scores")
    return rankdata(-x, method="average")


def rra_rho(normalized_ranks) -> float:
    """Minimum binomial-tail score of one item's normalized ranks in (0, 1]."""
    r = np.asarray(normalized_ranks, dtype=float)
    if r.size == 0:
        raise EmptyInput("need at least one normalized rank")
    if np.any(~np.isfinite(r)) or np.any(r <= 0.0) or np.any(r > 1.0):
        raise RankOutOfRange("normalized ranks must lie in (0, 1]")
    return float(_kernels.rho_many(r[None, :])[0])


def rra_rho_many(rank_matrix) -> np.ndarray:
    """Row-wise rra_rho over a matrix of normalized ranks (rows = items)."""
    r = np.atleast_2d(np.asarray(rank_matrix, dtype=float))
    if r.size == 0:
        raise EmptyInput("empty rank matrix")
    if np.any(~np.isfinite(r)) or np.any(r <= 0.0) or np.any(r > 1.0):
        raise RankOutOfRange("normalized ranks must lie in (0, 1]")
    return _kernels.rho_many(r)


@dataclass(frozen=True)
class AggregatedRanking:
    """Aggregated per-song ranking over the ten values."""

    song_id: str
    rho: np.ndarray            # per value, canonical order
    p: np.ndarray              # min(1, rho * correction_factor)
    order: tuple[ValueId, ...]  # ascending p, ties by rho then canonical order
    truncated_rank: np.ndarray  # positions 1..k, then tied midrank (k+11)/2
    m: int
    correction_factor: float
    alpha: float

    def rho_of(self, value: ValueId) -> float:
        return float(self.rho[VALUES.index(value)])

    def p_of(self, value: ValueId) -> float:
        return float(self.p[VALUES.index(value)])


def _resolve_correction(correction, m: int, n_items: int) -> float:
    if correction == "lists":
        return float(m)
    if correction == "items":
        return float(n_items)
    factor = float(correction)
    if factor <= 0:
        raise ValueError("correction factor must be positive")
    return factor


def _ordered_indices(p: np.ndarray, rho: np.ndarray) -> list[int]:
    return sorted(range(p.size), key=lambda i: (p[i], rho[i], i))


def _truncated_from_order(order_idx: Sequence[int], p: np.ndarray, alpha: float,
                          n_items: int) -> np.ndarray:
    k = int(np.sum(p <= alpha))
    out = np.empty(n_items, dtype=float)
    tied = (k + n_items + 1) / 2.0
    for pos, idx in enumerate(order_idx):
        out[idx] = pos + 1 if pos < k else tied
    return out


def aggregate_song(
    song_id: str,
    lists,
    correction: str | float = "lists",
    alpha: float = DEFAULT_ALPHA,
) -> AggregatedRanking:
    """Aggregate m midranked lists over the ten values into one ranking.

    `correction` is "lists" (multiply each score by m), "items" (multiply by
    10), or an explicit positive factor; the factor used is recorded in the
    result.
    """
    ranks = np.asarray(lists, dtype=float)
    if ranks.size == 0:
        raise EmptyInput("no input lists")
    if ranks.ndim != 2 or ranks.shape[1] != N_VALUES:
        raise InconsistentLists(
            f"expected an m x {N_VALUES} rank matrix, got shape {ranks.shape}")
    expected_sum = N_VALUES * (N_VALUES + 1) / 2.0
    if np.any(np.abs(ranks.sum(axis=1) - expected_sum) > 1e-9) or \
            np.any(ranks < 1.0) or np.any(ranks > N_VALUES):
        raise InconsistentLists("rows must be midrank vectors over the 10 values")
    m = ranks.shape[0]
    rho = _kernels.rho_many(np.ascontiguousarray(ranks.T) / N_VALUES)
    factor = _resolve_correction(correction, m, N_VALUES)
    p = np.minimum(1.0, rho * factor)
    order_idx = _ordered_indices(p, rho)
    truncated = _truncated_from_order(order_idx, p, alpha, N_VALUES)
    return AggregatedRanking(
        song_id=song_id,
        rho=rho,
        p=p,
        order=tuple(VALUES[i] for i in order_idx),
        truncated_rank=truncated,
        m=m,
        correction_factor=factor,
        alpha=alpha,
    )


def truncate_ranking(ranking: AggregatedRanking, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Recompute the tie-aware rank vector at a different threshold."""
    order_idx = [VALUES.index(v) for v in ranking.order]
    return _truncated_from_order(order_idx, ranking.p, alpha, N_VALUES)


# ---------------------------------------------------------------------------
# corpus-level pipeline

@dataclass(frozen=True)
class SongAggregate:
    ranking: AggregatedRanking
    mean_profile: np.ndarray   # confidence-weighted means, canonical order
    n_raters_used: int
    n_raters_skipped: int      # raters lacking a complete 10-value profile


@dataclass(frozen=True)
class CorpusAggregates:
    alpha: float
    correction: str | float
    songs: Mapping[str, SongAggregate]

    def mean_profile_of(self, song_id: str) -> dict[ValueId, float]:
        return array_to_profile(self.songs[song_id].mean_profile)


def aggregate_corpus(
    annotations: Iterable[AnnotationRecord],
    correction: str | float = "lists",
    alpha: float = DEFAULT_ALPHA,
) -> CorpusAggregates:
    """Aggregate a long-format annotation set, song by song.

    Only raters with a complete 10-value profile for a song contribute a
    ranked list (the skipped count is recorded); confidence-weighted means
    use every annotation.
    """
    per_song: dict[str, dict[str, dict[ValueId, AnnotationRecord]]] = {}
    for rec in annotations:
        per_song.setdefault(rec.song_id, {}).setdefault(rec.rater_id, {})[rec.value] = rec
    if not per_song:
        raise NoAnnotations("annotation set is empty")

    songs: dict[str, SongAggregate] = {}
    for song_id in sorted(per_song):
        raters = per_song[song_id]
        complete = {r: prof for r, prof in raters.items() if len(prof) == N_VALUES}
        if not complete:
            raise NoAnnotations(f"song '{song_id}' has no complete rater profiles")
        lists = np.empty((len(complete), N_VALUES))
        for i, rater_id in enumerate(sorted(complete)):
            prof = complete[rater_id]
            lists[i] = scores_to_ranking([prof[v].score for v in VALUES])
        ranking = aggregate_song(song_id, lists, correction=correction, alpha=alpha)

        mean_profile = np.empty(N_VALUES)
        for j, v in enumerate(VALUES):
            recs = [prof[v] for prof in raters.values() if v in prof]
            mean_profile[j] = confidence_weighted_mean(
                [r.score for r in recs], [r.confidence for r in recs])
        songs[song_id] = SongAggregate(
            ranking=ranking,
            mean_profile=mean_profile,
            n_raters_used=len(complete),
            n_raters_skipped=len(raters) - len(complete),
        )
    return CorpusAggregates(alpha=alpha, correction=correction, songs=songs)


def retruncate_corpus(aggregates: CorpusAggregates, alpha: float) -> CorpusAggregates:
    """Corpus aggregates with truncated ranks recomputed at a new threshold."""
    songs = {
        sid: replace(
            agg,
            ranking=replace(
                agg.ranking,
                alpha=alpha,
                truncated_rank=truncate_ranking(agg.ranking, alpha),
            ),
        )
        for sid, agg in aggregates.songs.items()
    }
    return CorpusAggregates(alpha=alpha, correction=aggregates.correction, songs=songs)
