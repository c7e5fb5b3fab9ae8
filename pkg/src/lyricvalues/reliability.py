"""Inter-rater reliability and rater-count analyses.

Rater pools differ per song, so complete songs-by-slots matrices are formed
by assigning each song's raters to column slots with a seeded per-song
stream; that construction is recorded in the outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ConstantCanonicalMeans,
    DegenerateAnova,
    InsufficientRatings,
    NoAnnotations,
    TooFewColumns,
    ZeroTotalVariance,
)
from .model import AnnotationRecord, ValueId

ALPHA_SIZES = tuple(range(5, 55, 5))
POSTHOC_SIZES = (5, 10, 15, 20)


def cronbach_alpha(matrix) -> float:
    """Internal consistency with columns as items: k/(k-1) (1 - sum(var_i)/var_total)."""
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need a 2-D matrix with at least 2 rows")
    k = x.shape[1]
    if k < 2:
        raise TooFewColumns(f"need at least 2 columns, got {k}")
    item_vars = x.var(axis=0, ddof=1)
    total_var = x.sum(axis=1).var(ddof=1)
    if total_var == 0.0:
        raise ZeroTotalVariance("total-score variance is zero")
    return float(k / (k - 1.0) * (1.0 - item_vars.sum() / total_var))


def icc2k(matrix) -> float:
    """Two-way random-effects, average-measures intraclass correlation.

    ICC(2,k) = (MSR - MSE) / (MSR + (MSC - MSE)/n) from the two-way ANOVA
    mean squares for rows (targets), columns (raters) and residual.
    """
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise ValueError("need at least a 2x2 matrix")
    n, k = x.shape
    grand = x.mean()
    row_means = x.mean(axis=1)
    col_means = x.mean(axis=0)
    msr = k * np.sum((row_means - grand) ** 2) / (n - 1)
    msc = n * np.sum((col_means - grand) ** 2) / (k - 1)
    resid = x - row_means[:, None] - col_means[None, :] + grand
    mse = np.sum(resid**2) / ((n - 1) * (k - 1))
    denom = msr + (msc - mse) / n
    if denom == 0.0:
        raise DegenerateAnova("ICC denominator is zero")
    return float((msr - mse) / denom)


# ---------------------------------------------------------------------------
# rating-matrix construction

def _ratings_by_song(
    annotations: Iterable[AnnotationRecord], value: ValueId
) -> dict[str, list[AnnotationRecord]]:
    out: dict[str, list[AnnotationRecord]] = {}
    for rec in annotations:
        if rec.value is value:
            out.setdefault(rec.song_id, []).append(rec)
    if not out:
        raise NoAnnotations(f"no annotations for {value.value}")
    for recs in out.values():
        recs.sort(key=lambda r: r.rater_id)
    return out


def _song_rng(seed, song_index: int, *extra: int) -> np.random.Generator:
    return np.random.default_rng((int(seed) & 0xFFFFFFFFFFFFFFFF, song_index) + extra)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    # identical vectors correlate at exactly 1; avoid sqrt round-off
    if np.array_equal(x, y):
        return 1.0
    return float(np.corrcoef(x, y)[0, 1])


def build_rating_matrix(
    annotations: Iterable[AnnotationRecord],
    value: ValueId,
    n_slots: int | None = None,
    seed: int = 0,
) -> tuple[np.ndarray, list[str]]:
    """Songs-by-slots score matrix for one value.

    Each song's ratings are assigned to slots by a seeded per-song shuffle;
    n_slots defaults to the smallest per-song rating count.
    """
    by_song = _ratings_by_song(annotations, value)
    song_ids = sorted(by_song)
    if n_slots is None:
        n_slots = min(len(v) for v in by_song.values())
    if n_slots < 2:
        raise TooFewColumns("need at least 2 rater slots")
    if len(song_ids) < 2:
        raise ValueError("need at least 2 songs")
    matrix = np.empty((len(song_ids), n_slots))
    for i, sid in enumerate(song_ids):
        recs = by_song[sid]
        if len(recs) < n_slots:
            raise InsufficientRatings(sid, n_slots)
        idx = _song_rng(seed, i).permutation(len(recs))[:n_slots]
        matrix[i] = [recs[j].score for j in idx]
    return matrix, song_ids


# ---------------------------------------------------------------------------
# rater-count studies

@dataclass(frozen=True)
class AlphaStudyResult:
    """Alpha distribution per subsample size, with the recommended size."""

    value: ValueId
    sizes: tuple[int, ...]
    replicates: int
    threshold: float
    alphas: Mapping[int, tuple[float, ...]]   # size -> one alpha per replicate
    recommended_size: int | None              # smallest size with median >= threshold

    def median_alpha(self, size: int) -> float:
        return float(np.median(self.alphas[size]))


def alpha_subsample_study(
    annotations: Iterable[AnnotationRecord],
    value: ValueId,
    sizes: Sequence[int] = ALPHA_SIZES,
    replicates: int = 10,
    threshold: float = 0.7,
    seed: int = 0,
) -> AlphaStudyResult:
    """Alpha as a function of the number of ratings per song.

    Per (size, replicate), each pilot song contributes `size` ratings drawn
    without replacement from its own seeded stream; alpha is computed on the
    resulting songs-by-slots matrix.
    """
    by_song = _ratings_by_song(annotations, value)
    song_ids = sorted(by_song)
    max_size = max(sizes)
    for sid in song_ids:
        if len(by_song[sid]) < max_size:
            raise InsufficientRatings(sid, max_size)

    alphas: dict[int, tuple[float, ...]] = {}
    for size in sizes:
        reps = []
        for rep in range(replicates):
            matrix = np.empty((len(song_ids), size))
            for i, sid in enumerate(song_ids):
                recs = by_song[sid]
                idx = _song_rng(seed, i, size, rep).permutation(len(recs))[:size]
                matrix[i] = [recs[j].score for j in idx]
            reps.append(cronbach_alpha(matrix))
        alphas[int(size)] = tuple(reps)

    recommended = None
    for size in sorted(sizes):
        if float(np.median(alphas[int(size)])) >= threshold:
            recommended = int(size)
            break
    return AlphaStudyResult(
        value=value,
        sizes=tuple(int(s) for s in sizes),
        replicates=replicates,
        threshold=threshold,
        alphas=alphas,
        recommended_size=recommended,
    )


def subsample_mean_correlation(
    annotations: Iterable[AnnotationRecord],
    value: ValueId,
    sizes: Sequence[int] = POSTHOC_SIZES,
    replicates: int = 100,
    seed: int = 0,
) -> dict[int, float]:
    """Mean Pearson r between subsample means and full-sample means, per size.

    Per replicate, each song's mean over `size` drawn ratings is correlated
    with its mean over all ratings, across songs. Drawing every rating
    reproduces the full-sample mean exactly (r = 1).
    """
    by_song = _ratings_by_song(annotations, value)
    song_ids = sorted(by_song)
    if len(song_ids) < 3:
        raise ValueError("need at least 3 songs for a meaningful correlation")
    scores = {sid: np.array([r.score for r in by_song[sid]]) for sid in song_ids}
    canonical = np.array([scores[sid].mean() for sid in song_ids])
    if np.ptp(canonical) == 0.0:
        raise ConstantCanonicalMeans("full-sample means are constant across songs")
    max_size = max(sizes)
    for sid in song_ids:
        if len(scores[sid]) < max_size:
            raise InsufficientRatings(sid, max_size)

    out: dict[int, float] = {}
    for size in sizes:
        rs = []
        for rep in range(replicates):
            sub_means = np.empty(len(song_ids))
            for i, sid in enumerate(song_ids):
                vals = scores[sid]
                # sorted draw: a full-size subsample is bitwise the full sample
                idx = np.sort(_song_rng(seed, i, size, rep).permutation(len(vals))[:size])
                sub_means[i] = vals[idx].mean()
            rs.append(_pearson(sub_means, canonical))
        out[int(size)] = float(np.mean(rs))
    return out
