"""Evaluation of automated scores against aggregated human rankings.

Rank agreement uses the tie-corrected tau; songs whose truncated human
ranking is fully tied (nothing significant) have no defined correlation and
are excluded and counted separately, as are songs with a constant model
profile. MDS utilities support the structural validation against data
simulated from a reference correlation matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .aggregate import AggregatedRanking, CorpusAggregates, scores_to_ranking
from .autoscore import ScoreSet
from .errors import (
    AllTied,
    AsymmetricInput,
    InvalidCorrelation,
    InvalidDissimilarity,
    LengthMismatch,
    MissingAggregate,
    NegativeDissimilarity,
    NotACorrelationMatrix,
    UnknownStratum,
)
from .model import SongRecord, VALUE_GROUPS, ValueId
from .sampler import StratumSpec, default_strata

TAU_MARK = 0.10


def kendall_tau_b(x, y) -> float:
    """Tie-corrected rank correlation (C - D) / sqrt((n0 - n1)(n0 - n2))."""
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.shape != yv.shape or xv.ndim != 1:
        raise LengthMismatch(f"shapes {xv.shape} and {yv.shape}")
    n = xv.size
    if n < 2:
        raise LengthMismatch("need vectors of length >= 2")
    concordant, discordant, ties_x, ties_y = _kernels.tau_counts(xv, yv)
    n0 = n * (n - 1) // 2
    if ties_x == n0 or ties_y == n0:
        raise AllTied("tau undefined for a fully tied vector")
    denom = math.sqrt(float(n0 - ties_x) * float(n0 - ties_y))
    return (concordant - discordant) / denom


# ---------------------------------------------------------------------------
# score-set evaluation

@dataclass(frozen=True)
class LevelTauStats:
    level: int
    count: int
    mean_tau: float
    sd_tau: float | None
    frac_above_mark: float


@dataclass(frozen=True)
class EvalSummary:
    """Agreement of one score set with the aggregated human rankings."""

    scorer: str
    normalization: str
    per_song_tau: Mapping[str, float]
    mean_tau: float | None
    sd_tau: float | None
    frac_above_mark: float | None
    mark: float
    n_songs: int
    n_excluded_human_tied: int
    n_excluded_model_tied: int
    strata: Mapping[str, tuple[LevelTauStats, ...]] | None = None


def _tau_stats(taus: Sequence[float], mark: float):
    if not taus:
        return None, None, None
    arr = np.asarray(taus, dtype=float)
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1)) if arr.size > 1 else None
    frac = float(np.mean(arr > mark))
    return mean, sd, frac


def eval_scoreset(
    score_set: ScoreSet,
    aggregates: CorpusAggregates,
    catalog: Sequence[SongRecord] | None = None,
    strata: Sequence[StratumSpec] | None = None,
    mark: float = TAU_MARK,
) -> EvalSummary:
    """Per-song tau of the model ranking against the truncated human ranking."""
    taus: dict[str, float] = {}
    human_tied = 0
    model_tied = 0
    for song_id in sorted(score_set.profiles):
        if song_id not in aggregates.songs:
            raise MissingAggregate(song_id)
        ranking: AggregatedRanking = aggregates.songs[song_id].ranking
        truncated = ranking.truncated_rank
        if np.all(truncated == truncated[0]):
            human_tied += 1
            continue
        model_ranks = scores_to_ranking(score_set.profiles[song_id])
        if np.all(model_ranks == model_ranks[0]):
            model_tied += 1
            continue
        taus[song_id] = kendall_tau_b(model_ranks, truncated)

    mean, sd, frac = _tau_stats(list(taus.values()), mark)
    strata_stats = None
    if catalog is not None:
        specs = strata if strata is not None else default_strata(catalog)
        by_id = {s.song_id: s for s in catalog}
        strata_stats = {}
        for spec in specs:
            levels: dict[int, list[float]] = {}
            for song_id, tau in taus.items():
                levels.setdefault(spec.bin_of(by_id[song_id]), []).append(tau)
            stats = []
            for level in sorted(levels):
                m, s, f = _tau_stats(levels[level], mark)
                stats.append(LevelTauStats(level=level, count=len(levels[level]),
                                           mean_tau=m, sd_tau=s, frac_above_mark=f))
            strata_stats[spec.name] = tuple(stats)
    return EvalSummary(
        scorer=score_set.scorer,
        normalization=score_set.normalization,
        per_song_tau=taus,
        mean_tau=mean,
        sd_tau=sd,
        frac_above_mark=frac,
        mark=mark,
        n_songs=len(taus),
        n_excluded_human_tied=human_tied,
        n_excluded_model_tied=model_tied,
        strata=strata_stats,
    )


# ---------------------------------------------------------------------------
# descriptive rank summaries per stratum

@dataclass(frozen=True)
class LevelRankSummary:
    level: int
    count: int
    mean_rank: np.ndarray                 # per value, canonical order
    ci_halfwidth: np.ndarray | None       # 1.96 sd/sqrt(count); None if count < 2


@dataclass(frozen=True)
class StrataRankSummary:
    stratum: str
    levels: tuple[LevelRankSummary, ...]
    groups: Mapping[ValueId, str]


def strata_rank_summary(
    aggregates: CorpusAggregates,
    catalog: Sequence[SongRecord],
    stratum: str | StratumSpec,
    strata: Sequence[StratumSpec] | None = None,
) -> StrataRankSummary:
    """Mean truncated rank (with 95% CI) of each value, per stratum level."""
    if isinstance(stratum, StratumSpec):
        spec = stratum
    else:
        specs = strata if strata is not None else default_strata(catalog)
        by_name = {s.name: s for s in specs}
        if stratum not in by_name:
            raise UnknownStratum(stratum)
        spec = by_name[stratum]

    by_id = {s.song_id: s for s in catalog}
    per_level: dict[int, list[np.ndarray]] = {}
    for song_id, agg in aggregates.songs.items():
        if song_id not in by_id:
            raise MissingAggregate(f"aggregated song '{song_id}' missing from catalog")
        per_level.setdefault(spec.bin_of(by_id[song_id]), []).append(
            agg.ranking.truncated_rank)

    levels = []
    for level in sorted(per_level):
        ranks = np.array(per_level[level])
        count = ranks.shape[0]
        mean = ranks.mean(axis=0)
        if count >= 2:
            ci = 1.96 * ranks.std(axis=0, ddof=1) / math.sqrt(count)
        else:
            ci = None
        levels.append(LevelRankSummary(level=level, count=count, mean_rank=mean,
                                       ci_halfwidth=ci))
    return StrataRankSummary(stratum=spec.name, levels=tuple(levels), groups=VALUE_GROUPS)


# ---------------------------------------------------------------------------
# multidimensional scaling

def classical_mds(dissimilarity, dims: int = 2) -> np.ndarray:
    """Torgerson scaling of a symmetric dissimilarity matrix to n x dims.

    Double-centers the squared dissimilarities, takes the top eigenpairs
    (eigenvalues clamped at zero), and fixes each axis sign so its first
    nonzero coordinate is positive.
    """
    d = np.asarray(dissimilarity, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidDissimilarity(f"need a square matrix, got shape {d.shape}")
    if not np.allclose(d, d.T, atol=1e-10):
        raise AsymmetricInput("dissimilarity matrix is not symmetric")
    if np.any(d < 0):
        raise NegativeDissimilarity("dissimilarities must be non-negative")
    if np.any(np.abs(np.diag(d)) > 1e-10):
        raise InvalidDissimilarity("diagonal must be zero")
    n = d.shape[0]
    centering = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * centering @ (d**2) @ centering
    evals, evecs = np.linalg.eigh(b)
    idx = np.argsort(evals)[::-1][:dims]
    lam = np.clip(evals[idx], 0.0, None)
    coords = evecs[:, idx] * np.sqrt(lam)
    for j in range(coords.shape[1]):
        nonzero = np.nonzero(np.abs(coords[:, j]) > 1e-12)[0]
        if nonzero.size and coords[nonzero[0], j] < 0:
            coords[:, j] = -coords[:, j]
    return coords


def correlation_to_dissimilarity(corr) -> np.ndarray:
    """d_ij = sqrt(2 (1 - rho_ij)); Euclidean for any valid correlation."""
    c = np.asarray(corr, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidCorrelation(f"need a square matrix, got shape {c.shape}")
    if not np.allclose(c, c.T, atol=1e-10):
        raise InvalidCorrelation("correlation matrix is not symmetric")
    if not np.allclose(np.diag(c), 1.0, atol=1e-9):
        raise InvalidCorrelation("diagonal must be 1")
    if np.any(c < -1 - 1e-12) or np.any(c > 1 + 1e-12):
        raise InvalidCorrelation("entries must lie in [-1, 1]")
    d = np.sqrt(np.clip(2.0 * (1.0 - c), 0.0, None))
    np.fill_diagonal(d, 0.0)
    return d


@dataclass(frozen=True)
class SimulationResult:
    samples: np.ndarray
    repaired: bool   # eigenvalue clipping was needed to reach PSD


def simulate_from_correlation(corr, n_samples: int, seed: int) -> SimulationResult:
    """Zero-mean Gaussian samples with the given correlation, seeded.

    A non-PSD input is repaired by clipping eigenvalues at 1e-10 and
    rescaling to unit diagonal; the repair is flagged in the result.
    """
    c = np.asarray(corr, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise NotACorrelationMatrix(f"need a square matrix, got shape {c.shape}")
    if not np.allclose(c, c.T, atol=1e-10):
        raise NotACorrelationMatrix("matrix is not symmetric")
    if not np.allclose(np.diag(c), 1.0, atol=1e-9):
        raise NotACorrelationMatrix("diagonal must be 1")
    evals, evecs = np.linalg.eigh(c)
    repaired = bool(evals.min() < 0.0)
    if repaired:
        clipped = (evecs * np.clip(evals, 1e-10, None)) @ evecs.T
        scale = np.sqrt(np.diag(clipped))
        c = clipped / np.outer(scale, scale)
        evals, evecs = np.linalg.eigh(c)
    root = evecs * np.sqrt(np.clip(evals, 0.0, None))
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    z = rng.standard_normal((n_samples, c.shape[0]))
    return SimulationResult(samples=z @ root.T, repaired=repaired)


def profile_correlation(profiles: np.ndarray) -> np.ndarray:
    """Correlation of the value columns across songs (rows)."""
    p = np.asarray(profiles, dtype=float)
    if p.ndim != 2 or p.shape[0] < 3:
        raise InvalidCorrelation("need at least 3 profile rows")
    if np.any(p.std(axis=0) == 0.0):
        raise InvalidCorrelation("a value column is constant across songs")
    return np.corrcoef(p, rowvar=False)
