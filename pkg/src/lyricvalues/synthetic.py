"""Seeded synthetic data generators for calibration and recovery studies.

These document the generative assumptions behind the package's validation
suite: a signal-plus-noise model for rater-count studies (song-level means
spread across songs, independent rater noise) and a planted-hierarchy corpus
for end-to-end rank-recovery checks.
"""

from __future__ import annotations

import numpy as np

from .model import (
    AnnotationRecord,
    N_VALUES,
    SongRecord,
    VALUES,
    ValueId,
)

# Planted per-song means, best value first: the top three are separated by
# 40 points, the rest trail downward.
PLANTED_MEANS = (85.0, 45.0, 5.0, -15.0, -25.0, -35.0, -45.0, -55.0, -65.0, -75.0)


def pilot_ratings(
    n_songs: int,
    n_raters: int,
    value: ValueId = ValueId.POWER,
    song_mean_sd: float = 30.0,
    noise_sd: float = 20.0,
    confidence: float = 80.0,
    seed: int = 0,
) -> list[AnnotationRecord]:
    """Signal-plus-noise pilot ratings for one value.

    Song means are N(0, song_mean_sd); each rater adds N(0, noise_sd).
    Scores are clipped to the response scale.
    """
    rng = np.random.default_rng(seed)
    means = rng.normal(0.0, song_mean_sd, size=n_songs)
    out = []
    for i in range(n_songs):
        scores = np.clip(means[i] + rng.normal(0.0, noise_sd, size=n_raters), -100, 100)
        for j in range(n_raters):
            out.append(AnnotationRecord(
                rater_id=f"r{j:04d}",
                song_id=f"s{i:04d}",
                value=value,
                score=float(scores[j]),
                confidence=confidence,
            ))
    return out


def planted_corpus(
    n_songs: int = 50,
    n_raters: int = 25,
    noise_sd: float = 20.0,
    seed: int = 0,
) -> tuple[list[SongRecord], list[AnnotationRecord], dict[str, np.ndarray]]:
    """Corpus with a known value hierarchy per song.

    Each song gets a random assignment of PLANTED_MEANS to the ten values;
    each rater scores every value as planted mean plus N(0, noise_sd), clipped.
    Returns (catalog, annotations, planted mean profiles by song).
    """
    rng = np.random.default_rng(seed)
    catalog: list[SongRecord] = []
    annotations: list[AnnotationRecord] = []
    planted: dict[str, np.ndarray] = {}
    for i in range(n_songs):
        song_id = f"s{i:04d}"
        perm = rng.permutation(N_VALUES)
        means = np.empty(N_VALUES)
        means[perm] = PLANTED_MEANS
        planted[song_id] = means
        catalog.append(SongRecord(
            song_id=song_id,
            title=f"song {i}",
            artist=f"artist {i % 7}",
            release_year=1890 + (i % 14) * 10,
            popularity=float(i),
            genre_topic=i % 25,
            lyric_topic=i % 9,
            lyrics_text="placeholder lyric text",
        ))
        for j in range(n_raters):
            scores = np.clip(means + rng.normal(0.0, noise_sd, size=N_VALUES), -100, 100)
            for k, v in enumerate(VALUES):
                annotations.append(AnnotationRecord(
                    rater_id=f"r{j:03d}",
                    song_id=song_id,
                    value=v,
                    score=float(scores[k]),
                    confidence=float(rng.integers(50, 101)),
                ))
    return catalog, annotations, planted


def oracle_scores(
    planted: dict[str, np.ndarray],
    noise_sd: float = 10.0,
    seed: int = 0,
) -> dict[str, np.ndarray]:
    """Noisy readout of the planted means, as an upper-bound 'scorer'."""
    rng = np.random.default_rng(seed)
    return {
        sid: means + rng.normal(0.0, noise_sd, size=means.size)
        for sid, means in sorted(planted.items())
    }
