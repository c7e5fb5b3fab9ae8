"""Core domain types: values, songs, annotations, lexicons, embeddings.

All types are immutable after construction and safe to share across threads.
Profiles and rank vectors are handled as NumPy arrays in the canonical value
order given by iterating :class:`ValueId`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

import numpy as np


class ValueId(enum.Enum):
    """The ten personal values, in canonical circular order."""

    POWER = "POWER"
    ACHIEVEMENT = "ACHIEVEMENT"
    HEDONISM = "HEDONISM"
    STIMULATION = "STIMULATION"
    SELF_DIRECTION = "SELF_DIRECTION"
    UNIVERSALISM = "UNIVERSALISM"
    BENEVOLENCE = "BENEVOLENCE"
    TRADITION = "TRADITION"
    CONFORMITY = "CONFORMITY"
    SECURITY = "SECURITY"


VALUES: tuple[ValueId, ...] = tuple(ValueId)
N_VALUES = len(VALUES)
VALUE_INDEX: dict[ValueId, int] = {v: i for i, v in enumerate(VALUES)}

# Descriptive grouping used in rank-trend summaries.
VALUE_GROUPS: dict[ValueId, str] = {
    ValueId.HEDONISM: "group1",
    ValueId.STIMULATION: "group1",
    ValueId.SELF_DIRECTION: "group1",
    ValueId.ACHIEVEMENT: "group2",
    ValueId.POWER: "group2",
    ValueId.UNIVERSALISM: "group3",
    ValueId.BENEVOLENCE: "group3",
    ValueId.TRADITION: "group3",
    ValueId.CONFORMITY: "group3",
    ValueId.SECURITY: "group3",
}

RELEASE_YEAR_MIN = 1890
RELEASE_YEAR_MAX = 2030  # exclusive
N_GENRE_TOPICS = 25
N_LYRIC_TOPICS = 9


def profile_to_array(profile: Mapping[ValueId, float]) -> np.ndarray:
    """Dense vector of a 10-value profile in canonical order."""
    return np.array([float(profile[v]) for v in VALUES], dtype=float)


def array_to_profile(arr) -> dict[ValueId, float]:
    a = np.asarray(arr, dtype=float)
    if a.shape != (N_VALUES,):
        raise ValueError(f"expected a {N_VALUES}-vector, got shape {a.shape}")
    return {v: float(a[i]) for i, v in enumerate(VALUES)}


@dataclass(frozen=True, slots=True)
class SongRecord:
    """One catalog entry with strata assignments and (possibly partial) lyrics."""

    song_id: str
    title: str
    artist: str
    release_year: int
    popularity: float
    genre_topic: int
    lyric_topic: int
    lyrics_text: str

    def validate(self) -> None:
        if not self.song_id:
            raise ValueError("song_id must be non-empty")
        if not RELEASE_YEAR_MIN <= self.release_year < RELEASE_YEAR_MAX:
            raise ValueError(
                f"release_year {self.release_year} outside "
                f"[{RELEASE_YEAR_MIN}, {RELEASE_YEAR_MAX})"
            )
        if self.popularity < 0:
            raise ValueError("popularity must be non-negative")
        if not 0 <= self.genre_topic < N_GENRE_TOPICS:
            raise ValueError(f"genre_topic {self.genre_topic} outside [0, {N_GENRE_TOPICS})")
        if not 0 <= self.lyric_topic < N_LYRIC_TOPICS:
            raise ValueError(f"lyric_topic {self.lyric_topic} outside [0, {N_LYRIC_TOPICS})")


@dataclass(frozen=True, slots=True)
class AnnotationRecord:
    """One rater's score and confidence for one value of one song."""

    rater_id: str
    song_id: str
    value: ValueId
    score: float
    confidence: float

    def validate(self) -> None:
        if not -100.0 <= self.score <= 100.0:
            raise ValueError(f"score {self.score} outside [-100, 100]")
        if not 0.0 <= self.confidence <= 100.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 100]")


@dataclass(frozen=True)
class ValueLexicon:
    """Word patterns per value; a trailing '*' matches any token with that prefix."""

    patterns: Mapping[ValueId, frozenset[str]]

    def __post_init__(self):
        for v in VALUES:
            pats = self.patterns.get(v)
            if not pats:
                raise ValueError(f"value {v.value} has no patterns")
            for p in pats:
                if not p or p == "*":
                    raise ValueError(f"empty pattern for {v.value}")
                if p != p.lower():
                    raise ValueError(f"pattern '{p}' is not lowercase")

    def exact_words(self, value: ValueId) -> frozenset[str]:
        return frozenset(p for p in self.patterns[value] if not p.endswith("*"))

    def prefixes(self, value: ValueId) -> tuple[str, ...]:
        return tuple(sorted(p[:-1] for p in self.patterns[value] if p.endswith("*")))

    def matches(self, value: ValueId, token: str) -> bool:
        if token in self.exact_words(value):
            return True
        return any(token.startswith(pre) for pre in self.prefixes(value))


@dataclass(frozen=True)
class EmbeddingTable:
    """Token vectors of uniform dimension, plus optional per-song document vectors."""

    model_name: str
    vectors: Mapping[str, np.ndarray]
    dimension: int
    doc_vectors: Mapping[str, np.ndarray] | None = None
    n_duplicates: int = 0

    def __post_init__(self):
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


class RejectReason(enum.Enum):
    TOO_SHORT = "too_short"
    REPETITION = "repetition"
    NOT_ENGLISH = "not_english"
    ONOMATOPOEIA = "onomatopoeia"


@dataclass(frozen=True, slots=True)
class ScreeningDiagnostics:
    token_count: int
    type_token_ratio: float
    stopword_hit_ratio: float
    oov_ratio: float | None  # None when no vocabulary was supplied


@dataclass(frozen=True, slots=True)
class ScreeningReport:
    """Verdict of the heuristic lyric screen; rejects carry one primary reason."""

    song_id: str
    passed: bool
    reason: RejectReason | None
    diagnostics: ScreeningDiagnostics

    def __post_init__(self):
        if self.passed == (self.reason is not None):
            raise ValueError("rejects carry exactly one reason, passes carry none")
