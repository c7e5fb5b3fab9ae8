"""Automated per-song value scoring.

Two scorer families: relative word-count frequency against the value lexicon
(wildcards expand by prefix), and cosine similarity between a song's document
vector and per-value centroids of in-vocabulary lexicon words. Each scorer's
raw profiles are emitted under four normalization schemes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DocVectorMissing,
    EmptyText,
    NoTokensInVocabulary,
    NoVocabularyOverlap,
    ZeroVector,
)
from .model import (
    EmbeddingTable,
    N_VALUES,
    SongRecord,
    VALUES,
    ValueId,
    ValueLexicon,
)
from .textutil import tokenize

NORMALIZATIONS = ("null", "corpus_z", "song_z", "song_minmax")
WORDCOUNT_SCORER = "wordcount"


def wordcount_scores(lyrics: str, lexicon: ValueLexicon) -> np.ndarray:
    """Fraction of tokens matching each value's patterns (canonical order).

    A token matching several values counts once for each of them.
    """
    tokens = tokenize(lyrics)
    if not tokens:
        raise EmptyText("no tokens to score")
    profile = np.zeros(N_VALUES)
    for i, v in enumerate(VALUES):
        exact = lexicon.exact_words(v)
        prefixes = lexicon.prefixes(v)
        hits = 0
        for tok in tokens:
            if tok in exact or any(tok.startswith(p) for p in prefixes):
                hits += 1
        profile[i] = hits / len(tokens)
    return profile


@dataclass(frozen=True)
class ValueCentroids:
    """Mean embedding of each value's in-vocabulary lexicon words."""

    model_name: str
    vectors: np.ndarray                 # (10, d), canonical order
    coverage: dict[ValueId, int]        # in-vocabulary word count per value
    degenerate: frozenset[ValueId]      # zero-norm centroids


def value_centroids(lexicon: ValueLexicon, table: EmbeddingTable) -> ValueCentroids:
    """Per-value centroids; wildcards expand against the table vocabulary."""
    vocab = list(table.vectors)
    centroids = np.zeros((N_VALUES, table.dimension))
    coverage: dict[ValueId, int] = {}
    degenerate = set()
    for i, v in enumerate(VALUES):
        words = set(w for w in lexicon.exact_words(v) if w in table)
        for prefix in lexicon.prefixes(v):
            words.update(t for t in vocab if t.startswith(prefix))
        if not words:
            raise NoVocabularyOverlap(f"{v.value}: no lexicon word in vocabulary")
        centroids[i] = np.mean([table.vectors[w] for w in sorted(words)], axis=0)
        coverage[v] = len(words)
        if np.linalg.norm(centroids[i]) == 0.0:
            degenerate.add(v)
    return ValueCentroids(
        model_name=table.model_name,
        vectors=centroids,
        coverage=coverage,
        degenerate=frozenset(degenerate),
    )


def document_vector(lyrics: str, table: EmbeddingTable) -> np.ndarray:
    """Unweighted mean of in-vocabulary token embeddings."""
    tokens = tokenize(lyrics)
    if not tokens:
        raise EmptyText("no tokens to embed")
    vecs = [table.vectors[t] for t in tokens if t in table]
    if not vecs:
        raise NoTokensInVocabulary("no lyric token found in the vocabulary")
    return np.mean(vecs, axis=0)


def oov_rate(lyrics: str, table: EmbeddingTable) -> float:
    tokens = tokenize(lyrics)
    if not tokens:
        return 1.0
    return sum(1 for t in tokens if t not in table) / len(tokens)


def embedding_scores(
    doc: np.ndarray,
    centroids: ValueCentroids,
) -> np.ndarray:
    """Cosine similarity of the document vector to each value centroid.

    Degenerate (zero-norm) centroids score 0.
    """
    d = np.asarray(doc, dtype=float)
    d_norm = np.linalg.norm(d)
    if d_norm == 0.0:
        raise ZeroVector("document vector has zero norm")
    c_norms = np.linalg.norm(centroids.vectors, axis=1)
    scores = np.zeros(N_VALUES)
    nonzero = c_norms > 0.0
    scores[nonzero] = (centroids.vectors[nonzero] @ d) / (c_norms[nonzero] * d_norm)
    return scores


# ---------------------------------------------------------------------------
# normalization and the scorer-by-scheme grid

@dataclass(frozen=True)
class ScoreSet:
    """One scorer under one normalization scheme over the corpus."""

    scorer: str
    normalization: str
    profiles: Mapping[str, np.ndarray]   # song_id -> 10 scores, canonical order
    diagnostics: dict = field(default_factory=dict)


def normalize_scores(profiles: Mapping[str, np.ndarray], scheme: str) -> tuple[dict, int]:
    """Apply one scheme; returns (profiles, number of degenerate groups).

    corpus_z standardizes each value across songs; song_z and song_minmax
    rescale within each song (preserving within-song order). Zero-variance
    groups map to all-zeros (z) or all-0.5 (minmax) and are counted.
    """
    ids = list(profiles)
    if not ids:
        raise ValueError("no profiles to normalize")
    mat = np.array([profiles[s] for s in ids], dtype=float)
    degenerate = 0
    if scheme == "null":
        out = mat.copy()
    elif scheme == "corpus_z":
        mean = mat.mean(axis=0)
        sd = mat.std(axis=0, ddof=1) if mat.shape[0] > 1 else np.zeros(N_VALUES)
        out = np.zeros_like(mat)
        ok = sd > 0.0
        degenerate = int(np.sum(~ok))
        out[:, ok] = (mat[:, ok] - mean[ok]) / sd[ok]
    elif scheme == "song_z":
        mean = mat.mean(axis=1, keepdims=True)
        sd = mat.std(axis=1, ddof=1, keepdims=True)
        ok = (sd > 0.0)[:, 0]
        degenerate = int(np.sum(~ok))
        out = np.zeros_like(mat)
        out[ok] = (mat[ok] - mean[ok]) / sd[ok]
    elif scheme == "song_minmax":
        lo = mat.min(axis=1, keepdims=True)
        hi = mat.max(axis=1, keepdims=True)
        span = hi - lo
        ok = (span > 0.0)[:, 0]
        degenerate = int(np.sum(~ok))
        out = np.full_like(mat, 0.5)
        out[ok] = (mat[ok] - lo[ok]) / span[ok]
    else:
        raise ValueError(f"unknown normalization scheme '{scheme}'")
    return {sid: out[i] for i, sid in enumerate(ids)}, degenerate


def build_score_sets(
    corpus: Sequence[SongRecord],
    lexicon: ValueLexicon,
    models: Mapping[str, EmbeddingTable] | None = None,
) -> list[ScoreSet]:
    """The full scorer-by-normalization grid: (len(models) + 1) x 4 sets."""
    models = models or {}
    raw: list[tuple[str, dict[str, np.ndarray], dict]] = []

    wc = {song.song_id: wordcount_scores(song.lyrics_text, lexicon) for song in corpus}
    raw.append((WORDCOUNT_SCORER, wc,
                {"lexicon_size": {v.value: len(lexicon.patterns[v]) for v in VALUES}}))

    for name in sorted(models):
        table = models[name]
        centroids = value_centroids(lexicon, table)
        profiles: dict[str, np.ndarray] = {}
        oov: dict[str, float] = {}
        for song in corpus:
            if table.doc_vectors is not None:
                if song.song_id not in table.doc_vectors:
                    raise DocVectorMissing(f"{name}: no document vector for '{song.song_id}'")
                doc = table.doc_vectors[song.song_id]
            else:
                doc = document_vector(song.lyrics_text, table)
            profiles[song.song_id] = embedding_scores(doc, centroids)
            oov[song.song_id] = oov_rate(song.lyrics_text, table)
        diag = {
            "coverage": {v.value: centroids.coverage[v] for v in VALUES},
            "degenerate_centroids": sorted(v.value for v in centroids.degenerate),
            "oov_rate": oov,
        }
        raw.append((name, profiles, diag))

    sets: list[ScoreSet] = []
    for scorer, profiles, diag in raw:
        for scheme in NORMALIZATIONS:
            normalized, degenerate = normalize_scores(profiles, scheme)
            sets.append(ScoreSet(
                scorer=scorer,
                normalization=scheme,
                profiles=normalized,
                diagnostics={**diag, "degenerate_groups": degenerate},
            ))
    return sets
