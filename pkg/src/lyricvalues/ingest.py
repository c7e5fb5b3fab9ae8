"""File ingestion and heuristic lyric screening.

CSV files are UTF-8 with a header row and RFC-4180 quoting. Loaders validate
every record against the domain invariants and fail on the first bad row.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConfidenceOutOfRange,
    DimensionMismatch,
    DuplicateSongId,
    DuplicateTriple,
    EmptyPattern,
    EmptyTable,
    MalformedRow,
    MissingValueCategory,
    ScoreOutOfRange,
)
from .model import (
    AnnotationRecord,
    EmbeddingTable,
    RejectReason,
    ScreeningDiagnostics,
    ScreeningReport,
    SongRecord,
    ValueId,
    ValueLexicon,
    VALUES,
)
from .textutil import default_stopwords, tokenize

log = logging.getLogger(__name__)

CATALOG_FIELDS = ("song_id", "title", "artist", "release_year", "popularity",
                  "genre_topic", "lyric_topic")
ANNOTATION_FIELDS = ("rater_id", "song_id", "value", "score", "confidence")


def _open_reader(path):
    fh = open(path, encoding="utf-8", newline="")
    return fh, csv.DictReader(fh)


def _require_columns(reader: csv.DictReader, required: Iterable[str], path) -> None:
    have = set(reader.fieldnames or ())
    missing = [c for c in required if c not in have]
    if missing:
        raise MalformedRow(1, missing[0], f"missing column in header of {path}")


def load_song_catalog(path) -> list[SongRecord]:
    """Load songs.csv; lyrics come inline (`lyrics`) or via `lyrics_path`."""
    path = Path(path)
    fh, reader = _open_reader(path)
    with fh:
        _require_columns(reader, CATALOG_FIELDS, path)
        has_inline = "lyrics" in (reader.fieldnames or ())
        has_path = "lyrics_path" in (reader.fieldnames or ())
        if not (has_inline or has_path):
            raise MalformedRow(1, "lyrics", f"need a 'lyrics' or 'lyrics_path' column in {path}")
        records: list[SongRecord] = []
        seen: set[str] = set()
        for lineno, row in enumerate(reader, start=2):
            rec = _parse_song_row(row, lineno, has_inline, base_dir=path.parent)
            if rec.song_id in seen:
                raise DuplicateSongId(f"song_id '{rec.song_id}' at line {lineno}")
            seen.add(rec.song_id)
            records.append(rec)
    return records


def _parse_song_row(row, lineno, has_inline, base_dir) -> SongRecord:
    def intfield(name):
        try:
            return int(row[name])
        except (ValueError, TypeError):
            raise MalformedRow(lineno, name, f"not an integer: {row.get(name)!r}") from None

    def floatfield(name):
        try:
            return float(row[name])
        except (ValueError, TypeError):
            raise MalformedRow(lineno, name, f"not a number: {row.get(name)!r}") from None

    if has_inline:
        lyrics = row.get("lyrics") or ""
    else:
        rel = row.get("lyrics_path") or ""
        if not rel:
            raise MalformedRow(lineno, "lyrics_path", "empty path")
        try:
            lyrics = (base_dir / rel).read_text("utf-8")
        except OSError as exc:
            raise MalformedRow(lineno, "lyrics_path", str(exc)) from None

    rec = SongRecord(
        song_id=row.get("song_id") or "",
        title=row.get("title") or "",
        artist=row.get("artist") or "",
        release_year=intfield("release_year"),
        popularity=floatfield("popularity"),
        genre_topic=intfield("genre_topic"),
        lyric_topic=intfield("lyric_topic"),
        lyrics_text=lyrics,
    )
    try:
        rec.validate()
    except ValueError as exc:
        field = str(exc).split(" ", 1)[0]
        raise MalformedRow(lineno, field, str(exc)) from None
    return rec


def write_song_catalog(records: Sequence[SongRecord], path) -> None:
    """Inverse of load_song_catalog (lyrics written inline)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CATALOG_FIELDS + ("lyrics",))
        for r in records:
            writer.writerow([r.song_id, r.title, r.artist, r.release_year,
                             repr(r.popularity), r.genre_topic, r.lyric_topic,
                             r.lyrics_text])


def load_annotations(path) -> list[AnnotationRecord]:
    """Load long-format annotations.csv (one row per rater x song x value)."""
    fh, reader = _open_reader(path)
    with fh:
        _require_columns(reader, ANNOTATION_FIELDS, path)
        records: list[AnnotationRecord] = []
        seen: set[tuple[str, str, str]] = set()
        for lineno, row in enumerate(reader, start=2):
            value_name = (row.get("value") or "").strip()
            try:
                value = ValueId[value_name]
            except KeyError:
                raise MalformedRow(lineno, "value", f"unknown value '{value_name}'") from None
            try:
                score = float(row["score"])
                confidence = float(row["confidence"])
            except (ValueError, TypeError, KeyError):
                raise MalformedRow(lineno, "score", "score/confidence not numeric") from None
            if not -100.0 <= score <= 100.0:
                raise ScoreOutOfRange(f"line {lineno}: score {score} outside [-100, 100]")
            if not 0.0 <= confidence <= 100.0:
                raise ConfidenceOutOfRange(
                    f"line {lineno}: confidence {confidence} outside [0, 100]")
            rec = AnnotationRecord(
                rater_id=row.get("rater_id") or "",
                song_id=row.get("song_id") or "",
                value=value,
                score=score,
                confidence=confidence,
            )
            key = (rec.rater_id, rec.song_id, rec.value.value)
            if key in seen:
                raise DuplicateTriple(f"duplicate (rater, song, value) {key} at line {lineno}")
            seen.add(key)
            records.append(rec)
    return records


def write_annotations(records: Sequence[AnnotationRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ANNOTATION_FIELDS)
        for r in records:
            writer.writerow([r.rater_id, r.song_id, r.value.value,
                             repr(r.score), repr(r.confidence)])


def load_value_lexicon(path) -> ValueLexicon:
    """Load lexicon.csv rows of (value, pattern); patterns are lowercased."""
    fh, reader = _open_reader(path)
    with fh:
        _require_columns(reader, ("value", "pattern"), path)
        patterns: dict[ValueId, set[str]] = {v: set() for v in VALUES}
        for lineno, row in enumerate(reader, start=2):
            value_name = (row.get("value") or "").strip()
            try:
                value = ValueId[value_name]
            except KeyError:
                raise MalformedRow(lineno, "value", f"unknown value '{value_name}'") from None
            pat = (row.get("pattern") or "").strip().lower()
            if not pat or pat == "*":
                raise EmptyPattern(f"line {lineno}: empty pattern for {value_name}")
            patterns[value].add(pat)
    for v in VALUES:
        if not patterns[v]:
            raise MissingValueCategory(v.value)
    return ValueLexicon({v: frozenset(p) for v, p in patterns.items()})


def load_embeddings(path, model_name: str | None = None) -> EmbeddingTable:
    """Load token-per-line embeddings: "token v1 ... vd".

    An optional first line "count d" (two integers) is skipped. Duplicate
    tokens keep the first occurrence; the duplicate count is recorded.
    """
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    n_dup = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                    continue  # header line
                except ValueError:
                    pass
            token = parts[0]
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=float)
            except ValueError:
                raise DimensionMismatch(f"line {lineno}: non-numeric vector entry") from None
            if vec.size == 0:
                raise DimensionMismatch(f"line {lineno}: token without vector")
            if dim is None:
                dim = vec.size
            elif vec.size != dim:
                raise DimensionMismatch(
                    f"line {lineno}: expected {dim} components, got {vec.size}")
            if token in vectors:
                n_dup += 1
                continue
            vec.flags.writeable = False
            vectors[token] = vec
    if dim is None:
        raise EmptyTable(str(path))
    if n_dup:
        log.warning("%s: %d duplicate tokens ignored", path, n_dup)
    return EmbeddingTable(model_name=model_name or path.stem, vectors=vectors,
                          dimension=dim, n_duplicates=n_dup)


def load_doc_vectors(path) -> dict[str, np.ndarray]:
    """Load doc_vectors.csv (song_id,v1..vd) into a per-song vector map."""
    fh, reader = _open_reader(path)
    with fh:
        fields = reader.fieldnames or ()
        if not fields or fields[0] != "song_id":
            raise MalformedRow(1, "song_id", f"first column of {path} must be song_id")
        dim = len(fields) - 1
        if dim < 1:
            raise EmptyTable(str(path))
        out: dict[str, np.ndarray] = {}
        for lineno, row in enumerate(reader, start=2):
            try:
                vec = np.array([float(row[c]) for c in fields[1:]], dtype=float)
            except (ValueError, TypeError):
                raise DimensionMismatch(f"line {lineno}: non-numeric vector entry") from None
            vec.flags.writeable = False
            out[row["song_id"]] = vec
    if not out:
        raise EmptyTable(str(path))
    return out


def load_correlation_matrix(path) -> np.ndarray:
    """Load a 10x10 value correlation matrix from CSV.

    The header names the ten values (optionally preceded by a 'value' row
    label column); rows follow the header order. The result is reordered to
    canonical value order.
    """
    fh, reader = _open_reader(path)
    with fh:
        fields = list(reader.fieldnames or ())
        has_label = bool(fields) and fields[0].lower() == "value"
        names = fields[1:] if has_label else fields
        try:
            order = [ValueId[n.strip()] for n in names]
        except KeyError as exc:
            raise MalformedRow(1, "header", f"unknown value name {exc}") from None
        if len(set(order)) != len(VALUES):
            raise MalformedRow(1, "header", "header must name all 10 values once")
        raw = np.full((len(VALUES), len(VALUES)), np.nan)
        for lineno, row in enumerate(reader, start=2):
            i = lineno - 2
            if i >= len(VALUES):
                raise MalformedRow(lineno, "value", "more than 10 rows")
            try:
                for j, name in enumerate(names):
                    raw[i, j] = float(row[name])
            except (TypeError, ValueError):
                raise MalformedRow(lineno, name, "non-numeric correlation") from None
    if np.any(np.isnan(raw)):
        raise MalformedRow(len(VALUES) + 1, "value", "fewer than 10 complete rows")
    # reorder rows and columns into canonical order
    idx = np.argsort([VALUES.index(v) for v in order])
    return raw[np.ix_(idx, idx)]


# ---------------------------------------------------------------------------
# screening

@dataclass(frozen=True)
class ScreeningConfig:
    """Thresholds for the assistive lyric screen (all configurable)."""

    min_tokens: int = 20
    min_type_token_ratio: float = 0.10
    min_stopword_ratio: float = 0.05
    max_oov_ratio: float = 0.80


def screen_lyric(
    song: SongRecord,
    config: ScreeningConfig | None = None,
    stopwords: frozenset[str] | None = None,
    vocab: EmbeddingTable | None = None,
) -> ScreeningReport:
    """Heuristic suitability check of one lyric.

    Checks run in fixed order: too short, then repetition (low type-token
    ratio), then not-English (low stopword rate), then onomatopoeia (high
    out-of-vocabulary rate, only when a vocabulary is supplied). The first
    failing check is the primary reject reason.
    """
    config = config or ScreeningConfig()
    stopwords = stopwords if stopwords is not None else default_stopwords()
    tokens = tokenize(song.lyrics_text)
    n = len(tokens)
    ttr = len(set(tokens)) / n if n else 0.0
    stop_ratio = sum(1 for t in tokens if t in stopwords) / n if n else 0.0
    oov_ratio = None
    if vocab is not None:
        oov_ratio = sum(1 for t in tokens if t not in vocab) / n if n else 1.0
    diagnostics = ScreeningDiagnostics(
        token_count=n,
        type_token_ratio=ttr,
        stopword_hit_ratio=stop_ratio,
        oov_ratio=oov_ratio,
    )

    reason = None
    if n < config.min_tokens:
        reason = RejectReason.TOO_SHORT
    elif ttr < config.min_type_token_ratio:
        reason = RejectReason.REPETITION
    elif stop_ratio < config.min_stopword_ratio:
        reason = RejectReason.NOT_ENGLISH
    elif oov_ratio is not None and oov_ratio > config.max_oov_ratio:
        reason = RejectReason.ONOMATOPOEIA
    return ScreeningReport(song_id=song.song_id, passed=reason is None,
                           reason=reason, diagnostics=diagnostics)
