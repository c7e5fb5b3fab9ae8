"""Exception hierarchy.

Every domain failure raises a subclass of :class:`LyricValuesError`, so the
CLI can map any library error to exit code 1 with a machine-readable record.
"""

from __future__ import annotations


class LyricValuesError(Exception):
    """Base class for all domain errors raised by this package."""

    def record(self) -> dict:
        """Machine-readable error record for CLI output."""
        return {"error": type(self).__name__, "message": str(self)}


# ---------------------------------------------------------------------------
# ingest

class MalformedRow(LyricValuesError):
    def __init__(self, line: int, field: str, message: str = ""):
        self.line = line
        self.field = field
        super().__init__(f"line {line}, field '{field}': {message}" if message
                         else f"line {line}, field '{field}'")


class DuplicateSongId(LyricValuesError):
    pass


class ScoreOutOfRange(LyricValuesError):
    pass


class ConfidenceOutOfRange(LyricValuesError):
    pass


class DuplicateTriple(LyricValuesError):
    pass


class MissingValueCategory(LyricValuesError):
    pass


class EmptyPattern(LyricValuesError):
    pass


class DimensionMismatch(LyricValuesError):
    pass


class EmptyTable(LyricValuesError):
    pass


# ---------------------------------------------------------------------------
# sampler

class InvalidConcentration(LyricValuesError):
    pass


class EmptyPopulation(LyricValuesError):
    pass


class UnreachableTarget(LyricValuesError):
    pass


class EmptyBin(LyricValuesError):
    pass


class SampleTooLarge(LyricValuesError):
    pass


# ---------------------------------------------------------------------------
# aggregate

class NoAnnotations(LyricValuesError):
    pass


class NonFiniteScore(LyricValuesError):
    pass


class EmptyInput(LyricValuesError):
    pass


class RankOutOfRange(LyricValuesError):
    pass


class InconsistentLists(LyricValuesError):
    pass


# ---------------------------------------------------------------------------
# reliability

class ZeroTotalVariance(LyricValuesError):
    pass


class TooFewColumns(LyricValuesError):
    pass


class DegenerateAnova(LyricValuesError):
    pass


class InsufficientRatings(LyricValuesError):
    def __init__(self, song_id: str, size: int):
        self.song_id = song_id
        self.size = size
        super().__init__(f"song '{song_id}' has fewer than {size} ratings")


class ConstantCanonicalMeans(LyricValuesError):
    pass


# ---------------------------------------------------------------------------
# autoscore

class EmptyText(LyricValuesError):
    pass


class NoVocabularyOverlap(LyricValuesError):
    pass


class NoTokensInVocabulary(LyricValuesError):
    pass


class ZeroVector(LyricValuesError):
    pass


class DocVectorMissing(LyricValuesError):
    pass


# ---------------------------------------------------------------------------
# evaluate

class LengthMismatch(LyricValuesError):
    pass


class AllTied(LyricValuesError):
    pass


class MissingAggregate(LyricValuesError):
    pass


class UnknownStratum(LyricValuesError):
    pass


class AsymmetricInput(LyricValuesError):
    pass


class NegativeDissimilarity(LyricValuesError):
    pass


class InvalidDissimilarity(LyricValuesError):
    pass


class InvalidCorrelation(LyricValuesError):
    pass


class NotACorrelationMatrix(LyricValuesError):
    pass


# ---------------------------------------------------------------------------
# cli

class MissingResults(LyricValuesError):
    pass


class ConfigError(LyricValuesError):
    pass
