"""Perceived personal values in song lyrics: sampling, aggregation, scoring.

The package covers the full desk pipeline: stratified corpus sampling with
Dirichlet-MAP bin smoothing, heuristic lyric screening, aggregation of rater
annotations into tie-aware per-song value rankings, reliability and
rater-count analysis, lexicon/embedding scoring, and rank-correlation
evaluation of automated scores against the aggregated rankings.
"""

from __future__ import annotations

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend  # noqa: E402
from .model import (  # noqa: E402
    AnnotationRecord,
    EmbeddingTable,
    ScreeningReport,
    SongRecord,
    ValueId,
    ValueLexicon,
    VALUES,
)


def backend() -> str:
    """Name of the active kernel backend ('compiled' or 'pure')."""
    return kernel_backend


__all__ = [
    "AnnotationRecord",
    "EmbeddingTable",
    "ScreeningReport",
    "SongRecord",
    "ValueId",
    "ValueLexicon",
    "VALUES",
    "backend",
    "__version__",
]
