"""Tokenization and the shipped stopword list."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

# Unicode-aware: tokens are runs of letters/digits, with internal apostrophes
# kept so contractions ("don't") stay single tokens.
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase tokens, split on non-alphanumeric, apostrophes kept inside."""
    return _TOKEN_RE.findall(text.lower().replace("’", "'"))


def _parse_stopwords(text: str) -> frozenset[str]:
    words = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line.lower())
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The fixed English stopword list shipped with the package."""
    text = resources.files("lyricvalues.data").joinpath("stopwords.txt").read_text("utf-8")
    return _parse_stopwords(text)


def load_stopwords(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return _parse_stopwords(fh.read())
