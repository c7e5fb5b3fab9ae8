import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lyricvalues.model import SongRecord, ValueId, VALUES, ValueLexicon


@pytest.fixture
def song():
    def make(song_id="s1", lyrics="some words here", **kwargs):
        defaults = dict(
            title="t", artist="a", release_year=1990, popularity=1.0,
            genre_topic=0, lyric_topic=0,
        )
        defaults.update(kwargs)
        return SongRecord(song_id=song_id, lyrics_text=lyrics, **defaults)

    return make


@pytest.fixture
def tiny_lexicon():
    patterns = {v: frozenset({v.value.lower().replace("_", "")}) for v in VALUES}
    merged = dict(patterns)
    merged[ValueId.POWER] = frozenset({"power", "money"})
    merged[ValueId.ACHIEVEMENT] = frozenset({"achiev*"})
    return ValueLexicon(merged)


def write_csv(path, header, rows):
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path
