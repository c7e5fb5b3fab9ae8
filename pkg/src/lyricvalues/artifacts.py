"""Documented JSON artifacts exchanged between pipeline commands.

Every writer is deterministic (stable key order, no timestamps) and atomic
(temp file + rename), so identical inputs and seeds produce byte-identical
files.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .aggregate import AggregatedRanking, CorpusAggregates, SongAggregate
from .autoscore import ScoreSet
from .errors import MissingResults
from .evaluate import EvalSummary, StrataRankSummary
from .model import VALUES, ValueId


def atomic_write_json(payload, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def read_json(path):
    path = Path(path)
    if not path.exists():
        raise MissingResults(str(path))
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _value_map(arr) -> dict[str, float]:
    return {v.value: float(arr[i]) for i, v in enumerate(VALUES)}


def _value_array(mapping: Mapping[str, float]) -> np.ndarray:
    return np.array([float(mapping[v.value]) for v in VALUES])


# ---------------------------------------------------------------------------
# aggregates.json

def aggregates_to_json(aggregates: CorpusAggregates) -> dict:
    songs = {}
    for song_id in sorted(aggregates.songs):
        agg = aggregates.songs[song_id]
        r = agg.ranking
        songs[song_id] = {
            "m": r.m,
            "correction_factor": r.correction_factor,
            "n_raters_skipped": agg.n_raters_skipped,
            "mean_profile": _value_map(agg.mean_profile),
            "rho": _value_map(r.rho),
            "p": _value_map(r.p),
            "order": [v.value for v in r.order],
            "truncated_rank": _value_map(r.truncated_rank),
        }
    correction = aggregates.correction
    return {
        "alpha": aggregates.alpha,
        "correction": correction if isinstance(correction, str) else float(correction),
        "songs": songs,
    }


def aggregates_from_json(payload: dict) -> CorpusAggregates:
    songs = {}
    alpha = float(payload["alpha"])
    for song_id, entry in payload["songs"].items():
        ranking = AggregatedRanking(
            song_id=song_id,
            rho=_value_array(entry["rho"]),
            p=_value_array(entry["p"]),
            order=tuple(ValueId[name] for name in entry["order"]),
            truncated_rank=_value_array(entry["truncated_rank"]),
            m=int(entry["m"]),
            correction_factor=float(entry["correction_factor"]),
            alpha=alpha,
        )
        songs[song_id] = SongAggregate(
            ranking=ranking,
            mean_profile=_value_array(entry["mean_profile"]),
            n_raters_used=int(entry["m"]),
            n_raters_skipped=int(entry.get("n_raters_skipped", 0)),
        )
    return CorpusAggregates(alpha=alpha, correction=payload["correction"], songs=songs)


# ---------------------------------------------------------------------------
# scores.json

def score_sets_to_json(sets: Sequence[ScoreSet]) -> dict:
    out = []
    for s in sets:
        out.append({
            "scorer": s.scorer,
            "normalization": s.normalization,
            "profiles": {sid: _value_map(s.profiles[sid]) for sid in sorted(s.profiles)},
            "diagnostics": s.diagnostics,
        })
    return {"score_sets": out}


def score_sets_from_json(payload: dict) -> list[ScoreSet]:
    sets = []
    for entry in payload["score_sets"]:
        sets.append(ScoreSet(
            scorer=entry["scorer"],
            normalization=entry["normalization"],
            profiles={sid: _value_array(p) for sid, p in entry["profiles"].items()},
            diagnostics=entry.get("diagnostics", {}),
        ))
    return sets


# ---------------------------------------------------------------------------
# eval.json / strata_summary.json

def eval_summaries_to_json(summaries: Sequence[EvalSummary]) -> dict:
    out = []
    for s in summaries:
        entry = {
            "scorer": s.scorer,
            "normalization": s.normalization,
            "mark": s.mark,
            "n_songs": s.n_songs,
            "n_excluded_human_tied": s.n_excluded_human_tied,
            "n_excluded_model_tied": s.n_excluded_model_tied,
            "mean_tau": s.mean_tau,
            "sd_tau": s.sd_tau,
            "frac_above_mark": s.frac_above_mark,
            "per_song_tau": {sid: s.per_song_tau[sid] for sid in sorted(s.per_song_tau)},
        }
        if s.strata is not None:
            entry["strata"] = {
                name: [
                    {
                        "level": ls.level,
                        "count": ls.count,
                        "mean_tau": ls.mean_tau,
                        "sd_tau": ls.sd_tau,
                        "frac_above_mark": ls.frac_above_mark,
                    }
                    for ls in levels
                ]
                for name, levels in sorted(s.strata.items())
            }
        out.append(entry)
    return {"score_sets": out}


def strata_summaries_to_json(summaries: Sequence[StrataRankSummary]) -> dict:
    strata = {}
    for summary in summaries:
        strata[summary.stratum] = {
            "levels": [
                {
                    "level": level.level,
                    "count": level.count,
                    "mean_rank": _value_map(level.mean_rank),
                    "ci_halfwidth": None if level.ci_halfwidth is None
                    else _value_map(level.ci_halfwidth),
                }
                for level in summary.levels
            ],
        }
    return {
        "strata": strata,
        "groups": {v.value: g for v, g in ((v, summaries[0].groups[v]) for v in VALUES)}
        if summaries else {},
    }
