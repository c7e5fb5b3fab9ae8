"""Subcommand CLI orchestrating the pipeline.

Every command reads one TOML config (flags win over the file; environment
variables use the LYRICVALUES_ prefix), writes its JSON artifact plus a run
manifest, and is byte-identical across re-runs with the same config and
seed. Exit codes: 0 success, 1 domain error (JSON record on stderr), 2 usage
error.
"""

from __future__ import annotations

import csv
import json
import os
import sys
import tempfile
from pathlib import Path

import click
import numpy as np

from . import __version__, aggregate, artifacts, autoscore, evaluate, ingest, reliability, sampler
from .config import ModelSpec, PipelineConfig, load_config
from .errors import LyricValuesError, MissingResults
from .model import VALUES
from .textutil import default_stopwords, load_stopwords

PLOT_KINDS = ("rank_corr", "strata_trend", "mds_points", "alpha_curves")


def _write_manifest(cfg: PipelineConfig, command: str, seed, outputs: list[Path]) -> None:
    manifest = {
        "command": command,
        "config_digest": cfg.digest(),
        "seed": seed,
        "version": __version__,
        "outputs": [p.name for p in outputs],
    }
    artifacts.atomic_write_json(manifest, cfg.output_dir / f"{command}.manifest.json")


def _atomic_write_csv(rows: list[dict], columns: list[str], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns)
            writer.writeheader()
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _load_cfg(config_path, out_dir) -> PipelineConfig:
    cfg = load_config(config_path)
    if out_dir is not None:
        cfg.output_dir = Path(out_dir)
    return cfg


def _require_seed(value, name: str) -> int:
    if value is None:
        raise click.UsageError(f"a seed is required for '{name}' (flag --seed or config)")
    return int(value)


def _strata_from_config(cfg: PipelineConfig, catalog):
    if cfg.popularity_edges is not None:
        return [
            sampler.release_year_stratum(),
            sampler.popularity_stratum(cfg.popularity_edges),
            sampler.genre_stratum(),
            sampler.lyric_topic_stratum(),
        ]
    return sampler.default_strata(catalog, cfg.popularity_quantiles)


@click.group()
@click.version_option(version=__version__, prog_name="lyricvalues")
def cli():
    """Estimate perceived personal values in song lyrics."""


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Overrides sampling.seed.")
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--n", type=int, default=None, help="Overrides sampling.n.")
@click.option("--target-min-share", type=float, default=None,
              help="Overrides sampling.target_min_share.")
def sample(config_path, seed, out_dir, n, target_min_share):
    """Draw a fuzzy stratified sample of songs; writes sample.json."""
    cfg = _load_cfg(config_path, out_dir)
    seed = _require_seed(seed if seed is not None else cfg.sample_seed, "sample")
    n = n if n is not None else cfg.sample_n
    if n is None:
        raise click.UsageError("a sample size is required (flag --n or config sampling.n)")
    share = target_min_share if target_min_share is not None else cfg.target_min_share

    catalog = ingest.load_song_catalog(cfg.require("catalog"))
    strata = _strata_from_config(cfg, catalog)
    smoothed = []
    concentrations = {}
    for spec in strata:
        counts = sampler.stratum_counts(catalog, spec)
        occupied = counts[counts > 0]
        if cfg.concentration is not None:
            a = cfg.concentration
        else:
            # choose a over occupied bins so empty bins cannot dominate
            a = sampler.choose_concentration(occupied, share) if occupied.size > 1 else 1.0
        concentrations[spec.name] = a
        smoothed.append((spec, sampler.map_smooth(counts, a, stratum=spec.name)))
    weights = sampler.song_weights(catalog, smoothed)
    ids = sampler.sample_songs(catalog, weights, n, seed)
    payload = {
        "seed": seed,
        "n": n,
        "target_min_share": None if cfg.concentration is not None else share,
        "concentration": concentrations,
        "song_ids": ids,
        "realized_shares": {
            name: {str(b): s for b, s in shares.items()}
            for name, shares in sampler.realized_shares(ids, catalog, strata).items()
        },
    }
    out = cfg.output_dir / "sample.json"
    artifacts.atomic_write_json(payload, out)
    _write_manifest(cfg, "sample", seed, [out])
    click.echo(f"sampled {len(ids)} songs -> {out}")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None)
def screen(config_path, out_dir):
    """Run the heuristic lyric screen; writes screening.json."""
    cfg = _load_cfg(config_path, out_dir)
    catalog = ingest.load_song_catalog(cfg.require("catalog"))
    stopwords = (load_stopwords(cfg.require("stopwords"))
                 if cfg.stopwords is not None else default_stopwords())
    vocab = (ingest.load_embeddings(cfg.require("screening_vocabulary"))
             if cfg.screening_vocabulary is not None else None)
    screening_config = ingest.ScreeningConfig(
        min_tokens=cfg.min_tokens,
        min_type_token_ratio=cfg.min_type_token_ratio,
        min_stopword_ratio=cfg.min_stopword_ratio,
        max_oov_ratio=cfg.max_oov_ratio,
    )
    reports = {}
    for song in catalog:
        rep = ingest.screen_lyric(song, screening_config, stopwords, vocab)
        reports[song.song_id] = {
            "verdict": "pass" if rep.passed else "reject",
            "reason": rep.reason.value if rep.reason else None,
            "diagnostics": {
                "token_count": rep.diagnostics.token_count,
                "type_token_ratio": rep.diagnostics.type_token_ratio,
                "stopword_hit_ratio": rep.diagnostics.stopword_hit_ratio,
                "oov_ratio": rep.diagnostics.oov_ratio,
            },
        }
    payload = {
        "thresholds": {
            "min_tokens": screening_config.min_tokens,
            "min_type_token_ratio": screening_config.min_type_token_ratio,
            "min_stopword_ratio": screening_config.min_stopword_ratio,
            "max_oov_ratio": screening_config.max_oov_ratio,
        },
        "reports": {sid: reports[sid] for sid in sorted(reports)},
    }
    out = cfg.output_dir / "screening.json"
    artifacts.atomic_write_json(payload, out)
    _write_manifest(cfg, "screen", None, [out])
    rejected = sum(1 for r in reports.values() if r["verdict"] == "reject")
    click.echo(f"screened {len(reports)} songs ({rejected} rejected) -> {out}")


@cli.command("aggregate")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--alpha", type=float, default=None, help="Overrides aggregation.alpha.")
@click.option("--correction", type=click.Choice(["lists", "items"]), default=None)
def aggregate_cmd(config_path, out_dir, alpha, correction):
    """Aggregate annotations into per-song rankings; writes aggregates.json."""
    cfg = _load_cfg(config_path, out_dir)
    alpha = alpha if alpha is not None else cfg.alpha
    correction = correction if correction is not None else cfg.correction
    annotations = ingest.load_annotations(cfg.require("annotations"))
    result = aggregate.aggregate_corpus(annotations, correction=correction, alpha=alpha)
    out = cfg.output_dir / "aggregates.json"
    artifacts.atomic_write_json(artifacts.aggregates_to_json(result), out)
    _write_manifest(cfg, "aggregate", None, [out])
    click.echo(f"aggregated {len(result.songs)} songs -> {out}")


@cli.command("reliability")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None, help="Overrides reliability.seed.")
def reliability_cmd(config_path, out_dir, seed):
    """Reliability and rater-count analyses; writes reliability.json."""
    cfg = _load_cfg(config_path, out_dir)
    seed = _require_seed(seed if seed is not None else cfg.reliability_seed, "reliability")
    annotations = ingest.load_annotations(cfg.require("annotations"))
    per_value = {}
    for v in VALUES:
        matrix, _songs = reliability.build_rating_matrix(annotations, v, seed=seed)
        study = reliability.alpha_subsample_study(
            annotations, v,
            sizes=cfg.reliability_sizes,
            replicates=cfg.reliability_replicates,
            threshold=cfg.reliability_threshold,
            seed=seed,
        )
        posthoc = reliability.subsample_mean_correlation(
            annotations, v,
            sizes=cfg.posthoc_sizes,
            replicates=cfg.posthoc_replicates,
            seed=seed,
        )
        per_value[v.value] = {
            "n_slots": matrix.shape[1],
            "icc2k": reliability.icc2k(matrix),
            "cronbach_alpha": reliability.cronbach_alpha(matrix),
            "alpha_study": {
                "sizes": list(study.sizes),
                "replicates": study.replicates,
                "threshold": study.threshold,
                "alphas": {str(s): list(study.alphas[s]) for s in study.sizes},
                "median_alpha": {str(s): study.median_alpha(s) for s in study.sizes},
                "recommended_size": study.recommended_size,
            },
            "posthoc_mean_r": {str(s): posthoc[s] for s in sorted(posthoc)},
        }
    payload = {
        "seed": seed,
        "construction": "complete matrices via seeded per-song rater-to-slot assignment",
        "values": per_value,
    }
    out = cfg.output_dir / "reliability.json"
    artifacts.atomic_write_json(payload, out)
    _write_manifest(cfg, "reliability", seed, [out])
    click.echo(f"reliability for {len(per_value)} values -> {out}")


def _parse_model_flag(spec: str) -> ModelSpec:
    if "=" not in spec:
        raise click.UsageError(f"--models expects NAME=PATH, got '{spec}'")
    name, path = spec.split("=", 1)
    return ModelSpec(name=name, vectors=Path(path))


def _load_song_filter(path) -> set[str]:
    """Song ids from sample.json, aggregates.json, or a plain JSON list."""
    payload = artifacts.read_json(path)
    if isinstance(payload, list):
        return set(payload)
    if "song_ids" in payload:
        return set(payload["song_ids"])
    if "songs" in payload:
        return set(payload["songs"])
    raise MissingResults(f"{path} holds no song ids")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--models", "model_flags", multiple=True,
              help="NAME=PATH of an embedding table; repeatable; adds to config.")
@click.option("--songs", "songs_path", type=click.Path(), default=None,
              help="Restrict scoring to the song ids in this JSON file "
                   "(sample.json, aggregates.json, or a plain list).")
def score(config_path, out_dir, model_flags, songs_path):
    """Build the scorer-by-normalization grid; writes scores.json."""
    cfg = _load_cfg(config_path, out_dir)
    catalog = ingest.load_song_catalog(cfg.require("catalog"))
    if songs_path is not None:
        wanted = _load_song_filter(songs_path)
        catalog = [s for s in catalog if s.song_id in wanted]
        if not catalog:
            raise MissingResults(f"no catalog song matches the ids in {songs_path}")
    lexicon = ingest.load_value_lexicon(cfg.require("lexicon"))
    specs = list(cfg.models) + [_parse_model_flag(f) for f in model_flags]
    models = {}
    for spec in specs:
        table = ingest.load_embeddings(spec.vectors, model_name=spec.name)
        if spec.doc_vectors is not None:
            docs = ingest.load_doc_vectors(spec.doc_vectors)
            table = type(table)(model_name=table.model_name, vectors=table.vectors,
                                dimension=table.dimension, doc_vectors=docs,
                                n_duplicates=table.n_duplicates)
        models[spec.name] = table
    sets = autoscore.build_score_sets(catalog, lexicon, models)
    out = cfg.output_dir / "scores.json"
    artifacts.atomic_write_json(artifacts.score_sets_to_json(sets), out)
    _write_manifest(cfg, "score", None, [out])
    click.echo(f"{len(sets)} score sets ({len(models)} models + wordcount) -> {out}")


@cli.command("evaluate")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--scores", "scores_path", type=click.Path(), default=None)
@click.option("--aggregates", "aggregates_path", type=click.Path(), default=None)
def evaluate_cmd(config_path, out_dir, scores_path, aggregates_path):
    """Compare score sets against aggregated rankings; writes eval.json."""
    cfg = _load_cfg(config_path, out_dir)
    scores_path = Path(scores_path) if scores_path else cfg.output_dir / "scores.json"
    aggregates_path = (Path(aggregates_path) if aggregates_path
                       else cfg.output_dir / "aggregates.json")
    sets = artifacts.score_sets_from_json(artifacts.read_json(scores_path))
    aggregates = artifacts.aggregates_from_json(artifacts.read_json(aggregates_path))
    catalog = None
    strata = None
    if cfg.eval_strata:
        catalog = ingest.load_song_catalog(cfg.require("catalog"))
        all_strata = _strata_from_config(cfg, catalog)
        by_name = {s.name: s for s in all_strata}
        strata = [by_name[name] for name in cfg.eval_strata if name in by_name]
    summaries = [
        evaluate.eval_scoreset(s, aggregates, catalog=catalog, strata=strata,
                               mark=cfg.eval_mark)
        for s in sets
    ]
    out = cfg.output_dir / "eval.json"
    artifacts.atomic_write_json(artifacts.eval_summaries_to_json(summaries), out)
    _write_manifest(cfg, "evaluate", None, [out])
    click.echo(f"evaluated {len(summaries)} score sets -> {out}")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--aggregates", "aggregates_path", type=click.Path(), default=None)
def describe(config_path, out_dir, aggregates_path):
    """Per-stratum average-rank descriptives; writes strata_summary.json."""
    cfg = _load_cfg(config_path, out_dir)
    aggregates_path = (Path(aggregates_path) if aggregates_path
                       else cfg.output_dir / "aggregates.json")
    aggregates = artifacts.aggregates_from_json(artifacts.read_json(aggregates_path))
    catalog = ingest.load_song_catalog(cfg.require("catalog"))
    strata = _strata_from_config(cfg, catalog)
    summaries = [
        evaluate.strata_rank_summary(aggregates, catalog, spec) for spec in strata
    ]
    out = cfg.output_dir / "strata_summary.json"
    artifacts.atomic_write_json(artifacts.strata_summaries_to_json(summaries), out)
    _write_manifest(cfg, "describe", None, [out])
    click.echo(f"described {len(summaries)} strata -> {out}")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None, help="Overrides mds.seed.")
@click.option("--aggregates", "aggregates_path", type=click.Path(), default=None)
def mds(config_path, out_dir, seed, aggregates_path):
    """Observed-vs-simulated MDS coordinates; writes mds.json."""
    cfg = _load_cfg(config_path, out_dir)
    seed = _require_seed(seed if seed is not None else cfg.mds_seed, "mds")
    aggregates_path = (Path(aggregates_path) if aggregates_path
                       else cfg.output_dir / "aggregates.json")
    aggregates = artifacts.aggregates_from_json(artifacts.read_json(aggregates_path))
    profiles = np.array([aggregates.songs[sid].mean_profile
                         for sid in sorted(aggregates.songs)])
    observed_corr = evaluate.profile_correlation(profiles)
    observed = evaluate.classical_mds(evaluate.correlation_to_dissimilarity(observed_corr))

    reference = ingest.load_correlation_matrix(cfg.require("reference_correlation"))
    sim = evaluate.simulate_from_correlation(reference, cfg.mds_n_samples, seed)
    sim_corr = np.corrcoef(sim.samples, rowvar=False)
    simulated = evaluate.classical_mds(evaluate.correlation_to_dissimilarity(sim_corr))

    payload = {
        "seed": seed,
        "n_samples": cfg.mds_n_samples,
        "n_songs": int(profiles.shape[0]),
        "repaired": sim.repaired,
        "observed": {v.value: [float(observed[i, 0]), float(observed[i, 1])]
                     for i, v in enumerate(VALUES)},
        "simulated": {v.value: [float(simulated[i, 0]), float(simulated[i, 1])]
                      for i, v in enumerate(VALUES)},
    }
    out = cfg.output_dir / "mds.json"
    artifacts.atomic_write_json(payload, out)
    _write_manifest(cfg, "mds", seed, [out])
    click.echo(f"mds coordinates -> {out}")


@cli.command("plot-data")
@click.option("--kind", required=True, type=click.Choice(PLOT_KINDS))
@click.option("--results", "results_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
def plot_data(kind, results_path, out_path):
    """Flatten a results file into plot-ready CSV."""
    payload = artifacts.read_json(results_path)
    rows, columns = emit_plot_rows(payload, kind)
    _atomic_write_csv(rows, columns, Path(out_path))
    click.echo(f"{len(rows)} rows -> {out_path}")


def emit_plot_rows(payload: dict, kind: str) -> tuple[list[dict], list[str]]:
    """One row per plotted point; stable, documented column names."""
    if kind == "rank_corr":
        columns = ["scorer", "normalization", "mean_tau", "sd_tau",
                   "frac_above_mark", "n_songs", "n_excluded"]
        rows = []
        for s in payload.get("score_sets", []):
            rows.append({
                "scorer": s["scorer"],
                "normalization": s["normalization"],
                "mean_tau": s["mean_tau"],
                "sd_tau": s["sd_tau"],
                "frac_above_mark": s["frac_above_mark"],
                "n_songs": s["n_songs"],
                "n_excluded": s["n_excluded_human_tied"] + s["n_excluded_model_tied"],
            })
        return rows, columns
    if kind == "strata_trend":
        columns = ["stratum", "level", "value", "group", "count", "mean_rank",
                   "ci_halfwidth"]
        groups = payload.get("groups", {})
        rows = []
        for stratum, data in payload.get("strata", {}).items():
            for level in data["levels"]:
                for v in VALUES:
                    ci = level["ci_halfwidth"]
                    rows.append({
                        "stratum": stratum,
                        "level": level["level"],
                        "value": v.value,
                        "group": groups.get(v.value),
                        "count": level["count"],
                        "mean_rank": level["mean_rank"][v.value],
                        "ci_halfwidth": None if ci is None else ci[v.value],
                    })
        return rows, columns
    if kind == "mds_points":
        columns = ["set", "value", "x", "y"]
        rows = []
        for label in ("observed", "simulated"):
            for v in VALUES:
                x, y = payload[label][v.value]
                rows.append({"set": label, "value": v.value, "x": x, "y": y})
        return rows, columns
    if kind == "alpha_curves":
        columns = ["value", "size", "replicate", "alpha"]
        rows = []
        for value_name, entry in payload.get("values", {}).items():
            study = entry["alpha_study"]
            for size in study["sizes"]:
                for rep, alpha in enumerate(study["alphas"][str(size)]):
                    rows.append({"value": value_name, "size": size,
                                 "replicate": rep, "alpha": alpha})
        return rows, columns
    raise MissingResults(f"unknown plot kind '{kind}'")


def main():
    try:
        cli(auto_envvar_prefix="LYRICVALUES", standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(130)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        sys.exit(exc.exit_code)
    except LyricValuesError as exc:
        print(json.dumps(exc.record()), file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
