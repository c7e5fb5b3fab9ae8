"""Acceptance suite: one test per release criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s`. Statistical checks use
frozen seeds so every run is deterministic; each criterion states its
tolerance inline.
"""

import json
import math
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import rankdata

from lyricvalues import aggregate, autoscore, evaluate, reliability, sampler
from lyricvalues.aggregate import scores_to_ranking
from lyricvalues.model import EmbeddingTable, SongRecord, VALUES, ValueId, ValueLexicon
from lyricvalues.synthetic import oracle_scores, pilot_ratings, planted_corpus
from oracles import naive_tau_b, pairwise_distances


@contextmanager
def criterion(number, name):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {number:2d} {name}: FAIL ({time.time() - start:.1f}s)")
        raise
    print(f"\nACCEPTANCE {number:2d} {name}: PASS ({time.time() - start:.1f}s)")


def exact_beta_tails(r):
    """Exact binomial tails of sorted normalized ranks, by enumeration."""
    rs = sorted(Fraction(float(x)) for x in r)
    m = len(rs)
    return [
        sum(math.comb(m, l) * rr**l * (1 - rr) ** (m - l) for l in range(k, m + 1))
        for k, rr in enumerate(rs, start=1)
    ]


def test_criterion_1_rra_oracle_equivalence():
    with criterion(1, "RRA oracle equivalence (500 cases, MC 3SE + exact 1e-12)"):
        start = time.time()
        rng = np.random.default_rng(4)
        n_draws = 100_000
        for _ in range(500):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(2, 6))
            scores = rng.integers(0, 4, (m, n))
            ranks = np.array([rankdata(-s, method="average") for s in scores])
            r = ranks[:, 0] / n
            rho = aggregate.rra_rho(r)
            tails = exact_beta_tails(r)
            k_star = int(np.argmin(tails))
            exact = float(tails[k_star])
            assert abs(rho - exact) <= 1e-12
            # independent uniform-order-statistic simulation of the
            # minimized tail, at the enumeration oracle's argmin
            u = np.sort(rng.random((n_draws, m)), axis=1)
            beta_hat = float((u[:, k_star] <= np.sort(r)[k_star]).mean())
            se = math.sqrt(exact * (1 - exact) / n_draws)
            if se > 0:
                assert abs(beta_hat - exact) <= 3 * se
            else:
                assert beta_hat == exact
        assert time.time() - start < 120


def test_criterion_2_null_calibration():
    with criterion(2, "null calibration (1e4 songs, corrected p<=.05 rate <= .055)"):
        start = time.time()
        rng = np.random.default_rng(20240502)
        n_songs, m = 10_000, 25
        ranks = np.tile(np.arange(1, 11, dtype=float), (n_songs * m, 1))
        ranks = rng.permuted(ranks, axis=1).reshape(n_songs, m, 10)
        normalized = ranks.transpose(0, 2, 1).reshape(n_songs * 10, m) / 10.0
        rho = aggregate.rra_rho_many(normalized)
        p = np.minimum(1.0, rho * m)
        rate = float((p <= 0.05).mean())
        assert rate <= 0.055, f"significant-value rate {rate}"

        cyclic = np.array([[((i + j) % 10) + 1 for i in range(10)]
                           for j in range(10)], dtype=float)
        agg = aggregate.aggregate_song("cyclic", cyclic)
        assert np.all(agg.truncated_rank == 5.5)
        assert time.time() - start < 120


def test_criterion_3_kendall_tau_exact():
    with criterion(3, "tau_b exact vs O(n^2) oracle (1e4 pairs) and bounds"):
        x = np.arange(1.0, 11.0)
        assert evaluate.kendall_tau_b(x, x) == 1.0
        assert evaluate.kendall_tau_b(x, x[::-1]) == -1.0
        rng = np.random.default_rng(77)
        checked = 0
        while checked < 10_000:
            n = int(rng.integers(2, 13))
            a = rankdata(rng.integers(0, 5, n), method="average")
            b = rankdata(rng.integers(0, 5, n), method="average")
            if np.all(a == a[0]) or np.all(b == b[0]):
                continue
            assert evaluate.kendall_tau_b(a, b) == naive_tau_b(a, b)
            checked += 1


def test_criterion_4_reliability_formulas():
    with criterion(4, "alpha 8/9 and ICC(2,k) 0.63158 on the hand matrix"):
        matrix = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
        assert reliability.cronbach_alpha(matrix) == pytest.approx(8 / 9, abs=1e-12)
        assert reliability.icc2k(matrix) == pytest.approx(0.63158, abs=1e-5)
        col = np.array([2.0, 7.0, 4.0, 9.0])
        identical = np.column_stack([col, col, col])
        assert reliability.icc2k(identical) == pytest.approx(1.0, abs=1e-12)
        assert reliability.cronbach_alpha(identical) == pytest.approx(1.0, abs=1e-12)


def test_criterion_5_rater_count_study():
    with criterion(5, "alpha study shape, recommended size, posthoc curve"):
        annotations = pilot_ratings(n_songs=20, n_raters=55, song_mean_sd=30.0,
                                    noise_sd=20.0, seed=31)
        study = reliability.alpha_subsample_study(annotations, ValueId.POWER, seed=5)
        assert study.sizes == tuple(range(5, 55, 5))
        assert len(study.sizes) == 10
        assert all(len(study.alphas[s]) == 10 for s in study.sizes)
        assert study.recommended_size is not None
        assert study.median_alpha(study.recommended_size) >= 0.7

        posthoc = reliability.subsample_mean_correlation(
            annotations, ValueId.POWER, sizes=(5, 10, 15, 20), replicates=100, seed=6)
        assert posthoc[20] > posthoc[5]
        full = reliability.subsample_mean_correlation(
            annotations, ValueId.POWER, sizes=(55,), replicates=3, seed=7)
        assert full[55] == 1.0


def test_criterion_6_sampling_targets():
    with criterion(6, "concentration 5.706 +- 1e-3; rare-bin rate .0522 +- .005"):
        a = sampler.choose_concentration([98, 1, 1], 0.05)
        assert a == pytest.approx(5.706, abs=1e-3)

        catalog = [
            SongRecord(song_id=f"s{i:03d}", title="t", artist="a", release_year=1990,
                       popularity=1.0, lyric_topic=0, lyrics_text="x",
                       genre_topic=0 if i < 98 else (1 if i == 98 else 2))
            for i in range(100)
        ]
        spec = sampler.StratumSpec("genre_topic", 3)
        dist = sampler.map_smooth([98, 1, 1], 6.0, "genre_topic")
        weights = sampler.song_weights(catalog, [(spec, dist)])
        hits = np.zeros(2)
        for seed in range(100_000):
            (sid,) = sampler.sample_songs(catalog, weights, 1, seed=seed)
            if sid == "s098":
                hits[0] += 1
            elif sid == "s099":
                hits[1] += 1
        for freq in hits / 100_000:
            assert freq == pytest.approx(6 / 115, abs=0.005)


def test_criterion_7_scoring_grid():
    with criterion(7, "24 score sets; rank order invariant under song_z/minmax"):
        lexicon = ValueLexicon({v: frozenset({v.value.lower()}) for v in VALUES})
        vocab = {v.value.lower(): np.eye(10)[i][:5] + 0.1 for i, v in enumerate(VALUES)}
        tables = {
            f"model{i}": EmbeddingTable(model_name=f"model{i}", vectors=vocab,
                                        dimension=5)
            for i in range(5)
        }
        corpus = [
            SongRecord(song_id=f"s{i}", title="t", artist="a", release_year=1990,
                       popularity=1.0, genre_topic=0, lyric_topic=0,
                       lyrics_text="power hedonism security tradition conformity")
            for i in range(4)
        ]
        sets = autoscore.build_score_sets(corpus, lexicon, tables)
        assert len(sets) == 24

        rng = np.random.default_rng(123)
        profiles = {f"s{i}": rng.uniform(-100, 100, 10) for i in range(1000)}
        base = {sid: scores_to_ranking(p) for sid, p in profiles.items()}
        for scheme in ("song_z", "song_minmax"):
            normalized, _ = autoscore.normalize_scores(profiles, scheme)
            for sid, profile in normalized.items():
                assert np.array_equal(scores_to_ranking(profile), base[sid])


def test_criterion_8_mds_round_trip():
    with criterion(8, "planar distances within 1e-6; identity pipeline ratio < 1.2"):
        rng = np.random.default_rng(8)
        points = rng.uniform(-10, 10, (10, 2))
        d = np.array([[np.linalg.norm(a - b) for b in points] for a in points])
        coords = evaluate.classical_mds(d, dims=2)
        assert np.array(pairwise_distances(coords)) == pytest.approx(
            np.array(pairwise_distances(points)), abs=1e-6)

        # ten mutually equidistant points need nine dimensions, so the
        # identity-correlation check runs in the full retained subspace
        sim = evaluate.simulate_from_correlation(np.eye(10), 10_000, seed=9)
        corr = np.corrcoef(sim.samples, rowvar=False)
        pipeline = evaluate.classical_mds(
            evaluate.correlation_to_dissimilarity(corr), dims=9)
        dists = pairwise_distances(pipeline)
        assert max(dists) / min(dists) < 1.2


def test_criterion_9_end_to_end_recovery():
    with criterion(9, "planted hierarchy: top value >= 90%; oracle tau > 0.5"):
        start = time.time()
        catalog, annotations, planted = planted_corpus(
            n_songs=50, n_raters=25, noise_sd=20.0, seed=11)
        corpus = aggregate.aggregate_corpus(annotations)
        matches = sum(
            corpus.songs[sid].ranking.order[0] is VALUES[int(np.argmax(planted[sid]))]
            for sid in corpus.songs
        )
        assert matches / 50 >= 0.90

        oracle = oracle_scores(planted, noise_sd=10.0, seed=12)
        taus = [
            evaluate.kendall_tau_b(scores_to_ranking(oracle[sid]),
                                   corpus.songs[sid].ranking.truncated_rank)
            for sid in corpus.songs
        ]
        assert float(np.mean(taus)) > 0.5
        assert time.time() - start < 60


# ---------------------------------------------------------------------------
# criterion 10: byte-identical stochastic commands

def _write_toy_workspace(root):
    import csv

    rng = np.random.default_rng(55)
    with open(root / "songs.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["song_id", "title", "artist", "release_year", "popularity",
                         "genre_topic", "lyric_topic", "lyrics"])
        for i in range(12):
            writer.writerow([f"s{i:02d}", f"t{i}", "a", 1890 + (i % 14) * 10,
                             float(i + 1), i % 25, i % 9,
                             "power money pleasure thrill freedom custom"])
    spacing = np.linspace(90, -90, 10)
    with open(root / "annotations.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rater_id", "song_id", "value", "score", "confidence"])
        for i in range(4):
            perm = rng.permutation(10)
            means = np.empty(10)
            means[perm] = spacing
            for j in range(8):
                noisy = np.clip(means + rng.normal(0, 10, 10), -100, 100)
                for k, v in enumerate(VALUES):
                    writer.writerow([f"r{j}", f"s{i:02d}", v.value,
                                     f"{noisy[k]:.2f}", 80])
    with open(root / "corr.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([v.value for v in VALUES])
        writer.writerows(np.eye(10).tolist())
    (root / "config.toml").write_text(
        """\
[paths]
catalog = "songs.csv"
annotations = "annotations.csv"
reference_correlation = "corr.csv"
output_dir = "out"

[sampling]
n = 6
seed = 42

[reliability]
seed = 7
sizes = [3, 5]
replicates = 3
posthoc_sizes = [3]
posthoc_replicates = 4

[mds]
n_samples = 500
seed = 3
""",
        encoding="utf-8",
    )


def test_criterion_10_determinism(tmp_path):
    with criterion(10, "stochastic commands byte-identical across re-runs"):
        _write_toy_workspace(tmp_path)
        cfg = str(tmp_path / "config.toml")

        def run(cmd):
            res = subprocess.run(
                [sys.executable, "-m", "lyricvalues.cli", cmd, "--config", cfg],
                capture_output=True, text=True)
            assert res.returncode == 0, res.stderr
            return res

        # aggregates.json is an input of the mds command
        run("aggregate")
        for cmd, artifact in (("sample", "sample.json"),
                              ("reliability", "reliability.json"),
                              ("mds", "mds.json")):
            run(cmd)
            first = (tmp_path / "out" / artifact).read_bytes()
            run(cmd)
            assert (tmp_path / "out" / artifact).read_bytes() == first
            payload = json.loads(first)
            assert payload["seed"] is not None
