import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lyricvalues import autoscore
from lyricvalues.aggregate import scores_to_ranking
from lyricvalues.errors import (
    EmptyText,
    NoTokensInVocabulary,
    NoVocabularyOverlap,
    ZeroVector,
)
from lyricvalues.model import (
    EmbeddingTable,
    SongRecord,
    VALUES,
    ValueId,
    ValueLexicon,
)


def make_table(vectors, name="toy", doc_vectors=None):
    arrs = {t: np.asarray(v, dtype=float) for t, v in vectors.items()}
    dim = len(next(iter(arrs.values())))
    return EmbeddingTable(model_name=name, vectors=arrs, dimension=dim,
                          doc_vectors=doc_vectors)


class TestWordcount:
    def test_full_hit_rate(self, tiny_lexicon):
        profile = autoscore.wordcount_scores("power money power", tiny_lexicon)
        assert profile[VALUES.index(ValueId.POWER)] == 1.0
        assert profile.sum() == 1.0

    def test_no_hits_all_zero(self, tiny_lexicon):
        profile = autoscore.wordcount_scores("nothing matches here at all", tiny_lexicon)
        assert np.all(profile == 0.0)

    def test_wildcard_prefix_counting(self, tiny_lexicon):
        profile = autoscore.wordcount_scores(
            "achievement achieving goals beyond us", tiny_lexicon)
        assert profile[VALUES.index(ValueId.ACHIEVEMENT)] == pytest.approx(2 / 5)

    def test_multi_value_token_counts_for_each(self):
        patterns = {v: frozenset({f"zz{v.value.lower()}"}) for v in VALUES}
        patterns[ValueId.POWER] = frozenset({"gold"})
        patterns[ValueId.SECURITY] = frozenset({"gold"})
        lex = ValueLexicon(patterns)
        profile = autoscore.wordcount_scores("gold rush", lex)
        assert profile[VALUES.index(ValueId.POWER)] == 0.5
        assert profile[VALUES.index(ValueId.SECURITY)] == 0.5

    def test_empty_text(self, tiny_lexicon):
        with pytest.raises(EmptyText):
            autoscore.wordcount_scores("!!!", tiny_lexicon)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_bag_of_words_shuffle_invariance(self, seed):
        lex = ValueLexicon({v: frozenset({v.value.lower()[:4] + "*"}) for v in VALUES})
        rng = np.random.default_rng(seed)
        words = ["power", "achieve", "hedonist", "blue", "moon", "trad", "stimulus"]
        order = rng.permutation(len(words))
        base = autoscore.wordcount_scores(" ".join(words), lex)
        shuffled = autoscore.wordcount_scores(" ".join(words[i] for i in order), lex)
        assert np.allclose(base, shuffled)
        assert np.all((base >= 0) & (base <= 1))


class TestCentroids:
    def lexicon_with(self, power_patterns):
        patterns = {v: frozenset({v.value.lower()}) for v in VALUES}
        patterns[ValueId.POWER] = frozenset(power_patterns)
        return ValueLexicon(patterns)

    def full_vocab_table(self, extra=None):
        vectors = {v.value.lower(): np.eye(12)[i][:3] + 1 for i, v in enumerate(VALUES)}
        vectors.update(extra or {})
        return make_table(vectors)

    def test_single_word_centroid_is_the_vector(self):
        lex = self.lexicon_with({"power"})
        table = self.full_vocab_table({"power": [3.0, 4.0, 0.0]})
        cents = autoscore.value_centroids(lex, table)
        assert np.allclose(cents.vectors[VALUES.index(ValueId.POWER)], [3, 4, 0])
        assert cents.coverage[ValueId.POWER] == 1

    def test_opposite_vectors_flag_degenerate(self):
        lex = self.lexicon_with({"up", "down"})
        table = self.full_vocab_table({"up": [1.0, 0, 0], "down": [-1.0, 0, 0]})
        cents = autoscore.value_centroids(lex, table)
        assert ValueId.POWER in cents.degenerate
        assert np.allclose(cents.vectors[VALUES.index(ValueId.POWER)], 0.0)

    def test_wildcard_expansion_hand_average(self):
        # non-colliding single words for the other nine values
        patterns = {v: frozenset({f"w{i}"}) for i, v in enumerate(VALUES)}
        patterns[ValueId.POWER] = frozenset({"achiev*"})
        vectors = {f"w{i}": [1.0, 2.0, 3.0] for i in range(10)}
        vectors.update({
            "achieve": [1.0, 0.0, 0.0],
            "achiever": [0.0, 1.0, 0.0],
            "zebra": [9.0, 9.0, 9.0],
        })
        cents = autoscore.value_centroids(ValueLexicon(patterns), make_table(vectors))
        assert np.allclose(cents.vectors[VALUES.index(ValueId.POWER)], [0.5, 0.5, 0.0])
        assert cents.coverage[ValueId.POWER] == 2

    def test_no_overlap_raises(self):
        lex = self.lexicon_with({"notinvocab"})
        table = self.full_vocab_table()
        with pytest.raises(NoVocabularyOverlap):
            autoscore.value_centroids(lex, table)


class TestEmbeddingScores:
    def centroids(self):
        vecs = np.zeros((10, 2))
        vecs[0] = [1.0, 0.0]
        vecs[1] = [0.0, 1.0]
        vecs[2:] = [1.0, 1.0]
        return autoscore.ValueCentroids(model_name="toy", vectors=vecs,
                                        coverage={v: 1 for v in VALUES},
                                        degenerate=frozenset())

    def test_identical_direction_scores_one(self):
        scores = autoscore.embedding_scores(np.array([2.0, 0.0]), self.centroids())
        assert scores[0] == pytest.approx(1.0)

    def test_orthogonal_scores_zero(self):
        scores = autoscore.embedding_scores(np.array([0.0, 3.0]), self.centroids())
        assert scores[0] == pytest.approx(0.0)

    def test_mean_document_vector_cosine(self):
        # doc = mean of (1,0) and (0,1); cosine to (1,0) is 0.7071
        table = make_table({"sun": [1.0, 0.0], "moon": [0.0, 1.0]})
        doc = autoscore.document_vector("sun moon", table)
        assert np.allclose(doc, [0.5, 0.5])
        scores = autoscore.embedding_scores(doc, self.centroids())
        assert scores[0] == pytest.approx(np.sqrt(0.5), abs=1e-9)

    def test_scale_invariance(self):
        doc = np.array([0.3, 0.7])
        cents = self.centroids()
        a = autoscore.embedding_scores(doc, cents)
        b = autoscore.embedding_scores(doc * 17.0, cents)
        scaled = autoscore.ValueCentroids(model_name="toy", vectors=cents.vectors * 3.5,
                                          coverage=cents.coverage, degenerate=frozenset())
        c = autoscore.embedding_scores(doc, scaled)
        assert np.allclose(a, b) and np.allclose(a, c)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            autoscore.embedding_scores(np.zeros(2), self.centroids())

    def test_no_tokens_in_vocabulary(self):
        table = make_table({"sun": [1.0, 0.0]})
        with pytest.raises(NoTokensInVocabulary):
            autoscore.document_vector("moon rise", table)


class TestNormalize:
    def profiles(self):
        return {
            "a": np.arange(10, dtype=float),
            "b": np.arange(10, dtype=float) * 2 + 1,
            "c": np.linspace(-5, 5, 10),
        }

    def test_null_is_identity(self):
        out, degenerate = autoscore.normalize_scores(self.profiles(), "null")
        for k, v in self.profiles().items():
            assert np.array_equal(out[k], v)
        assert degenerate == 0

    def test_song_z_hand_example(self):
        out, _ = autoscore.normalize_scores({"a": np.array([1.0, 2.0, 3.0])}, "song_z")
        assert np.allclose(out["a"], [-1.0, 0.0, 1.0])

    def test_song_minmax_hand_example(self):
        out, _ = autoscore.normalize_scores({"a": np.array([2.0, 4.0, 6.0])}, "song_minmax")
        assert np.allclose(out["a"], [0.0, 0.5, 1.0])

    def test_corpus_z_moments(self):
        out, _ = autoscore.normalize_scores(self.profiles(), "corpus_z")
        mat = np.array([out[k] for k in self.profiles()])
        assert np.allclose(mat.mean(axis=0), 0.0, atol=1e-9)
        assert np.allclose(mat.var(axis=0, ddof=1), 1.0, atol=1e-9)

    def test_degenerate_song_flags(self):
        flat = {"a": np.full(10, 3.0), "b": np.arange(10, dtype=float)}
        z, dz = autoscore.normalize_scores(flat, "song_z")
        mm, dm = autoscore.normalize_scores(flat, "song_minmax")
        assert dz == 1 and dm == 1
        assert np.all(z["a"] == 0.0)
        assert np.all(mm["a"] == 0.5)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_within_song_order_invariance(self, seed):
        rng = np.random.default_rng(seed)
        profiles = {f"s{i}": rng.uniform(-100, 100, 10) for i in range(4)}
        base = {sid: scores_to_ranking(p) for sid, p in profiles.items()}
        for scheme in ("song_z", "song_minmax"):
            out, _ = autoscore.normalize_scores(profiles, scheme)
            for sid in profiles:
                assert np.array_equal(scores_to_ranking(out[sid]), base[sid])


class TestScoreGrid:
    def corpus(self):
        return [
            SongRecord(song_id=f"s{i}", title="t", artist="a", release_year=1990,
                       popularity=1.0, genre_topic=0, lyric_topic=0,
                       lyrics_text="power money achievement hedonism fun")
            for i in range(3)
        ]

    def model_tables(self, n):
        vocab = {v.value.lower(): np.eye(10)[i][:4] for i, v in enumerate(VALUES)}
        vocab["power"] = np.array([1.0, 1, 0, 0])
        vocab["money"] = np.array([1.0, 0, 1, 0])
        return {f"m{i}": make_table(vocab, name=f"m{i}") for i in range(n)}

    def lexicon(self):
        return ValueLexicon({v: frozenset({v.value.lower()}) for v in VALUES})

    def test_five_models_give_24_sets(self):
        sets = autoscore.build_score_sets(self.corpus(), self.lexicon(),
                                          self.model_tables(5))
        assert len(sets) == 24
        scorers = {s.scorer for s in sets}
        assert scorers == {"wordcount", "m0", "m1", "m2", "m3", "m4"}
        assert all(len(s.profiles) == 3 for s in sets)

    def test_one_model_gives_8(self):
        sets = autoscore.build_score_sets(self.corpus(), self.lexicon(),
                                          self.model_tables(1))
        assert len(sets) == 8

    def test_no_models_gives_4(self):
        sets = autoscore.build_score_sets(self.corpus(), self.lexicon(), {})
        assert len(sets) == 4
        assert {s.normalization for s in sets} == set(autoscore.NORMALIZATIONS)

    def test_doc_vector_model_used(self):
        table = self.model_tables(1)["m0"]
        docs = {f"s{i}": np.array([1.0, 0, 0, 0]) for i in range(3)}
        table = EmbeddingTable(model_name="docs", vectors=table.vectors,
                               dimension=table.dimension, doc_vectors=docs)
        sets = autoscore.build_score_sets(self.corpus(), self.lexicon(),
                                          {"docs": table})
        raw = [s for s in sets if s.scorer == "docs" and s.normalization == "null"]
        profile = raw[0].profiles["s0"]
        # cosine((1,0,0,0), centroid(POWER)=(1,1,0,0)) = 1/sqrt(2)
        assert profile[0] == pytest.approx(np.sqrt(0.5), abs=1e-9)
