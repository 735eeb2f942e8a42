"""Masking, candidate generation, and the filter pipeline."""

from maskattack.attack import AttackConfig
from maskattack.backends import toy_backends
from maskattack.core import MASK_TOKEN, AttackMode, PerturbationKind
from maskattack.fixtures import food_fixture
from maskattack.perturb import filter_candidates, generate_candidates, make_masked


class TestMakeMasked:
    def test_replace(self, food_sentence):
        assert make_masked(food_sentence, 3, PerturbationKind.REPLACE) == [
            "the", "food", "was", MASK_TOKEN,
        ]

    def test_insert_left(self, food_sentence):
        assert make_masked(food_sentence, 3, PerturbationKind.INSERT_LEFT) == [
            "the", "food", "was", MASK_TOKEN, "good",
        ]

    def test_insert_right_at_front(self, food_sentence):
        assert make_masked(food_sentence, 0, PerturbationKind.INSERT_RIGHT) == [
            "the", MASK_TOKEN, "food", "was", "good",
        ]

    def test_exactly_one_mask(self, food_sentence):
        for kind in PerturbationKind:
            masked = make_masked(food_sentence, 2, kind)
            assert masked.count(MASK_TOKEN) == 1


class TestGenerateCandidates:
    def test_lookup_truncated(self, food_sentence):
        backends = toy_backends(food_fixture(candidates=("bad", "nice", "ok")))
        out = generate_candidates(backends.mlm, food_sentence, 3, PerturbationKind.REPLACE, k=2)
        assert [w for w, _ in out] == ["bad", "nice"]

    def test_unlisted_context(self, food_sentence):
        backends = toy_backends(food_fixture())
        out = generate_candidates(backends.mlm, food_sentence, 0, PerturbationKind.REPLACE, k=5)
        assert out == []

    def test_k_zero(self, food_sentence):
        backends = toy_backends(food_fixture())
        assert generate_candidates(backends.mlm, food_sentence, 3, PerturbationKind.REPLACE, 0) == []


def _run_filter(fixture, raw, config, sentence, kind=PerturbationKind.REPLACE, position=3):
    backends = toy_backends(fixture)
    return filter_candidates(
        raw, sentence, sentence, position, kind, config,
        backends.pos_tagger, backends.antonyms, backends.encoder,
    )


class TestFilterStages:
    def test_antonym_removed_on_sentiment_task(self, food_sentence):
        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.R, sim_threshold=0.7, sentiment_task=True)
        out = _run_filter(fixture, [("bad", 1.0), ("nice", 0.5)], config, food_sentence)
        assert [c.word for c in out.candidates] == ["nice"]
        assert out.provenance["antonym"] == 1

    def test_antonym_kept_on_non_sentiment_task(self, food_sentence):
        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.R, sim_threshold=0.7, sentiment_task=False)
        out = _run_filter(fixture, [("bad", 1.0), ("nice", 0.5)], config, food_sentence)
        assert [c.word for c in out.candidates] == ["bad", "nice"]

    def test_stopword_removed_for_insert(self, food_sentence):
        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.I, sim_threshold=0.0, sentiment_task=False)
        out = _run_filter(
            fixture, [("the", 1.0)], config, food_sentence, kind=PerturbationKind.INSERT_LEFT
        )
        assert out.candidates == ()
        assert out.provenance["stopword"] == 1

    def test_similarity_threshold(self, food_sentence):
        # one swapped token in four -> cosine 0.75, under the 0.8 default
        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.R, sim_threshold=0.8, sentiment_task=False)
        out = _run_filter(fixture, [("nice", 1.0)], config, food_sentence)
        assert out.candidates == ()
        assert out.provenance["similarity"] == 1

    def test_identity_candidate_removed(self, food_sentence):
        fixture = food_fixture(candidates=("good", "nice"))
        config = AttackConfig(mode=AttackMode.R, sim_threshold=0.7, sentiment_task=False)
        out = _run_filter(fixture, [("good", 1.0), ("nice", 0.5)], config, food_sentence)
        assert [c.word for c in out.candidates] == ["nice"]
        assert out.provenance["identity"] == 1

    def test_pos_mismatch_removed(self, food_sentence):
        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.R, sim_threshold=0.0, sentiment_task=False)
        out = _run_filter(fixture, [("food", 1.0)], config, food_sentence)  # NOUN vs ADJ
        assert out.candidates == ()
        assert out.provenance["pos"] == 1

    def test_pos_not_applied_to_inserts(self, food_sentence):
        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.I, sim_threshold=0.0, sentiment_task=False)
        out = _run_filter(
            fixture, [("food", 1.0)], config, food_sentence, kind=PerturbationKind.INSERT_LEFT
        )
        # 'food' already appears in the sentence but not adjacent to slot 3's left side
        assert out.provenance["pos"] == 0

    def test_adjacent_duplicate_insert_removed(self, food_sentence):
        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.I, sim_threshold=0.0, sentiment_task=False)
        out = _run_filter(
            fixture, [("good", 1.0)], config, food_sentence, kind=PerturbationKind.INSERT_LEFT
        )
        assert out.candidates == ()
        assert out.provenance["duplicate"] == 1

    def test_insert_antonym_of_adjacent_word_removed(self, food_sentence):
        # inserting left of 'good' puts 'bad' next to it; antonym rule keys
        # on both neighbors for inserts
        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.I, sim_threshold=0.0, sentiment_task=True)
        out = _run_filter(
            fixture, [("bad", 1.0)], config, food_sentence, kind=PerturbationKind.INSERT_LEFT
        )
        assert out.candidates == ()
        assert out.provenance["antonym"] == 1

    def test_insert_antonym_elsewhere_survives(self, food_sentence):
        # same candidate inserted away from 'good' is not adjacent to its
        # antonym, so the sentiment rule lets it through
        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.I, sim_threshold=0.0, sentiment_task=True)
        out = _run_filter(
            fixture, [("bad", 1.0)], config, food_sentence,
            kind=PerturbationKind.INSERT_LEFT, position=1,
        )
        assert [c.word for c in out.candidates] == ["bad"]

    def test_similarity_measured_against_original(self, food_sentence):
        # current sentence has drifted; the threshold still compares to the original
        from maskattack.core import PerturbationOp, apply_perturbation

        fixture = food_fixture()
        drifted = apply_perturbation(
            food_sentence, PerturbationOp(PerturbationKind.REPLACE, 1, "meal", "food")
        )
        config = AttackConfig(mode=AttackMode.R, sim_threshold=0.7, sentiment_task=False)
        backends = toy_backends(fixture)
        out = filter_candidates(
            [("nice", 1.0)], food_sentence, drifted, 3, PerturbationKind.REPLACE,
            config, backends.pos_tagger, backends.antonyms, backends.encoder,
        )
        # vs original: 2 shared of 4 -> 0.5 < 0.7; vs drifted it would be 0.75
        assert out.candidates == ()
        assert out.provenance["similarity"] == 1

    def test_filter_deterministic(self, food_sentence):
        fixture = food_fixture(candidates=("bad", "nice", "ok"))
        config = AttackConfig(mode=AttackMode.R, sim_threshold=0.7, sentiment_task=True)
        raw = [("bad", 1.0), ("nice", 0.5), ("ok", 0.33)]
        first = _run_filter(fixture, raw, config, food_sentence)
        second = _run_filter(fixture, raw, config, food_sentence)
        assert first == second

    def test_surviving_candidates_meet_threshold(self, food_sentence):
        fixture = food_fixture(candidates=("bad", "nice", "ok"))
        config = AttackConfig(mode=AttackMode.R, sim_threshold=0.7, sentiment_task=False)
        out = _run_filter(fixture, [("bad", 1.0), ("nice", 0.5)], config, food_sentence)
        assert all(c.similarity >= config.sim_threshold for c in out.candidates)
        assert all(c.word != "good" for c in out.candidates)

    def test_candidate_sentence_matches_op(self, food_sentence):
        from maskattack.core import apply_perturbation

        fixture = food_fixture()
        config = AttackConfig(mode=AttackMode.R, sim_threshold=0.0, sentiment_task=False)
        out = _run_filter(fixture, [("nice", 1.0)], config, food_sentence)
        cand = out.candidates[0]
        assert cand.sentence == apply_perturbation(food_sentence, cand.op)
