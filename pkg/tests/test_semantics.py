import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vizref.ontology import cosine
from vizref.semantics import (SemanticVectorizer, SlotFiller, detect_slot_candidates,
                              prune_and_merge, vectorize)
from vizref.text import pos_tag, tokenize


def tokens_of(text):
    return pos_tag(tokenize(text))


class TestDetectCandidates:
    def test_battery_by_day_of_week(self, space):
        tokens = tokens_of("show battery by day of week")
        found = {(c.surface, c.slot) for c in detect_slot_candidates(tokens, space)}
        assert ("battery", "CRIME_TYPE") in found
        assert ("day", "DAY") in found
        assert ("week", "DAY") in found

    def test_no_lexicon_content_gives_empty(self, space):
        tokens = tokens_of("can you do it again")
        assert detect_slot_candidates(tokens, space) == []

    def test_months_and_year_both_detected_pre_merge(self, space):
        tokens = tokens_of("for months of the year")
        found = {(c.surface, c.slot) for c in detect_slot_candidates(tokens, space)}
        assert ("months", "MONTH") in found
        assert ("year", "YEAR") in found


class TestPruneAndMerge:
    def test_of_linked_merge_takes_first_slot(self, space):
        tokens = tokens_of("for months of the year")
        fillers = prune_and_merge(detect_slot_candidates(tokens, space), tokens)
        assert len(fillers) == 1
        assert fillers[0].surface == "months of the year"
        assert fillers[0].slot == "MONTH"
        assert fillers[0].value == "months"

    def test_single_candidate_passes_through(self, space):
        tokens = tokens_of("show me battery")
        fillers = prune_and_merge(detect_slot_candidates(tokens, space), tokens)
        assert [(f.surface, f.slot) for f in fillers] == [("battery", "CRIME_TYPE")]

    def test_candidates_inside_reference_span_are_dropped(self, space):
        tokens = tokens_of("show the battery one by month")
        candidates = detect_slot_candidates(tokens, space)
        fillers = prune_and_merge(candidates, tokens, ref_span=(1, 4))
        assert all(f.slot != "CRIME_TYPE" for f in fillers)
        assert any(f.slot == "MONTH" for f in fillers)

    def test_merge_is_scan_order_independent(self, space):
        tokens = tokens_of("show battery by day of the week in downtown")
        candidates = detect_slot_candidates(tokens, space)
        forward = prune_and_merge(candidates, tokens)
        backward = prune_and_merge(list(reversed(candidates)), tokens)
        assert forward == backward

    def test_outputs_are_disjoint(self, space):
        tokens = tokens_of("show battery by day of week in the downtown area")
        fillers = prune_and_merge(detect_slot_candidates(tokens, space), tokens)
        for a in fillers:
            for b in fillers:
                if a is not b:
                    assert not a.overlaps(b.begin, b.end)


class TestVectorize:
    def test_no_fillers_is_zero_vector(self, space):
        vec = vectorize([], space)
        assert vec.shape == (11,) and not np.any(vec)

    def test_hard_mode_support_equals_assigned_slots(self, space):
        fillers = [
            SlotFiller(0, 1, "months", "MONTH", 0.9, "months"),
            SlotFiller(2, 3, "battery", "CRIME_TYPE", 0.8, "battery"),
        ]
        vec = vectorize(fillers, space, mode="hard")
        nonzero = {space.slot_names[i] for i in np.flatnonzero(vec)}
        assert nonzero == {"MONTH", "CRIME_TYPE"}
        month_dim = space.ontology.index_of("MONTH")
        assert vec[month_dim] == pytest.approx(0.9)

    def test_soft_mode_matches_brute_force_cosines(self, space):
        fillers = [SlotFiller(0, 3, "months of year", "MONTH", 0.9, "months")]
        vec = vectorize(fillers, space, mode="soft")
        phrase_vec = space.embed(["months"])
        expected = np.clip(
            [cosine(row, phrase_vec) for row in space.prototypes], 0.0, 1.0)
        assert np.allclose(vec, expected)
        names = space.slot_names
        month = vec[names.index("MONTH")]
        day, year = vec[names.index("DAY")], vec[names.index("YEAR")]
        assert month > day > 0.0
        assert month > year > 0.0

    def test_bounded_and_deterministic(self, space):
        fillers = [SlotFiller(0, 1, "theft", "CRIME_TYPE", 0.95, "theft"),
                   SlotFiller(2, 3, "week", "DAY", 0.9, "week")]
        for mode in ("hard", "soft"):
            vec = vectorize(fillers, space, mode=mode)
            assert np.all(vec >= 0.0) and np.all(vec <= 1.0)
            assert np.array_equal(vec, vectorize(fillers, space, mode=mode))

    @given(st.permutations(range(3)))
    def test_permutation_invariance_is_exact(self, space, order):
        fillers = [
            SlotFiller(0, 1, "theft", "CRIME_TYPE", 0.95, "theft"),
            SlotFiller(2, 3, "downtown", "NEIGHBORHOOD", 0.9, "downtown"),
            SlotFiller(4, 5, "july", "MONTH", 0.85, "july"),
        ]
        permuted = [fillers[i] for i in order]
        for mode in ("hard", "soft"):
            assert np.array_equal(vectorize(fillers, space, mode),
                                  vectorize(permuted, space, mode))


def test_semantic_vectorizer_transform(space):
    vectorizer = SemanticVectorizer(space, mode="hard")
    fillers = [SlotFiller(0, 1, "theft", "CRIME_TYPE", 1.0, "theft")]
    out = vectorizer.fit([]).transform([fillers, []])
    assert out.shape == (2, 11)
    assert not np.any(out[1])
    assert vectorizer.get_params()["mode"] == "hard"
