"""Acceptance suite: one test per release criterion, tolerances pinned here.

Run with `pytest tests/test_acceptance.py -v -s` to see one verdict line per
criterion.
"""
import json
import math
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from vizref.crf import viterbi_decode
from vizref.corpus import sessions_of
from vizref.dialogue import (EngineConfig, Entity, SessionState, VisualizationSpec,
                             build_user_action, establish_entity, recency_weights)
from vizref.evaluation import crossval_span_f1, run_full_eval
from vizref.generator import generate_synthetic_corpus
from vizref.semantics import (SlotFiller, detect_slot_candidates, entity_pseudo_fillers,
                              prune_and_merge, vectorize)
from vizref.service import build_app
from conftest import FIXTURE_SEED, FIXTURE_SESSIONS
from test_crf import brute_force_decode


def verdict(name: str, ok: bool, detail: str = ""):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def test_viterbi_matches_exhaustive_enumeration():
    rng = np.random.default_rng(20240807)
    start = time.monotonic()
    mismatches = 0
    for _ in range(200):
        length = int(rng.integers(1, 9))
        emissions = rng.normal(size=(length, 3)) * 2.0
        transitions = rng.normal(size=(3, 3)) * 2.0
        if viterbi_decode(emissions, transitions) != brute_force_decode(emissions, transitions):
            mismatches += 1
    elapsed = time.monotonic() - start
    verdict("viterbi-oracle", mismatches == 0 and elapsed < 10.0,
            f"200 trials, {mismatches} mismatches, {elapsed:.2f}s")


def test_recency_schedule_exact_and_properties():
    got = recency_weights(6)
    expected = [1.0, 1.0, 1.0, 2 / 3, 1 / 3, 0.0]
    exact = all(abs(a - b) <= 1e-12 for a, b in zip(got, expected))
    props = True
    for n in range(1, 101):
        weights = recency_weights(n)
        lead = math.ceil(n / 2)
        props &= all(a >= b for a, b in zip(weights, weights[1:]))
        props &= all(w == 1.0 for w in weights[:lead])
        props &= (n < 2 or weights[-1] == 0.0)
    verdict("recency-schedule", exact and props,
            f"weights(6)={[round(w, 6) for w in got]}")


@pytest.fixture(scope="module")
def gold_report(corpus, space):
    return run_full_eval(corpus, space, gold_tags=True)


def test_structural_resolution_cells(gold_report):
    window0_zero = all(
        gold_report.resolution["0"][m][s]["rate"] == 0.0
        for m in ("gesture", "text", "all") for s in ("setup", "request", "all"))
    gesture_inf = gold_report.resolution["inf"]["gesture"]["all"]
    gesture_perfect = gesture_inf["rate"] == 100.0 and gesture_inf["n"] > 0
    audit = gold_report.window_one_audit
    containment = len(audit) > 0 and all(
        a["predicted"] is None or a["predicted"] == a["most_recent"] for a in audit)
    verdict("structural-resolution-cells",
            window0_zero and gesture_perfect and containment,
            f"win0 all 0.0: {window0_zero}; gesture@inf {gesture_inf['rate']} "
            f"(n={gesture_inf['n']}); win1 containment over {len(audit)} turns")


def test_detection_regression_cross_validation(corpus):
    start = time.monotonic()
    scores = crossval_span_f1(corpus)
    elapsed = time.monotonic() - start
    verdict("detection-regression", scores["f1"] >= 0.80 and elapsed < 300.0,
            f"5-fold micro F1 {scores['f1']:.4f} (folds {scores['fold_f1']}), {elapsed:.1f}s")


def test_slot_pipeline(gold_report, corpus, space):
    slots_inf = gold_report.slots["by_window"]["inf"]
    exact_ok = slots_inf["exact_pct"] >= 75.0
    quartiles = gold_report.slots["quartiles"]["AR"]
    quartile_ok = quartiles["<=100"] == quartiles["total"] > 0

    phrase = ("months", "of", "the", "year")
    merged_ok, occurrences = True, 0
    for record in corpus:
        if record.segment != "request":
            continue
        lower = tuple(t.lower() for t in record.tokens)
        for i in range(len(lower) - 3):
            if lower[i:i + 4] != phrase:
                continue
            occurrences += 1
            tokens = record.token_objects()
            ref = None
            if record.has_text_ref:
                begin = record.tags.index("B-REF")
                end = begin + 1
                while end < len(record.tags) and record.tags[end] == "I-REF":
                    end += 1
                ref = (begin, end)
            fillers = prune_and_merge(detect_slot_candidates(tokens, space), tokens, ref_span=ref)
            covering = [f for f in fillers if f.begin <= i and i + 4 <= f.end]
            merged_ok &= len(covering) == 1 and covering[0].slot == "MONTH"
    verdict("slot-pipeline", exact_ok and quartile_ok and merged_ok and occurrences > 0,
            f"exact-set {slots_inf['exact_pct']:.1f}% (>=75), <=100 row "
            f"{quartiles['<=100']}=={quartiles['total']}, months-of-the-year merge "
            f"MONTH on {occurrences}/{occurrences} occurrences")


def test_entity_establishment_inheritance(corpus, space, table, ontology):
    checked = 0
    violations = []
    for session_records in sessions_of(corpus).values():
        gold_specs = {}
        for record in session_records:
            if record.new_spec is not None:
                gold_specs[record.new_spec.id] = record.new_spec
            if record.intent != "MODIFYVIS" or record.referent_id is None:
                continue
            referent_gold = gold_specs[record.referent_id]
            ref_entities = [Entity(e["slot"], e.get("value")) for e in referent_gold.entities]
            ref_temporal = [e.slot for e in ref_entities if ontology.kind_of(e.slot) == "temporal"]
            new_temporal = [f for f in record.fillers if ontology.kind_of(f.slot) == "temporal"]
            if not ref_temporal or not new_temporal:
                continue
            checked += 1
            referent = VisualizationSpec(
                id=record.referent_id, plot_type=referent_gold.plot_type, x_axis=None,
                y_axis="count", entities=ref_entities, title="", created_at=0,
                vector=vectorize(entity_pseudo_fillers(ref_entities, space), space, "soft"))
            frame = build_user_action(
                record.token_objects(), record.tags, space, intent="MODIFYVIS")
            frame.fillers = [SlotFiller(f.begin, f.end, f.surface, f.slot, 1.0, f.value)
                             for f in record.fillers]
            state = SessionState(config=EngineConfig())
            state.next_seq = 90  # avoid clashing with fixture referent ids
            state.history.add(referent)
            _, spec = establish_entity(frame, referent, state, space, table, turn=1)
            new_slots = [e.slot for e in spec.entities]
            new_values = {(e.slot, e.value) for e in spec.entities}
            temporal_now = {s for s in new_slots if ontology.kind_of(s) == "temporal"}
            # the filler's slot is the one temporal axis left, carrying its value
            swapped = (temporal_now == {f.slot for f in new_temporal}
                       and all((f.slot, f.value) in new_values for f in new_temporal))
            categorical_kept = all(
                e.slot in new_slots for e in ref_entities
                if ontology.kind_of(e.slot) == "categorical"
                and all(f.slot != e.slot for f in record.fillers))
            if not (swapped and categorical_kept):
                violations.append(record)
    verdict("entity-establishment", checked > 0 and not violations,
            f"{checked} temporal-swap turns, {len(violations)} violations")


def test_plot_type_rule_ordering(gold_report):
    per_class = gold_report.plot_types["per_class"]
    bar, line, heat = (per_class[k]["f1"] for k in ("bar", "line", "heatmap"))
    ok = bar >= line >= heat and all(per_class[k]["support"] > 0 for k in per_class)
    verdict("plot-type-ordering", ok,
            f"F1 bar {bar:.3f} >= line {line:.3f} >= heatmap {heat:.3f}")


def test_replay_determinism(corpus, space, ontology):
    report_a = run_full_eval(corpus, space, gold_tags=True).to_json()
    report_b = run_full_eval(corpus, space, gold_tags=True).to_json()
    corpus_b = generate_synthetic_corpus(FIXTURE_SEED, FIXTURE_SESSIONS, ontology)
    corpus_identical = [r.to_payload() for r in corpus] == [r.to_payload() for r in corpus_b]
    verdict("replay-determinism", report_a == report_b and corpus_identical,
            "reports and regenerated corpus bit-identical")


def test_end_to_end_scenario_via_service(engine):
    client = TestClient(build_app(engine))
    sid = client.post("/sessions").json()["session_id"]
    first = client.post(f"/sessions/{sid}/turns",
                        json={"text": "can I see theft in the downtown area"}).json()
    second = client.post(f"/sessions/{sid}/turns",
                         json={"text": "can you show that graph by day of the week?"}).json()
    specs = second["payload"]["screen"]["specs"]
    ok = (first["kind"] == "agent_response" and second["kind"] == "agent_response"
          and len(specs) == 2)
    detail = f"{len(specs)} specs"
    if ok:
        derived = specs[1]
        entities = {(e["slot"], e["value"]) for e in derived["entities"]}
        ok = (derived["plot_type"] == "line"
              and derived["axes"]["x"] == "DAY"
              and ("CRIME_TYPE", "theft") in entities
              and ("NEIGHBORHOOD", "downtown") in entities)
        detail = (f"second spec: {derived['plot_type']}, x={derived['axes']['x']}, "
                  f"entities={sorted(entities)}")
    verdict("end-to-end-scenario", ok, detail)
