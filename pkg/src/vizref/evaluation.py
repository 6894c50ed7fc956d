"""Evaluation harness: replays corpus sessions and scores every stage.

The dialogue history is driven by the GOLD agent actions (specs added and
closed exactly as annotated), so per-turn predictions are always scored
against the true screen state; in gold-tag mode detection cannot influence
resolution numbers. Reports cover detection by segment and modality,
resolution accuracy for each candidate window, slot detection (cumulative
quartile bins and per-window rates), and per-class plot-type scores.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import CorpusRecord, sessions_of
from .crf import CrfTagger
from .dialogue import (DialogueHistory, Entity, GestureEvent, VisualizationSpec,
                       build_user_action, infer_plot_type, merge_entities, recency_weights,
                       resolve_reference)
from .metrics import extract_spans, span_f1
from .ontology import SlotSpace
from .semantics import entity_pseudo_fillers, vectorize

WINDOW_KEYS = {0: "0", 1: "1", None: "inf"}
QUARTILE_BINS = ("=0", "<=25", "<=50", "<=75", "<=100")


def _rate(hits: int, total: int) -> float:
    return round(100.0 * hits / total, 4) if total else 0.0


class _Tally:
    def __init__(self):
        self.hits = 0
        self.total = 0

    def add(self, correct: bool) -> None:
        self.total += 1
        self.hits += int(correct)

    def cell(self) -> dict:
        return {"rate": _rate(self.hits, self.total), "n": self.total}


@dataclass
class EvalReport:
    config: dict
    detection: dict
    detection_spans: dict
    resolution: dict
    slots: dict
    plot_types: dict
    meta: dict
    window_one_audit: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "schema": "eval-report/1",
            "config": self.config,
            "detection": self.detection,
            "detection_spans": self.detection_spans,
            "resolution": self.resolution,
            "slots": self.slots,
            "plot_types": self.plot_types,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = []
        cfg = self.config
        lines.append(f"Evaluation report ({'gold tags' if cfg['gold_tags'] else 'decoded tags'}, "
                     f"vector mode {cfg['vector_mode']}, cutoff {cfg['cutoff']})")
        lines.append("")
        lines.append("Reference detection accuracy (span-exact / token-level), by segment:")
        for modality in ("text", "gesture"):
            row = self.detection[modality]
            cells = []
            for seg in ("setup", "request"):
                cell = row[seg]
                if modality == "text":
                    cells.append(f"{seg} {cell['span_rate']:5.1f}/{cell['token_rate']:5.1f} (n={cell['n']})")
                else:
                    cells.append(f"{seg} {cell['rate']:5.1f} (n={cell['n']})")
            lines.append(f"  {modality:8s} " + "  ".join(cells))
        ds = self.detection_spans
        lines.append(f"  span micro P/R/F1: {ds['precision']:.3f}/{ds['recall']:.3f}/{ds['f1']:.3f}")
        lines.append("")
        lines.append("Resolution accuracy by window:")
        header = "  {:8s}".format("ref") + "".join(f"  win={k:>3s}" for k in self.resolution)
        lines.append(header)
        for modality in ("gesture", "text", "all"):
            cells = []
            for key in self.resolution:
                cell = self.resolution[key][modality]["all"]
                cells.append(f"{cell['rate']:8.1f}")
            lines.append(f"  {modality:8s}" + "".join(cells))
        lines.append("")
        lines.append("Slot detection, cumulative share of gold slots matched per request:")
        for row_name in ("AR", "FR"):
            row = self.slots["quartiles"][row_name]
            cells = "  ".join(f"{b}:{row[b]}" for b in QUARTILE_BINS)
            lines.append(f"  {row_name:3s} total={row['total']}  {cells}")
        lines.append("  slot match by window: " + "  ".join(
            f"{k}: micro {v['micro_pct']:.1f} exact {v['exact_pct']:.1f}"
            for k, v in self.slots["by_window"].items()))
        lines.append("")
        lines.append("Plot type (rule table vs gold):")
        for name, cell in self.plot_types["per_class"].items():
            lines.append(f"  {name:8s} P {cell['precision']:.3f}  R {cell['recall']:.3f}  "
                         f"F1 {cell['f1']:.3f}  support {cell['support']}")
        lines.append(f"  accuracy {self.plot_types['accuracy']:.1f} over {self.plot_types['n']} requests")
        return "\n".join(lines)


def _gold_spec_to_viz(record: CorpusRecord, space: SlotSpace, mode: str) -> VisualizationSpec:
    entities = [Entity(e["slot"], e.get("value")) for e in record.new_spec.entities]
    vector = vectorize(entity_pseudo_fillers(entities, space), space, mode)
    return VisualizationSpec(
        id=record.new_spec.id, plot_type=record.new_spec.plot_type, x_axis=None,
        y_axis="count", entities=entities, title=record.new_spec.title, vector=vector,
        created_at=record.turn_index)


def run_full_eval(records: list[CorpusRecord], space: SlotSpace,
                  tagger: CrfTagger | None = None, gold_tags: bool = False,
                  windows: tuple = (0, 1, None), cutoff: float = 0.2,
                  vector_mode: str = "soft", primary_window: int | None = None,
                  decay=recency_weights) -> EvalReport:
    """Replay every session and produce the full report.

    primary_window (default unlimited) is the window used for the slot
    quartiles and plot-type tables; the resolution and slot-by-window tables
    sweep all requested windows.
    """
    if not gold_tags and tagger is None:
        raise ValueError("a tagger is required unless gold_tags=True")

    detection = {m: {s: {"span": _Tally(), "token_correct": 0, "token_total": 0}
                     for s in ("setup", "request", "all")} for m in ("text", "gesture")}
    resolution = {WINDOW_KEYS[w]: {m: {s: _Tally() for s in ("setup", "request", "all")}
                                   for m in ("gesture", "text", "all")} for w in windows}
    slot_windows = {WINDOW_KEYS[w]: {"matched": 0, "gold_total": 0, "exact": _Tally()}
                    for w in windows}
    quartiles = {"AR": [], "FR": []}
    plot_pairs: list[tuple[str, str]] = []
    audit: list[dict] = []
    all_gold_tags: list[list[str]] = []
    all_pred_tags: list[list[str]] = []

    sweep = list(windows)
    if primary_window not in sweep:
        sweep.append(primary_window)

    for session_records in sessions_of(records).values():
        history = DialogueHistory()
        for record in session_records:
            tokens = record.token_objects()
            pred_tags = list(record.tags) if gold_tags else tagger.decode(tokens)
            all_gold_tags.append(list(record.tags))
            all_pred_tags.append(pred_tags)
            gesture = (GestureEvent(record.gesture_target, record.turn_index)
                       if record.gesture_target else None)
            frame = build_user_action(tokens, pred_tags, space, gesture=gesture,
                                      intent=record.intent)

            seg = record.segment if record.segment in ("setup", "request") else None
            gold_spans = extract_spans(record.tags)
            if gold_spans and seg:
                gold_ref = gold_spans[0]
                got = (frame.text_ref is not None
                       and (frame.text_ref.begin, frame.text_ref.end) == gold_ref)
                for bucket in (seg, "all"):
                    cell = detection["text"][bucket]
                    cell["span"].add(got)
                    cell["token_total"] += len(record.tags)
                    cell["token_correct"] += sum(1 for g, p in zip(record.tags, pred_tags) if g == p)
            if record.gesture_target and seg:
                for bucket in (seg, "all"):
                    detection["gesture"][bucket]["span"].add(frame.gest_ref)

            resolved_at: dict = {}
            if record.referent_id is not None:
                modality = "gesture" if record.gesture_target else "text"
                for w in sweep:
                    res = resolve_reference(frame, history, w, cutoff, space, vector_mode,
                                            decay=decay)
                    resolved_at[w] = res
                    if w in windows:
                        correct = res is not None and res[0] == record.referent_id
                        key = WINDOW_KEYS[w]
                        for m in (modality, "all"):
                            for s in ([seg] if seg else []) + ["all"]:
                                resolution[key][m][s].add(correct)
                    if w == 1:
                        recent = history.most_recent_first(1)
                        audit.append({
                            "predicted": res[0] if res else None,
                            "most_recent": recent[0].id if recent else None,
                        })

            if record.segment == "request" and record.new_spec is not None:
                gold_slots = {e["slot"] for e in record.new_spec.entities}
                for w in sweep:
                    res = resolved_at.get(w)
                    inherited: list[Entity] = []
                    if record.intent == "MODIFYVIS" and res is not None:
                        ref_spec = history.get(res[0])
                        if ref_spec is not None:
                            inherited = ref_spec.entities
                    pred_entities = merge_entities(frame.fillers, inherited, space.ontology)
                    pred_slots = {e.slot for e in pred_entities}
                    if w in windows:
                        cell = slot_windows[WINDOW_KEYS[w]]
                        cell["matched"] += len(pred_slots & gold_slots)
                        cell["gold_total"] += len(gold_slots)
                        cell["exact"].add(pred_slots == gold_slots)
                    if w == primary_window:
                        pct = (100.0 * len(pred_slots & gold_slots) / len(gold_slots)
                               if gold_slots else 100.0)
                        quartiles["AR"].append(pct)
                        if record.intent == "MODIFYVIS":
                            quartiles["FR"].append(pct)
                        exclude = ((frame.text_ref.begin, frame.text_ref.end)
                                   if frame.text_ref else None)
                        pred_plot = infer_plot_type(pred_entities, space, tokens,
                                                    exclude_span=exclude)
                        plot_pairs.append((record.new_spec.plot_type, pred_plot))

            # gold-driven state transition
            if record.new_spec is not None:
                history.add(_gold_spec_to_viz(record, space, vector_mode))
            if record.win_op == "close" and record.referent_id is not None:
                history.remove(record.referent_id)

    detection_out = {}
    for modality in ("text", "gesture"):
        detection_out[modality] = {}
        for seg in ("setup", "request", "all"):
            cell = detection[modality][seg]
            if modality == "text":
                detection_out[modality][seg] = {
                    "span_rate": cell["span"].cell()["rate"],
                    "token_rate": _rate(cell["token_correct"], cell["token_total"]),
                    "n": cell["span"].total,
                }
            else:
                detection_out[modality][seg] = cell["span"].cell()

    scores = span_f1(all_gold_tags, all_pred_tags)
    resolution_out = {key: {m: {s: resolution[key][m][s].cell() for s in ("setup", "request", "all")}
                            for m in ("gesture", "text", "all")} for key in resolution}

    def quartile_row(pcts: list[float]) -> dict:
        row = {"total": len(pcts)}
        row["=0"] = sum(1 for p in pcts if p == 0.0)
        for bound, label in ((25, "<=25"), (50, "<=50"), (75, "<=75"), (100, "<=100")):
            row[label] = sum(1 for p in pcts if p <= bound)
        return row

    slots_out = {
        "quartiles": {name: quartile_row(pcts) for name, pcts in quartiles.items()},
        "by_window": {
            key: {
                "micro_pct": _rate(cell["matched"], cell["gold_total"]),
                "exact_pct": cell["exact"].cell()["rate"],
                "n": cell["exact"].total,
            } for key, cell in slot_windows.items()
        },
    }

    plot_out = {"per_class": {}, "accuracy": 0.0, "n": len(plot_pairs)}
    for name in ("bar", "line", "heatmap"):
        tp = sum(1 for g, p in plot_pairs if g == name and p == name)
        fp = sum(1 for g, p in plot_pairs if g != name and p == name)
        fn = sum(1 for g, p in plot_pairs if g == name and p != name)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        plot_out["per_class"][name] = {
            "precision": round(precision, 4), "recall": round(recall, 4),
            "f1": round(f1, 4), "support": tp + fn,
        }
    plot_out["accuracy"] = _rate(sum(1 for g, p in plot_pairs if g == p), len(plot_pairs))

    return EvalReport(
        config={
            "gold_tags": gold_tags,
            "windows": [WINDOW_KEYS[w] for w in windows],
            "cutoff": cutoff,
            "vector_mode": vector_mode,
            "primary_window": WINDOW_KEYS[primary_window],
        },
        detection=detection_out,
        detection_spans={"precision": round(scores.precision, 4), "recall": round(scores.recall, 4),
                         "f1": round(scores.f1, 4), "tp": scores.true_positives,
                         "fp": scores.false_positives, "fn": scores.false_negatives},
        resolution=resolution_out,
        slots=slots_out,
        plot_types=plot_out,
        meta={"records": len(records), "sessions": len(sessions_of(records)),
              "requests": len(quartiles["AR"])},
        window_one_audit=audit,
    )


def crossval_span_f1(records: list[CorpusRecord], folds: int = 5, **tagger_params) -> dict:
    """Deterministic k-fold cross-validation of the reference tagger.

    Fold assignment is record index modulo k. Training drops all-O
    utterances inside fit; evaluation decodes every held-out record. Returns
    per-fold F1 plus pooled micro scores.
    """
    assignments = [i % folds for i in range(len(records))]
    fold_scores = []
    tp = fp = fn = 0
    for k in range(folds):
        train = [r for r, a in zip(records, assignments) if a != k]
        test = [r for r, a in zip(records, assignments) if a == k]
        tagger = CrfTagger(**tagger_params)
        tagger.fit([r.token_objects() for r in train], [r.tags for r in train])
        gold = [r.tags for r in test]
        pred = [tagger.decode(r.token_objects()) for r in test]
        scores = span_f1(gold, pred)
        fold_scores.append(round(scores.f1, 4))
        tp += scores.true_positives
        fp += scores.false_positives
        fn += scores.false_negatives
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"fold_f1": fold_scores, "precision": round(precision, 4),
            "recall": round(recall, 4), "f1": round(f1, 4)}
