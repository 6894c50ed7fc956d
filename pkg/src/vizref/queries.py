"""In-process query execution over the bundled tabular incident fixture.

Stands in for a SQL backend: a visualization's data query is a declarative
{filters, group_by, aggregate} object evaluated against a flat CSV of
simulated incidents, one column per ontology slot (lowercased slot name).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .ontology import KnowledgeOntology

DEFAULT_TABLE_PATH = Path(__file__).parent / "data" / "incidents.csv"


class IncidentTable:
    """Immutable tabular fixture; safe for concurrent reads."""

    def __init__(self, rows: list[dict], columns: list[str]):
        self.rows = rows
        self.columns = columns
        self.vocab = {c: {r[c] for r in rows} for c in columns}

    @classmethod
    def load(cls, path: str | Path = DEFAULT_TABLE_PATH) -> "IncidentTable":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
        if not rows:
            raise ValueError(f"incident table {path} is empty")
        return cls(rows, list(rows[0].keys()))

    def column_for(self, slot_name: str) -> str | None:
        col = slot_name.lower()
        return col if col in self.vocab else None


@dataclass
class DataQuery:
    filters: list[dict] = field(default_factory=list)
    group_by: str | None = None
    aggregate: str = "count"
    rows: list[dict] = field(default_factory=list)
    empty_result: bool = False

    def to_payload(self) -> dict:
        return {
            "filters": self.filters,
            "group_by": self.group_by,
            "aggregate": self.aggregate,
            "empty_result": self.empty_result,
        }


def _category_order(values: set[str], slot_name: str | None, ontology: KnowledgeOntology) -> list[str]:
    """Order grouped categories by ontology term order, then alphabetically."""
    term_rank: dict[str, int] = {}
    if slot_name is not None:
        for slot in ontology.slots:
            if slot.name == slot_name:
                term_rank = {t: i for i, t in enumerate(slot.terms)}
    return sorted(values, key=lambda v: (term_rank.get(v, len(term_rank)), v))


def build_data_query(entities, ontology: KnowledgeOntology, table: IncidentTable) -> DataQuery:
    """Build and execute the query implied by a spec's entity list.

    Categorical and spatial entities become filters: an equality filter when
    the value is a real column value; a match-all term-set filter when the
    value is a generic ontology term for the slot (e.g. "crimes"); an
    equality filter that matches nothing otherwise, raising the empty-result
    flag. Temporal entities select the grouping axis; grouping falls back to
    the first categorical, then the first spatial entity.
    """
    query = DataQuery()
    group_slot = None
    generic_slots = []
    for ent in entities:
        kind = ontology.kind_of(ent.slot)
        if kind == "temporal":
            if group_slot is None:
                group_slot = ent.slot
            continue
        col = table.column_for(ent.slot)
        value = ent.value
        if value is None or col is None:
            continue
        if value in table.vocab[col]:
            query.filters.append({"slot": ent.slot, "op": "eq", "value": value})
        elif value in set(ontology.slot(ent.slot).terms):
            query.filters.append({"slot": ent.slot, "op": "any", "value": value})
            generic_slots.append(ent.slot)
        else:
            query.filters.append({"slot": ent.slot, "op": "eq", "value": value})
    if group_slot is None:
        # generic mentions ("crimes") make the best grouping axis: no filter applies
        for want in ("categorical", "spatial"):
            named = [e.slot for e in entities if ontology.kind_of(e.slot) == want]
            preferred = [s for s in named if s in generic_slots] + named
            if preferred:
                group_slot = preferred[0]
                break
    query.group_by = group_slot

    rows = table.rows
    for f in query.filters:
        if f["op"] == "any":
            continue
        col = table.column_for(f["slot"])
        rows = [r for r in rows if r[col] == f["value"]]

    if query.group_by is not None and table.column_for(query.group_by):
        col = table.column_for(query.group_by)
        counts: dict[str, int] = {}
        for r in rows:
            counts[r[col]] = counts.get(r[col], 0) + 1
        order = _category_order(set(counts), query.group_by, ontology)
        query.rows = [{"category": v, "count": counts[v]} for v in order]
    else:
        query.rows = [{"category": "total", "count": len(rows)}]

    has_eq_filters = any(f["op"] == "eq" for f in query.filters)
    query.empty_result = has_eq_filters and len(rows) == 0
    return query
