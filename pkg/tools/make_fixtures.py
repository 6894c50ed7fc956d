#!/usr/bin/env python3
"""Generate the bundled data fixtures (run once; outputs are committed).

Produces src/vizref/data/{ontology.json,embeddings.txt,incidents.csv}.
The embedding file is synthetic: each word vector is the normalized mix of
a shared domain component, a slot-kind component, a slot component, and
per-word noise. Terms of one slot therefore sit close to their prototype
(cos ~0.9, far above the 0.35 match threshold), slots of the same kind stay
related (cos ~0.5), unrelated slots weakly related (~0.25), and non-term
vocabulary is rejected by the threshold.
"""
from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import numpy as np

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "vizref" / "data"

DIM = 50
SEED = 20240811

ONTOLOGY = [
    ("CRIME_TYPE", "categorical", [
        "crime", "crimes", "theft", "thefts", "battery", "assault", "assaults",
        "robbery", "robberies", "burglary", "burglaries", "homicide", "homicides",
        "narcotics", "vandalism", "arson", "fraud", "shoplifting"]),
    ("NEIGHBORHOOD", "categorical", [
        "neighborhood", "neighborhoods", "downtown", "uptown", "lakeview", "riverside",
        "midtown", "chinatown", "oldtown", "pilsen", "hermosa", "austin", "englewood",
        "river north"]),
    ("MONTH", "temporal", [
        "month", "months", "monthly", "january", "february", "march", "april", "may",
        "june", "july", "august", "september", "october", "november", "december"]),
    ("YEAR", "temporal", [
        "year", "years", "yearly", "annual", "annually",
        "2016", "2017", "2018", "2019", "2020"]),
    ("DAY", "temporal", [
        "day", "days", "daily", "week", "weeks", "weekday", "weekdays", "weekend",
        "weekends", "monday", "tuesday", "wednesday", "thursday", "friday",
        "saturday", "sunday"]),
    ("TIME_OF_DAY", "temporal", [
        "morning", "mornings", "afternoon", "afternoons", "evening", "evenings",
        "night", "nights", "midnight", "noon", "overnight", "nighttime"]),
    ("SEASON", "temporal", [
        "season", "seasons", "seasonal", "summer", "winter", "spring", "autumn"]),
    ("LOCATION_TYPE", "categorical", [
        "location", "locations", "apartment", "apartments", "residence", "sidewalk",
        "alley", "alleys", "park", "parks", "school", "schools", "store", "stores",
        "bar", "bars", "restaurant", "garage"]),
    ("STREET", "spatial", [
        "street", "streets", "avenue", "boulevard", "michigan", "halsted", "ashland",
        "damen", "kedzie", "pulaski", "cicero"]),
    ("DISTRICT", "spatial", [
        "district", "districts", "ward", "wards", "precinct", "precincts", "zone",
        "central", "northern", "southern", "western", "eastern"]),
    ("WEAPON", "categorical", [
        "weapon", "weapons", "gun", "guns", "knife", "knives", "firearm", "firearms",
        "handgun", "handguns", "pistol", "rifle"]),
]

# content vocabulary outside the ontology: embedded but far from every prototype
EXTRA_VOCAB = [
    "graph", "chart", "plot", "visualization", "map", "heatmap", "tile", "screen",
    "data", "pattern", "patterns", "trend", "trends", "spike", "spikes", "numbers",
    "activity", "area", "areas", "city", "police", "officers", "deployment",
    "strategy", "rate", "rates", "peak", "comparison", "breakdown", "view",
]

INCIDENT_ROWS = 2400
INCIDENT_VALUES = {
    "crime_type": ["theft", "battery", "assault", "robbery", "burglary", "homicide",
                   "narcotics", "vandalism", "arson", "fraud"],
    "neighborhood": ["downtown", "uptown", "lakeview", "riverside", "midtown", "chinatown",
                     "oldtown", "pilsen", "hermosa", "austin", "englewood", "river north"],
    "month": ["january", "february", "march", "april", "may", "june", "july", "august",
              "september", "october", "november", "december"],
    "year": ["2016", "2017", "2018", "2019", "2020"],
    "day": ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"],
    "time_of_day": ["morning", "afternoon", "evening", "night"],
    "season": ["spring", "summer", "autumn", "winter"],
    "location_type": ["apartment", "residence", "sidewalk", "alley", "park", "school",
                      "store", "bar", "restaurant", "garage"],
    "street": ["michigan", "halsted", "ashland", "damen", "kedzie", "pulaski", "cicero"],
    "district": ["central", "northern", "southern", "western", "eastern"],
    "weapon": ["gun", "knife", "firearm", "handgun", "pistol", "rifle"],
}


def unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def make_embeddings(rng: np.random.Generator) -> dict[str, np.ndarray]:
    g_domain = unit(rng.standard_normal(DIM))
    kind_axes = {k: unit(rng.standard_normal(DIM)) for k in ("temporal", "categorical", "spatial")}
    vectors: dict[str, np.ndarray] = {}
    for name, kind, terms in ONTOLOGY:
        slot_axis = unit(rng.standard_normal(DIM))
        for term in terms:
            for word in term.split():
                if word in vectors:
                    continue
                noise = unit(rng.standard_normal(DIM))
                vectors[word] = unit(0.50 * g_domain + 0.50 * kind_axes[kind]
                                     + 0.65 * slot_axis + 0.30 * noise)
    prototypes = []
    for name, kind, terms in ONTOLOGY:
        term_vecs = [unit(np.mean([vectors[w] for w in t.split()], axis=0)) for t in terms]
        prototypes.append(unit(np.mean(term_vecs, axis=0)))
    prototypes = np.array(prototypes)
    for word in EXTRA_VOCAB:
        if word in vectors:
            continue
        # redraw until comfortably below the 0.35 slot-match threshold
        while True:
            noise = unit(rng.standard_normal(DIM))
            vec = unit(0.10 * g_domain + 1.0 * noise)
            if float(np.max(prototypes @ vec)) < 0.30:
                vectors[word] = vec
                break
    return vectors


def write_embeddings(vectors: dict[str, np.ndarray], path: Path) -> None:
    lines = []
    for word in sorted(vectors):
        comps = " ".join(f"{x:.6f}" for x in vectors[word])
        lines.append(f"{word} {comps}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_ontology(path: Path) -> None:
    payload = {"schema": "slot-ontology/1",
               "slots": [{"name": n, "kind": k, "terms": t} for n, k, t in ONTOLOGY]}
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_incidents(rng: np.random.Generator, path: Path) -> None:
    cols = list(INCIDENT_VALUES)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for _ in range(INCIDENT_ROWS):
            row = []
            for col in cols:
                values = INCIDENT_VALUES[col]
                # skewed draw so group counts are visibly uneven
                weights = np.arange(len(values), 0, -1, dtype=float)
                weights /= weights.sum()
                row.append(values[rng.choice(len(values), p=weights)])
            writer.writerow(row)


def main() -> int:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    write_ontology(DATA_DIR / "ontology.json")
    vectors = make_embeddings(rng)
    write_embeddings(vectors, DATA_DIR / "embeddings.txt")
    write_incidents(rng, DATA_DIR / "incidents.csv")
    print(f"wrote fixtures to {DATA_DIR} ({len(vectors)} embedding entries)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
