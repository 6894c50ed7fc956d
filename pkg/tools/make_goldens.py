#!/usr/bin/env python3
"""Generate golden files for frozen-format tests (run once; outputs committed)."""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
GOLDEN_DIR = ROOT / "tests" / "golden"

sys.path.insert(0, str(ROOT / "src"))

from vizref.dialogue import DialogueEngine  # noqa: E402
from vizref.ontology import SlotSpace, load_embeddings, load_ontology  # noqa: E402
from vizref.queries import IncidentTable  # noqa: E402


def vizspec_golden(space: SlotSpace) -> dict:
    engine = DialogueEngine(space, IncidentTable.load())
    state = engine.new_state()
    result = engine.process_turn(state, "can i see theft in the downtown area")
    return result.screen["specs"][0]


def loo_golden(ontology, lexicon) -> dict:
    terms = [term for slot in ontology.slots for term in slot.terms]
    sample = terms[::6]
    out = {}
    for term in sample:
        space = SlotSpace(ontology, lexicon, exclude_terms=frozenset([term]))
        hit = space.nearest_slot(term.split())
        out[term] = None if hit is None else [hit[0], round(hit[1], 9)]
    return out


def main() -> int:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    ontology = load_ontology()
    lexicon = load_embeddings()
    space = SlotSpace(ontology, lexicon)
    (GOLDEN_DIR / "vizspec.json").write_text(
        json.dumps(vizspec_golden(space), indent=2) + "\n", encoding="utf-8")
    (GOLDEN_DIR / "loo_nearest_slot.json").write_text(
        json.dumps(loo_golden(ontology, lexicon), indent=2) + "\n", encoding="utf-8")
    print(f"golden files written to {GOLDEN_DIR}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
