"""Command-line interface."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .corpus import load_corpus, save_corpus
from .crf import CrfTagger
from .dialogue import DialogueEngine, EngineConfig
from .evaluation import crossval_span_f1, run_full_eval
from .generator import generate_synthetic_corpus
from .ontology import (DEFAULT_EMBEDDINGS_PATH, DEFAULT_ONTOLOGY_PATH, SlotSpace,
                       load_embeddings, load_ontology)
from .queries import DEFAULT_TABLE_PATH, IncidentTable
from .service import build_app, parse_window
from .text import ingest_utterance


def _space(ontology_path: str, embeddings_path: str) -> SlotSpace:
    return SlotSpace(load_ontology(ontology_path), load_embeddings(embeddings_path))


_shared = [
    click.option("--ontology", "ontology_path", default=str(DEFAULT_ONTOLOGY_PATH),
                 show_default=False, help="Ontology file (defaults to the bundled fixture)."),
    click.option("--embeddings", "embeddings_path", default=str(DEFAULT_EMBEDDINGS_PATH),
                 show_default=False, help="Embedding file (defaults to the bundled fixture)."),
]


def shared_options(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Multimodal visualization dialogue: tagging, resolution, evaluation, serving."""


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--c1", default=0.10, show_default=True, help="L1 coefficient.")
@click.option("--c2", default=0.10, show_default=True, help="L2 coefficient.")
@click.option("--max-iter", default=200, show_default=True)
def train(corpus_path, out_path, c1, c2, max_iter):
    """Train the reference tagger on a corpus file."""
    records = load_corpus(corpus_path)
    tagger = CrfTagger(c1=c1, c2=c2, max_iterations=max_iter)
    tagger.fit([r.token_objects() for r in records], [r.tags for r in records])
    tagger.save(out_path)
    click.echo(f"trained on {len(records)} records "
               f"({len(tagger.feature_index_)} features, {tagger.n_iter_} iterations); "
               f"model written to {out_path}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--in", "input_path", default="-", help="Utterance file, one per line ('-' = stdin).")
@click.option("--json", "as_json", is_flag=True, help="Emit token/tag pairs as JSON lines.")
def tag(model_path, input_path, as_json):
    """Tag raw utterances with reference spans."""
    tagger = CrfTagger.load(model_path)
    stream = sys.stdin if input_path == "-" else open(input_path, encoding="utf-8")
    with stream:
        for line in stream:
            line = line.strip()
            if not line:
                continue
            tokens, _ = ingest_utterance(line)
            tags = tagger.decode(tokens)
            if as_json:
                click.echo(json.dumps({"tokens": [t.surface for t in tokens], "tags": tags}))
            else:
                click.echo(" ".join(f"{t.surface}/{g}" for t, g in zip(tokens, tags)))


@main.command("eval")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True),
              help="Trained tagger; omit with --gold-tags.")
@click.option("--gold-tags", is_flag=True, help="Replay with annotated tags (isolates resolution).")
@click.option("--window", default="inf", show_default=True,
              help="Primary candidate window: 0, 1, or inf.")
@click.option("--vector-mode", type=click.Choice(["hard", "soft"]), default="soft",
              show_default=True)
@click.option("--cutoff", default=0.2, show_default=True)
@click.option("--report", "report_path", type=click.Path(), help="Write the JSON report here.")
@click.option("--cv", is_flag=True, help="Also run 5-fold cross-validation of the tagger.")
@shared_options
def eval_command(corpus_path, model_path, gold_tags, window, vector_mode, cutoff,
                 report_path, cv, ontology_path, embeddings_path):
    """Replay a corpus and print the evaluation tables."""
    records = load_corpus(corpus_path)
    space = _space(ontology_path, embeddings_path)
    tagger = CrfTagger.load(model_path) if model_path else None
    if tagger is None and not gold_tags:
        raise click.UsageError("provide --model or --gold-tags")
    report = run_full_eval(records, space, tagger=tagger, gold_tags=gold_tags,
                           cutoff=cutoff, vector_mode=vector_mode,
                           primary_window=parse_window(window))
    click.echo(report.to_text())
    ds = report.detection_spans
    click.echo(f"\nprecision {ds['precision']:.4f}  recall {ds['recall']:.4f}  f1 {ds['f1']:.4f}")
    if cv:
        scores = crossval_span_f1(records)
        click.echo(f"5-fold CV span F1: {scores['f1']:.4f} (folds: {scores['fold_f1']})")
    if report_path:
        Path(report_path).write_text(report.to_json(), encoding="utf-8")
        click.echo(f"report written to {report_path}")


@main.command("gen-corpus")
@click.option("--seed", default=7, show_default=True)
@click.option("--sessions", default=16, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@shared_options
def gen_corpus(seed, sessions, out_path, ontology_path, embeddings_path):
    """Generate a synthetic corpus with gold labels."""
    ontology = load_ontology(ontology_path)
    records = generate_synthetic_corpus(seed, sessions, ontology)
    save_corpus(records, out_path)
    click.echo(f"{len(records)} records written to {out_path}")


@main.command()
@click.option("--port", default=8077, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--model", "model_path", type=click.Path(exists=True),
              help="Trained tagger (without it, no text references are detected).")
@click.option("--data", "data_path", default=str(DEFAULT_TABLE_PATH), show_default=False,
              help="Incident table CSV (defaults to the bundled fixture).")
@click.option("--window", default="inf", show_default=True)
@click.option("--cutoff", default=0.2, show_default=True)
@click.option("--vector-mode", type=click.Choice(["hard", "soft"]), default="soft")
@click.option("--ui-dir", type=click.Path(exists=True), help="Serve a built screen UI from /ui.")
@shared_options
def serve(port, host, model_path, data_path, window, cutoff, vector_mode, ui_dir,
          ontology_path, embeddings_path):
    """Run the live session service."""
    import uvicorn

    space = _space(ontology_path, embeddings_path)
    tagger = CrfTagger.load(model_path) if model_path else None
    engine = DialogueEngine(
        space, IncidentTable.load(data_path), tagger=tagger,
        config=EngineConfig(window=parse_window(window), cutoff=cutoff,
                            vector_mode=vector_mode))
    app = build_app(engine, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
