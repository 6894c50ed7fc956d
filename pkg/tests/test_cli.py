import json

import pytest
from click.testing import CliRunner

from vizref.cli import main


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def workdir(tmp_path_factory, runner):
    path = tmp_path_factory.mktemp("cli")
    result = runner.invoke(main, ["gen-corpus", "--seed", "3", "--sessions", "2",
                                  "--out", str(path / "corpus.jsonl")])
    assert result.exit_code == 0, result.output
    result = runner.invoke(main, ["train", "--corpus", str(path / "corpus.jsonl"),
                                  "--out", str(path / "model.json")])
    assert result.exit_code == 0, result.output
    return path


def test_gen_corpus_reports_count(workdir, runner):
    result = runner.invoke(main, ["gen-corpus", "--seed", "3", "--sessions", "1",
                                  "--out", str(workdir / "tiny.jsonl")])
    assert result.exit_code == 0
    n_lines = sum(1 for _ in open(workdir / "tiny.jsonl"))
    assert f"{n_lines} records" in result.output


def test_train_writes_model(workdir):
    payload = json.loads((workdir / "model.json").read_text())
    assert payload["format"] == "vizref-crf/1"
    assert payload["tags"] == ["B-REF", "I-REF", "O"]


def test_tag_from_stdin(workdir, runner):
    result = runner.invoke(main, ["tag", "--model", str(workdir / "model.json"), "--json"],
                           input="can you show that graph by month\n")
    assert result.exit_code == 0, result.output
    row = json.loads(result.output.strip())
    assert row["tags"][3] == "B-REF" and row["tags"][4] == "I-REF"


def test_eval_gold_tags_prints_tables_and_writes_report(workdir, runner):
    report_path = workdir / "report.json"
    result = runner.invoke(main, ["eval", "--corpus", str(workdir / "corpus.jsonl"),
                                  "--gold-tags", "--report", str(report_path)])
    assert result.exit_code == 0, result.output
    assert "Resolution accuracy by window" in result.output
    assert "precision 1.0000" in result.output
    payload = json.loads(report_path.read_text())
    assert payload["schema"] == "eval-report/1"


def test_eval_with_model_reports_f1(workdir, runner):
    result = runner.invoke(main, ["eval", "--corpus", str(workdir / "corpus.jsonl"),
                                  "--model", str(workdir / "model.json"),
                                  "--window", "1", "--vector-mode", "hard"])
    assert result.exit_code == 0, result.output
    assert "f1" in result.output


def test_eval_requires_model_or_gold(workdir, runner):
    result = runner.invoke(main, ["eval", "--corpus", str(workdir / "corpus.jsonl")])
    assert result.exit_code != 0
