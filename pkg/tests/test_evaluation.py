import pytest

from vizref.evaluation import run_full_eval


@pytest.fixture(scope="module")
def gold_report(corpus, space):
    return run_full_eval(corpus, space, gold_tags=True)


def test_gold_mode_ignores_the_tagger(corpus, space, tagger):
    with_tagger = run_full_eval(corpus, space, tagger=tagger, gold_tags=True)
    without = run_full_eval(corpus, space, gold_tags=True)
    assert with_tagger.to_dict() == without.to_dict()


def test_gold_mode_detection_is_perfect(gold_report):
    assert gold_report.detection_spans["f1"] == 1.0
    assert gold_report.detection["text"]["all"]["span_rate"] == 100.0


def test_gesture_accuracy_never_drops_with_wider_window(gold_report):
    for segment in ("setup", "request", "all"):
        narrow = gold_report.resolution["1"]["gesture"][segment]["rate"]
        wide = gold_report.resolution["inf"]["gesture"][segment]["rate"]
        assert wide >= narrow


def test_report_is_deterministic(corpus, space, gold_report):
    again = run_full_eval(corpus, space, gold_tags=True)
    assert again.to_json() == gold_report.to_json()


def test_denominators_reported_alongside_rates(gold_report):
    for window in gold_report.resolution.values():
        for modality in window.values():
            for cell in modality.values():
                assert set(cell) == {"rate", "n"}
                assert 0.0 <= cell["rate"] <= 100.0


def test_decoded_mode_runs_end_to_end(corpus, space, tagger):
    report = run_full_eval(corpus, space, tagger=tagger, windows=(None,))
    assert report.detection_spans["f1"] > 0.9  # in-sample decode on the fixture
    assert "inf" in report.resolution


def test_requires_tagger_or_gold_flag(corpus, space):
    with pytest.raises(ValueError):
        run_full_eval(corpus, space)


def test_text_report_renders(gold_report):
    text = gold_report.to_text()
    assert "Resolution accuracy by window" in text
    assert "Plot type" in text
