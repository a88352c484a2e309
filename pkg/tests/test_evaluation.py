import pytest

from simverify import CalibrationError, Thresholds
from simverify.calibration import calibrate, read_manifest, score_samples
from simverify.evaluation import ALL_MASKS, ablate, evaluate
from simverify.holistic import AssessorConfig, MockTransport
from simverify.pipeline import Assessor
from simverify.synth import SyntheticSpec, default_specs, generate_corpus


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("eval")
    return read_manifest(generate_corpus(default_specs(40, 40, base_seed=9), root))


def test_separable_four_sample_manifest(tmp_path):
    specs = [SyntheticSpec("concentrated", seed=s) for s in (1, 2)] + [SyntheticSpec("scattered", seed=s) for s in (3, 4)]
    entries = read_manifest(generate_corpus(specs, tmp_path))
    thresholds = calibrate(score_samples([(e.path, e.label) for e in entries])).thresholds
    report = evaluate(entries, thresholds=thresholds)
    assert (report.positive_acc, report.negative_acc, report.overall_acc) == (1.0, 1.0, 1.0)


def test_report_consistent_with_records(corpus):
    report = evaluate(corpus, workers=3)
    assert len(report.records) == len(corpus)
    correct = sum(r.correct for r in report.records)
    assert report.overall_acc == correct / len(report.records)
    pos = [r for r in report.records if r.label == "present"]
    assert report.positive_acc == sum(r.correct for r in pos) / len(pos)
    assert [r.sample_id for r in report.records] == [e.sample_id for e in corpus]


def test_worker_count_does_not_change_result(corpus):
    a = evaluate(corpus, workers=1)
    b = evaluate(corpus, workers=8)
    assert [r.to_dict() for r in a.records] == [r.to_dict() for r in b.records]


def test_ablation_rows(corpus):
    rows = ablate(evaluate(corpus))
    assert len(rows) == 7 == len(ALL_MASKS)
    assert sorted(r.mask for r in rows) == sorted(["S", "C", "P", "SC", "SP", "CP", "SCP"])
    s_only = next(r for r in rows if r.mask == "S")
    assert s_only.negative_acc == 0.0 and s_only.positive_acc == 1.0


def test_ablation_matches_direct_evaluation(corpus):
    base = evaluate(corpus)
    for row in ablate(base):
        direct = evaluate(corpus, mask=row.mask)
        assert row.row() == direct.row()


def test_assessor_disabled_final_equals_quantitative(corpus):
    report = evaluate(corpus, thresholds=Thresholds(0.5, 0.6, 0.9))
    assert all(r.final == r.quantitative and r.holistic is None for r in report.records)


def test_assessor_overrides(corpus):
    assessor = Assessor(AssessorConfig(), MockTransport(["FALSE"], cycle=True))
    report = evaluate(corpus, assessor=assessor)
    assert all(r.final is False and r.holistic == "target_absent" for r in report.records)
    assert report.positive_acc == 0.0 and report.negative_acc == 1.0


def test_missing_class(tmp_path):
    entries = read_manifest(generate_corpus([SyntheticSpec("scattered", seed=1)], tmp_path))
    with pytest.raises(CalibrationError):
        evaluate(entries)
