import csv
import itertools

import numpy as np
import pytest

from simverify import CalibrationError, Thresholds
from simverify.calibration import (
    calibrate,
    default_grid,
    export_scatter,
    parse_grid_spec,
    read_manifest,
    score_samples,
    write_scatter_csv,
)
from simverify.scoring import QualityScores, decide, score
from simverify.synth import SyntheticSpec, default_specs, generate, generate_corpus


def qs(s, c, p):
    return QualityScores(s, c, p, m_top=0.0, r_s=0.0, spread_d=0.0, active_pixel_count=1, component_count=1)


def brute_accuracies(scored, t, negate=False):
    pos = [decide(s, t) != negate for s, lab in scored if lab == "present"]
    neg = [decide(s, t) == negate for s, lab in scored if lab == "absent"]
    return sum(pos) / len(pos), sum(neg) / len(neg)


def random_scored(n, seed):
    rng = np.random.default_rng(seed)
    return [(qs(*rng.uniform(size=3)), "present" if i % 2 else "absent") for i in range(n)]


def test_score_samples_orders_and_dominance():
    conc, _ = generate(SyntheticSpec("concentrated", seed=1))
    scat, _ = generate(SyntheticSpec("scattered", seed=1))
    out = score_samples([(conc, "present"), (scat, "absent")])
    assert [lab for _, lab in out] == ["present", "absent"]
    assert out[0][0].compactness > out[1][0].compactness
    assert out[0][0].purity > out[1][0].purity


def test_score_samples_duplicates():
    conc, _ = generate(SyntheticSpec("concentrated", seed=1))
    scat, _ = generate(SyntheticSpec("scattered", seed=1))
    out = score_samples([(conc, "present"), (conc, "present"), (scat, "absent")])
    assert out[0][0] == out[1][0]


def test_score_samples_accepts_precomputed():
    out = score_samples([(qs(0.6, 0.5, 0.9), "target_present"), (qs(0.5, 0.1, 0.2), "target_absent")])
    assert out[0] == (qs(0.6, 0.5, 0.9), "present")


@pytest.mark.parametrize("samples", [[], [(qs(0.6, 0.6, 0.9), "present")]])
def test_score_samples_needs_both_classes(samples):
    with pytest.raises(CalibrationError):
        score_samples(samples)


def test_unknown_label():
    with pytest.raises(CalibrationError):
        score_samples([(qs(0.6, 0.6, 0.9), "maybe"), (qs(0.6, 0.6, 0.9), "absent")])


def test_separable_set_reaches_perfect_objective():
    rng = np.random.default_rng(0)
    scored = [(qs(*rng.uniform([0.6, 0.6, 0.8], 1.0)), "present") for _ in range(20)]
    scored += [(qs(*rng.uniform(0, [0.55, 0.3, 0.5])), "absent") for _ in range(20)]
    grid = [[0.5, 0.575], [0.2, 0.45], [0.65, 0.9]]
    res = calibrate(scored, grid)
    assert res.objective_value == 1.0
    assert brute_accuracies(scored, Thresholds(0.575, 0.45, 0.65)) == (1.0, 1.0)
    perfect = [t for t in itertools.product(*grid) if brute_accuracies(scored, Thresholds(*t)) == (1.0, 1.0)]
    assert res.thresholds == Thresholds(*min(perfect))


def test_single_grid_point_is_returned():
    res = calibrate(random_scored(10, 1), [[0.9], [0.9], [0.9]])
    assert res.thresholds == Thresholds(0.9, 0.9, 0.9)
    assert len(res.grid_trace) == 1


def test_grid_search_is_exhaustive_optimum():
    scored = random_scored(30, 2)
    grid = [0.2, 0.4, 0.6, 0.8]
    res = calibrate(scored, grid)
    best = max(sum(brute_accuracies(scored, Thresholds(*t))) / 2 for t in itertools.product(grid, repeat=3))
    assert res.objective_value == pytest.approx(best, abs=1e-15)
    assert res.thresholds in [t for t, _, _ in res.grid_trace]
    for t, p, n in res.grid_trace:
        assert (p, n) == pytest.approx(brute_accuracies(scored, t), abs=1e-15)
        assert (p + n) / 2 <= res.objective_value + 1e-15


def test_ties_prefer_negative_accuracy_then_smallest():
    scored = [(qs(0.6, 0.6, 0.6), "present"), (qs(0.4, 0.4, 0.4), "absent"), (qs(0.7, 0.7, 0.7), "absent"), (qs(0.8, 0.8, 0.8), "present")]
    res = calibrate(scored, [0.0, 0.5, 0.65, 0.75, 0.9])
    # candidates with balanced 0.75: (0.5,..) -> pos 1, neg 0.5; (0.75,..) -> pos 0.5, neg 1
    assert res.objective_value == 0.75
    assert res.negative_acc == 1.0
    assert res.thresholds == Thresholds(0.0, 0.0, 0.75)


def test_label_swap_symmetry():
    scored = random_scored(24, 3)
    swapped = [(s, "absent" if lab == "present" else "present") for s, lab in scored]
    for t in itertools.product([0.1, 0.5, 0.9], repeat=3):
        t = Thresholds(*t)
        p, n = brute_accuracies(scored, t)
        p2, n2 = brute_accuracies(swapped, t, negate=True)
        assert (p + n) / 2 == pytest.approx((p2 + n2) / 2, abs=1e-15)


def test_monotone_threshold_effect():
    scored = random_scored(40, 4)
    grid = [0.1, 0.3, 0.5, 0.7, 0.9]
    res = calibrate(scored, grid)
    table = {tuple(t.as_tuple()): (p, n) for t, p, n in res.grid_trace}
    for t in table:
        for d in range(3):
            for higher in grid:
                if higher <= t[d]:
                    continue
                u = list(t)
                u[d] = higher
                assert table[tuple(u)][0] <= table[t][0]
                assert table[tuple(u)][1] >= table[t][1]


def test_all_one_class_rejected():
    with pytest.raises(CalibrationError):
        calibrate([(qs(0.5, 0.5, 0.5), "present")] * 3)


def test_empty_grid_dimension_rejected():
    with pytest.raises(CalibrationError):
        calibrate(random_scored(4, 0), [[0.5], [], [0.5]])


def test_default_grid_contains_reference_value():
    g = default_grid()
    assert len(g) == 41 and g[0] == 0.0 and g[-1] == 1.0
    assert 0.475 in g and 0.4 in g and 0.7 in g


def test_calibrated_beats_defaults_on_synthetic_set():
    specs = default_specs(200, 200, base_seed=5)
    scored = [(score(generate(s)[0]), s.label) for s in specs]
    res = calibrate(scored)
    default_bal = sum(brute_accuracies(scored, Thresholds())) / 2
    assert res.objective_value >= default_bal


def test_export_scatter():
    assert export_scatter([]) == []
    assert export_scatter([(qs(0.7, 0.5, 0.9), "present")]) == [{"s1": 0.7, "s2": 0.5, "s3": 0.9, "label": "present"}]


def test_scatter_csv_counts(tmp_path):
    specs = default_specs(200, 200, base_seed=6)
    scored = [(score(generate(s)[0]), s.label) for s in specs]
    path = write_scatter_csv(export_scatter(scored), tmp_path / "scatter.csv")
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    assert path.read_text().splitlines()[0] == "s1,s2,s3,label"
    assert len(rows) == 400
    assert sum(r["label"] == "present" for r in rows) == 200


def test_manifest_roundtrip(tmp_path):
    specs = [SyntheticSpec("concentrated", seed=1), SyntheticSpec("scattered", seed=2)]
    manifest = generate_corpus(specs, tmp_path, splits=["calibration", "test"])
    entries = read_manifest(manifest)
    assert [e.label for e in entries] == ["present", "absent"]
    assert entries[0].path.exists()
    assert [e.label for e in read_manifest(manifest, split="test")] == ["absent"]


def test_bad_manifest(tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"path": "x"}')
    with pytest.raises(CalibrationError):
        read_manifest(p)
    p.write_text('[{"path": "x"}]')
    with pytest.raises(CalibrationError):
        read_manifest(p)


def test_parse_grid_spec():
    assert parse_grid_spec("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid_spec("0.1,0.5") == [0.1, 0.5]
    assert parse_grid_spec("0:1:0.025") == default_grid()
    with pytest.raises(CalibrationError):
        parse_grid_spec("0:1:0")
