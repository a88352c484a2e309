"""
Which score dimensions matter?
==============================

The cascaded decision can be restricted to any non-empty subset of strength
(S), compactness (C) and purity (P). Here all seven subsets are evaluated on
a held-out synthetic corpus with the default thresholds 0.475 / 0.4 / 0.7.

Strength alone rejects nothing: the sigmoid of a non-negative input never
drops below 0.5, which already clears 0.475.
"""

import tempfile
from pathlib import Path

from simverify.calibration import read_manifest
from simverify.evaluation import ablate, evaluate
from simverify.synth import generate_corpus, preset_specs

with tempfile.TemporaryDirectory() as tmp:
    specs, _ = preset_specs("fragmented", base_seed=0)
    entries = read_manifest(generate_corpus(specs, Path(tmp)))
    rows = ablate(evaluate(entries))

print(" S  C  P |    pos    neg    all")
for r in rows:
    marks = "  ".join("x" if d in r.mask else " " for d in "SCP")
    print(f" {marks} | {100 * r.positive_acc:6.1f} {100 * r.negative_acc:6.1f} {100 * r.overall_acc:6.1f}")
