"""
Calibrating the three thresholds
================================

Threshold selection from 200 positive and 200 negative labelled maps. Every
point of a 41x41x41 grid is tried; the one with the best balanced accuracy
wins. The score triples are also exported for a 3-D scatter plot.
"""

from pathlib import Path

import numpy as np

from simverify import Thresholds
from simverify.calibration import calibrate, export_scatter, write_scatter_csv
from simverify.scoring import decide, score
from simverify.synth import default_specs, generate

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

# %%
# A calibration set: 200 concentrated maps (present) and 200 scattered maps
# (absent), each from its own seed.
specs = default_specs(200, 200, base_seed=1)
scored = [(score(generate(s)[0]), s.label) for s in specs]

# %%
# Grid search.
result = calibrate(scored)
print("calibrated thresholds:", result.thresholds)
print(f"balanced accuracy {result.objective_value:.3f} "
      f"(positive {result.positive_acc:.3f}, negative {result.negative_acc:.3f})")


def balanced(t):
    pos = np.mean([decide(s, t) for s, lab in scored if lab == "present"])
    neg = np.mean([not decide(s, t) for s, lab in scored if lab == "absent"])
    return (pos + neg) / 2


print(f"default thresholds {Thresholds().as_tuple()} give balanced accuracy {balanced(Thresholds()):.3f}")

# %%
# Score triples for plotting.
path = write_scatter_csv(export_scatter(scored), out / "scatter.csv")
print("scatter written to", path)

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    for label, color in (("present", "tab:red"), ("absent", "tab:blue")):
        pts = np.array([s.as_tuple() for s, lab in scored if lab == label])
        ax.scatter(*pts.T, s=6, c=color, label=label)
    ax.set_xlabel("strength")
    ax.set_ylabel("compactness")
    ax.set_zlabel("purity")
    ax.legend()
    fig.savefig(out / "scatter.png", dpi=120)
    print("plot written to", out / "scatter.png")
