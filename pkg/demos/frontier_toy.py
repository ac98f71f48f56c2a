"""Trade-off frontier on a toy categorical distribution.

Sweeps the multiplier w from 0 toward the saturation bound for two kernel
pairs and prints the (quality, diversity) curve.  For the log-likelihood /
entropy pair the frontier coincides with the tempered family q_i ~ p_i^(-w),
which places the ground truth itself on the curve at w = -1.

Run:  python demos/frontier_toy.py [--plot]
"""

import sys

import numpy as np

from qdeval import frontier_point, ll_se, cr_nrr, random_toy, sweep, temper

p = random_toy(20, seed=7)
print(f"toy distribution: 20 categories, entropy range [0, {np.log(20):.3f}]")

for pair in (ll_se(), cr_nrr()):
    curve = sweep(pair, p, n_points=12, w_min=-12.0)
    print(f"\n{pair.name} frontier (w from 0 to {curve.points[-1].w:.1f}, "
          f"saturation bound B={curve.B:.3g}):")
    print(f"{'w':>8} {'quality':>12} {'diversity':>12}")
    for pt in curve.points:
        print(f"{pt.w:8.3f} {pt.u:12.6f} {pt.v:12.6f}")

# the truth is a frontier point of the matched pair: w=-1 reproduces p exactly
pt = frontier_point(ll_se(), p, -1.0)
print(f"\nll-se at w=-1 recovers the truth: "
      f"max|q - p| = {np.max(np.abs(pt.q.probs - p.probs)):.2e}")
pt2 = frontier_point(ll_se(), p, -2.0)
print(f"ll-se at w=-2 equals temper(p, 2): "
      f"max diff = {np.max(np.abs(pt2.q.probs - temper(p, 2.0).probs)):.2e}")

if "--plot" in sys.argv:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, pair in zip(axes, (ll_se(), cr_nrr())):
        curve = sweep(pair, p, n_points=64, w_min=-12.0)
        ax.plot([pt.v for pt in curve.points], [pt.u for pt in curve.points],
                "-o", ms=3, label="frontier")
        from qdeval import diversity, quality
        ax.plot(diversity(pair, p), quality(pair, p, p), "r*", ms=12,
                label="truth")
        ax.set_xlabel("diversity")
        ax.set_ylabel("quality")
        ax.set_title(pair.name)
        ax.legend()
    fig.tight_layout()
    fig.savefig("frontier_toy.png", dpi=120)
    print("\nwrote frontier_toy.png")
