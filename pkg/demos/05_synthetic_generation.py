#!/usr/bin/env python3
"""Generating correlated test pairs with known regime structure.

A RegimeSpec lays out piecewise-constant segments for the correlation, the
two means, and the two variances.  generate_pair draws a bivariate normal
pair honoring all five layouts at once, which makes planted ground truth
available for validating any detector.
"""

from dataclasses import replace

import numpy as np

from srsd import (
    DetectionParams,
    RegimeSpec,
    canonical_spec,
    derive_seeds,
    generate_pair,
    pearson_r,
    run_srsd,
)


def main():
    spec = RegimeSpec(
        n=600,
        correlation=((1, -0.4), (301, 0.8)),
        x_mean=((1, 0.0), (201, 2.0)),
        y_variance=((1, 1.0), (451, 4.0)),
        seed=77,
    )
    x, y = generate_pair(spec)
    print("spec:", spec)

    print("\nrealized segment statistics (n=600):")
    for lo, hi, rho in ((1, 300, -0.4), (301, 600, 0.8)):
        seg = slice(lo - 1, hi)
        r = pearson_r(x.values[seg], y.values[seg])
        print(f"  correlation [{lo:3d}, {hi:3d}]: r={r:+.3f} (planted {rho:+.1f})")
    print(f"  x mean [201, 600]: {np.mean(x.values[200:]):+.3f} (planted +2.0)")
    print(f"  y variance [451, 600]: {np.var(y.values[450:], ddof=1):.3f} (planted 4.0)")

    # Same seed, same bytes — specs are reproducible experiment definitions.
    x2, _ = generate_pair(spec)
    print(f"\nregeneration identical: {bool(np.all(x2.values == x.values))}")

    # derive_seeds fans a base seed into independent streams for ensembles.
    print("\nensemble over the packaged 70-point scenario (20 draws):")
    base_spec = canonical_spec()
    params = DetectionParams(p=0.05, l=20)
    hits = []
    for seed in derive_seeds(1234, 20):
        xs, ys = generate_pair(replace(base_spec, seed=int(seed)))
        res = run_srsd(xs, ys, params)
        conf = [c.index for c in res.correlation_change_points if not c.provisional]
        hits.append(min(conf, key=lambda i: abs(i - 36)) if conf else None)
    located = [h for h in hits if h is not None]
    print(f"  correlation shift found in {len(located)}/20 draws")
    print(f"  detected indices (true 36): {located}")


if __name__ == "__main__":
    main()
