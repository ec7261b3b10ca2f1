#!/usr/bin/env python3
"""The three-step correlation pipeline on the packaged example pair.

The bundled fixture is a 70-point bivariate series whose correlation flips
from -0.6 to +0.6 at index 36, with mean and variance shifts planted at
other indices in both components.  This script walks through what each
adjustment step finds, then shows why skipping the first two steps produces
a spurious correlation shift at the wrong index.
"""

import numpy as np

from srsd import DetectionParams, canonical_fixture, run_srsd, step_skipping_mode


def describe(label, cps):
    parts = []
    for cp in cps:
        tag = "?" if cp.provisional else ""
        parts.append(f"{cp.index}{tag}")
    print(f"  {label:<22} {', '.join(parts) if parts else 'none'}")


def main():
    x, y, expected = canonical_fixture()
    params = DetectionParams(p=0.05, l=20)

    print("planted structure:", {k: v[0] for k, v in expected.items()})
    result = run_srsd(x, y, params)

    print("\nstep 1+2 detections (? marks provisional):")
    describe("x mean shifts", result.mean_results[0].change_points)
    describe("y mean shifts", result.mean_results[1].change_points)
    describe("x variance shifts", result.variance_results[0].change_points)
    describe("y variance shifts", result.variance_results[1].change_points)

    print("\nstep 3: variance shifts of the sum/difference channels")
    describe("sum channel", result.correlation.sum_channel.change_points)
    describe("diff channel", result.correlation.diff_channel.change_points)
    print("  candidate audit:")
    for record in result.correlation.candidates:
        verdict = "accepted" if record.accepted else "rejected"
        print(
            f"    {record.source:>4} channel at {record.index:2d} "
            f"(p={record.p_value:.4g}) -> {verdict}"
        )

    print("\ncorrelation regimes:")
    for regime in result.correlation_regimes:
        print(
            f"  [{regime.start:2d}, {regime.end:2d}]  r={regime.value:+.3f}  "
            f"90% CI ({regime.ci_low:+.3f}, {regime.ci_high:+.3f})"
        )
    shift = [c for c in result.correlation_change_points if not c.provisional][0]
    print(f"  shift at {shift.index}, p={shift.p_value:.2e}")

    # Without the mean/variance adjustments, the y-variance drop at 21
    # masquerades as a correlation change and the true shift at 36 is lost.
    skipped = step_skipping_mode(x, y, params, skip=("mean", "variance"))
    naive = [c.index for c in skipped.correlation_change_points if not c.provisional]
    print(f"\nskipping adjustment steps instead reports shifts at: {naive}")

    raw_r = np.corrcoef(x.values, y.values)[0, 1]
    print(f"whole-series raw correlation: {raw_r:+.3f} (true regimes: -0.6 then +0.6)")


if __name__ == "__main__":
    main()
