#!/usr/bin/env python3
"""Why persistent (red) noise needs prewhitening, and how the two AR(1)
bias corrections compare.

An AR(1) process with no shifts at all fools the mean-shift detector almost
every time, because runs of correlated points look like regimes.  Removing
the fitted lag-1 component first restores the detector's white-noise
behavior.  The second half compares the closed-form (mpk) and iterated
(ip4) small-sample corrections for the AR(1) coefficient.
"""

import numpy as np
import scipy.signal as sig

from srsd import DetectionParams, TimeSeries, derive_seeds, detect_mean, estimate_ar1, prewhiten

ALPHA = 0.6
PARAMS = DetectionParams(p=0.05, l=20)


def red_noise(rng, n, alpha=ALPHA, burn_in=50):
    eps = rng.standard_normal(n + burn_in)
    return sig.lfilter([1.0], [1.0, -alpha], eps)[burn_in:]


def confirmed(result):
    return [c.index for c in result.change_points if not c.provisional]


def main():
    rng = np.random.default_rng(606)
    series = TimeSeries(values=red_noise(rng, 200))

    print(f"single AR(1) realization, alpha={ALPHA}, n=200, no planted shifts")
    est = estimate_ar1(series, 10, method="ip4")
    print(
        f"  estimated alpha: ols={est.alpha_ols:+.3f}, corrected={est.alpha:+.3f} "
        f"({est.n_subsamples} windows of {est.m})"
    )

    raw_hits = confirmed(detect_mean(series, PARAMS))
    filtered = prewhiten(series, est.alpha)
    pw_hits = confirmed(detect_mean(filtered, PARAMS))
    print(f"  spurious mean shifts, raw series:        {raw_hits or 'none'}")
    print(f"  spurious mean shifts, prewhitened:       {pw_hits or 'none'}")

    print("\nover 100 independent realizations:")
    raw_rate = pw_rate = 0
    for seed in derive_seeds(8080, 100):
        g = np.random.default_rng(seed)
        ts = TimeSeries(values=red_noise(g, 200))
        raw_rate += bool(confirmed(detect_mean(ts, PARAMS)))
        alpha_hat = estimate_ar1(ts, 10, method="ip4").alpha
        pw_rate += bool(confirmed(detect_mean(prewhiten(ts, alpha_hat), PARAMS)))
    print(f"  series with >=1 spurious shift, raw:         {raw_rate}/100")
    print(f"  series with >=1 spurious shift, prewhitened: {pw_rate}/100")
    print("  (white noise at these settings triggers in roughly 55/100)")

    print(f"\nAR(1) coefficient corrections at window m=5, true alpha={ALPHA}:")
    ip4 = []
    mpk = []
    for seed in derive_seeds(9090, 2000):
        g = np.random.default_rng(seed)
        ts = TimeSeries(values=red_noise(g, 100))
        ip4.append(estimate_ar1(ts, 5, method="ip4").alpha)
        mpk.append(estimate_ar1(ts, 5, method="mpk").alpha)
    print(f"  median ip4 estimate: {np.median(ip4):+.3f}")
    print(f"  median mpk estimate: {np.median(mpk):+.3f}")
    print("  the iterated correction stays close to truth at windows this short")


if __name__ == "__main__":
    main()
