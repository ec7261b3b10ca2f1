#!/usr/bin/env python3
"""Mean-shift detection, batch and streaming.

Builds a series with two planted mean shifts, runs the sequential detector,
and prints the regimes it recovers.  The same series is then replayed one
observation at a time through the monitoring interface to show the
candidate -> confirmed lifecycle a live deployment would observe.
"""

import numpy as np

from srsd import (
    DetectionParams,
    TimeSeries,
    detect_mean,
    finalize_mean,
    init_mean_monitor,
    monitor_mean,
    running_avg_variance,
    threshold_delta,
)


def build_series(seed=20100):
    rng = np.random.default_rng(seed)
    level = np.concatenate([np.zeros(40), np.full(35, 1.8), np.full(45, 0.4)])
    return TimeSeries(values=level + rng.standard_normal(level.size) * 0.7)


def main():
    params = DetectionParams(p=0.05, l=20)
    series = build_series()

    delta = threshold_delta(params, running_avg_variance(series.values, params.l))
    print(f"series: n={len(series.values)}, planted shifts at 41 and 76")
    print(f"params: p={params.p}, l={params.l}  ->  detectable shift size {delta:.3f}\n")

    result = detect_mean(series, params)
    print("batch detection")
    for regime in result.regimes:
        p_txt = "--" if regime.shift_p_value is None else f"p={regime.shift_p_value:.2e}"
        print(
            f"  regime [{regime.start:3d}, {regime.end:3d}]  "
            f"mean={regime.value:+.3f}  {p_txt}"
        )
    for cp in result.change_points:
        tag = "provisional" if cp.provisional else "confirmed"
        print(f"  change-point at {cp.index} ({tag})")

    # Replay the same data as a stream.  Sharing the whole-series threshold
    # variance keeps the streaming run identical to the batch run.
    print("\nstreaming replay (first 25 points as history)")
    avg_var = running_avg_variance(series.values, params.l)
    state = init_mean_monitor(series.values[:25], params, avg_var=avg_var)
    last_state = "stable"
    for pos, value in enumerate(series.values[25:], start=26):
        state, status = monitor_mean(state, float(value), params)
        if status.state != last_state:
            detail = ""
            if status.state == "candidate":
                detail = f" (opened at {status.candidate_index})"
            elif status.state == "confirmed":
                detail = f" (change-point {status.change_point.index})"
            print(f"  t={pos:3d}: {last_state} -> {status.state}{detail}")
            last_state = status.state

    final = finalize_mean(series, state)
    same = final == result
    print(f"\nfinalized streaming result equals batch result: {same}")


if __name__ == "__main__":
    main()
