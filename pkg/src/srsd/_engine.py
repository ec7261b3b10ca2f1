"""Shared sequential scanning engine behind the mean and variance detectors.

Both detectors run the same state machine over a stream of observations:

* the open regime keeps a running estimate from its most recent <= l member
  values (bootstrapped from the first l observations of the series);
* an observation falling outside the regime's critical bounds opens a
  candidate change-point and starts a cumulative shift index over the next
  points (the candidate included, l points in total);
* if the index keeps the candidate's sign through all l points the candidate
  is confirmed and a new regime starts at it; if the sign is lost the
  candidate folds back into the open regime and the points seen during the
  failed test are rescanned as ordinary observations.

The engine works on transformed values (raw values for the mean detector,
squared residuals for the variance detector); the critical-bound geometry is
additive for means and multiplicative for variances.
"""
from __future__ import annotations

from collections import deque

from .core import (
    ChangePoint,
    DataError,
    MonitorState,
    PendingCandidate,
    RegimeWindow,
    StepStatus,
)

_STABLE = StepStatus(state="stable")


def _transform(state: MonitorState, raw: float) -> float:
    return raw * raw if state.kind == "variance" else raw


def _bounds(state: MonitorState) -> tuple[float, float]:
    est = state.current.estimate()
    if state.kind == "mean":
        return est - state.threshold, est + state.threshold
    return est / state.threshold, est * state.threshold


def init_state(
    kind: str,
    history: list[float],
    l: int,
    threshold: float,
    index_scale: float,
) -> MonitorState:
    """Seed a monitor from at least l historical observations.

    The first regime's estimate is bootstrapped from the first l points.
    Those points are then scanned like any later observation, so candidates
    inside the bootstrap window are still found; index 1 alone can never be a
    change-point.
    """
    if len(history) < l:
        raise DataError(f"need at least l={l} points to initialize, got {len(history)}")
    state = MonitorState(
        kind=kind,  # type: ignore[arg-type]
        cap=l,
        threshold=threshold,
        index_scale=index_scale,
        next_index=2,
        raw=[float(history[0])],
        current=RegimeWindow(start=1, count=0, cap=l),
        pending=None,
        change_points=[],
        trace=[0.0],
    )
    bootstrap = [(k + 1, _transform(state, float(history[k]))) for k in range(l)]
    state.current = RegimeWindow.from_members(start=1, cap=l, members=bootstrap)
    for value in history[1:]:
        advance(state, float(value))
    return state


def advance(state: MonitorState, raw_value: float) -> StepStatus:
    """Feed one observation; returns the detector's resulting status."""
    raw_value = float(raw_value)
    index = state.next_index
    state.next_index += 1
    state.raw.append(raw_value)
    state.trace.append(0.0)
    queue: deque[tuple[int, float]] = deque([(index, _transform(state, raw_value))])
    status = _STABLE
    while queue:
        i, value = queue.popleft()
        if state.pending is None:
            status = _scan(state, i, value)
            continue
        pend = state.pending
        pend.csum += value - pend.critical
        pend.tested += 1
        pend.values.append(value)
        lost_sign = pend.csum <= 0.0 if pend.direction == "up" else pend.csum >= 0.0
        if lost_sign:
            # Failed test: the candidate is a fluctuation of the open regime;
            # everything after it is rescanned as fresh observations.
            state.pending = None
            state.current.push(pend.index, pend.values[0])
            replay = [(pend.index + k, pend.values[k]) for k in range(len(pend.values) - 1, 0, -1)]
            for item in replay:
                queue.appendleft(item)
            status = _STABLE
        elif pend.tested == state.cap:
            status = _confirm(state, pend, provisional=False)
        else:
            status = StepStatus(
                state="candidate",
                candidate_index=pend.index,
                index_value=pend.csum / state.index_scale,
            )
    return status


def _scan(state: MonitorState, i: int, value: float) -> StepStatus:
    lo, hi = _bounds(state)
    if i > 1 and value > hi:
        direction, critical = "up", hi
    elif i > 1 and value < lo:
        direction, critical = "down", lo
    else:
        state.current.push(i, value)
        return _STABLE
    if state.index_scale <= 0.0:
        raise DataError("degenerate series: shift index scale is zero")
    state.pending = PendingCandidate(
        index=i,
        direction=direction,  # type: ignore[arg-type]
        critical=critical,
        csum=value - critical,
        tested=1,
        values=[value],
    )
    return StepStatus(
        state="candidate",
        candidate_index=i,
        index_value=state.pending.csum / state.index_scale,
    )


def _confirm(state: MonitorState, pend: PendingCandidate, provisional: bool) -> StepStatus:
    cp = ChangePoint(
        index=pend.index,
        index_value=pend.csum / state.index_scale,
        p_value=None,
        provisional=provisional,
    )
    state.change_points.append(cp)
    state.trace[pend.index - 1] = cp.index_value
    window = [(pend.index + k, v) for k, v in enumerate(pend.values)]
    state.current = RegimeWindow.from_members(
        start=pend.index, cap=state.cap, members=window
    )
    state.pending = None
    return StepStatus(state="confirmed", change_point=cp)


def finalize(state: MonitorState) -> tuple[list[tuple[int, int]], list[ChangePoint], list[float]]:
    """Close the scan: resolve a pending tail candidate and cut regime spans.

    A candidate still under test when the series ends is emitted as a
    provisional change-point (its index kept its sign through every point
    that was available), but it does not split the open regime: only
    confirmed change-points delimit regime spans, so the last span runs to
    the end of the series. The state itself is not modified.
    """
    n = len(state.raw)
    cps = list(state.change_points)
    trace = list(state.trace)
    if state.pending is not None:
        pend = state.pending
        cp = ChangePoint(
            index=pend.index,
            index_value=pend.csum / state.index_scale,
            p_value=None,
            provisional=True,
        )
        cps.append(cp)
        trace[pend.index - 1] = cp.index_value
    starts = [1] + [cp.index for cp in cps if not cp.provisional]
    ends = [s - 1 for s in starts[1:]] + [n]
    return list(zip(starts, ends)), cps, trace
