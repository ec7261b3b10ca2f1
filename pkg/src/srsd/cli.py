"""Command-line interface: CSV ingestion, detection runs, synthetic data, diagnostics.

Subcommands
-----------
detect-mean / detect-variance
    Run one detector on a single named column.
detect-correlation
    Run the full three-step pipeline on two named columns.
generate
    Write a synthetic bivariate CSV from a regime description (the built-in
    reference scenario by default). SRSD_SEED in the environment overrides
    --seed.
diagnose
    Emit plot-ready diagnostics: the running cross-correlation of the series
    as analyzed vs. after mean/variance adjustment, and optionally per-index
    RSI/RSSI traces.

Formats
-------
CSV input has a header row; value columns are selected by name with
--columns. If the first column is not selected and holds strictly increasing
numbers, it is used as time labels (years, typically). CSV output uses 9
significant digits; JSON output uses shortest round-trip floats and carries a
"schema_version" field, so identical inputs and config produce byte-identical
files. Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .core import (
    ChangePoint,
    DataError,
    DetectionParams,
    ParameterError,
    Regime,
    TimeSeries,
    validate_params,
)
from .mean_shift import MeanShiftResult, detect_mean
from .pipeline import CandidateRecord, CorrelationResult, SrsdResult, run_srsd
from .prewhiten import Ar1Estimate, estimate_ar1, prewhiten
from .stats import pearson_r
from .synthgen import RegimeSpec, canonical_spec, generate_pair
from .variance_shift import VarianceShiftResult, detect_variance

__all__ = ["main", "parse_csv", "result_to_json", "result_from_json"]

SCHEMA_VERSION = "1"


# ---------------------------------------------------------------------------
# CSV input


def _parse_cell(cell: str, column: str, row: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DataError(
            f"could not parse {cell.strip()!r} in column {column!r} at row {row}"
        ) from None


def parse_csv(path: str, columns: Sequence[str]) -> list[TimeSeries]:
    """Read named columns from a headered CSV as TimeSeries.

    Row numbers in error messages are physical file rows (the header is row
    1). The first column doubles as time labels when it is not itself
    selected and holds strictly increasing numbers.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    if not lines:
        raise DataError(f"{path}: file is empty")
    header = [name.strip() for name in lines[0].split(",")]
    for name in columns:
        if header.count(name) > 1:
            raise DataError(f"{path}: column {name!r} appears twice in the header")
        if name not in header:
            raise DataError(
                f"{path}: column {name!r} not found; available: {', '.join(header)}"
            )
    rows = []
    for rownum, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise DataError(
                f"{path}: row {rownum} has {len(cells)} cells, expected {len(header)}"
            )
        rows.append((rownum, cells))
    if not rows:
        raise DataError(f"{path}: no observations")

    labels = None
    if header[0] not in columns:
        try:
            first = [float(cells[0]) for _, cells in rows]
        except ValueError:
            first = None
        if first is not None and all(b > a for a, b in zip(first, first[1:])):
            labels = first

    out = []
    for name in columns:
        col = header.index(name)
        values = [_parse_cell(cells[col], name, rownum) for rownum, cells in rows]
        out.append(TimeSeries(values, labels=labels, name=name))
    return out


# ---------------------------------------------------------------------------
# JSON serialization (shortest round-trip floats, fixed key order)


def _ts_to_obj(ts: TimeSeries) -> dict[str, Any]:
    return {
        "name": ts.name,
        "values": [float(v) for v in ts.values],
        "labels": None if ts.labels is None else [float(v) for v in ts.labels],
    }


def _ts_from_obj(obj: dict[str, Any]) -> TimeSeries:
    return TimeSeries(obj["values"], labels=obj["labels"], name=obj["name"])


def _regime_to_obj(regime: Regime) -> dict[str, Any]:
    return {
        "start": regime.start,
        "end": regime.end,
        "kind": regime.kind,
        "value": regime.value,
        "shift_p_value": regime.shift_p_value,
        "ci_low": regime.ci_low,
        "ci_high": regime.ci_high,
    }


def _cp_to_obj(cp: ChangePoint) -> dict[str, Any]:
    return {
        "index": cp.index,
        "index_value": cp.index_value,
        "p_value": cp.p_value,
        "provisional": cp.provisional,
    }


def _params_to_obj(params: DetectionParams) -> dict[str, Any]:
    return {"p": params.p, "l": params.l, "prewhiten": params.prewhiten, "m": params.m}


def _params_from_obj(obj: dict[str, Any]) -> DetectionParams:
    return DetectionParams(p=obj["p"], l=obj["l"], prewhiten=obj["prewhiten"], m=obj["m"])


def _ar1_to_obj(est: Ar1Estimate | None) -> dict[str, Any] | None:
    if est is None:
        return None
    return {
        "alpha": est.alpha,
        "method": est.method,
        "m": est.m,
        "n_subsamples": est.n_subsamples,
        "alpha_ols": est.alpha_ols,
        "clamped": est.clamped,
    }


def _ar1_from_obj(obj: dict[str, Any] | None) -> Ar1Estimate | None:
    return None if obj is None else Ar1Estimate(**obj)


def _mean_to_obj(res: MeanShiftResult) -> dict[str, Any]:
    return {
        "regimes": [_regime_to_obj(r) for r in res.regimes],
        "change_points": [_cp_to_obj(c) for c in res.change_points],
        "residuals": _ts_to_obj(res.residuals),
        "rsi": [float(v) for v in res.rsi],
    }


def _mean_from_obj(obj: dict[str, Any]) -> MeanShiftResult:
    return MeanShiftResult(
        regimes=[Regime(**r) for r in obj["regimes"]],
        change_points=[ChangePoint(**c) for c in obj["change_points"]],
        residuals=_ts_from_obj(obj["residuals"]),
        rsi=np.asarray(obj["rsi"], dtype=float),
    )


def _variance_to_obj(res: VarianceShiftResult | None) -> dict[str, Any] | None:
    if res is None:
        return None
    return {
        "regimes": [_regime_to_obj(r) for r in res.regimes],
        "change_points": [_cp_to_obj(c) for c in res.change_points],
        "normalized": _ts_to_obj(res.normalized),
        "rssi": [float(v) for v in res.rssi],
    }


def _variance_from_obj(obj: dict[str, Any] | None) -> VarianceShiftResult | None:
    if obj is None:
        return None
    return VarianceShiftResult(
        regimes=[Regime(**r) for r in obj["regimes"]],
        change_points=[ChangePoint(**c) for c in obj["change_points"]],
        normalized=_ts_from_obj(obj["normalized"]),
        rssi=np.asarray(obj["rssi"], dtype=float),
    )


def result_to_json(result: SrsdResult, command: str = "detect-correlation") -> str:
    """Serialize a full pipeline result, intermediates and audit included."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": "srsd",
        "version": __version__,
        "command": command,
        "params": _params_to_obj(result.params),
        "corr_params": _params_to_obj(result.corr_params),
        "skipped": sorted(result.skipped),
        "ar1": [_ar1_to_obj(est) for est in result.ar1],
        "x": _ts_to_obj(result.x),
        "y": _ts_to_obj(result.y),
        "mean_results": [_mean_to_obj(r) for r in result.mean_results],
        "variance_results": [_variance_to_obj(r) for r in result.variance_results],
        "correlation": {
            "regimes": [_regime_to_obj(r) for r in result.correlation.regimes],
            "change_points": [_cp_to_obj(c) for c in result.correlation.change_points],
            "candidates": [
                {
                    "source": c.source,
                    "index": c.index,
                    "p_value": c.p_value,
                    "accepted": c.accepted,
                }
                for c in result.correlation.candidates
            ],
            "sum_channel": _variance_to_obj(result.correlation.sum_channel),
            "diff_channel": _variance_to_obj(result.correlation.diff_channel),
        },
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def result_from_json(text: str) -> SrsdResult:
    """Rebuild the SrsdResult a result file describes; inverse of result_to_json."""
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DataError(
            f"unsupported schema_version {doc.get('schema_version')!r}; "
            f"expected {SCHEMA_VERSION!r}"
        )
    corr = doc["correlation"]
    return SrsdResult(
        x=_ts_from_obj(doc["x"]),
        y=_ts_from_obj(doc["y"]),
        params=_params_from_obj(doc["params"]),
        corr_params=_params_from_obj(doc["corr_params"]),
        skipped=frozenset(doc["skipped"]),
        ar1=tuple(_ar1_from_obj(est) for est in doc["ar1"]),
        mean_results=tuple(_mean_from_obj(r) for r in doc["mean_results"]),
        variance_results=tuple(_variance_from_obj(r) for r in doc["variance_results"]),
        correlation=CorrelationResult(
            regimes=[Regime(**r) for r in corr["regimes"]],
            change_points=[ChangePoint(**c) for c in corr["change_points"]],
            candidates=[CandidateRecord(**c) for c in corr["candidates"]],
            sum_channel=_variance_from_obj(corr["sum_channel"]),
            diff_channel=_variance_from_obj(corr["diff_channel"]),
        ),
    )


def _single_to_json(
    command: str,
    params: DetectionParams,
    series: TimeSeries,
    ar1: Ar1Estimate | None,
    payload: dict[str, Any],
) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": "srsd",
        "version": __version__,
        "command": command,
        "params": _params_to_obj(params),
        "series": _ts_to_obj(series),
        "ar1": _ar1_to_obj(ar1),
    }
    doc.update(payload)
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# CSV output (9 significant digits)


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.9g" % value
    return str(value)


_TABLE_HEADER = (
    "record,series,kind,start,end,index,value,p_value,ci_low,ci_high,provisional,accepted"
)


def _table_rows(
    series_name: str,
    regimes: Sequence[Regime],
    change_points: Sequence[ChangePoint],
    candidates: Sequence[CandidateRecord] = (),
) -> list[str]:
    rows = []
    for r in regimes:
        rows.append(
            ",".join(
                [
                    "regime",
                    series_name,
                    r.kind,
                    str(r.start),
                    str(r.end),
                    "",
                    _fmt(r.value),
                    _fmt(r.shift_p_value),
                    _fmt(r.ci_low),
                    _fmt(r.ci_high),
                    "",
                    "",
                ]
            )
        )
    for c in change_points:
        kind = regimes[0].kind if regimes else ""
        rows.append(
            ",".join(
                [
                    "change_point",
                    series_name,
                    kind,
                    "",
                    "",
                    str(c.index),
                    _fmt(c.index_value),
                    _fmt(c.p_value),
                    "",
                    "",
                    _fmt(c.provisional),
                    "",
                ]
            )
        )
    for cand in candidates:
        rows.append(
            ",".join(
                [
                    "candidate",
                    cand.source,
                    "correlation",
                    "",
                    "",
                    str(cand.index),
                    "",
                    _fmt(cand.p_value),
                    "",
                    "",
                    "",
                    _fmt(cand.accepted),
                ]
            )
        )
    return rows


def _single_to_csv(res: MeanShiftResult | VarianceShiftResult, name: str) -> str:
    rows = [_TABLE_HEADER, *_table_rows(name, res.regimes, res.change_points)]
    return "\n".join(rows) + "\n"


def _srsd_to_csv(result: SrsdResult) -> str:
    rows = [_TABLE_HEADER]
    for series, mean_res in zip((result.x, result.y), result.mean_results):
        rows += _table_rows(series.name or "series", mean_res.regimes, mean_res.change_points)
    for series, var_res in zip((result.x, result.y), result.variance_results):
        rows += _table_rows(series.name or "series", var_res.regimes, var_res.change_points)
    rows += _table_rows(
        "correlation",
        result.correlation.regimes,
        result.correlation.change_points,
        result.correlation.candidates,
    )
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# Commands


def _write_output(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _params_from_args(args: argparse.Namespace) -> DetectionParams:
    return validate_params(
        DetectionParams(p=args.p, l=args.l, prewhiten=args.prewhiten, m=args.m)
    )


def _corr_params_from_args(
    args: argparse.Namespace, params: DetectionParams
) -> DetectionParams | None:
    if args.p_corr is None and args.l_corr is None:
        return None
    return validate_params(
        DetectionParams(
            p=args.p_corr if args.p_corr is not None else params.p,
            l=args.l_corr if args.l_corr is not None else params.l,
        )
    )


def _columns(args: argparse.Namespace, expected: int) -> list[str]:
    names = [c.strip() for c in args.columns.split(",") if c.strip()]
    if len(names) != expected:
        raise ParameterError(
            f"{args.command} requires exactly {expected} column"
            f"{'s' if expected != 1 else ''}, got {len(names)} from {args.columns!r}"
        )
    return names


def _cmd_detect_single(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    (series,) = parse_csv(args.input, _columns(args, 1))
    ar1 = None
    if params.prewhiten != "none":
        ar1 = estimate_ar1(series, params.m, params.prewhiten)
        series = prewhiten(series, ar1.alpha)
    if args.command == "detect-mean":
        res: MeanShiftResult | VarianceShiftResult = detect_mean(series, params)
        payload: dict[str, Any] = {
            "regimes": [_regime_to_obj(r) for r in res.regimes],
            "change_points": [_cp_to_obj(c) for c in res.change_points],
            "residuals": _ts_to_obj(res.residuals),
            "rsi": [float(v) for v in res.rsi],
        }
    else:
        res = detect_variance(series, params)
        payload = {
            "regimes": [_regime_to_obj(r) for r in res.regimes],
            "change_points": [_cp_to_obj(c) for c in res.change_points],
            "normalized": _ts_to_obj(res.normalized),
            "rssi": [float(v) for v in res.rssi],
        }
    if args.format == "json":
        text = _single_to_json(args.command, params, series, ar1, payload)
    else:
        text = _single_to_csv(res, series.name or "series")
    _write_output(args.output, text)
    return 0


def _cmd_detect_correlation(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    x, y = parse_csv(args.input, _columns(args, 2))
    result = run_srsd(x, y, params, corr_params=_corr_params_from_args(args, params))
    if args.format == "json":
        text = result_to_json(result)
    else:
        text = _srsd_to_csv(result)
    _write_output(args.output, text)
    return 0


def _spec_from_file(path: str, seed: int) -> RegimeSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict) or "n" not in doc:
        raise DataError(f"{path}: spec must be a JSON object with at least 'n'")
    kwargs: dict[str, Any] = {"n": doc["n"], "seed": seed}
    for key in ("correlation", "x_mean", "y_mean", "x_variance", "y_variance"):
        if key in doc:
            try:
                kwargs[key] = tuple((int(s), float(v)) for s, v in doc[key])
            except (TypeError, ValueError):
                raise DataError(
                    f"{path}: {key} must be a list of [start, value] pairs"
                ) from None
    if "correlation" not in kwargs:
        raise DataError(f"{path}: spec requires a 'correlation' segment list")
    return RegimeSpec(**kwargs)


def _cmd_generate(args: argparse.Namespace) -> int:
    seed = args.seed
    env_seed = os.environ.get("SRSD_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            raise ParameterError(f"SRSD_SEED must be an integer, got {env_seed!r}") from None
    spec = _spec_from_file(args.spec, seed) if args.spec else canonical_spec(seed)
    x, y = generate_pair(spec)
    rows = ["index,x,y"]
    for i, (xv, yv) in enumerate(zip(x.values, y.values), start=1):
        rows.append("%d,%s,%s" % (i, _fmt(float(xv)), _fmt(float(yv))))
    _write_output(args.output, "\n".join(rows) + "\n")
    return 0


def _running_correlation(x: np.ndarray, y: np.ndarray, window: int) -> list[float]:
    return [
        pearson_r(x[s : s + window], y[s : s + window])
        for s in range(len(x) - window + 1)
    ]


def _cmd_diagnose(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    x, y = parse_csv(args.input, _columns(args, 2))
    result = run_srsd(x, y, params, corr_params=_corr_params_from_args(args, params))
    n = len(result.x)
    if not 2 <= args.window <= n:
        raise ParameterError(f"--window must lie in [2, {n}], got {args.window}")
    raw_x = np.asarray(result.x.values, dtype=float)
    raw_y = np.asarray(result.y.values, dtype=float)
    adj_x = np.asarray(result.variance_results[0].normalized.values, dtype=float)
    adj_y = np.asarray(result.variance_results[1].normalized.values, dtype=float)
    raw = _running_correlation(raw_x, raw_y, args.window)
    adjusted = _running_correlation(adj_x, adj_y, args.window)
    rows = ["start,end,raw,adjusted"]
    for i, (rv, av) in enumerate(zip(raw, adjusted)):
        rows.append(
            "%d,%d,%s,%s" % (i + 1, i + args.window, _fmt(float(rv)), _fmt(float(av)))
        )
    _write_output(args.output, "\n".join(rows) + "\n")

    if args.traces:
        trace_rows = ["series,detector,index,value"]
        named: list[tuple[str, str, np.ndarray]] = [
            (result.x.name or "x", "rsi", result.mean_results[0].rsi),
            (result.y.name or "y", "rsi", result.mean_results[1].rsi),
            (result.x.name or "x", "rssi", result.variance_results[0].rssi),
            (result.y.name or "y", "rssi", result.variance_results[1].rssi),
        ]
        if result.correlation.sum_channel is not None:
            named.append(("sum", "rssi", result.correlation.sum_channel.rssi))
        if result.correlation.diff_channel is not None:
            named.append(("diff", "rssi", result.correlation.diff_channel.rssi))
        for name, detector, trace in named:
            for i, value in enumerate(trace, start=1):
                trace_rows.append(
                    "%s,%s,%d,%s" % (name, detector, i, _fmt(float(value)))
                )
        with open(args.traces, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(trace_rows) + "\n")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on bad usage; this tool reserves 2 for data errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _add_params(sub: argparse.ArgumentParser, corr: bool = False) -> None:
    sub.add_argument("--p", type=float, default=0.05, help="target significance level (default 0.05)")
    sub.add_argument("--l", type=int, default=20, help="cut-off length (default 20)")
    sub.add_argument(
        "--prewhiten",
        choices=("none", "mpk", "ip4"),
        default="none",
        help="AR(1) prewhitening with the given bias correction (default none)",
    )
    sub.add_argument("--m", type=int, default=None, help="subsample size for AR(1) estimation")
    if corr:
        sub.add_argument(
            "--p-corr", type=float, default=None, help="override p for the correlation step"
        )
        sub.add_argument(
            "--l-corr", type=int, default=None, help="override l for the correlation step"
        )


def _add_io(sub: argparse.ArgumentParser, n_columns: int) -> None:
    sub.add_argument("input", help="input CSV with a header row")
    sub.add_argument(
        "--columns",
        required=True,
        help=(
            "value column name" if n_columns == 1 else "two value column names, comma-separated"
        ),
    )
    sub.add_argument("--output", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="srsd", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"srsd {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("detect-mean", "detect mean shifts in one column"),
        ("detect-variance", "detect variance shifts in one column"),
    ):
        sub = commands.add_parser(name, help=helptext)
        _add_io(sub, 1)
        _add_params(sub)
        sub.add_argument("--format", choices=("json", "csv"), default="json")

    sub = commands.add_parser(
        "detect-correlation", help="run the full three-step pipeline on two columns"
    )
    _add_io(sub, 2)
    _add_params(sub, corr=True)
    sub.add_argument("--format", choices=("json", "csv"), default="json")

    sub = commands.add_parser("generate", help="write a synthetic bivariate CSV")
    sub.add_argument("--seed", type=int, default=0, help="generator seed (SRSD_SEED overrides)")
    sub.add_argument(
        "--spec",
        default=None,
        help="JSON regime description; defaults to the built-in reference scenario",
    )
    sub.add_argument("--output", default=None, help="output path (default: stdout)")

    sub = commands.add_parser(
        "diagnose", help="emit running correlations (and optional RSI/RSSI traces)"
    )
    _add_io(sub, 2)
    _add_params(sub, corr=True)
    sub.add_argument(
        "--window", type=int, default=21, help="running-correlation window (default 21)"
    )
    sub.add_argument(
        "--traces", default=None, help="also write per-index RSI/RSSI traces to this CSV"
    )
    return parser


_HANDLERS = {
    "detect-mean": _cmd_detect_single,
    "detect-variance": _cmd_detect_single,
    "detect-correlation": _cmd_detect_correlation,
    "generate": _cmd_generate,
    "diagnose": _cmd_diagnose,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ParameterError as exc:
        sys.stderr.write(f"srsd: usage error: {exc}\n")
        return 1
    except DataError as exc:
        sys.stderr.write(f"srsd: data error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
