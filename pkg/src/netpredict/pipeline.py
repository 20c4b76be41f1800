"""End-to-end runs: metrics, regressions, combinations and ARIMA comparisons.

Every ``run_*`` function computes everything first and writes its files
only at the end, so a failing run leaves no partial output behind.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from netpredict import __version__
from netpredict.arima import fit_arima, grid_search_order
from netpredict.config import COMBINE_KINDS, RunConfig
from netpredict.errors import ConfigError, DataError, NumericError, StageError
from netpredict.graph_measures import graph_metrics
from netpredict.ingestion import ChangeSeries, impute_locf, index_changes, load_panel, split_windows
from netpredict.mutual_info import mi_matrix
from netpredict.network import StrengthDistribution, strength_grid, strength_histogram
from netpredict.predictors import MetricSeries, grid_search_a, strength_metrics
from netpredict.regression import SCORE_COLUMNS, aligned, polyfit, score_table
from netpredict.tables import ensure_dir, read_numeric_columns, write_table

log = logging.getLogger(__name__)

GRAPH_COLUMNS = ("eig-mean", "eig-median", "eig-max", "btw-mean", "btw-median", "btw-max", "modularity")
MOMENT_COLUMNS = ("mean", "variance", "skewness", "kurtosis")

METRICS_FILE = "metrics.csv"
CHANGES_FILE = "changes.csv"
MANIFEST_FILE = "manifest.json"
TABLE1_FILE = "table1.csv"
TABLE1_JSON = "table1.json"
TABLE2_FILE = "table2.csv"
TABLE3_FILE = "table3.csv"
PREDICTIONS_FILE = "predictions.csv"


def metric_columns(horizons) -> list[str]:
    h = ["All" if s == "All" else str(s) for s in horizons]
    return [f"KLD-{s}" for s in h] + [f"RS-{s}" for s in h] + list(MOMENT_COLUMNS) + list(GRAPH_COLUMNS)


def metric_group(name: str) -> str:
    if name.startswith("eig-"):
        return "eigenvector centrality"
    if name.startswith("btw-"):
        return "betweenness centrality"
    if name == "modularity":
        return "network modularity"
    return "strength distribution"


@dataclass
class MetricsRun:
    names: list[str]
    values: dict[str, np.ndarray]  # one entry per window
    index_close: np.ndarray
    changes: ChangeSeries
    manifest: dict

    def series(self) -> list[MetricSeries]:
        return [MetricSeries(n, self.values[n]) for n in self.names]

    def get(self, name: str) -> np.ndarray:
        if name not in self.values:
            raise ConfigError(f"unknown metric {name!r}; available: {', '.join(self.names)}")
        return self.values[name]


def _fingerprint(source) -> list[dict]:
    out = []
    for path in sorted(Path(source).iterdir()):
        if path.is_file() and path.suffix in (".csv", ".json"):
            out.append({"file": path.name, "sha256": hashlib.sha256(path.read_bytes()).hexdigest()})
    return out


def _window_job(args):
    window, tickers, rule, literal, transform, seed, dist_transform = args
    try:
        m = mi_matrix(window, rule, literal=literal, transform=transform, tickers=tickers)
    except Exception as exc:
        raise StageError("mutual_info", window.window_index, exc) from exc
    try:
        graph = graph_metrics(m, seed=seed, transform=dist_transform)
    except Exception as exc:
        raise StageError("graph_measures", window.window_index, exc) from exc
    return m.weights.sum(axis=1), graph


def compute_metrics(cfg: RunConfig) -> MetricsRun:
    try:
        raw = load_panel(cfg.data, cfg.index_name)
    except DataError as exc:
        raise StageError("load", None, exc) from exc
    missing = raw.missing_count()
    try:
        panel = impute_locf(raw)
        windows = split_windows(panel, cfg.window_length)
        changes = index_changes(windows, cfg.target_lag)
    except (DataError, ValueError) as exc:
        raise StageError("windows", None, exc) from exc
    log.info("%d tickers, %d minutes, %d windows", len(panel.tickers), panel.n_rows, len(windows))

    jobs = [(w, panel.tickers, cfg.bin_rule(), cfg.mi_mode == "literal", cfg.price_transform,
             cfg.modularity_seed, cfg.distance_transform) for w in windows]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_window_job, jobs))
    else:
        results = [_window_job(j) for j in jobs]

    strengths = [r[0] for r in results]
    try:
        grid = strength_grid(strengths, cfg.hist_bin_width)
        dists = [StrengthDistribution(w.window_index, s, strength_histogram(s, grid), grid)
                 for w, s in zip(windows, strengths)]
    except ValueError as exc:
        raise StageError("strength", None, exc) from exc
    try:
        series = strength_metrics(dists, cfg.horizons, cfg.epsilon)
    except ValueError as exc:
        raise StageError("predictors", None, exc) from exc

    values = {s.name: s.values for s in series}
    for col in GRAPH_COLUMNS:
        values[col] = np.array([r[1][col] for r in results])
    names = metric_columns(cfg.horizons)

    manifest = {
        "version": __version__,
        # the output location is not an input; leaving it out keeps reruns byte-identical
        "config": {k: v for k, v in cfg.to_dict().items() if k != "output"},
        "inputs": _fingerprint(cfg.data),
        "index_name": panel.index_name,
        "n_tickers": len(panel.tickers),
        "n_minutes": panel.n_rows,
        "n_windows": len(windows),
        "dropped_rows": panel.n_rows % cfg.window_length,
        "imputed_cells": missing,
        "histogram_bins": len(grid) - 1,
    }
    index_close = np.array([w.index_close for w in windows])
    return MetricsRun(names, values, index_close, changes, manifest)


def write_metrics(run: MetricsRun, out_dir) -> None:
    out = ensure_dir(out_dir)
    n = len(run.index_close)
    write_table(out / METRICS_FILE, ["window", *run.names],
                ([t + 1, *(run.values[k][t] for k in run.names)] for t in range(n)))
    ch = run.changes
    pad = n - len(ch)
    rows = []
    for t in range(n):
        if t < len(ch):
            rows.append([t + 1, run.index_close[t], ch.values[t], ch.absolute[t], ch.squared[t]])
        else:
            rows.append([t + 1, run.index_close[t], None, None, None])
    write_table(out / CHANGES_FILE, ["window", "index_close", "change", "absolute", "squared"], rows)
    manifest = dict(run.manifest, target_lag=ch.lag, undefined_change_rows=pad)
    (out / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_metrics(out_dir) -> MetricsRun:
    out = Path(out_dir)
    if not (out / METRICS_FILE).exists() or not (out / CHANGES_FILE).exists():
        raise DataError(f"no metric table in {out}; run 'metrics' first")
    cols = read_numeric_columns(out / METRICS_FILE, key="window")
    names = [k for k in cols if k != "window"]
    ch = read_numeric_columns(out / CHANGES_FILE, key="window")
    manifest = json.loads((out / MANIFEST_FILE).read_text()) if (out / MANIFEST_FILE).exists() else {}
    change = ch["change"][~np.isnan(ch["change"])]
    return MetricsRun(names, {k: cols[k] for k in names}, ch["index_close"],
                      ChangeSeries(change, lag=manifest.get("target_lag", 1)), manifest)


def run_metrics(cfg: RunConfig) -> MetricsRun:
    run = compute_metrics(cfg)
    write_metrics(run, cfg.output)
    return run


def _metrics_for(cfg: RunConfig, run: MetricsRun | None) -> MetricsRun:
    if run is not None:
        return run
    out = Path(cfg.output)
    if (out / METRICS_FILE).exists():
        return load_metrics(out)
    return run_metrics(cfg)


# --------------------------------------------------------------------------- Table 1


def run_regress(cfg: RunConfig, run: MetricsRun | None = None):
    run = _metrics_for(cfg, run)
    try:
        scores = score_table(run.series(), run.changes)
    except ValueError as exc:
        raise StageError("regression", None, exc) from exc
    by_metric: dict[str, dict] = {}
    for s in scores:
        by_metric.setdefault(s.metric, {})[s.column] = s

    header = ["metric", "group"]
    for col, _, _ in SCORE_COLUMNS:
        header += [f"{col}_r", f"{col}_r2", f"{col}_p"]
    header.append("n")
    rows = []
    for name in run.names:
        row = [name, metric_group(name)]
        cells = by_metric[name]
        for col, _, _ in SCORE_COLUMNS:
            c = cells[col]
            row += [c.r, c.r2, c.p_value]
        row.append(max(c.n for c in cells.values()))
        rows.append(row)

    out = ensure_dir(cfg.output)
    write_table(out / TABLE1_FILE, header, rows)
    records = [
        {"metric": s.metric, "column": s.column, "r": _json_num(s.r), "r2": _json_num(s.r2),
         "p_value": _json_num(s.p_value), "n": s.n}
        for s in scores
    ]
    (out / TABLE1_JSON).write_text(json.dumps(records, indent=2) + "\n")
    return scores


def _json_num(v):
    return None if v is None or np.isnan(v) else float(v)


# --------------------------------------------------------------------------- Table 2


def run_combine(cfg: RunConfig, run: MetricsRun | None = None):
    run = _metrics_for(cfg, run)
    rows = []
    for name_a, name_b, kind in cfg.combinations:
        a_vals = run.get(name_a)
        b_vals = run.get(name_b)
        target_name, degree = COMBINE_KINDS[kind]
        target = run.changes.column(target_name)
        try:
            a, r2, combo = grid_search_a(a_vals, b_vals, target, degree, cfg.grid_step,
                                         cfg.normalize_combination, names=(name_a, name_b))
            fit = polyfit(*aligned(combo.series.values, target), degree)
        except ValueError as exc:
            raise StageError("combine", None, exc) from exc
        rows.append([f"{name_a} + {name_b}", name_a, name_b, kind, a, float(np.sqrt(r2)), r2, fit.p_value, fit.n])
    write_table(ensure_dir(cfg.output) / TABLE2_FILE,
                ["combination", "metric_a", "metric_b", "kind", "a", "r", "r2", "p_value", "n"], rows)
    return rows


# --------------------------------------------------------------------------- Table 3


def run_arima(cfg: RunConfig, run: MetricsRun | None = None):
    run = _metrics_for(cfg, run)
    y = run.index_close
    try:
        base = grid_search_order(y, cfg.p_max, cfg.d_max, cfg.q_max)
    except (NumericError, ValueError) as exc:
        raise StageError("arima", None, exc) from exc
    models = [("ARIMA(%d,%d,%d)" % base.order, None, base)]
    p, d, q = cfg.arimax_order
    for name in cfg.exog_metrics:
        exog = run.get(name)
        label = f"ARIMA({p},{d},{q}) + {name}"
        try:
            models.append((label, name, fit_arima(y, p, d, q, exog=exog, exog_lag=cfg.exog_lag)))
        except (NumericError, ValueError) as exc:
            log.warning("skipping %s: %s", label, exc)
            models.append((label, name, None))

    rows = []
    for label, exog, m in models:
        if m is None:
            rows.append([label, "", exog or "", None, None, None, None, None])
            continue
        rows.append([label, "%d,%d,%d" % m.order, exog or "", m.aic, m.mse, m.n_effective,
                     m.beta, m.loglik])
    out = ensure_dir(cfg.output)
    write_table(out / TABLE3_FILE, ["model", "order", "exog", "aic", "mse", "n_effective", "exog_coef", "loglik"], rows)

    n = len(y)
    pred_cols = []
    for label, _, m in models:
        col = np.full(n, np.nan)
        if m is not None:
            col[m.start :] = m.predictions
        pred_cols.append(col)
    write_table(out / PREDICTIONS_FILE, ["window", "actual", *(label for label, _, _ in models)],
                ([t + 1, y[t], *(c[t] for c in pred_cols)] for t in range(n)))
    return models


def run_report(cfg: RunConfig):
    run = run_metrics(cfg)
    run_regress(cfg, run)
    run_combine(cfg, run)
    run_arima(cfg, run)
    return run
