"""Minute-bar loading, LOCF imputation, hourly windowing and index changes.

Input layout (one directory)::

    manifest.json        {"index": "SPX"}
    SPX.csv              timestamp,close   <- the index series
    AAPL.csv             timestamp,close
    ...

Timestamps are either ISO-8601 strings or epoch seconds; the format is
detected from the first data row of each file and must not change inside
that file.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path

import numpy as np

from netpredict.errors import DataError

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class PricePanel:
    """Aligned close prices, one row per minute and one column per ticker.

    Missing cells are NaN until :func:`impute_locf` has been applied.
    """

    timestamps: np.ndarray  # datetime64[s], strictly increasing
    tickers: tuple[str, ...]
    prices: np.ndarray  # (n_minutes, n_tickers)
    index_series: np.ndarray  # (n_minutes,)
    index_name: str = "index"

    def __post_init__(self):
        ts = np.asarray(self.timestamps)
        if ts.ndim != 1 or len(ts) != self.prices.shape[0]:
            raise DataError("timestamps must align with price rows")
        if len(ts) > 1 and not np.all(ts[1:] > ts[:-1]):
            raise DataError("timestamps must be strictly increasing")
        if self.prices.ndim != 2 or self.prices.shape[1] != len(self.tickers):
            raise DataError("price matrix must be (n_minutes, n_tickers)")
        if len(set(self.tickers)) != len(self.tickers):
            raise DataError("duplicate ticker names")
        if self.index_series.shape != (self.prices.shape[0],):
            raise DataError("index series must align with price rows")

    @property
    def n_rows(self) -> int:
        return self.prices.shape[0]

    def missing_count(self) -> int:
        return int(np.isnan(self.prices).sum() + np.isnan(self.index_series).sum())


@dataclass(frozen=True)
class HourWindow:
    window_index: int  # 1-based
    prices: np.ndarray  # (window_length, n_tickers)
    index_open: float
    index_close: float


@dataclass(frozen=True)
class ChangeSeries:
    """Index change per window, paired with the predictors of the same window."""

    values: np.ndarray
    lag: int = 1
    absolute: np.ndarray = field(init=False)
    squared: np.ndarray = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "absolute", np.abs(v))
        object.__setattr__(self, "squared", v * v)

    def __len__(self):
        return len(self.values)

    def column(self, name: str) -> np.ndarray:
        try:
            return {"actual": self.values, "absolute": self.absolute, "squared": self.squared}[name]
        except KeyError:
            raise ValueError(f"unknown change column {name!r}; use actual, absolute or squared") from None


# --------------------------------------------------------------------------- loading


@lru_cache(maxsize=65536)
def _parse_timestamp(raw: str, kind: str | None) -> tuple[int, str]:
    raw = raw.strip()
    try:
        value = float(raw)
    except ValueError:
        value = None
    if value is not None:
        if kind == "iso" or not math.isfinite(value):
            raise ValueError(f"expected ISO-8601 timestamp, got {raw!r}")
        return int(round(value)), "epoch"
    if kind == "epoch":
        raise ValueError(f"expected epoch seconds, got {raw!r}")
    dt = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp()), "iso"


def read_series(path: str | Path) -> dict[int, float]:
    """Read one ``timestamp,close`` file into ``{epoch_seconds: close}``."""
    path = Path(path)
    out: dict[int, float] = {}
    kind = None
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["timestamp", "close"]:
            raise DataError(f"{path}:1: expected header 'timestamp,close'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                ts, kind = _parse_timestamp(row[0], kind)
                close = float(row[1])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: unparseable row {row!r} ({exc})") from None
            if not math.isfinite(close):
                raise DataError(f"{path}:{lineno}: non-finite close {row[1]!r}")
            if ts in out:
                raise DataError(f"{path}:{lineno}: duplicate timestamp {row[0]!r}")
            out[ts] = close
    return out


def load_panel(source: str | Path, index_name: str | None = None) -> PricePanel:
    """Load a directory of per-ticker files into an (unimputed) PricePanel.

    The index series is named by ``index_name`` or, failing that, by the
    ``manifest.json`` in the directory. The panel spans the union of all
    timestamps; cells with no record are NaN.
    """
    source = Path(source)
    if not source.is_dir():
        raise DataError(f"data source {source} is not a directory")
    if index_name is None:
        manifest = source / MANIFEST_NAME
        if not manifest.exists():
            raise DataError(f"no index series named and no {MANIFEST_NAME} in {source}")
        try:
            index_name = json.loads(manifest.read_text())["index"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DataError(f"{manifest}: cannot read index name ({exc})") from None

    files = sorted(p for p in source.iterdir() if p.suffix == ".csv")
    by_name = {p.stem: p for p in files}
    if index_name not in by_name:
        raise DataError(f"index series {index_name!r} not found in {source}")

    index_records = read_series(by_name.pop(index_name))
    if not index_records:
        raise DataError(f"index series {index_name!r} has no records")

    records: dict[str, dict[int, float]] = {}
    empty = []
    for name, path in by_name.items():
        rec = read_series(path)
        if rec:
            records[name] = rec
        else:
            empty.append(name)
    if empty:
        log.warning("dropping %d ticker(s) with no records: %s", len(empty), ", ".join(empty))
    if len(records) < 2:
        raise DataError(f"need at least 2 tickers with data, found {len(records)}")

    all_ts = set(index_records)
    for rec in records.values():
        all_ts.update(rec)
    ts_sorted = np.array(sorted(all_ts), dtype=np.int64)
    row_of = {t: i for i, t in enumerate(ts_sorted.tolist())}

    tickers = tuple(sorted(records))
    prices = np.full((len(ts_sorted), len(tickers)), np.nan)
    for j, name in enumerate(tickers):
        rec = records[name]
        rows = np.fromiter((row_of[t] for t in rec), dtype=np.int64, count=len(rec))
        prices[rows, j] = np.fromiter(rec.values(), dtype=float, count=len(rec))
    index = np.full(len(ts_sorted), np.nan)
    rows = np.fromiter((row_of[t] for t in index_records), dtype=np.int64, count=len(index_records))
    index[rows] = np.fromiter(index_records.values(), dtype=float, count=len(index_records))

    return PricePanel(
        timestamps=ts_sorted.astype("datetime64[s]"),
        tickers=tickers,
        prices=prices,
        index_series=index,
        index_name=index_name,
    )


# --------------------------------------------------------------------------- imputation


def _locf_column(col: np.ndarray) -> np.ndarray:
    observed = ~np.isnan(col)
    # index of the most recent observed row, -1 before the first observation
    last = np.where(observed, np.arange(len(col)), -1)
    np.maximum.accumulate(last, out=last)
    first = np.argmax(observed)
    last[last < 0] = first
    return col[last]


def impute_locf(panel: PricePanel) -> PricePanel:
    """Last observation carried forward, per column.

    Leading gaps (nothing observed yet) take the first observed value.
    """
    prices = panel.prices
    bad = np.all(np.isnan(prices), axis=0)
    if bad.any():
        names = [t for t, b in zip(panel.tickers, bad) if b]
        raise DataError(f"cannot impute all-missing column(s): {', '.join(names)}")
    if np.all(np.isnan(panel.index_series)):
        raise DataError(f"cannot impute all-missing index series {panel.index_name!r}")

    filled = np.empty_like(prices)
    for j in range(prices.shape[1]):
        filled[:, j] = _locf_column(prices[:, j])
    index = _locf_column(panel.index_series)
    if np.any(filled <= 0) or np.any(index <= 0):
        raise DataError("prices must be strictly positive")
    return PricePanel(panel.timestamps, panel.tickers, filled, index, panel.index_name)


# --------------------------------------------------------------------------- windows


def split_windows(panel: PricePanel, window_length: int = 60) -> list[HourWindow]:
    """Cut the panel into consecutive non-overlapping windows.

    A trailing partial window is dropped (and logged).
    """
    if window_length < 2:
        raise ValueError("window_length must be >= 2")
    if np.isnan(panel.prices).any() or np.isnan(panel.index_series).any():
        raise DataError("panel must be imputed before windowing")
    n = panel.n_rows
    if n < window_length:
        raise DataError(f"panel has {n} rows, fewer than one window of {window_length}")
    n_windows, remainder = divmod(n, window_length)
    if remainder:
        log.info("dropping %d trailing row(s) that do not fill a window", remainder)
    windows = []
    for w in range(n_windows):
        lo, hi = w * window_length, (w + 1) * window_length
        windows.append(
            HourWindow(
                window_index=w + 1,
                prices=panel.prices[lo:hi],
                index_open=float(panel.index_series[lo]),
                index_close=float(panel.index_series[hi - 1]),
            )
        )
    return windows


def dropped_rows(n_rows: int, window_length: int = 60) -> int:
    return n_rows % window_length


def index_changes(windows: list[HourWindow], lag: int = 1) -> ChangeSeries:
    """Close-to-close index change ``close[t + lag] - close[t]`` for each window t."""
    if lag < 1:
        raise ValueError("lag must be >= 1")
    if lag >= len(windows):
        raise DataError(f"lag {lag} needs more than {len(windows)} windows")
    closes = np.array([w.index_close for w in windows])
    return ChangeSeries(closes[lag:] - closes[:-lag], lag=lag)
