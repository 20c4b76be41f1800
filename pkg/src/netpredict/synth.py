"""Synthetic minute-bar panels with injected co-movement regimes.

Normal hours: every ticker follows its own slow random walk in log price
plus i.i.d. microstructure noise, so pairwise MI sits at its finite-sample
floor. A regime hour adds a common upward ramp to all tickers (they are
bought together), which lifts every pairwise MI and pushes the strength
distribution to the right. The index follows the basket's idiosyncratic
walk plus its own noise, drifts up modestly during a regime hour, and in
the hour after each regime makes a large move whose size scales with the
regime intensity and whose sign alternates across regimes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from netpredict.ingestion import MANIFEST_NAME

SESSION_MINUTES = 390
SESSION_OPEN = (9, 30)


@dataclass(frozen=True)
class SynthSpec:
    n_tickers: int = 475
    n_minutes: int = 5340
    window_length: int = 60
    n_regimes: int = 9
    seed: int = 0
    index_name: str = "SPX"
    index_level: float = 2150.0
    walk_sigma: float = 3e-4  # per-minute log-price random walk
    noise_sigma: float = 1e-3  # per-minute microstructure noise
    regime_ramp: float = 0.015  # log-price rise over a regime hour at intensity 1
    regime_drift_points: float = 16.0  # index rise during a regime hour at intensity 1
    jump_points: float = 20.0  # index move after a regime at intensity 1
    index_sigma: float = 0.4  # index-specific noise per minute, in points
    missing_rate: float = 0.001
    start: str = "2016-09-22"


@dataclass(frozen=True)
class SynthData:
    timestamps: list[datetime]
    tickers: list[str]
    prices: np.ndarray
    index: np.ndarray
    regimes: np.ndarray  # 1-based window numbers
    intensity: np.ndarray
    jump_sign: np.ndarray


def trading_minutes(start: str, n: int) -> list[datetime]:
    """``n`` consecutive session minutes from 09:30, skipping weekends."""
    day = datetime.fromisoformat(start)
    out = []
    while len(out) < n:
        if day.weekday() < 5:
            t0 = day.replace(hour=SESSION_OPEN[0], minute=SESSION_OPEN[1])
            out.extend(t0 + timedelta(minutes=i) for i in range(min(SESSION_MINUTES, n - len(out))))
        day += timedelta(days=1)
    return out


def _pick_regimes(rng, n_windows, n_regimes, first=14, gap=5):
    """Regime windows (1-based) after ``first``, at least ``gap`` apart, leaving a following window."""
    last = n_windows - 1
    slots = list(range(first, last + 1, gap))
    if len(slots) < n_regimes:
        raise ValueError(f"{n_windows} windows cannot hold {n_regimes} regimes")
    chosen = np.sort(rng.choice(len(slots), n_regimes, replace=False))
    jitter = rng.integers(0, gap - 1, n_regimes)
    return np.minimum(np.array(slots)[chosen] + jitter, last)


def generate(spec: SynthSpec = SynthSpec()) -> SynthData:
    rng = np.random.default_rng(spec.seed)
    n, m, L = spec.n_minutes, spec.n_tickers, spec.window_length
    n_windows = n // L

    regimes = _pick_regimes(rng, n_windows, spec.n_regimes)
    intensity = rng.uniform(0.7, 1.3, spec.n_regimes)
    # alternate signs down the intensity ranking so up and down moves balance
    sign = np.empty(spec.n_regimes)
    sign[np.argsort(intensity)] = np.where(np.arange(spec.n_regimes) % 2 == 0, 1.0, -1.0)
    if rng.random() < 0.5:
        sign = -sign

    walk = np.cumsum(rng.normal(0.0, spec.walk_sigma, (n, m)), axis=0)
    noise = rng.normal(0.0, spec.noise_sigma, (n, m))
    loading = rng.uniform(0.5, 1.5, m)
    common = np.zeros(n)
    ramp = np.linspace(0.0, 1.0, L)
    for w, k in zip(regimes, intensity):
        lo = (w - 1) * L
        common[lo : lo + L] += ramp * spec.regime_ramp * k
        common[lo + L :] += spec.regime_ramp * k  # the level shift persists
    log_price = np.log(rng.uniform(20.0, 300.0, m)) + walk + common[:, None] * loading + noise
    prices = np.exp(log_price)

    index = spec.index_level * np.exp(walk.mean(axis=1)) + np.cumsum(rng.normal(0.0, spec.index_sigma, n))
    for w, k, s in zip(regimes, intensity, sign):
        lo = (w - 1) * L
        index[lo : lo + L] += ramp * spec.regime_drift_points * k
        index[lo + L :] += spec.regime_drift_points * k
        lo += L  # the hour after the regime
        index[lo : lo + L] += ramp * spec.jump_points * k * s
        index[lo + L :] += spec.jump_points * k * s

    return SynthData(trading_minutes(spec.start, n), [f"T{i:03d}" for i in range(m)], prices, index,
                     regimes, intensity, sign)


def write_dataset(data: SynthData, out_dir, spec: SynthSpec = SynthSpec()) -> Path:
    """Write the per-ticker files, the index file and the manifest.

    Ticker files use ISO-8601 timestamps and have a few records removed at
    random; the index file uses epoch seconds.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed + 1)
    iso = [t.isoformat() for t in data.timestamps]
    for j, name in enumerate(data.tickers):
        keep = rng.random(len(iso)) >= spec.missing_rate
        col = data.prices[:, j]
        lines = [f"{iso[i]},{col[i]:.4f}" for i in np.flatnonzero(keep)]
        (out / f"{name}.csv").write_text("timestamp,close\n" + "\n".join(lines) + "\n")
    epoch = [int((t - datetime(1970, 1, 1)).total_seconds()) for t in data.timestamps]
    lines = [f"{e},{v:.4f}" for e, v in zip(epoch, data.index)]
    (out / f"{spec.index_name}.csv").write_text("timestamp,close\n" + "\n".join(lines) + "\n")
    (out / MANIFEST_NAME).write_text(json.dumps({"index": spec.index_name}, indent=2) + "\n")
    truth = {
        "regime_windows": [int(w) for w in data.regimes],
        "intensity": [float(k) for k in data.intensity],
        "jump_sign": [int(s) for s in data.jump_sign],
    }
    (out / "regimes.json").write_text(json.dumps(truth, indent=2) + "\n")
    return out
