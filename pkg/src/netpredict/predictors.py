"""Per-window predictor series built from strength distributions.

Undefined entries (not enough history) are NaN. Windows are numbered from 1
in names and docs but stored 0-based in arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from netpredict.regression import polyfit

DEFAULT_EPSILON = 1e-10
HORIZONS = (3, 6, 9, 13, "All")


@dataclass(frozen=True)
class MetricSeries:
    name: str
    values: np.ndarray

    def __len__(self):
        return len(self.values)

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.values)


@dataclass(frozen=True)
class CombinedPredictor:
    components: tuple[str, str]
    a: float
    series: MetricSeries
    score: float  # R^2 of the fit at ``a``
    degree: int


def horizon_name(s) -> str:
    return "All" if s == "All" else str(int(s))


def _check_grid(p, q):
    if p.shape != q.shape:
        raise ValueError(f"histograms are on different grids ({p.shape} vs {q.shape})")


def prior_average(histograms) -> np.ndarray:
    """Bin-wise mean of the prior histograms."""
    hs = [np.asarray(h, dtype=float) for h in histograms]
    if not hs:
        raise ValueError("need at least one prior histogram")
    for h in hs[1:]:
        _check_grid(hs[0], h)
    return np.mean(hs, axis=0)


def kld(p, q, epsilon: float = DEFAULT_EPSILON) -> float:
    """D_KL(p || q) in nats after adding ``epsilon`` to every bin and renormalizing."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    _check_grid(p, q)
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    ps = p + epsilon
    ps /= ps.sum()
    qs = q + epsilon
    qs /= qs.sum()
    value = float(np.sum(ps * np.log(ps / qs)))
    # Gibbs' inequality; only rounding can make it negative
    return max(value, 0.0)


def _windows_back(t: int, s) -> range:
    return range(0, t) if s == "All" else range(t - s, t)


def _first_defined(s) -> int:
    return 1 if s == "All" else int(s)


def kld_series(histograms, s, epsilon: float = DEFAULT_EPSILON) -> MetricSeries:
    """KLD of each window's histogram from the mean of the ``s`` preceding ones."""
    hs = [np.asarray(h, dtype=float) for h in histograms]
    out = np.full(len(hs), np.nan)
    for t in range(_first_defined(s), len(hs)):
        q = prior_average([hs[i] for i in _windows_back(t, s)])
        out[t] = kld(hs[t], q, epsilon)
    return MetricSeries(f"KLD-{horizon_name(s)}", out)


def rs_series(mean_strengths, s) -> MetricSeries:
    """Mean strength of each window relative to the mean over the ``s`` preceding windows."""
    ad = np.asarray(mean_strengths, dtype=float)
    out = np.full(len(ad), np.nan)
    for t in range(_first_defined(s), len(ad)):
        prior = ad[list(_windows_back(t, s))].mean()
        if not prior > 0:
            raise ValueError(f"prior average strength is {prior} at window {t + 1}")
        out[t] = ad[t] / prior
    return MetricSeries(f"RS-{horizon_name(s)}", out)


def moments(strengths) -> tuple[float, float, float, float]:
    """Sample mean, sample variance (n-1), skewness and non-excess kurtosis.

    Skewness and kurtosis are the standardized third and fourth central
    moments (population form). They are NaN when the variance is zero.
    """
    x = np.asarray(strengths, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least 2 nodes")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev**2))
    var = float(np.sum(dev**2) / (len(x) - 1))
    if m2 == 0.0:
        return mean, var, float("nan"), float("nan")
    skew = float(np.mean(dev**3) / m2**1.5)
    kurt = float(np.mean(dev**4) / m2**2)
    return mean, var, skew, kurt


def zscore(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    mu = np.nanmean(v)
    sd = np.nanstd(v)
    return (v - mu) / sd if sd > 0 else v - mu


def combine(a: float, series_a, series_b, normalize: bool = False) -> np.ndarray:
    """Pointwise ``a * A + (1 - a) * B``; NaN wherever either input is NaN."""
    if not 0.0 <= a <= 1.0:
        raise ValueError("mixing constant must be in [0, 1]")
    A = np.asarray(series_a, dtype=float)
    B = np.asarray(series_b, dtype=float)
    if A.shape != B.shape:
        raise ValueError("series must be aligned")
    if normalize:
        A, B = zscore(A), zscore(B)
    return a * A + (1.0 - a) * B


def a_grid(step: float = 0.001) -> np.ndarray:
    n = round(1.0 / step)
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise ValueError(f"step {step} does not divide [0, 1]")
    return np.arange(n + 1) / n


def grid_search_a(series_a, series_b, target, degree: int = 1, step: float = 0.001,
                  normalize: bool = False, names=("A", "B")):
    """Exhaustive search over ``a`` for the combination that best fits ``target``.

    ``target`` is aligned with the first ``len(target)`` entries of the
    series. Returns ``(a_best, r2_best, CombinedPredictor)``; ties go to the
    smaller ``a``.
    """
    A = np.asarray(series_a, dtype=float)
    B = np.asarray(series_b, dtype=float)
    y = np.asarray(target, dtype=float)
    n = len(y)
    ok = ~np.isnan(A[:n]) & ~np.isnan(B[:n]) & ~np.isnan(y)
    if not ok.any():
        raise ValueError("no overlapping defined values between the series and the target")

    best_a, best_r2 = None, -np.inf
    for a in a_grid(step):
        x = combine(a, A, B, normalize)[:n][ok]
        try:
            r2 = polyfit(x, y[ok], degree).r2
        except ValueError:
            continue
        if r2 > best_r2:
            best_a, best_r2 = float(a), r2
    if best_a is None:
        raise ValueError("no value of a produced a valid fit")
    combined = MetricSeries(f"{best_a:g}*{names[0]}+{1 - best_a:g}*{names[1]}", combine(best_a, A, B, normalize))
    return best_a, best_r2, CombinedPredictor(tuple(names), best_a, combined, best_r2, degree)


def strength_metrics(dists, horizons=HORIZONS, epsilon: float = DEFAULT_EPSILON) -> list[MetricSeries]:
    """KLD-s, RS-s and the four moments for every window of a run."""
    hists = [d.histogram for d in dists]
    mean_strengths = [float(np.mean(d.strengths)) for d in dists]
    out = [kld_series(hists, s, epsilon) for s in horizons]
    out += [rs_series(mean_strengths, s) for s in horizons]
    mom = np.array([moments(d.strengths) for d in dists])
    for j, name in enumerate(("mean", "variance", "skewness", "kurtosis")):
        out.append(MetricSeries(name, mom[:, j]))
    return out
