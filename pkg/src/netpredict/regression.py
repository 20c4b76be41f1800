"""Least-squares polynomial fits and Table-1-style score tables."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import stats

KINDS = {"linear": 1, "poly2": 2, "poly3": 3}

# (column, change column, degree); order follows the published table layout
SCORE_COLUMNS = (
    ("act_poly2", "actual", 2),
    ("act_poly3", "actual", 3),
    ("act_linear", "actual", 1),
    ("sq_linear", "squared", 1),
    ("abs_linear", "absolute", 1),
)


@dataclass(frozen=True)
class RegressionFit:
    degree: int
    coefficients: np.ndarray  # intercept first, in the original x units
    r2: float
    fitted: np.ndarray
    residuals: np.ndarray
    n: int
    p_value: float

    @property
    def kind(self) -> str:
        return {1: "linear", 2: "poly2", 3: "poly3"}[self.degree]

    @property
    def r(self) -> float:
        """Multiple correlation sqrt(R^2), signed by the slope for linear fits."""
        root = float(np.sqrt(self.r2))
        if self.degree == 1 and self.coefficients[1] < 0:
            return -root
        return root


def polyfit(x, y, degree: int = 1) -> RegressionFit:
    """OLS fit of ``y`` on ``[1, x, ..., x**degree]`` via Householder QR.

    ``x`` is centered and scaled before building the design matrix; the
    coefficients are mapped back to powers of the raw ``x``.
    """
    if degree not in (1, 2, 3):
        raise ValueError("degree must be 1, 2 or 3")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be aligned 1-D arrays")
    n = len(x)
    if n < degree + 2:
        raise ValueError(f"need at least {degree + 2} points for degree {degree}, got {n}")
    mu = x.mean()
    sd = x.std()
    if sd == 0.0 or np.ptp(x) == 0.0:
        raise ValueError("predictor is constant")
    z = (x - mu) / sd
    design = np.vander(z, degree + 1, increasing=True)
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-12 * diag.max() * np.sqrt(n):
        raise ValueError("design matrix is rank deficient")
    beta_z = np.linalg.solve(r, q.T @ y)

    # sum_k b_k ((x - mu)/sd)^k  ->  sum_j c_j x^j
    coef = np.zeros(degree + 1)
    for k, b in enumerate(beta_z):
        for j in range(k + 1):
            coef[j] += b * comb(k, j) * (-mu) ** (k - j) / sd**k

    fitted = design @ beta_z
    resid = y - fitted
    ss_res = float(resid @ resid)
    dev = y - y.mean()
    ss_tot = float(dev @ dev)
    if ss_tot == 0.0:
        raise ValueError("target is constant")
    r2 = min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    df2 = n - degree - 1
    if r2 >= 1.0:
        p = 0.0
    else:
        f = (r2 / degree) / ((1.0 - r2) / df2)
        p = float(stats.f.sf(f, degree, df2))
    return RegressionFit(degree, coef, r2, fitted, resid, n, p)


def aligned(metric_values, target) -> tuple[np.ndarray, np.ndarray]:
    """Pair metric[t] with target[t] and drop undefined entries."""
    x = np.asarray(metric_values, dtype=float)[: len(target)]
    y = np.asarray(target, dtype=float)[: len(x)]
    ok = ~np.isnan(x) & ~np.isnan(y)
    return x[ok], y[ok]


@dataclass(frozen=True)
class Score:
    metric: str
    column: str
    r: float  # sqrt(R^2); NaN when unavailable
    r2: float
    p_value: float
    n: int


def score_table(metrics, changes) -> list[Score]:
    """Fit every metric against the change series in all score columns.

    Rows whose fit cannot be made (too few points, constant metric) come
    back with NaN scores.
    """
    out = []
    for m in metrics:
        for col, target_name, degree in SCORE_COLUMNS:
            x, y = aligned(m.values, changes.column(target_name))
            try:
                fit = polyfit(x, y, degree)
            except ValueError:
                out.append(Score(m.name, col, float("nan"), float("nan"), float("nan"), len(x)))
                continue
            out.append(Score(m.name, col, float(np.sqrt(fit.r2)), fit.r2, fit.p_value, fit.n))
    return out
