"""ARIMA(p, d, q) with an optional exogenous regressor, fitted by CSS.

Model on the d-times differenced series ``w`` (exog ``x`` differenced the
same way)::

    eta_t = w_t - c - beta * x_t
    eta_t = sum_i phi_i eta_{t-i} + e_t + sum_j theta_j e_{t-j}

Residuals are computed for t >= p with pre-sample residuals set to zero;
the conditional sum of squares is minimized with Nelder-Mead. MA
coefficients are kept invertible by optimizing unconstrained values that
map through tanh to partial autocorrelations and then, via the
Durbin-Levinson recursion, to polynomial coefficients.

The intercept ``c`` is only estimated for d == 0, so a differenced model
has no drift term.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

from netpredict.errors import NumericError

log = logging.getLogger(__name__)

MAX_ITER = 2000
CSS_TOL = 1e-8


@dataclass(frozen=True)
class ArimaModel:
    order: tuple[int, int, int]
    intercept: float
    ar: np.ndarray
    ma: np.ndarray
    beta: float | None
    sigma2: float
    loglik: float
    aic: float
    n_effective: int
    residuals: np.ndarray  # on the differenced scale, for t >= p
    series: np.ndarray  # modeled series, original scale, after dropping leading undefined exog
    predictions: np.ndarray  # same length as ``series``; NaN for the first d + p entries
    has_intercept: bool
    start: int = 0  # position of series[0] in the input series

    @property
    def n_params(self) -> int:
        p, _, q = self.order
        return p + q + int(self.has_intercept) + 1 + int(self.beta is not None)

    @property
    def mse(self) -> float:
        return mse(self.series, self.predictions)


def difference(series, d: int = 1) -> np.ndarray:
    if d not in (0, 1, 2):
        raise ValueError("d must be 0, 1 or 2")
    y = np.asarray(series, dtype=float)
    if len(y) <= d:
        raise ValueError(f"series of length {len(y)} too short for d={d}")
    return np.diff(y, n=d) if d else y.copy()


def undifference(y: np.ndarray, w_hat: np.ndarray, d: int) -> np.ndarray:
    """Map predictions of the last ``len(w_hat)`` differenced values back to levels.

    yhat_t = sum_k (-1)^(k+1) C(d, k) y_{t-k} + what_t, using actual lagged levels.
    """
    n = len(y)
    start = n - len(w_hat)
    base = np.zeros(len(w_hat))
    for k in range(1, d + 1):
        base += (-1) ** (k + 1) * math.comb(d, k) * y[start - k : n - k]
    return base + w_hat


def pacf_to_poly(r: np.ndarray) -> np.ndarray:
    """Partial autocorrelations in (-1, 1) -> stationary AR coefficients."""
    phi = np.zeros(0)
    for k, rk in enumerate(r):
        phi = np.append(phi - rk * phi[::-1], rk) if k else np.array([rk])
    return phi


def ma_from_free(u: np.ndarray) -> np.ndarray:
    """Unconstrained values -> invertible MA coefficients (theta)."""
    if len(u) == 0:
        return np.zeros(0)
    return -pacf_to_poly(np.tanh(u))


def _residuals(eta, phi, theta):
    p = len(phi)
    v = eta[p:].copy()
    for i, ph in enumerate(phi, start=1):
        v -= ph * eta[p - i : len(eta) - i]
    if len(theta):
        return lfilter([1.0], np.r_[1.0, theta], v)
    return v


def _unpack(params, has_c, has_x, p, q):
    i = 0
    c = params[i] if has_c else 0.0
    i += int(has_c)
    beta = params[i] if has_x else 0.0
    i += int(has_x)
    phi = params[i : i + p]
    theta = ma_from_free(params[i + p : i + p + q])
    return c, beta, phi, theta


def _align_exog(series, exog, exog_lag):
    y = np.asarray(series, dtype=float)
    if exog is None:
        return y, None
    x = np.asarray(exog, dtype=float)
    if x.shape != y.shape:
        raise ValueError("exogenous series must be aligned with the endogenous series")
    if exog_lag:
        x = np.r_[np.full(exog_lag, np.nan), x[:-exog_lag]]
    ok = ~np.isnan(x)
    if not ok.any():
        raise ValueError("exogenous series has no defined values")
    first = int(np.argmax(ok))
    if not ok[first:].all():
        raise ValueError("exogenous series may only be undefined at the start")
    return y[first:], x[first:]


def fit_arima(series, p: int, d: int, q: int, exog=None, exog_lag: int = 0,
              intercept: bool | None = None) -> ArimaModel:
    """Fit ARIMA(p, d, q) by conditional sum of squares.

    Leading undefined exog values shrink the sample. ``intercept`` defaults
    to ``d == 0``.
    """
    if min(p, q) < 0:
        raise ValueError("orders must be nonnegative")
    y, x = _align_exog(series, exog, exog_lag)
    start_at = len(series) - len(y)
    if not np.all(np.isfinite(y)):
        raise ValueError("series must be finite")
    if len(y) < 10 * (p + q + 1):
        raise ValueError(f"series of length {len(y)} too short for order ({p},{d},{q})")
    has_c = (d == 0) if intercept is None else bool(intercept)
    has_x = x is not None

    w = difference(y, d)
    xd = difference(x, d) if has_x else None
    if len(w) <= p:
        raise ValueError("series too short after differencing")

    # optimize on a unit-variance scale; c and beta are rescaled afterwards
    w_scale = float(np.std(w)) or 1.0
    ws = w / w_scale
    if has_x:
        if np.ptp(xd) <= 1e-12 * max(1.0, float(np.max(np.abs(x)))):
            raise ValueError("exogenous series is constant after differencing")
        x_scale = float(np.std(xd))
        xs = xd / x_scale
    else:
        xs = None

    def css(params):
        c, beta, phi, theta = _unpack(params, has_c, has_x, p, q)
        eta = ws - c - (beta * xs if has_x else 0.0)
        e = _residuals(eta, phi, theta)
        return float(e @ e)

    start = np.zeros(int(has_c) + int(has_x) + p + q)
    if has_c:
        start[0] = ws.mean()
    if start.size:
        res = minimize(css, start, method="Nelder-Mead",
                       options={"maxiter": MAX_ITER, "maxfev": 4 * MAX_ITER,
                                "xatol": CSS_TOL, "fatol": CSS_TOL})
        if not np.isfinite(res.fun):
            raise NumericError(f"non-finite CSS for order ({p},{d},{q})")
        if not res.success:
            raise NumericError(f"CSS minimization for order ({p},{d},{q}) did not converge: {res.message}")
        params = res.x
    else:
        params = start
    c, beta, phi, theta = _unpack(params, has_c, has_x, p, q)
    if len(theta) and np.any(np.abs(np.roots(np.r_[1.0, theta])) >= 1.0):
        raise NumericError("fitted MA polynomial is not invertible")

    c *= w_scale
    beta = beta * w_scale / x_scale if has_x else None
    eta = w - c - (beta * xd if has_x else 0.0)
    e = _residuals(eta, phi, theta)
    n_eff = len(e)
    sigma2 = float(e @ e) / n_eff
    if not sigma2 > 0:
        raise NumericError("zero residual variance")
    loglik = -0.5 * n_eff * (math.log(2 * math.pi * sigma2) + 1.0)
    k = p + q + int(has_c) + 1 + int(has_x)

    pred = np.full(len(y), np.nan)
    pred[d + p :] = undifference(y, w[p:] - e, d)

    return ArimaModel(
        order=(p, d, q), intercept=float(c), ar=np.asarray(phi, dtype=float), ma=np.asarray(theta, dtype=float),
        beta=None if beta is None else float(beta), sigma2=sigma2, loglik=loglik, aic=2 * k - 2 * loglik,
        n_effective=n_eff, residuals=e, series=y, predictions=pred, has_intercept=has_c,
        start=start_at,
    )


def mse(actual, predicted) -> float:
    a = np.asarray(actual, dtype=float)
    b = np.asarray(predicted, dtype=float)
    ok = ~np.isnan(a) & ~np.isnan(b)
    if not ok.any():
        return float("nan")
    return float(np.mean((a[ok] - b[ok]) ** 2))


def one_step_predictions(model: ArimaModel) -> tuple[np.ndarray, float]:
    """In-sample one-step-ahead predictions on the original scale, and their MSE."""
    return model.predictions, model.mse


def grid_search_order(series, p_max: int = 3, d_max: int = 2, q_max: int = 3, exog=None,
                      exog_lag: int = 0) -> ArimaModel:
    """Minimum-AIC model over the (p, d, q) box.

    Failing fits are skipped with a warning. Ties go to smaller p + q, then
    smaller d.
    """
    best, best_key = None, None
    for d, p, q in itertools.product(range(d_max + 1), range(p_max + 1), range(q_max + 1)):
        try:
            m = fit_arima(series, p, d, q, exog=exog, exog_lag=exog_lag)
        except (NumericError, ValueError) as exc:
            log.warning("skipping ARIMA(%d,%d,%d): %s", p, d, q, exc)
            continue
        key = (m.aic, p + q, d)
        if best_key is None or key < best_key:
            best, best_key = m, key
    if best is None:
        raise NumericError("every ARIMA fit in the grid failed")
    return best
