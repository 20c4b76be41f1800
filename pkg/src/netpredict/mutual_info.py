"""Histogram mutual information between per-window price series.

Each series is discretized on its own range, then the plug-in estimator

    I(X;Y) = sum_xy p(x,y) * ln(p(x,y) / (p(x) p(y)))

is evaluated from the joint count table. ``mi_matrix`` does all pairs of a
window at once by building one-hot label matrices and getting every joint
count table from a single matrix product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

STRATEGIES = ("equal-width-count", "equal-width-width", "equal-frequency")

# clamp floor for tiny negative MI produced by rounding
NEG_TOL = 1e-12


@dataclass(frozen=True)
class BinRule:
    """How to discretize a series.

    ``equal-width-count``: ``k`` equal-width bins over [min, max].
    ``equal-width-width``: bins of width ``w`` starting at min.
    ``equal-frequency``: ``k`` quantile bins (ties stay together).
    """

    strategy: str = "equal-width-count"
    parameter: float = 12

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown binning strategy {self.strategy!r}; choose from {STRATEGIES}")
        if self.strategy == "equal-width-width":
            if not self.parameter > 0:
                raise ValueError("bin width must be > 0")
        elif int(self.parameter) != self.parameter or self.parameter < 2:
            raise ValueError("bin count must be an integer >= 2")

    @classmethod
    def default_for(cls, window_length: int, samples_per_bin: int = 5) -> "BinRule":
        return cls("equal-width-count", math.ceil(window_length / samples_per_bin))


def discretize(series, rule: BinRule = BinRule()) -> np.ndarray:
    """Map each value to an integer bin label starting at 0.

    Equal-width bins use the series' own [min, max] with the maximum in the
    last bin. A constant series maps to all zeros.
    """
    x = np.asarray(series, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("series must be finite")
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros(len(x), dtype=np.int64)
    if rule.strategy == "equal-width-count":
        k = int(rule.parameter)
        labels = np.floor((x - lo) / (hi - lo) * k).astype(np.int64)
        return np.minimum(labels, k - 1)
    if rule.strategy == "equal-width-width":
        w = float(rule.parameter)
        k = max(1, math.ceil((hi - lo) / w))
        labels = np.floor((x - lo) / w).astype(np.int64)
        return np.minimum(labels, k - 1)
    k = int(rule.parameter)
    edges = np.quantile(x, np.linspace(0.0, 1.0, k + 1))
    labels = np.searchsorted(edges[1:-1], x, side="right")
    # collapse empty quantile bins so labels stay dense
    _, dense = np.unique(labels, return_inverse=True)
    return dense.astype(np.int64)


def mutual_information(x, y, literal: bool = False) -> float:
    """Mutual information in nats between two label sequences.

    With ``literal=True`` cells of the joint table whose two labels are equal
    are left out of the sum. That variant can go negative and is not clamped.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"label sequences must be 1-D and equal length, got {x.shape} and {y.shape}")
    n = len(x)
    if n < 2:
        raise ValueError("need at least 2 samples")
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    joint = np.zeros((xi.max() + 1, yi.max() + 1))
    np.add.at(joint, (xi, yi), 1.0)
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    mask = joint > 0
    if literal:
        # compare original label values, not compressed indices
        ux = np.unique(x)
        uy = np.unique(y)
        mask &= ux[:, None] != uy[None, :]
    c = joint[mask]
    rows, cols = np.nonzero(mask)
    value = float(np.sum(c * np.log(c * n / (px[rows] * py[cols]))) / n)
    if not literal and -NEG_TOL < value < 0:
        value = 0.0
    return value


def label_matrix(prices: np.ndarray, rule: BinRule, transform: str = "price") -> np.ndarray:
    """Discretize every column of a (samples, tickers) block."""
    data = np.asarray(prices, dtype=float)
    if transform == "log_return":
        data = np.diff(np.log(data), axis=0)
    elif transform != "price":
        raise ValueError(f"unknown transform {transform!r}")
    return np.column_stack([discretize(data[:, j], rule) for j in range(data.shape[1])])


def mi_from_labels(labels: np.ndarray, literal: bool = False, block: int = 64) -> np.ndarray:
    """All-pairs MI matrix from a (samples, tickers) integer label matrix.

    The result is exactly symmetric with a zero diagonal; each unordered pair
    is evaluated once (upper triangle) and mirrored.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n, m = labels.shape
    if m < 2:
        raise ValueError("need at least 2 series")
    if n < 2:
        raise ValueError("need at least 2 samples")
    k = int(labels.max()) + 1
    # counts never exceed n, so float32 products are exact
    onehot = np.zeros((n, m, k), dtype=np.float32)
    onehot[np.arange(n)[:, None], np.arange(m)[None, :], labels] = 1.0
    flat = onehot.reshape(n, m * k)
    marg = onehot.sum(axis=0).astype(np.int64)  # (m, k)

    out = np.zeros((m, m))
    if literal:
        log_marg = np.log(np.maximum(marg, 1))
        off = ~np.eye(k, dtype=bool)[None, :, None, :]
        for lo in range(0, m, block):
            hi = min(m, lo + block)
            joint = (flat[:, lo * k : hi * k].T @ flat).reshape(hi - lo, k, m, k).astype(np.float64)
            log_joint = np.log(np.maximum(joint, 1.0))
            terms = joint * (log_joint + math.log(n) - log_marg[lo:hi, :, None, None] - log_marg[None, None, :, :])
            out[lo:hi] = (terms * off).sum(axis=(1, 3)) / n
    else:
        # n*I = sum C ln C - sum A ln A - sum B ln B + n ln n, with C the joint counts
        c_log_c = np.zeros(n + 1)
        c_log_c[1:] = np.arange(1, n + 1) * np.log(np.arange(1, n + 1))
        marg_term = c_log_c[marg].sum(axis=1)
        for lo in range(0, m, block):
            hi = min(m, lo + block)
            joint = (flat[:, lo * k : hi * k].T @ flat).astype(np.int64)
            s = c_log_c[joint].reshape(hi - lo, k, m, k).sum(axis=(1, 3))
            out[lo:hi] = (s - marg_term[lo:hi, None] - marg_term[None, :] + n * math.log(n)) / n

    upper = np.triu(out, 1)
    if not literal:
        upper[(upper < 0) & (upper > -NEG_TOL)] = 0.0
    return upper + upper.T


@dataclass(frozen=True)
class MiMatrix:
    window_index: int
    weights: np.ndarray
    tickers: tuple[str, ...] = ()

    def __post_init__(self):
        w = self.weights
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("MI weights must be a square matrix")
        if not np.array_equal(w, w.T):
            raise ValueError("MI weights must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ValueError("MI weights must have a zero diagonal")
        if self.tickers and len(self.tickers) != w.shape[0]:
            raise ValueError("ticker list does not match matrix size")

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]


def mi_matrix(window, rule: BinRule = BinRule(), literal: bool = False, transform: str = "price", tickers=()) -> MiMatrix:
    """MI network for one HourWindow."""
    if window.prices.shape[1] < 2:
        raise ValueError("window needs at least 2 tickers")
    labels = label_matrix(window.prices, rule, transform)
    return MiMatrix(window.window_index, mi_from_labels(labels, literal=literal), tuple(tickers))


def write_matrix(path, m: MiMatrix) -> None:
    """Dense row-major dump with a ticker header row."""
    names = list(m.tickers) or [str(i) for i in range(m.n_nodes)]
    with open(path, "w") as fh:
        fh.write(",".join(["ticker", *names]) + "\n")
        for name, row in zip(names, m.weights):
            fh.write(",".join([name, *(repr(float(v)) for v in row)]) + "\n")


def read_matrix(path, window_index: int = 0) -> MiMatrix:
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split(",")[1:]
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    weights = np.array([[float(v) for v in r[1:]] for r in rows])
    return MiMatrix(window_index, weights, tuple(header))
