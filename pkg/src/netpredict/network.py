"""Node strengths and strength histograms on a run-wide grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_BIN_WIDTH = 10.0


@dataclass(frozen=True)
class StrengthDistribution:
    window_index: int
    strengths: np.ndarray
    histogram: np.ndarray
    grid: np.ndarray


def node_strengths(m) -> np.ndarray:
    """Weighted degree of every node (row sums of the MI matrix)."""
    return np.asarray(m.weights, dtype=float).sum(axis=1)


def strength_grid(all_strengths, width: float = DEFAULT_BIN_WIDTH) -> np.ndarray:
    """Bin edges 0, width, 2*width, ... covering the largest strength in the run."""
    if width <= 0:
        raise ValueError("bin width must be > 0")
    top = max((float(np.max(s)) for s in all_strengths if len(s)), default=0.0)
    if top < 0:
        raise ValueError("strengths must be nonnegative")
    n_bins = max(1, math.ceil(top / width))
    # make sure the maximum lands inside even after rounding in the product
    while n_bins * width < top:
        n_bins += 1
    return np.arange(n_bins + 1) * width


def strength_histogram(strengths, grid) -> np.ndarray:
    """Normalized counts of ``strengths`` over ``grid`` (last bin closed)."""
    s = np.asarray(strengths, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if len(s) == 0:
        raise ValueError("empty strength vector")
    if s.min() < grid[0] or s.max() > grid[-1]:
        raise ValueError(f"strengths span [{s.min()}, {s.max()}] outside grid [{grid[0]}, {grid[-1]}]")
    counts, _ = np.histogram(s, bins=grid)
    return counts / len(s)


def distributions(matrices, width: float = DEFAULT_BIN_WIDTH) -> list[StrengthDistribution]:
    """Strength distributions for a run; the grid is shared by every window."""
    strengths = [node_strengths(m) for m in matrices]
    grid = strength_grid(strengths, width)
    return [
        StrengthDistribution(m.window_index, s, strength_histogram(s, grid), grid)
        for m, s in zip(matrices, strengths)
    ]


def write_strengths(path, dist: StrengthDistribution, tickers=()) -> None:
    names = list(tickers) or [str(i) for i in range(len(dist.strengths))]
    with open(path, "w") as fh:
        fh.write("ticker,strength\n")
        for name, s in zip(names, dist.strengths):
            fh.write(f"{name},{float(s)!r}\n")
