"""Centralities and modularity of dense weighted MI networks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from netpredict.errors import NumericError

# relative tolerance for treating two path lengths as equal
PATH_TIE_RTOL = 1e-10


@dataclass(frozen=True)
class CentralitySummary:
    window_index: int
    kind: str
    values: np.ndarray
    mean: float
    median: float
    maximum: float


@dataclass(frozen=True)
class ModularityResult:
    window_index: int
    partition: np.ndarray  # community id per node, ids are 0..C-1
    q: float


def summarize(values) -> tuple[float, float, float]:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot summarize an empty vector")
    return float(v.mean()), float(np.median(v)), float(v.max())


def _summary(window_index, kind, values) -> CentralitySummary:
    return CentralitySummary(window_index, kind, values, *summarize(values))


def _weights(m) -> tuple[np.ndarray, int]:
    w = np.asarray(getattr(m, "weights", m), dtype=float)
    return w, getattr(m, "window_index", 0)


# --------------------------------------------------------------------------- eigenvector


def eigenvector_centrality(m, tol: float = 1e-9, max_iter: int = 1000) -> CentralitySummary:
    """Principal eigenvector of the weight matrix by power iteration.

    Iterates ``x <- (W + c I) x`` with ``c`` half the largest row sum, which
    keeps the eigenvectors but makes the Perron root strictly dominant even
    for bipartite graphs. Starts from the uniform vector; the result has
    unit Euclidean norm.
    """
    w, idx = _weights(m)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if not np.any(w > 0):
        raise ValueError("eigenvector centrality is undefined for an all-zero matrix")
    n = w.shape[0]
    shift = 0.5 * w.sum(axis=1).max()
    x = np.full(n, 1.0 / np.sqrt(n))
    delta = np.inf
    for _ in range(max_iter):
        nxt = w @ x + shift * x
        nxt /= np.linalg.norm(nxt)
        delta = float(np.max(np.abs(nxt - x)))
        x = nxt
        if delta < tol:
            return _summary(idx, "eigenvector", x)
    raise NumericError(f"power iteration did not converge in {max_iter} iterations (last change {delta:.3g})")


# --------------------------------------------------------------------------- betweenness


def distances(w: np.ndarray, transform: str = "inverse") -> np.ndarray:
    """Edge lengths from MI weights; ``inf`` marks a missing edge.

    ``inverse``: d = 1/w. ``complement``: d = 1 + (max_w - w)/max_w, so the
    strongest link has length 1 and lengths stay in [1, 2).
    """
    d = np.full(w.shape, np.inf)
    edge = w > 0
    np.fill_diagonal(edge, False)
    if transform == "inverse":
        d[edge] = 1.0 / w[edge]
    elif transform == "complement":
        top = w.max()
        d[edge] = 1.0 + (top - w[edge]) / top
    else:
        raise ValueError(f"unknown distance transform {transform!r}")
    return d


@njit(cache=True)
def _brandes(dist, rtol):
    n = dist.shape[0]
    bc = np.zeros(n)
    for s in range(n):
        d = np.full(n, np.inf)
        done = np.zeros(n, dtype=np.bool_)
        order = np.empty(n, dtype=np.int64)
        d[s] = 0.0
        settled = 0
        # dense Dijkstra
        for _ in range(n):
            u = -1
            best = np.inf
            for v in range(n):
                if not done[v] and d[v] < best:
                    best = d[v]
                    u = v
            if u < 0:
                break
            done[u] = True
            order[settled] = u
            settled += 1
            for v in range(n):
                if not done[v]:
                    alt = d[u] + dist[u, v]
                    if alt < d[v]:
                        d[v] = alt
        # shortest-path counts in settling order
        sigma = np.zeros(n)
        sigma[s] = 1.0
        for i in range(1, settled):
            v = order[i]
            for j in range(i):
                u = order[j]
                alt = d[u] + dist[u, v]
                if abs(alt - d[v]) <= rtol * d[v]:
                    sigma[v] += sigma[u]
        # dependency accumulation in reverse order
        delta = np.zeros(n)
        for i in range(settled - 1, 0, -1):
            v = order[i]
            coeff = (1.0 + delta[v]) / sigma[v]
            for j in range(i):
                u = order[j]
                alt = d[u] + dist[u, v]
                if abs(alt - d[v]) <= rtol * d[v]:
                    delta[u] += sigma[u] * coeff
            bc[v] += delta[v]
    return bc


def betweenness_centrality(m, transform: str = "inverse", normalized: bool = True) -> CentralitySummary:
    """Shortest-path betweenness on the distance-transformed graph.

    Zero-weight links are absent. Normalized by (N-1)(N-2)/2 unordered pairs.
    """
    w, idx = _weights(m)
    n = w.shape[0]
    dist = distances(w, transform)
    finite = dist[np.isfinite(dist)]
    if finite.size and finite.min() <= 0:
        raise ValueError("transformed distances must be positive")
    raw = _brandes(dist, PATH_TIE_RTOL) / 2.0  # each unordered pair counted twice
    if normalized:
        raw = raw / ((n - 1) * (n - 2) / 2.0) if n > 2 else np.zeros(n)
    return _summary(idx, "betweenness", raw)


# --------------------------------------------------------------------------- modularity


def modularity_q(w, partition) -> float:
    """Q = (1/2m) sum_ij (w_ij - s_i s_j / 2m) [c_i == c_j]."""
    w = np.asarray(w, dtype=float)
    c = np.asarray(partition)
    s = w.sum(axis=1)
    two_m = s.sum()
    if not two_m > 0:
        raise ValueError("modularity needs positive total weight")
    _, c = np.unique(c, return_inverse=True)
    k = c.max() + 1
    if k == 1:
        return 0.0  # identically zero; the general formula leaves rounding noise
    onehot = np.zeros((len(c), k))
    onehot[np.arange(len(c)), c] = 1.0
    within = np.einsum("ic,ij,jc->", onehot, w, onehot)
    tot = onehot.T @ s
    return float(within / two_m - np.sum(tot**2) / two_m**2)


def _local_moves(w, order, min_gain=1e-12):
    """One level of greedy node moves. Returns community labels 0..C-1."""
    n = w.shape[0]
    s = w.sum(axis=1)
    two_m = s.sum()
    comm = np.arange(n)
    tot = s.copy()
    self_loop = np.diag(w)
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = comm[i]
            links = np.bincount(comm, weights=w[i], minlength=n)
            links[ci] -= self_loop[i]
            tot[ci] -= s[i]
            gain = links - s[i] * tot / two_m
            # only communities i is linked to, plus staying alone in its own
            candidates = np.flatnonzero(links > 0)
            best, best_gain = ci, gain[ci]
            for c in candidates:
                if gain[c] > best_gain + min_gain:
                    best, best_gain = c, gain[c]
            comm[i] = best
            tot[best] += s[i]
            if best != ci:
                improved = True
    _, labels = np.unique(comm, return_inverse=True)
    return labels


def modularity(m, seed: int = 0) -> ModularityResult:
    """Greedy modularity maximization: local moves, then aggregate, repeated.

    Node visiting order at every level is a permutation drawn from ``seed``,
    so results are deterministic.
    """
    w, idx = _weights(m)
    if not w.sum() > 0:
        raise ValueError("modularity needs positive total weight")
    rng = np.random.default_rng(seed)
    n = w.shape[0]
    partition = np.arange(n)
    level_w = w
    while True:
        labels = _local_moves(level_w, rng.permutation(level_w.shape[0]))
        k = labels.max() + 1
        if k == level_w.shape[0]:
            break
        partition = labels[partition]
        onehot = np.zeros((level_w.shape[0], k))
        onehot[np.arange(level_w.shape[0]), labels] = 1.0
        level_w = onehot.T @ level_w @ onehot
        if k == 1:
            break
    _, partition = np.unique(partition, return_inverse=True)
    return ModularityResult(idx, partition, modularity_q(w, partition))


def graph_metrics(m, seed: int = 0, transform: str = "inverse") -> dict[str, float]:
    """The seven graph-structure columns of the metric table for one window."""
    eig = eigenvector_centrality(m)
    btw = betweenness_centrality(m, transform)
    mod = modularity(m, seed)
    return {
        "eig-mean": eig.mean,
        "eig-median": eig.median,
        "eig-max": eig.maximum,
        "btw-mean": btw.mean,
        "btw-median": btw.median,
        "btw-max": btw.maximum,
        "modularity": mod.q,
    }
