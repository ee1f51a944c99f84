"""Recovery scores and the graph-analysis toolkit.

Edge recovery is scored per time point by precision/recall/F against the
true edge set. Estimated graphs are compared between task conditions via
betweenness centrality, two-sample rank-sum tests per node, and Holm
adjustment across nodes.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np


@dataclass(frozen=True)
class PrfCurve:
    """Per-time precision, recall and F arrays in [0, 1]."""

    P: np.ndarray
    R: np.ndarray
    F: np.ndarray

    def __len__(self) -> int:
        return len(self.F)


def prf_at_t(estimated, truth) -> tuple[float, float, float]:
    """Precision, recall and F of one estimated edge set against the truth.

    Conventions for empty sets: with no detected edges, P = 1 if the truth is
    also empty else 0; with no true edges, R = 1; F = 0 when P + R = 0.
    """
    D = {tuple(sorted(e)) for e in estimated}
    T = {tuple(sorted(e)) for e in truth}
    hits = len(D & T)
    if len(D) == 0:
        P = 1.0 if len(T) == 0 else 0.0
    else:
        P = hits / len(D)
    R = 1.0 if len(T) == 0 else hits / len(T)
    F = 0.0 if P + R == 0 else 2.0 * P * R / (P + R)
    return P, R, F


def f_curve(result, truth) -> PrfCurve:
    """Score every time point of an estimated graph sequence."""
    if len(result) != len(truth):
        raise ValueError(
            f"length mismatch: estimated T={len(result)}, truth T={len(truth)}")
    P = np.empty(len(result))
    R = np.empty(len(result))
    F = np.empty(len(result))
    for t in range(len(result)):
        P[t], R[t], F[t] = prf_at_t(result[t], truth[t])
    return PrfCurve(P, R, F)


def mean_f(curves) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-time mean F over replicates with a 95% normal-approximation band.

    Returns (mean, lo, hi); with a single replicate the band has zero width.
    """
    F = np.stack([np.asarray(c.F if isinstance(c, PrfCurve) else c, dtype=float)
                  for c in curves])
    reps = F.shape[0]
    m = F.mean(axis=0)
    sd = F.std(axis=0, ddof=1) if reps > 1 else np.zeros_like(m)
    half = 1.96 * sd / math.sqrt(reps)
    return m, m - half, m + half


def betweenness(edges, p: int) -> np.ndarray:
    """Unnormalized betweenness centrality on a binary undirected graph.

    Each unordered pair of distinct nodes contributes 1 split equally among
    its shortest paths; pairs with no connecting path contribute nothing.
    Brandes' accumulation over BFS trees.
    """
    adj = [[] for _ in range(p)]
    for j, k in edges:
        if j == k:
            raise ValueError(f"self-loop ({j},{k})")
        adj[j].append(k)
        adj[k].append(j)
    score = np.zeros(p)
    for s in range(p):
        # single-source shortest paths with path counts
        pred = [[] for _ in range(p)]
        sigma = np.zeros(p)
        sigma[s] = 1.0
        dist = np.full(p, -1)
        dist[s] = 0
        order = []
        q = deque([s])
        while q:
            v = q.popleft()
            order.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    pred[w].append(v)
        # dependency accumulation back down the BFS order
        delta = np.zeros(p)
        for w in reversed(order):
            for v in pred[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                score[w] += delta[w]
    return score / 2.0  # each unordered pair was counted from both endpoints


def _midranks(pooled: np.ndarray) -> np.ndarray:
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(len(pooled))
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def wilcoxon_rank_sum(x, y) -> float:
    """Two-sided rank-sum test p-value for samples x and y.

    Small samples (n + m <= 12) are handled by exhaustive enumeration of all
    rank assignments (midranks for ties); larger samples use the normal
    approximation with tie and continuity corrections.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = len(x), len(y)
    if n == 0 or m == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([x, y])
    if np.all(pooled == pooled[0]):
        return 1.0
    N = n + m
    ranks = _midranks(pooled)
    W = float(ranks[:n].sum())
    mu = n * (N + 1) / 2.0
    if N <= 12:
        obs = abs(W - mu)
        hits = 0
        total = 0
        for idx in combinations(range(N), n):
            total += 1
            w = float(ranks[list(idx)].sum())
            if abs(w - mu) >= obs - 1e-9:
                hits += 1
        return hits / total
    # normal approximation with tie correction
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts**3 - counts)) / (N * (N - 1))
    var = n * m / 12.0 * ((N + 1) - tie_term)
    if var <= 0:
        return 1.0
    diff = W - mu
    z = (abs(diff) - 0.5) / math.sqrt(var)  # continuity correction
    z = max(z, 0.0)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def holm_adjust(pvalues) -> list:
    """Holm step-down adjusted p-values, in the input order."""
    p = [float(v) for v in pvalues]
    if any(not 0.0 <= v <= 1.0 for v in p):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(p)
    order = sorted(range(m), key=lambda i: p[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, i in enumerate(order):
        running = max(running, min(1.0, (m - rank) * p[i]))
        adjusted[i] = running
    return adjusted


@dataclass(frozen=True)
class BetweennessChange:
    """Per-node group comparison of betweenness between two conditions."""

    mean_on: np.ndarray
    mean_off: np.ndarray
    pct_change: np.ndarray
    p_values: np.ndarray
    p_adjusted: np.ndarray

    def nodes_json(self, alpha: float = 0.05) -> list:
        return [
            {
                "id": int(i),
                "betweenness_on": float(self.mean_on[i]),
                "betweenness_off": float(self.mean_off[i]),
                "pct_change": float(self.pct_change[i]),
                "p": float(self.p_values[i]),
                "p_adj": float(self.p_adjusted[i]),
                "significant": bool(self.p_adjusted[i] <= alpha),
            }
            for i in range(len(self.mean_on))
        ]


def _subject_mean_betweenness(graph_seq, p: int) -> np.ndarray:
    mats = [betweenness(edges, p) for edges in graph_seq]
    return np.mean(mats, axis=0)


def betweenness_change(on_graphs, off_graphs, p: int) -> BetweennessChange:
    """Compare betweenness between conditions across subjects.

    on_graphs/off_graphs hold, per subject, the sequence of estimated graphs
    (iterables of edge sets) during that condition. Each subject contributes
    its time-averaged betweenness per node; group means give the percent
    change, and a rank-sum test per node compares the per-subject values,
    Holm-adjusted across nodes. A node with all-zero betweenness in both
    conditions reports 0% change and p = 1.
    """
    if len(on_graphs) != len(off_graphs):
        raise ValueError("need the same subjects in both conditions")
    if len(on_graphs) == 0:
        raise ValueError("need at least one subject")
    on = np.stack([_subject_mean_betweenness(g, p) for g in on_graphs])
    off = np.stack([_subject_mean_betweenness(g, p) for g in off_graphs])
    mean_on = on.mean(axis=0)
    mean_off = off.mean(axis=0)
    pct = np.zeros(p)
    pvals = np.ones(p)
    for i in range(p):
        if mean_on[i] == 0.0 and mean_off[i] == 0.0:
            continue  # degenerate node: 0% change, p = 1
        if mean_off[i] == 0.0:
            pct[i] = float("inf") if mean_on[i] > 0 else 0.0
        else:
            pct[i] = 100.0 * (mean_on[i] - mean_off[i]) / mean_off[i]
        pvals[i] = wilcoxon_rank_sum(on[:, i], off[:, i])
    adj = np.asarray(holm_adjust(pvals.tolist()))
    return BetweennessChange(mean_on, mean_off, pct, pvals, adj)


def report_json(curve: PrfCurve | None = None, curves=None,
                change: BetweennessChange | None = None,
                alpha: float = 0.05) -> dict:
    """Assemble the metrics report payload.

    Includes a per-time P/R/F table (from `curve`), a summary with the mean F
    and its 95% band over replicates (from `curves`), and a per-node
    betweenness-change table (from `change`); sections not supplied are
    omitted.
    """
    payload = {}
    if curve is not None:
        payload["per_time"] = [
            {"t": int(t), "P": float(curve.P[t]), "R": float(curve.R[t]),
             "F": float(curve.F[t])}
            for t in range(len(curve))
        ]
        payload["summary"] = {"mean_F": float(np.mean(curve.F))}
    if curves is not None:
        m, lo, hi = mean_f(curves)
        payload["summary"] = {
            "mean_F": float(np.mean(m)),
            "ci": [float(np.mean(lo)), float(np.mean(hi))],
        }
    if change is not None:
        payload["nodes"] = change.nodes_json(alpha)
    return payload
