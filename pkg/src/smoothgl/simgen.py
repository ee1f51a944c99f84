"""Synthetic benchmarks: random graphs -> precision structures -> VAR series.

A scenario is a list of segments, each defined by a random-graph model, an
edge-strength law and a length. Every segment's graph becomes a precision
matrix (off-diagonals = edge strengths, diagonal loaded for positive
definiteness), and the series follows a diagonal VAR(1) whose stationary
covariance within each segment is exactly that segment's inverse precision,
so the true conditional-independence graph is the drawn graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import GraphSequence, MatrixSequence, TimeSeries

# numpy's default 128-bit PCG; the name travels with every artifact so runs
# can be reproduced across machines.
RNG_ALGORITHM = "PCG64"

GRAPH_KINDS = ("erdos_renyi", "barabasi_albert", "watts_strogatz")
STRENGTH_KINDS = ("fixed", "uniform_symmetric")

# Diagonal loading: d_jj = 1 + max(0, rowsum_j - DOMINANCE_BUDGET) gives
# diagonal dominance with slack 1 - DOMINANCE_BUDGET, hence min eig >= 0.1.
DOMINANCE_BUDGET = 0.9


@dataclass(frozen=True)
class GraphModel:
    """Random-graph family on p nodes.

    kind "erdos_renyi" uses `theta` (independent edge probability);
    "barabasi_albert" uses `power` (preferential-attachment exponent), one
    new edge per arriving node, seeded with the single edge 0-1;
    "watts_strogatz" uses `beta` (rewiring probability) and `base_degree`
    (even ring-lattice degree).
    """

    kind: str
    p: int
    theta: float = 0.1
    power: float = 1.0
    beta: float = 0.75
    base_degree: int = 2

    def __post_init__(self):
        if self.kind not in GRAPH_KINDS:
            raise ValueError(f"unknown graph model {self.kind!r}")
        if self.p < 2:
            raise ValueError(f"need at least 2 nodes, got {self.p}")
        if self.kind == "erdos_renyi" and not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must be in [0, 1], got {self.theta}")
        if self.kind == "barabasi_albert" and not self.power > 0:
            raise ValueError(f"power must be positive, got {self.power}")
        if self.kind == "watts_strogatz":
            if not 0.0 <= self.beta <= 1.0:
                raise ValueError(f"beta must be in [0, 1], got {self.beta}")
            if self.base_degree < 2 or self.base_degree % 2:
                raise ValueError(
                    f"base_degree must be even and >= 2, got {self.base_degree}")
            if self.base_degree >= self.p:
                raise ValueError("base_degree must be smaller than p")


@dataclass(frozen=True)
class EdgeStrengthLaw:
    """Edge weights: fixed(value) or uniform_symmetric(lo, hi).

    uniform_symmetric samples magnitude from U[lo, hi] and a fair sign, i.e.
    uniformly from [-hi, -lo] union [lo, hi].
    """

    kind: str
    value: float = 0.6
    lo: float = 0.25
    hi: float = 0.5

    def __post_init__(self):
        if self.kind not in STRENGTH_KINDS:
            raise ValueError(f"unknown strength law {self.kind!r}")
        if self.kind == "fixed" and not np.isfinite(self.value):
            raise ValueError("fixed strength must be finite")
        if self.kind == "uniform_symmetric" and not 0 < self.lo < self.hi:
            raise ValueError(f"need 0 < lo < hi, got lo={self.lo}, hi={self.hi}")

    def sample(self, rng) -> float:
        if self.kind == "fixed":
            return float(self.value)
        mag = rng.uniform(self.lo, self.hi)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        return float(sign * mag)


@dataclass(frozen=True)
class Segment:
    model: GraphModel
    strength: EdgeStrengthLaw
    length: int

    def __post_init__(self):
        if self.length < 2:
            raise ValueError(f"segment length must be >= 2, got {self.length}")


@dataclass(frozen=True)
class SimScenario:
    """Piecewise-stationary scenario: segments + AR coefficient + seed.

    cyclic=True copies segment 1's precision into segment 3 (the recurring-
    structure setting), so requires at least 3 segments.
    """

    segments: tuple
    cyclic: bool = False
    ar: float = 0.3
    seed: int = 0

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("scenario needs at least one segment")
        if self.cyclic and len(segs) < 3:
            raise ValueError("cyclic scenarios need at least 3 segments")
        if not 0.0 <= self.ar < 1.0:
            raise ValueError(f"ar coefficient must be in [0, 1), got {self.ar}")
        ps = {s.model.p for s in segs}
        if len(ps) != 1:
            raise ValueError(f"all segments must share one node count, got {ps}")
        object.__setattr__(self, "segments", segs)

    @property
    def p(self) -> int:
        return self.segments[0].model.p

    @property
    def T(self) -> int:
        return sum(s.length for s in self.segments)

    def to_json(self) -> dict:
        segs = []
        for s in self.segments:
            m = {"kind": s.model.kind, "params": {"p": s.model.p}}
            if s.model.kind == "erdos_renyi":
                m["params"]["theta"] = s.model.theta
            elif s.model.kind == "barabasi_albert":
                m["params"]["power"] = s.model.power
            else:
                m["params"]["beta"] = s.model.beta
                m["params"]["base_degree"] = s.model.base_degree
            if s.strength.kind == "fixed":
                law = {"kind": "fixed", "params": {"value": s.strength.value}}
            else:
                law = {"kind": "uniform_symmetric",
                       "params": {"lo": s.strength.lo, "hi": s.strength.hi}}
            segs.append({"model": m, "strength": law, "length": s.length})
        return {"segments": segs, "cyclic": self.cyclic, "ar": self.ar,
                "seed": int(self.seed)}

    @classmethod
    def from_json(cls, payload: dict) -> "SimScenario":
        segments = []
        for s in payload["segments"]:
            mp = dict(s["model"].get("params", {}))
            model = GraphModel(kind=s["model"]["kind"], **mp)
            lp = dict(s["strength"].get("params", {}))
            law = EdgeStrengthLaw(kind=s["strength"]["kind"], **lp)
            segments.append(Segment(model, law, int(s["length"])))
        return cls(tuple(segments), cyclic=bool(payload.get("cyclic", False)),
                   ar=float(payload.get("ar", 0.3)),
                   seed=int(payload.get("seed", 0)))


@dataclass(frozen=True)
class GroundTruth:
    """Per-time true precisions and edge sets, plus segment change points."""

    true_precisions: MatrixSequence
    true_edge_sets: GraphSequence
    change_points: tuple = field(default_factory=tuple)

    def dump(self, path) -> None:
        seq = self.true_precisions
        payload = {
            "p": seq.p,
            "T": seq.T,
            "rng": RNG_ALGORITHM,
            "change_points": [int(c) for c in self.change_points],
            "matrices": [[float(v) for v in m.ravel()] for m in seq.matrices],
            "edge_sets": [sorted([j, k] for j, k in edges)
                          for edges in self.true_edge_sets.edge_sets],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")


def gen_graph(model: GraphModel, rng) -> set:
    """Draw an edge set (unordered index pairs) from the model."""
    p = model.p
    if model.kind == "erdos_renyi":
        edges = set()
        for j in range(p - 1):
            for k in range(j + 1, p):
                if rng.random() < model.theta:
                    edges.add((j, k))
        return edges
    if model.kind == "barabasi_albert":
        edges = {(0, 1)}
        degree = np.zeros(p)
        degree[0] = degree[1] = 1.0
        for v in range(2, p):
            weights = degree[:v] ** model.power
            probs = weights / weights.sum()
            target = int(rng.choice(v, p=probs))
            edges.add((min(target, v), max(target, v)))
            degree[target] += 1.0
            degree[v] += 1.0
        return edges
    # watts_strogatz: ring lattice, then rewire each lattice edge w.p. beta
    edges = set()
    half = model.base_degree // 2
    for j in range(p):
        for k in range(1, half + 1):
            a, b = j, (j + k) % p
            edges.add((min(a, b), max(a, b)))
    for j in range(p):
        for k in range(1, half + 1):
            a, b = j, (j + k) % p
            e = (min(a, b), max(a, b))
            if e not in edges:
                continue
            if rng.random() < model.beta:
                candidates = [
                    t for t in range(p)
                    if t != j and (min(j, t), max(j, t)) not in edges
                ]
                if not candidates:
                    continue
                t = int(candidates[int(rng.integers(len(candidates)))])
                edges.remove(e)
                edges.add((min(j, t), max(j, t)))
    return edges


def graph_to_precision(edges, p: int, law: EdgeStrengthLaw, rng) -> np.ndarray:
    """Weighted-adjacency precision with diagonal loading.

    Off-diagonal (j, k) gets a sampled strength for each edge (edges visited
    in sorted order so draws are reproducible); the diagonal is
    d_jj = 1 + max(0, rowsum_j|w| - 0.9), which makes the matrix diagonally
    dominant with slack 0.1, hence PD with min eigenvalue >= 0.1.
    """
    theta = np.zeros((p, p))
    for j, k in sorted(edges):
        w = law.sample(rng)
        theta[j, k] = w
        theta[k, j] = w
    rowsum = np.sum(np.abs(theta), axis=1)
    np.fill_diagonal(theta, 1.0 + np.maximum(0.0, rowsum - DOMINANCE_BUDGET))
    return theta


def replicate_seed(base_seed: int, rep: int) -> int:
    """A 64-bit stream seed for replicate `rep` of a base seed."""
    ss = np.random.SeedSequence([int(base_seed), int(rep)])
    return int(ss.generate_state(1, np.uint64)[0])


def simulate(scenario: SimScenario) -> tuple[TimeSeries, GroundTruth]:
    """Draw graphs and a VAR(1) series for the scenario.

    Within a segment with precision Theta_seg and Sigma_seg = Theta_seg^-1:
    X_t = a X_{t-1} + eps_t with eps_t ~ N(0, (1-a^2) Sigma_seg), so the
    stationary covariance is exactly Sigma_seg. X_0 ~ N(0, Sigma_seg1). The
    process continues through segment boundaries (no re-draw).
    """
    rng = np.random.default_rng(np.random.SeedSequence(int(scenario.seed)))
    p = scenario.p
    a = scenario.ar

    seg_edges = []
    seg_precisions = []
    for idx, seg in enumerate(scenario.segments):
        if scenario.cyclic and idx == 2:
            seg_edges.append(seg_edges[0])
            seg_precisions.append(seg_precisions[0])
            continue
        edges = gen_graph(seg.model, rng)
        seg_edges.append(edges)
        seg_precisions.append(graph_to_precision(edges, p, seg.strength, rng))

    seg_chols = []
    for theta in seg_precisions:
        sigma = np.linalg.inv(theta)
        sigma = 0.5 * (sigma + sigma.T)
        seg_chols.append(np.linalg.cholesky(sigma))

    T = scenario.T
    X = np.empty((T, p))
    innov_scale = np.sqrt(1.0 - a * a)
    t = 0
    for idx, seg in enumerate(scenario.segments):
        L = seg_chols[idx]
        for _ in range(seg.length):
            if t == 0:
                X[0] = L @ rng.standard_normal(p)
            else:
                X[t] = a * X[t - 1] + innov_scale * (L @ rng.standard_normal(p))
            t += 1

    true_mats = np.empty((T, p, p))
    edge_sets = []
    t = 0
    for idx, seg in enumerate(scenario.segments):
        for _ in range(seg.length):
            true_mats[t] = seg_precisions[idx]
            edge_sets.append(frozenset(seg_edges[idx]))
            t += 1
    change_points = tuple(np.cumsum([s.length for s in scenario.segments])[:-1].tolist())

    truth = GroundTruth(
        true_precisions=MatrixSequence(true_mats, kind="precision"),
        true_edge_sets=GraphSequence(tuple(edge_sets), p=p),
        change_points=change_points,
    )
    return TimeSeries(X), truth
