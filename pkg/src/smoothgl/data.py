"""Core containers and file I/O for time series, matrix sequences and graphs.

Conventions: a multivariate time series is a T x p array whose rows are time
points in observation order; matrix sequences are stacked as (T, p, p) arrays;
graphs are sets of unordered node-index pairs per time point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

# Matrix entries this far from exact symmetry indicate a bug upstream, not noise.
SYMMETRY_TOL = 1e-10

# Default |entry| threshold above which an off-diagonal entry counts as an edge.
# ADMM auxiliary variables are exactly sparse, so this only has to clear
# accumulation noise.
EDGE_TOLERANCE = 1e-6

MATRIX_KINDS = ("covariance", "precision", "auxiliary", "dual")


def as_values(ts) -> np.ndarray:
    """Return the (T, p) float array behind a TimeSeries or array-like."""
    if isinstance(ts, TimeSeries):
        return ts.values
    arr = np.asarray(ts, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a (T, p) array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Observed multivariate series: ``values[i]`` is the p-vector at time i."""

    values: np.ndarray
    node_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D (T, p), got shape {values.shape}")
        T, p = values.shape
        if T < 2:
            raise ValueError(f"need at least 2 time points, got {T}")
        if p < 2:
            raise ValueError(f"need at least 2 nodes, got {p}")
        if not np.all(np.isfinite(values)):
            raise ValueError("time series contains non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.node_labels is not None:
            labels = tuple(str(s) for s in self.node_labels)
            if len(labels) != p:
                raise ValueError(f"expected {p} node labels, got {len(labels)}")
            if len(set(labels)) != len(labels):
                raise ValueError("node labels must be unique")
            object.__setattr__(self, "node_labels", labels)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class MatrixSequence:
    """A length-T sequence of p x p matrices with a semantic tag.

    ``kind`` is one of "covariance", "precision", "auxiliary" or "dual".
    Covariance/precision sequences are validated for symmetry, and precision
    sequences for a strictly positive diagonal; pass ``validate=False`` to
    keep a degenerate solver iterate (e.g. a fully shrunk Z) inspectable.
    """

    matrices: np.ndarray
    kind: str
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.kind not in MATRIX_KINDS:
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        arr = np.asarray(self.matrices, dtype=float)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"matrices must stack to (T, p, p), got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("matrix sequence must contain at least one matrix")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix sequence contains non-finite entries")
        if self.validate and self.kind in ("covariance", "precision"):
            skew = np.max(np.abs(arr - arr.transpose(0, 2, 1)))
            if skew > SYMMETRY_TOL:
                raise ValueError(f"matrices not symmetric (max asymmetry {skew:.3e})")
            if self.kind == "precision":
                diag = np.diagonal(arr, axis1=1, axis2=2)
                if np.any(diag <= 0):
                    raise ValueError("precision matrices must have positive diagonal")
        arr.setflags(write=False)
        object.__setattr__(self, "matrices", arr)

    @property
    def T(self) -> int:
        return self.matrices.shape[0]

    @property
    def p(self) -> int:
        return self.matrices.shape[1]

    def __len__(self) -> int:
        return self.T

    def __getitem__(self, i) -> np.ndarray:
        return self.matrices[i]


@dataclass(frozen=True)
class GraphSequence:
    """Per-time edge sets over nodes 0..p-1; edges are unordered index pairs."""

    edge_sets: tuple[frozenset, ...]
    p: int
    tolerance: float = EDGE_TOLERANCE

    def __post_init__(self):
        sets = []
        for t, edges in enumerate(self.edge_sets):
            clean = set()
            for e in edges:
                j, k = sorted(e)
                if j == k:
                    raise ValueError(f"self-loop ({j},{k}) at time {t}")
                if not (0 <= j < self.p and 0 <= k < self.p):
                    raise ValueError(f"edge ({j},{k}) out of range at time {t}")
                clean.add((j, k))
            sets.append(frozenset(clean))
        object.__setattr__(self, "edge_sets", tuple(sets))

    @property
    def T(self) -> int:
        return len(self.edge_sets)

    def __len__(self) -> int:
        return len(self.edge_sets)

    def __getitem__(self, i) -> frozenset:
        return self.edge_sets[i]


def load_csv(path, has_header: bool = False) -> TimeSeries:
    """Read a comma-separated series, one row per time point.

    Parameters
    ----------
    path : str or Path
        File to read. '.' decimal, no quoting.
    has_header : bool
        When true the first line supplies node labels.

    Returns
    -------
    TimeSeries with row order preserved as time order.
    """
    labels = None
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if has_header and labels is None and not rows:
                labels = fields
                continue
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ValueError(
                    f"{path}: malformed row at line {lineno}: "
                    f"expected {width} fields, got {len(fields)}"
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                bad = next(f for f in fields if not _is_number(f))
                raise ValueError(
                    f"{path}: non-numeric cell {bad!r} at line {lineno}"
                ) from None
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 data rows, got {len(rows)}")
    if labels is not None and len(labels) != len(rows[0]):
        raise ValueError(
            f"{path}: header has {len(labels)} fields but rows have {len(rows[0])}"
        )
    return TimeSeries(np.array(rows, dtype=float),
                      tuple(labels) if labels is not None else None)


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def write_csv(ts: TimeSeries, path, header: bool = False) -> None:
    """Write a TimeSeries as CSV, one row per time point (inverse of load_csv)."""
    values = as_values(ts)
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            labels = None
            if isinstance(ts, TimeSeries):
                labels = ts.node_labels
            if labels is None:
                labels = tuple(f"V{i + 1}" for i in range(values.shape[1]))
            fh.write(",".join(labels) + "\n")
        for row in values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_precision_sequence(seq: MatrixSequence, path, format: str = "json") -> None:
    """Serialize a precision sequence.

    ``json`` writes ``{p, T, tolerance?, matrices}`` with each matrix
    flattened row-major; ``csv-stack`` writes T blocks of p rows separated by
    blank lines.
    """
    if seq.kind != "precision":
        raise ValueError(f"expected a precision sequence, got kind {seq.kind!r}")
    if len(seq) == 0:
        raise ValueError("cannot write an empty matrix sequence")
    if format == "json":
        payload = {
            "p": seq.p,
            "T": seq.T,
            "matrices": [[float(v) for v in m.ravel()] for m in seq.matrices],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    elif format == "csv-stack":
        with open(path, "w", encoding="utf-8") as fh:
            for t, m in enumerate(seq.matrices):
                if t:
                    fh.write("\n")
                for row in m:
                    fh.write(",".join(repr(float(v)) for v in row) + "\n")
    else:
        raise ValueError(f"unknown format {format!r}")


def read_precision_sequence(path) -> MatrixSequence:
    """Read a JSON file produced by write_precision_sequence."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    try:
        p = int(payload["p"])
        T = int(payload["T"])
        flat = payload["matrices"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: not a precision-sequence file") from exc
    if len(flat) != T:
        raise ValueError(f"{path}: expected {T} matrices, found {len(flat)}")
    mats = np.array(flat, dtype=float).reshape(T, p, p)
    return MatrixSequence(mats, kind="precision", validate=False)


def precision_to_graphs(seq: MatrixSequence, tolerance: float = EDGE_TOLERANCE) -> GraphSequence:
    """Threshold off-diagonal entries into per-time edge sets.

    Pair {j, k} (j != k) is an edge at time i iff |(theta_i)_{jk}| > tolerance.
    """
    if seq.kind != "precision":
        raise ValueError(f"expected a precision sequence, got kind {seq.kind!r}")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    p = seq.p
    iu = np.triu_indices(p, k=1)
    edge_sets = []
    for m in seq.matrices:
        hits = np.abs(m[iu]) > tolerance
        edges = {(int(j), int(k)) for j, k, hit in zip(iu[0], iu[1], hits) if hit}
        edge_sets.append(frozenset(edges))
    return GraphSequence(tuple(edge_sets), p=p, tolerance=tolerance)
