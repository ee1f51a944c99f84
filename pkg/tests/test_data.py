"""Container invariants and CSV/JSON round-trips."""

import numpy as np
import pytest

from smoothgl.data import (
    EDGE_TOLERANCE,
    GraphSequence,
    MatrixSequence,
    TimeSeries,
    load_csv,
    precision_to_graphs,
    read_precision_sequence,
    write_csv,
    write_precision_sequence,
)


class TestTimeSeries:
    def test_basic_shape(self):
        ts = TimeSeries(np.arange(6.0).reshape(3, 2))
        assert ts.T == 3
        assert ts.p == 2

    def test_values_read_only(self):
        ts = TimeSeries(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            ts.values[0, 0] = 1.0

    def test_too_few_rows(self):
        with pytest.raises(ValueError, match="2 time points"):
            TimeSeries(np.zeros((1, 3)))

    def test_too_few_nodes(self):
        with pytest.raises(ValueError, match="2 nodes"):
            TimeSeries(np.zeros((5, 1)))

    def test_nonfinite_rejected(self):
        bad = np.zeros((3, 2))
        bad[1, 1] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            TimeSeries(bad)

    def test_label_count_must_match(self):
        with pytest.raises(ValueError, match="labels"):
            TimeSeries(np.zeros((3, 2)), node_labels=("a",))

    def test_labels_must_be_unique(self):
        with pytest.raises(ValueError, match="unique"):
            TimeSeries(np.zeros((3, 2)), node_labels=("a", "a"))


class TestMatrixSequence:
    def test_symmetry_enforced_for_precision(self):
        m = np.eye(3)[None]
        m = m.copy()
        m[0, 0, 1] = 1e-3
        with pytest.raises(ValueError, match="symmetric"):
            MatrixSequence(m, kind="precision")

    def test_tiny_asymmetry_tolerated(self):
        m = np.eye(3)[None].copy()
        m[0, 0, 1] = 5e-11
        MatrixSequence(m, kind="covariance")

    def test_positive_diagonal_for_precision(self):
        m = np.eye(2)[None].copy()
        m[0, 1, 1] = 0.0
        with pytest.raises(ValueError, match="positive diagonal"):
            MatrixSequence(m, kind="precision")
        # covariance kind allows a zero diagonal (e.g. constant series)
        MatrixSequence(np.zeros((1, 2, 2)), kind="covariance")

    def test_validate_false_skips_checks(self):
        m = np.zeros((2, 2, 2))
        seq = MatrixSequence(m, kind="precision", validate=False)
        assert seq.T == 2

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            MatrixSequence(np.eye(2)[None], kind="adjacency")

    def test_shape_checks(self):
        with pytest.raises(ValueError, match="stack"):
            MatrixSequence(np.zeros((2, 3, 2)), kind="auxiliary")
        with pytest.raises(ValueError, match="at least one"):
            MatrixSequence(np.zeros((0, 2, 2)), kind="auxiliary")

    def test_indexing(self):
        m = np.stack([np.eye(2), 2 * np.eye(2)])
        seq = MatrixSequence(m, kind="precision")
        assert len(seq) == 2
        assert np.allclose(seq[1], 2 * np.eye(2))


class TestGraphSequence:
    def test_edges_normalized_to_sorted_tuples(self):
        g = GraphSequence((frozenset({(2, 0)}),), p=3)
        assert g[0] == frozenset({(0, 2)})

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError, match="self-loop"):
            GraphSequence((frozenset({(1, 1)}),), p=3)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            GraphSequence((frozenset({(0, 3)}),), p=3)


class TestLoadCsv:
    def test_direct_parse(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("1,2\n3,4\n5,6\n")
        ts = load_csv(f)
        assert ts.T == 3 and ts.p == 2
        assert np.array_equal(ts.values, [[1, 2], [3, 4], [5, 6]])
        assert ts.node_labels is None

    def test_header_row(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("a,b\n1,2\n3,4\n5,6\n")
        ts = load_csv(f, has_header=True)
        assert ts.node_labels == ("a", "b")
        assert ts.T == 3

    def test_non_numeric_cell_reports_line(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("1,x\n3,4\n")
        with pytest.raises(ValueError, match="line 1"):
            load_csv(f)

    def test_ragged_row_reports_line(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("1,2\n3,4,5\n")
        with pytest.raises(ValueError, match="line 2"):
            load_csv(f)

    def test_too_few_rows(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("1,2\n")
        with pytest.raises(ValueError, match="at least 2"):
            load_csv(f)

    def test_header_width_mismatch(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("a,b,c\n1,2\n3,4\n")
        with pytest.raises(ValueError, match="header"):
            load_csv(f, has_header=True)

    def test_roundtrip_preserves_values(self, tmp_path):
        rng = np.random.default_rng(0)
        for trial in range(5):
            values = rng.normal(size=(7, 3)) * 10.0 ** rng.integers(-8, 8)
            ts = TimeSeries(values, node_labels=("a", "b", "c"))
            f = tmp_path / f"r{trial}.csv"
            write_csv(ts, f, header=True)
            back = load_csv(f, has_header=True)
            assert np.max(np.abs(back.values - values)) < 1e-12
            assert back.node_labels == ts.node_labels


class TestPrecisionSerialization:
    def test_identity_json_layout(self, tmp_path):
        seq = MatrixSequence(np.eye(2)[None], kind="precision")
        f = tmp_path / "p.json"
        write_precision_sequence(seq, f)
        import json

        payload = json.loads(f.read_text())
        assert payload["p"] == 2 and payload["T"] == 1
        assert payload["matrices"] == [[1.0, 0.0, 0.0, 1.0]]

    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(3, 4, 4))
        mats = a + a.transpose(0, 2, 1) + 8 * np.eye(4)
        seq = MatrixSequence(mats, kind="precision")
        f = tmp_path / "p.json"
        write_precision_sequence(seq, f)
        back = read_precision_sequence(f)
        assert back.kind == "precision"
        assert np.max(np.abs(back.matrices - mats)) < 1e-12

    def test_csv_stack_blocks(self, tmp_path):
        mats = np.stack([np.eye(2), 3 * np.eye(2)])
        seq = MatrixSequence(mats, kind="precision")
        f = tmp_path / "p.csv"
        write_precision_sequence(seq, f, format="csv-stack")
        blocks = f.read_text().strip().split("\n\n")
        assert len(blocks) == 2
        assert blocks[1].splitlines()[0] == "3.0,0.0"

    def test_wrong_kind_rejected(self, tmp_path):
        seq = MatrixSequence(np.eye(2)[None], kind="covariance")
        with pytest.raises(ValueError, match="precision"):
            write_precision_sequence(seq, tmp_path / "x.json")

    def test_unknown_format_rejected(self, tmp_path):
        seq = MatrixSequence(np.eye(2)[None], kind="precision")
        with pytest.raises(ValueError, match="format"):
            write_precision_sequence(seq, tmp_path / "x", format="parquet")


class TestPrecisionToGraphs:
    def test_identity_gives_empty_sets(self):
        seq = MatrixSequence(np.stack([np.eye(3)] * 4), kind="precision")
        graphs = precision_to_graphs(seq)
        assert all(g == frozenset() for g in graphs)

    def test_direct_threshold(self):
        m = np.eye(3)
        m[1, 2] = m[2, 1] = 0.3
        seq = MatrixSequence(m[None], kind="precision")
        assert precision_to_graphs(seq, 1e-6)[0] == frozenset({(1, 2)})

    def test_below_threshold_absent(self):
        m = np.eye(3)
        m[0, 1] = m[1, 0] = 1e-8
        seq = MatrixSequence(m[None], kind="precision")
        assert precision_to_graphs(seq, 1e-6)[0] == frozenset()

    def test_monotone_in_tolerance(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(5, 6, 6)) * 0.1
        mats = a + a.transpose(0, 2, 1) + 4 * np.eye(6)
        seq = MatrixSequence(mats, kind="precision")
        tolerances = (1e-6, 0.05, 0.1, 0.2, 0.5)
        for lo, hi in zip(tolerances, tolerances[1:]):
            g_lo = precision_to_graphs(seq, lo)
            g_hi = precision_to_graphs(seq, hi)
            for t in range(len(seq)):
                assert g_hi[t] <= g_lo[t]

    def test_diagonal_never_counts(self):
        seq = MatrixSequence((5 * np.eye(4))[None], kind="precision")
        assert precision_to_graphs(seq, EDGE_TOLERANCE)[0] == frozenset()

    def test_tolerance_must_be_positive(self):
        seq = MatrixSequence(np.eye(2)[None], kind="precision")
        with pytest.raises(ValueError, match="tolerance"):
            precision_to_graphs(seq, 0.0)
