import numpy as np
import pytest

from proxvr import (Dataset, LibsvmParseError, RngStream, SparseVector,
                    normalize_rows, parse_libsvm, serialize_libsvm)
from oracles import random_dataset


class TestParsing:
    def test_single_row(self):
        ds = parse_libsvm("1 1:0.5 3:2\n")
        assert ds.n == 1 and ds.dim == 3
        assert ds.rows[0] == SparseVector([0, 2], [0.5, 2.0], 3)
        assert ds.labels[0] == 1.0

    def test_two_rows_signed_labels(self):
        ds = parse_libsvm("+1 2:1\n-1 1:1\n")
        assert ds.n == 2 and ds.dim == 2
        assert list(ds.labels) == [1.0, -1.0]

    def test_blank_lines_and_comments_tolerated(self):
        ds = parse_libsvm("1 1:1  # comment here\n\n# full comment line\n2 2:3\n")
        assert ds.n == 2 and ds.dim == 2

    def test_row_count_matches_content_lines(self):
        text = "1 1:1\n\n2 1:2\n3 2:1\n\n"
        assert parse_libsvm(text).n == 3

    def test_explicit_zero_values_dropped(self):
        ds = parse_libsvm("1 1:0 2:5\n")
        assert ds.rows[0] == SparseVector([1], [5.0], 2)

    def test_dim_override(self):
        ds = parse_libsvm("1 1:1\n", dim=10)
        assert ds.dim == 10
        with pytest.raises(LibsvmParseError):
            parse_libsvm("1 5:1\n", dim=3)

    def test_malformed_tokens_report_line(self):
        with pytest.raises(LibsvmParseError, match="line 2"):
            parse_libsvm("1 1:1\n1 zap\n")
        with pytest.raises(LibsvmParseError, match="line 1"):
            parse_libsvm("abc 1:1\n")
        with pytest.raises(LibsvmParseError, match="line 1"):
            parse_libsvm("1 1:one\n")
        with pytest.raises(LibsvmParseError, match="line 1"):
            parse_libsvm("1 0:1\n")  # not 1-based

    def test_non_increasing_indices_rejected(self):
        with pytest.raises(LibsvmParseError, match="strictly increasing"):
            parse_libsvm("1 2:1 2:3\n")
        with pytest.raises(LibsvmParseError, match="strictly increasing"):
            parse_libsvm("1 3:1 2:3\n")

    def test_empty_input_rejected(self):
        with pytest.raises(LibsvmParseError, match="empty"):
            parse_libsvm("\n\n# nothing\n")

    def test_file_path_source(self, tmp_path):
        path = tmp_path / "tiny.libsvm"
        path.write_text("1 1:0.25\n", encoding="utf-8")
        ds = parse_libsvm(str(path))
        assert ds.n == 1 and ds.rows[0].values[0] == 0.25


class TestRoundTrip:
    def test_parse_serialize_parse(self):
        text = "1 1:0.5 3:2\n-2 2:1\n"
        once = parse_libsvm(text)
        again = parse_libsvm(serialize_libsvm(once))
        assert once == again

    def test_random_datasets_round_trip(self):
        rng = RngStream(50)
        for _ in range(100):
            ds = random_dataset(rng)
            assert parse_libsvm(serialize_libsvm(ds), dim=ds.dim) == ds


class TestNormalize:
    def test_hand_row(self):
        ds = Dataset([SparseVector([0, 1], [3.0, 4.0], 2)], np.array([1.0]), 2)
        out = normalize_rows(ds)
        assert np.allclose(out.rows[0].values, [0.6, 0.8], atol=1e-15)

    def test_unit_row_unchanged(self):
        ds = Dataset([SparseVector([0], [1.0], 2)], np.array([1.0]), 2)
        out = normalize_rows(ds)
        assert abs(out.rows[0].values[0] - 1.0) <= 1e-15

    def test_all_norms_unit(self):
        rng = RngStream(51)
        ds = random_dataset(rng, max_n=30)
        while any(r.nnz == 0 for r in ds.rows):
            ds = random_dataset(rng, max_n=30)
        out = normalize_rows(ds)
        for r in out.rows:
            assert abs(r.norm() - 1.0) <= 1e-12

    def test_zero_row_error_names_index(self):
        ds = Dataset([SparseVector([0], [1.0], 2),
                      SparseVector([], [], 2)], np.array([1.0, 2.0]), 2)
        with pytest.raises(ValueError, match="row 1"):
            normalize_rows(ds)

    def test_original_untouched(self):
        ds = Dataset([SparseVector([0, 1], [3.0, 4.0], 2)], np.array([1.0]), 2)
        normalize_rows(ds)
        assert ds.rows[0].values[0] == 3.0
