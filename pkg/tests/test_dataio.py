"""CSV round trips, layout detection, and row standardization."""

import numpy as np
import pytest

from nrpca.dataio import load_matrix, save_matrix, standardize_rows
from nrpca.estimators import nr_estimate
from nrpca.linalg import DataMatrix


def test_save_load_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(17)
    values = rng.normal(size=(6, 9))
    values[0, 0] = 1.2345678901234567e-17
    values[1, 1] = -9.876543210987654e16
    values[2, 2] = 1.0 / 3.0
    path = tmp_path / "m.csv"
    save_matrix(str(path), values)
    loaded = load_matrix(str(path))
    assert np.array_equal(loaded.values, values)


def test_load_matrix_detects_header_and_labels(tmp_path):
    path = tmp_path / "labeled.csv"
    path.write_text(
        "gene,s1,s2,s3,s4\n"
        "g1,1.0,2.0,3.0,4.0\n"
        "g2,0.5,0.25,0.125,0.0625\n"
    )
    loaded = load_matrix(str(path))
    assert np.array_equal(
        loaded.values,
        np.array([[1.0, 2.0, 3.0, 4.0], [0.5, 0.25, 0.125, 0.0625]]),
    )


def test_load_matrix_header_only(tmp_path):
    path = tmp_path / "headed.csv"
    path.write_text("s1,s2,s3\n1,2,3\n4,5,6\n")
    loaded = load_matrix(str(path))
    assert np.array_equal(loaded.values, np.array([[1.0, 2, 3], [4, 5, 6]]))


def test_load_matrix_skips_blank_lines(tmp_path):
    path = tmp_path / "gaps.csv"
    path.write_text("1,2,3\n\n4,5,6\n\n")
    loaded = load_matrix(str(path))
    assert loaded.values.shape == (2, 3)


def test_load_matrix_ragged_reports_line(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,3\n4,5\n6,7,8\n")
    with pytest.raises(ValueError, match="line 2"):
        load_matrix(str(path))


def test_load_matrix_bad_cell_reports_position(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2,3\n4,oops,6\n7,8,9\n")
    with pytest.raises(ValueError, match="line 2"):
        load_matrix(str(path))
    path.write_text("1,2,3\n4,inf,6\n7,8,9\n")
    with pytest.raises(ValueError, match="line 2"):
        load_matrix(str(path))


def test_load_matrix_needs_three_samples(tmp_path):
    path = tmp_path / "narrow.csv"
    path.write_text("1,2\n3,4\n")
    with pytest.raises(ValueError):
        load_matrix(str(path))


def test_standardize_rows_unit_variance():
    rng = np.random.default_rng(3)
    x = DataMatrix(rng.normal(size=(20, 6)) * np.linspace(0.1, 40, 20)[:, None])
    out = standardize_rows(x)
    sd = np.std(out.values, axis=1, ddof=1)
    assert np.all(np.abs(sd - 1.0) <= 1e-12)


def test_standardize_rows_idempotent():
    rng = np.random.default_rng(4)
    x = DataMatrix(rng.normal(size=(8, 7)) * 5.0)
    once = standardize_rows(x)
    twice = standardize_rows(once)
    assert np.all(np.abs(twice.values - once.values) <= 1e-12)


def test_standardize_rows_makes_trace_d():
    rng = np.random.default_rng(5)
    x = DataMatrix(rng.normal(size=(20, 6)) * np.linspace(1, 9, 20)[:, None])
    est = nr_estimate(standardize_rows(x))
    assert abs(est.trace_dual - 20.0) <= 1e-8 * 20.0


def test_standardize_rows_rejects_constant_row():
    values = np.ones((4, 5))
    values[1:] = np.random.default_rng(0).normal(size=(3, 5))
    with pytest.raises(ValueError, match="row 0"):
        standardize_rows(values)
