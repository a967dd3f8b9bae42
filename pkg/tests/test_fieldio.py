import numpy as np
import pytest

from dcnls.fieldio import read_field, write_field, write_field_csv
from dcnls.grids import BoxField, RadialField

from conftest import random_box_field


def test_radial_roundtrip(tmp_path, radial_gaussian):
    path = tmp_path / "u.dcnf"
    write_field(path, radial_gaussian)
    v = read_field(path)
    assert isinstance(v, RadialField)
    assert v.grid == radial_gaussian.grid
    # storage is complex64, so roundtrip is single-precision exact
    expected = radial_gaussian.values.astype(np.complex64).astype(np.complex128)
    assert np.array_equal(v.values, expected)


def test_box_roundtrip(tmp_path, box_grid):
    u = random_box_field(box_grid, seed=3)
    path = tmp_path / "u.dcnf"
    write_field(path, u)
    v = read_field(path)
    assert isinstance(v, BoxField)
    assert v.grid == u.grid
    assert np.max(np.abs(v.values - u.values)) < 1e-6


def test_magic_rejected(tmp_path):
    path = tmp_path / "bad.dcnf"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(Exception):
        read_field(path)


def test_csv_header(tmp_path, radial_gaussian):
    path = tmp_path / "u.csv"
    write_field_csv(path, radial_gaussian)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,re,im"
    assert len(lines) == radial_gaussian.grid.n + 1
