"""Tests for the result file writer and reader."""

import math
from pathlib import Path

import pandas as pd
import pytest

from edudyn.csv_io import SCHEMAS, read_header, read_result, write_result


@pytest.fixture
def header() -> dict[str, str]:
    """Set up a small header block."""
    return {"edudyn_version": "1.0.0", "experiment": "simulate", "model.sigma": "16.5"}


def test_write_and_read(tmp_path: Path, header: dict[str, str]) -> None:
    """Test that a written table and its header are read back unchanged."""
    frame = pd.DataFrame({"t": [1, 2, 3], "E": [0.1, 1 / 3, 0.5]})
    path = write_result(tmp_path / "nested" / "simulate.csv", frame, "simulate-1d", header)
    assert path.is_file()

    result = read_result(path)
    assert result.schema == "simulate-1d"
    assert result.header == header
    assert list(result.frame["t"]) == [1, 2, 3]
    # 17 significant digits round-trip every double exactly
    assert result.frame["E"][1] == 1 / 3


def test_header_lines(tmp_path: Path, header: dict[str, str]) -> None:
    """Test the layout of the header block."""
    frame = pd.DataFrame({"E": [0.2], "gamma_E": [0.4]})
    path = write_result(tmp_path / "curve.csv", frame, "cobweb-curve", header)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# schema=cobweb-curve"
    assert lines[1] == "# edudyn_version=1.0.0"
    assert lines[4] == "E,gamma_E"
    assert read_header(path) == {"schema": "cobweb-curve", **header}


def test_nan_values(tmp_path: Path, header: dict[str, str]) -> None:
    """Test that NaN cells are written as 'nan' and read back as NaN."""
    frame = pd.DataFrame(
        {
            "param_value": [1.0],
            "sample_index": [-1],
            "state_value": [math.nan],
            "lyapunov": [math.nan],
            "period": ["error"],
        },
    )
    path = write_result(tmp_path / "bifurcation.csv", frame, "bifurcate-1d", header)
    assert "1,-1,nan,nan,error" in path.read_text(encoding="utf-8")
    result = read_result(path)
    assert math.isnan(result.frame["state_value"][0])
    assert result.frame["period"][0] == "error"


def test_schema_mismatch(tmp_path: Path, header: dict[str, str]) -> None:
    """Test that unknown schemas and mismatched columns are refused."""
    with pytest.raises(ValueError, match="Unknown result schema"):
        write_result(tmp_path / "x.csv", pd.DataFrame({"t": [1]}), "plot", header)
    with pytest.raises(ValueError, match="do not match"):
        write_result(tmp_path / "x.csv", pd.DataFrame({"E": [0.1], "t": [1]}), "simulate-1d", header)

    path = tmp_path / "edited.csv"
    path.write_text("# schema=simulate-1d\nt,E,extra\n1,0.1,2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="do not match"):
        read_result(path)
    path.write_text("t,E\n1,0.1\n", encoding="utf-8")
    with pytest.raises(ValueError, match="no known schema"):
        read_result(path)


def test_every_schema_has_unique_columns() -> None:
    """Test that no schema repeats a column name."""
    for columns in SCHEMAS.values():
        assert len(set(columns)) == len(columns)
