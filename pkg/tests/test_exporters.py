import json
import math

import numpy as np
import polars as pl
import pytest
from pydantic import BaseModel

from nhsense.exporters import CsvExporter, JsonExporter, to_jsonable


@pytest.fixture
def frame():
    return pl.DataFrame(
        {
            "Delta_per_kappa": [-1.0, 0.0, 1.0 / 3.0],
            "S": [1.2345678901234567e-9, 0.1, math.pi],
            "n": [1, 2, 3],
        }
    )


def test_csv_reads_back_exactly(tmp_path, frame):
    path = CsvExporter().export(frame, tmp_path / "out.csv")
    loaded = pl.read_csv(path)
    assert loaded.columns == frame.columns
    np.testing.assert_array_equal(loaded["S"].to_numpy(), frame["S"].to_numpy())
    np.testing.assert_array_equal(loaded["Delta_per_kappa"].to_numpy(), frame["Delta_per_kappa"].to_numpy())


def test_csv_format(frame):
    text = CsvExporter().render(frame)
    assert "\r" not in text
    assert text.endswith("\n")
    assert "E" not in text.split("\n", 1)[1]
    assert "e" in text.split("\n", 1)[1]


def test_csv_is_deterministic(tmp_path, frame):
    first = CsvExporter().export(frame, tmp_path / "a.csv").read_bytes()
    second = CsvExporter().export(frame.clone(), tmp_path / "b.csv").read_bytes()
    assert first == second


class _Record(BaseModel):
    name: str
    value: float


def test_to_jsonable_conversions():
    assert to_jsonable(1 + 2j) == [1.0, 2.0]
    assert to_jsonable(np.complex128(0.5 - 1j)) == [0.5, -1.0]
    assert to_jsonable(np.array([[1j, 2.0]])) == [[[0.0, 1.0], [2.0, 0.0]]]
    assert to_jsonable(np.array([1.0, 2.0])) == [1.0, 2.0]
    assert to_jsonable(np.float64(0.25)) == 0.25
    assert to_jsonable(float("inf")) == "inf"
    assert to_jsonable(float("nan")) == "nan"
    assert to_jsonable(_Record(name="a", value=1.5)) == {"name": "a", "value": 1.5}
    assert to_jsonable(pl.DataFrame({"x": [1.0], "y": [2]})) == [{"x": 1.0, "y": 2}]
    assert to_jsonable({1: (np.int64(3), 4)}) == {"1": [3, 4]}


def test_json_export(tmp_path):
    payload = {"b": np.array([0.5]), "a": {"z": 1j}}
    path = JsonExporter().export(payload, tmp_path / "out.json")
    text = path.read_text()
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": {"z": [0.0, 1.0]}, "b": [0.5]}
