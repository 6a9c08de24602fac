import csv
import io
import json
from fractions import Fraction

from hgbs.report import emit_report, render


def test_empty_is_header_only():
    assert render([], ["order", "beta", "connectivity"]) == "order,beta,connectivity\n"


def test_csv_values():
    text = render([{"order": 1, "beta": 1.0, "connectivity": 0.125}], ["order", "beta", "connectivity"])
    assert text == "order,beta,connectivity\n1,1.0,0.125\n"


def test_cells():
    text = render([{"a": None, "b": True, "c": Fraction(1, 15)}], ["a", "b", "c"])
    assert text.splitlines()[1] == ",true,1/15"


def test_json_matches_csv_columns():
    rows = [{"order": i, "beta": 1.0, "connectivity": 2.0 ** (i - 3)} for i in (1, 2, 3)]
    cols = ["order", "beta", "connectivity"]
    header = next(csv.reader(io.StringIO(render(rows, cols))))
    doc = json.loads(render(rows, cols, "json", meta={"tool": "x"}))
    assert doc["columns"] == header
    assert all(list(r) == header for r in doc["rows"])
    assert doc["meta"] == {"tool": "x"}


def test_meta_comments():
    text = render([], ["a"], meta={"seed": 3})
    assert text == "# seed=3\na\n"


def test_plain_alignment():
    lines = render([{"a": 1, "bb": "xyz"}], ["a", "bb"], "plain").splitlines()
    assert lines == ["a  bb", "1  xyz"]


def test_emit_to_path(tmp_path):
    target = tmp_path / "out.csv"
    emit_report([{"a": 1}], ["a"], "csv", str(target))
    assert target.read_bytes() == b"a\n1\n"
