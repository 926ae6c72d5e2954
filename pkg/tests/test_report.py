from fractions import Fraction

import numpy as np

from cliffdual import report


def test_jsonable_and_dumps():
    obj = {(1, 2): np.int64(3), "f": Fraction(1, 2), "g": Fraction(4, 2), "a": np.arange(3),
           "b": np.bool_(True), "c": 1 + 2j}
    assert report.jsonable(obj) == {"1,2": 3, "f": "1/2", "g": 2, "a": [0, 1, 2], "b": True, "c": [1.0, 2.0]}
    assert report.dumps({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'


def test_table_and_flatten():
    rows = report.flatten({"x": {"y": 1, "z": [1, 2]}, "w": 0.5})
    assert rows == [{"key": "w", "value": 0.5}, {"key": "x.y", "value": 1}, {"key": "x.z", "value": [1, 2]}]
    text = report.format_table(rows, ["key", "value"])
    lines = text.splitlines()
    assert lines[0].startswith("key") and set(lines[1]) <= {"-", " "} and len(lines) == 5


def test_figures_and_csv(tmp_path):
    paths = [
        report.plot_components({"a": {"dim": 3}, "b": {"dim": 0}}, tmp_path / "c.png"),
        report.plot_spectrum(np.linspace(0.8, 1.2, 50), tmp_path / "s.png", eps=0.3),
        report.plot_matrix(np.eye(4), tmp_path / "m.png"),
        report.plot_counts({"Gr_1": 5}, tmp_path / "k.png"),
        report.write_csv([{"a": 1, "b": Fraction(1, 3)}], ["a", "b"], tmp_path / "r.csv"),
    ]
    for p in paths:
        assert p.exists() and p.stat().st_size > 0
    assert (tmp_path / "r.csv").read_text().splitlines() == ["a,b", "1,1/3"]
    # identical input gives identical PNG bytes
    report.plot_matrix(np.eye(4), tmp_path / "m2.png")
    assert (tmp_path / "m.png").read_bytes() == (tmp_path / "m2.png").read_bytes()
