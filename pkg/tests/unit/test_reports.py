import json
import math

import numpy as np
import pytest

from fiberacf.exceptions import DomainError
from fiberacf.reports import RunManifest, format_cell, package_version, stable_json, write_csv


class TestFormatCell:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (None, ""),
            (True, "true"),
            (3, "3"),
            (0.1, "0.10000000000000001"),
            (math.nan, "nan"),
            (math.inf, "inf"),
            (-math.inf, "-inf"),
            ("lemma1", "lemma1"),
            (np.float64(2.5), "2.5"),
            (np.int64(7), "7"),
        ],
    )
    def test_cells(self, value, expected):
        """Test each supported cell type."""
        assert format_cell(value) == expected

    def test_float_round_trips(self):
        """Test that 17 significant digits reproduce the double."""
        value = 1.0 / 3.0
        assert float(format_cell(value)) == value


class TestWriteCsv:
    def test_writes_file(self, tmp_path):
        """Test header, rows and the returned row count."""
        path = tmp_path / "nested" / "fig7.csv"
        count = write_csv(path, ("p_dbm", "regime"), [(0.5, "lemma1"), (None, "unsupported")])
        assert count == 2
        assert path.read_text() == "p_dbm,regime\n0.5,lemma1\n,unsupported\n"

    def test_identical_inputs_give_identical_files(self, tmp_path):
        """Test byte-identical output for the same rows."""
        rows = [(float(x), float(np.sin(x))) for x in np.linspace(0.0, 1.0, 11)]
        write_csv(tmp_path / "a.csv", ("x", "y"), rows)
        write_csv(tmp_path / "b.csv", ("x", "y"), rows)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_stdout(self, capsys):
        """Test that a None path writes to stdout."""
        write_csv(None, ("a",), [(1,)])
        assert capsys.readouterr().out == "a\n1\n"

    def test_rejects_ragged_rows(self, tmp_path):
        """Test that a row with the wrong width is rejected and nothing is written."""
        path = tmp_path / "bad.csv"
        with pytest.raises(DomainError, match="Row 1 has 1 cells, header has 2"):
            write_csv(path, ("a", "b"), [(1, 2), (3,)])
        assert not path.exists()


class TestRunManifest:
    def test_stable_json(self):
        """Test sorted keys without whitespace."""
        assert stable_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'

    def test_digest_ignores_wall_time(self):
        """Test that only the wall time may differ between equal digests."""
        command = ["fiberacf", "fig", "7"]
        a = RunManifest(command=command, config_digest="abc", seed=42, code_version="1.0", wall_time_s=1.0)
        b = RunManifest(command=command, config_digest="abc", seed=42, code_version="1.0", wall_time_s=9.0)
        c = RunManifest(command=command, config_digest="abc", seed=43, code_version="1.0")
        assert a.digest() == b.digest()
        assert a.digest() != c.digest()
        assert len(a.digest()) == 64

    def test_write(self, tmp_path):
        """Test the written manifest carries its digest and outputs."""
        manifest = RunManifest(command=["fiberacf"], config_digest="abc", seed=1, outputs=["fig1.csv"])
        manifest.write(tmp_path / "manifest.json")
        data = json.loads((tmp_path / "manifest.json").read_text())
        assert data["digest"] == manifest.digest()
        assert data["outputs"] == ["fig1.csv"]
        assert data["seed"] == 1

    def test_package_version(self):
        """Test that a version string is always available."""
        assert isinstance(package_version(), str)
        assert package_version()
