"""
Tests for ReportStore and the CSV writers
"""
import io
import json
from fractions import Fraction

import numpy as np
import pytest

from reports import (CSV_HEADER, FIELD_HEADER, ReportStore, dumps, read_field_csv,
                     write_field_csv, write_observations)
from spectral import Field, GridSpec
from utils import ConfigurationError


class TestReportStore:
    """Test ReportStore functionality"""

    def test_init_creates_output_directory(self, temp_dir):
        """Test that the output directory is created on init"""
        output_dir = temp_dir / "reports"
        ReportStore(output_dir=str(output_dir))
        assert output_dir.exists()

    def test_report_file_sanitizes_name(self, temp_dir):
        """Test that report names are sanitized for the filesystem"""
        store = ReportStore(output_dir=str(temp_dir))
        file_path = store._get_report_file("Blowup Dilation/../x")
        assert "/" not in file_path.name
        assert " " not in file_path.name
        assert file_path.parent == temp_dir

    def test_report_file_rejects_empty_name(self, temp_dir):
        """Test that a name without usable characters is refused"""
        store = ReportStore(output_dir=str(temp_dir))
        with pytest.raises(ValueError):
            store._get_report_file("@#$")

    def test_save_and_load_report(self, temp_dir):
        """Test a saved report loads back unchanged"""
        store = ReportStore(output_dir=str(temp_dir))
        data = {"suite": "young", "passed": True, "ratio": 0.5, "s": Fraction(5, 4)}
        path = store.save_report("young", data)

        assert path == temp_dir / "young.json"
        loaded = store.load_report("young")
        assert loaded == {"suite": "young", "passed": True, "ratio": 0.5, "s": "5/4"}

    def test_saved_report_is_indented_and_sorted(self, temp_dir):
        """Test the on-disk layout is deterministic"""
        store = ReportStore(output_dir=str(temp_dir))
        store.save_report("norming", {"b": 1, "a": 2})
        text = (temp_dir / "norming.json").read_text(encoding="utf-8")
        assert text == '{\n  "a": 2,\n  "b": 1\n}\n'

    def test_load_missing_report(self, temp_dir):
        """Test that a missing report loads as None"""
        assert ReportStore(output_dir=str(temp_dir)).load_report("absent") is None

    def test_load_corrupt_report(self, temp_dir, mocker):
        """Test that a corrupt report loads as None and logs the error"""
        logger = mocker.Mock()
        store = ReportStore(output_dir=str(temp_dir), logger=logger)
        (temp_dir / "broken.json").write_text("{ nope")

        assert store.load_report("broken") is None
        logger.error.assert_called_once()


class TestSerialization:
    """Test the JSON and CSV writers"""

    def test_dumps_handles_numpy(self):
        """Test numpy scalars and arrays serialize as plain JSON"""
        text = dumps({"x": np.float64(0.25), "n": np.int64(3), "v": np.arange(2.0)})
        assert json.loads(text) == {"n": 3, "v": [0.0, 1.0], "x": 0.25}

    def test_dumps_rejects_unknown_types(self):
        """Test unsupported objects raise TypeError"""
        with pytest.raises(TypeError):
            dumps({"x": object()})

    def test_observations_layout(self):
        """Test header, column line and exact float text"""
        stream = io.StringIO()
        write_observations(stream, ["R", "norm"], [[2.0, 0.1], [Fraction(1, 3), np.float64(1e-17)]])
        lines = stream.getvalue().splitlines()
        assert lines == [CSV_HEADER, "R,norm", "2.0,0.1", "1/3,1e-17"]

    def test_field_round_trip_is_exact(self):
        """Test a field written and read back is bit-identical"""
        grid = GridSpec(2, 16, 3.0)
        values = np.random.default_rng(5).standard_normal(grid.shape) / 3.0
        stream = io.StringIO()
        write_field_csv(stream, Field(grid, values))

        stream.seek(0)
        restored = read_field_csv(stream)
        assert restored.grid == grid
        assert np.array_equal(restored.values, values)

    def test_field_header(self):
        """Test the grid line records d, n, L and the ordering"""
        stream = io.StringIO()
        write_field_csv(stream, Field(GridSpec(1, 16, 2.5), np.zeros(16)))
        lines = stream.getvalue().splitlines()
        assert lines[0] == FIELD_HEADER
        assert lines[1] == "# d=1 n=16 L=2.5 ordering=row-major"
        assert len(lines) == 18

    @pytest.mark.parametrize("text,description", [
        ("", "empty file"),
        ("# other v1\n# d=1 n=16 L=1.0\n", "wrong version header"),
        (FIELD_HEADER + "\n# d=1 L=1.0\n", "missing n"),
        (FIELD_HEADER + "\n# d=1 n=16 L=1.0 ordering=column-major\n" + "0.0\n" * 16, "column-major"),
        (FIELD_HEADER + "\n# d=1 n=16 L=1.0 ordering=row-major\n" + "0.0\n" * 15, "short by one"),
        (FIELD_HEADER + "\n# d=1 n=10 L=1.0 ordering=row-major\n" + "0.0\n" * 10, "invalid grid"),
    ])
    def test_read_field_rejects(self, text, description):
        """Parameterized test for malformed field files"""
        with pytest.raises(ConfigurationError):
            read_field_csv(io.StringIO(text))
