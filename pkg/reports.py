"""
Report storage for bessel-rkbs
Writes verdicts and verification results as JSON, observations and fields as CSV
"""
import csv
import json
import logging
from fractions import Fraction
from pathlib import Path

import numpy as np

from admissibility import format_rational
from spectral import Field, GridSpec
from utils import ConfigurationError

CSV_HEADER = "# bessel-rkbs csv v1"
FIELD_HEADER = "# bessel-rkbs field v1"


def _jsonable(value):
    """json.dump fallback for numpy scalars, arrays and Fractions"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Fraction):
        return format_rational(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dumps(data, pretty=False):
    """Deterministic JSON text: sorted keys, no timestamps"""
    return json.dumps(data, sort_keys=True, indent=2 if pretty else None,
                      ensure_ascii=False, default=_jsonable)


class ReportStore:
    """Persists reports under one output directory, one file per report name"""

    def __init__(self, output_dir="reports", logger=None):
        """
        Initialize the report store

        Args:
            output_dir (str): Directory for report files
            logger: Optional logger instance for error reporting
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.logger = logger or logging.getLogger(__name__)

    def _get_report_file(self, name, suffix=".json"):
        """Get the file path for a report name"""
        # Sanitize name for filesystem
        safe_name = "".join(c for c in name.lower() if c.isalnum() or c in "._-")
        if not safe_name:
            raise ValueError(f"report name {name!r} has no usable characters")
        return self.output_dir / f"{safe_name}{suffix}"

    def save_report(self, name, data):
        """
        Save a report as indented JSON

        Args:
            name (str): Report name, e.g. the suite or command
            data (dict): JSON-compatible report

        Returns:
            Path: The written file
        """
        file_path = self._get_report_file(name)
        try:
            with open(file_path, "w", encoding="utf-8") as f:
                f.write(dumps(data, pretty=True) + "\n")
        except OSError as e:
            self.logger.error(f"Error saving report {name}: {e}")
            raise
        return file_path

    def load_report(self, name):
        """
        Load a saved report

        Returns:
            dict: The report, or None when missing or unreadable
        """
        file_path = self._get_report_file(name)
        if not file_path.exists():
            return None
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            self.logger.error(f"Error loading report {name}: {e}")
            return None

    def save_observations(self, name, columns, rows):
        """
        Save observation rows as CSV behind the versioned header

        Args:
            name (str): Report name
            columns (list): Column names
            rows (list): One list of values per row

        Returns:
            Path: The written file
        """
        file_path = self._get_report_file(name, ".csv")
        with open(file_path, "w", encoding="utf-8", newline="") as f:
            write_observations(f, columns, rows)
        return file_path


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, Fraction):
        return format_rational(value)
    return value


def write_observations(stream, columns, rows):
    """Write the CSV header, the column line and the rows to an open text stream"""
    stream.write(CSV_HEADER + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(value) for value in row])


def write_field_csv(stream, field):
    """
    Write a field: version header, grid header, then one value per line in row-major order

    Args:
        stream: Open text stream
        field (Field): The samples
    """
    grid = field.grid
    stream.write(FIELD_HEADER + "\n")
    stream.write(f"# d={grid.d} n={grid.n} L={grid.L!r} ordering=row-major\n")
    for value in field.flat:
        stream.write(repr(float(value)) + "\n")


def read_field_csv(stream, budget=None):
    """
    Read a field written by write_field_csv

    Returns:
        Field: The samples on the recorded grid

    Raises:
        ConfigurationError: Missing or malformed headers, or a wrong sample count
    """
    lines = [line.strip() for line in stream if line.strip()]
    if len(lines) < 2 or lines[0] != FIELD_HEADER:
        raise ConfigurationError("not a bessel-rkbs field file")
    settings = {}
    for token in lines[1].lstrip("#").split():
        key, _, value = token.partition("=")
        settings[key] = value
    try:
        extra = {"budget": budget} if budget else {}
        grid = GridSpec(int(settings["d"]), int(settings["n"]), float(settings["L"]), **extra)
    except (KeyError, ValueError) as e:
        raise ConfigurationError(f"malformed field header {lines[1]!r}: {e}") from e
    if settings.get("ordering", "row-major") != "row-major":
        raise ConfigurationError(f"unsupported ordering {settings['ordering']!r}")

    values = np.array([float(line) for line in lines[2:]])
    if values.size != grid.n ** grid.d:
        raise ConfigurationError(f"expected {grid.n ** grid.d} samples, found {values.size}")
    return Field(grid, values)
