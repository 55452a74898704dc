"""CSV output and the run manifest.

Numbers are written with 17 significant digits so that a CSV round-trips the
doubles it was produced from; identical inputs give byte-identical files.
"""

import csv
import hashlib
import io
import json
import math
import sys
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from ._logger import create_logger
from .exceptions import DomainError

_logger = create_logger()

Cell = float | int | str | None


def format_cell(value: Cell) -> str:
    """Format one CSV cell: floats as '%.17g', ``nan``/``inf``/``-inf`` spelled out, None empty."""
    if value is None:
        return ""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.17g" % value
    return str(value)


def _write_rows(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        if len(row) != len(header):
            raise DomainError(f"Row {count} has {len(row)} cells, header has {len(header)}", name="row", value=count)
        writer.writerow([format_cell(v) for v in row])
        count += 1
    return count


def write_csv(path: str | Path | None, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> int:
    """Write a header and rows as CSV to ``path``, or to stdout when ``path`` is None.

    Returns:
        The number of data rows written.
    """
    if path is None:
        return _write_rows(sys.stdout, header, rows)
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    buffer = io.StringIO()
    count = _write_rows(buffer, header, rows)
    target.write_text(buffer.getvalue(), encoding="utf-8")
    _logger.info("Wrote %d rows to %s", count, target)
    return count


def stable_json(payload: Any) -> str:
    """Compact JSON with sorted keys."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def package_version() -> str:
    """Installed fiberacf version, or ``0.0.0`` when running from a source tree."""
    try:
        return version("fiberacf")
    except PackageNotFoundError:
        return "0.0.0"


@dataclass
class RunManifest:
    """What produced a set of output files.

    ``digest()`` covers everything except the wall time, so two runs with the
    same inputs have the same digest.
    """

    command: list[str]
    config_digest: str
    seed: int
    code_version: str = field(default_factory=package_version)
    outputs: list[str] = field(default_factory=list)
    wall_time_s: float = 0.0

    def as_dict(self) -> dict[str, Any]:
        """Plain-data form."""
        return asdict(self)

    def digest(self) -> str:
        """SHA-256 of the manifest without its wall time."""
        payload = self.as_dict()
        payload.pop("wall_time_s")
        return hashlib.sha256(stable_json(payload).encode("utf-8")).hexdigest()

    def write(self, path: str | Path) -> None:
        """Write the manifest, with its digest, as indented JSON."""
        payload = self.as_dict()
        payload["digest"] = self.digest()
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        _logger.info("Wrote manifest %s", target)
