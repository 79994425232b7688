"""Provenance headers, CSV/JSON writers and the run summary.

Every table starts with a comment line naming the tool version, the
config hash, the seed, p and B, so a file can be traced to the run that
produced it.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from . import __version__
from .config import RunConfig
from .const import PROJECT

_LOGGER = logging.getLogger(__name__)

SUMMARY_FILE = "summary.json"


def provenance_header(config: RunConfig) -> str:
    return (
        f"# {PROJECT} {__version__} config={config.config_hash()} "
        f"seed={config.seed} p={config.p} B={config.calibration:g}"
    )


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, bool):
        return str(value).lower()
    return value


def write_csv(path: Path, columns: Sequence[str], rows: Iterable, config: RunConfig) -> Path:
    """Write rows (dicts keyed by column or plain tuples) under the provenance header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(provenance_header(config) + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            values = [row[c] for c in columns] if isinstance(row, dict) else list(row)
            writer.writerow([_cell(v) for v in values])
            count += 1
    _LOGGER.info("Wrote %d rows to %s", count, path)
    return path


def read_csv(path: Path) -> tuple[str, list[dict[str, str]]]:
    """The provenance header and the rows of a table written by :func:`write_csv`."""
    with Path(path).open(encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        return header, list(csv.DictReader(handle))


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def write_json(path: Path, data: dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_json_safe(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _LOGGER.info("Wrote %s", path)
    return path


def build_summary(
    config: RunConfig,
    command: str,
    rows: Sequence[dict[str, Any]],
    extra: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Config, provenance and per-column maxima of a finished run."""
    maxima: dict[str, float] = {}
    for row in rows:
        for key, value in row.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                continue
            maxima[key] = max(maxima.get(key, -math.inf), float(value))
    passed = all(row.get("passed", True) for row in rows)
    return {
        "tool": PROJECT,
        "version": __version__,
        "command": command,
        "config": config.as_dict(),
        "config_hash": config.config_hash(),
        "rows": len(rows),
        "maxima": maxima,
        "passed": passed,
        **(extra or {}),
    }
