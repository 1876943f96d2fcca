"""Dataset ingestion: the manifest of per-location files and the daily
value CSVs they point to.

Data files are strict: header ``date,value``, ISO-8601 dates, one row per
day with no gaps and no missing values. Anything else fails fast with the
offending file and line.
"""

from __future__ import annotations

import csv
import datetime
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DuplicateKey, GapError, ParseError
from .series import TimeSeries


@dataclass(frozen=True)
class ManifestEntry:
    location_id: str
    series_type: str
    path: Path


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    base_resolution: str = "1-day"

    @property
    def locations(self) -> list[str]:
        return sorted({e.location_id for e in self.entries})

    @property
    def series_types(self) -> list[str]:
        return sorted({e.series_type for e in self.entries})


def read_manifest(path) -> DatasetManifest:
    """Parse a manifest CSV with header ``location_id,series_type,path``.

    Relative data paths resolve against the manifest's directory. Repeating
    a (location_id, series_type) pair raises DuplicateKey.
    """
    path = Path(path)
    base = path.parent
    entries: list[ManifestEntry] = []
    seen: set[tuple[str, str]] = set()
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(path), 0, f"cannot open file: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["location_id", "series_type", "path"]:
            raise ParseError(str(path), 1, "expected header 'location_id,series_type,path'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(str(path), lineno, f"expected 3 fields, got {len(row)}")
            location_id, series_type, raw_path = (field.strip() for field in row)
            if not location_id or not series_type or not raw_path:
                raise ParseError(str(path), lineno, "empty field")
            key = (location_id, series_type)
            if key in seen:
                raise DuplicateKey(f"{path}:{lineno}: duplicate entry for {key}")
            seen.add(key)
            data_path = Path(raw_path)
            if not data_path.is_absolute():
                data_path = base / data_path
            entries.append(ManifestEntry(location_id, series_type, data_path))
    return DatasetManifest(entries=tuple(entries))


def read_series_csv(path) -> TimeSeries:
    """Read one daily series from a ``date,value`` CSV.

    Dates must be ISO-8601 and strictly consecutive; a skipped day raises
    GapError naming the first missing date, a malformed field raises
    ParseError with its physical line number.
    """
    path = Path(path)
    dates: list[datetime.date] = []
    values: list[float] = []
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(path), 0, f"cannot open file: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["date", "value"]:
            raise ParseError(str(path), 1, "expected header 'date,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise ParseError(str(path), lineno, f"expected 2 fields, got {len(row)}")
            try:
                date = datetime.date.fromisoformat(row[0].strip())
            except ValueError:
                raise ParseError(str(path), lineno, f"invalid date {row[0]!r}") from None
            try:
                value = float(row[1])
            except ValueError:
                raise ParseError(str(path), lineno, f"invalid value {row[1]!r}") from None
            if not np.isfinite(value):
                raise ParseError(str(path), lineno, f"non-finite value {row[1]!r}")
            if dates:
                expected = dates[-1] + datetime.timedelta(days=1)
                if date == dates[-1]:
                    raise ParseError(str(path), lineno, f"duplicate date {date.isoformat()}")
                if date != expected:
                    if date < dates[-1]:
                        raise ParseError(str(path), lineno, "dates out of order")
                    raise GapError(str(path), expected.isoformat())
            dates.append(date)
            values.append(value)
    if not values:
        raise ParseError(str(path), 1, "file holds no data rows")
    return TimeSeries(np.array(values), dates[0], "1-day")


def ingest(manifest: DatasetManifest) -> dict[tuple[str, str], TimeSeries]:
    """Load and validate every series referenced by the manifest."""
    return {
        (entry.location_id, entry.series_type): read_series_csv(entry.path)
        for entry in manifest.entries
    }
