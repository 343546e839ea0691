"""Embedded experiment tables and CSV ingestion.

The six published tables are stored in source as printed. Cells holding
several observations (one per scout) are tuples. Each table is pinned by a
SHA-256 digest of its canonical JSON form; ``load_table`` refuses to return
a table whose content has drifted.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, fields
from types import MappingProxyType

from .simulation import TrialRecord

COLUMN_KINDS = ("integer", "seconds", "text", "real")
TRIAL_COLUMNS = (
    "trial_id",
    "stage",
    "goal",
    "code_length",
    "contact_duration_s",
    "decoded_goal",
    "success",
    "search_time_s",
)


@dataclass(frozen=True)
class Column:
    name: str
    kind: str


@dataclass(frozen=True)
class PaperTable:
    table_id: int
    caption: str
    columns: tuple
    rows: tuple
    provenance: str
    non_replicable: bool = False

    def __post_init__(self):
        for col in self.columns:
            if col.kind not in COLUMN_KINDS:
                raise ValueError(f"column {col.name!r} has unknown kind {col.kind!r}")
        for n, row in enumerate(self.rows, 1):
            if len(row) != len(self.columns):
                raise ValueError(
                    f"table {self.table_id} row {n} has {len(row)} cells, expected {len(self.columns)}"
                )

    @property
    def column_names(self) -> tuple:
        return tuple(c.name for c in self.columns)

    def column(self, name: str) -> list:
        idx = self._index(name)
        return [row[idx] for row in self.rows]

    def _index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise KeyError(f"table {self.table_id} has no column {name!r}") from None

    def canonical_json(self) -> str:
        payload = {
            "table_id": self.table_id,
            "caption": self.caption,
            "columns": [[c.name, c.kind] for c in self.columns],
            "rows": [[list(c) if isinstance(c, tuple) else c for c in row] for row in self.rows],
            "provenance": self.provenance,
            "non_replicable": self.non_replicable,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    def checksum(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Observation:
    x: float
    t: float
    label: str = ""


@dataclass(frozen=True)
class Dataset:
    records: tuple

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if not self.records:
            raise ValueError("dataset is empty")
        for rec in self.records:
            if rec.t < 0:
                raise ValueError(f"negative time {rec.t} in dataset")

    @property
    def xs(self) -> list:
        return [r.x for r in self.records]

    @property
    def ts(self) -> list:
        return [r.t for r in self.records]

    def __len__(self):
        return len(self.records)


class CsvFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# -- embedded tables ---------------------------------------------------------

_C = Column

_TABLES = {
    1: PaperTable(
        1,
        "Search duration of uninformed (U) F. pratensis ants and ants that "
        "previously contacted a successful scout (I)",
        (_C("sequence", "text"), _C("group", "text"), _C("mean_s", "seconds"),
         _C("sample_size", "integer"), _C("p", "text")),
        (
            ("RRRR", "U", 345.7, 9, "<0.01"),
            ("RRRR", "I", 36.3, 9, "<0.01"),
            ("LLLL", "U", 508.0, 9, "<0.01"),
            ("LLLL", "I", 37.3, 9, "<0.01"),
            ("LRRL", "U", 118.7, 7, "<0.01"),
            ("LRRL", "I", 16.6, 7, "<0.01"),
            ("RRRR", "U", 565.9, 7, "<0.01"),
            ("RRRR", "I", 16.3, 7, "<0.01"),
        ),
        "Table 1; only means and sample sizes were published, raw search times were not",
        non_replicable=True,
    ),
    2: PaperTable(
        2,
        "Duration of transmitting route information by F. sanguinea scouts to "
        "foragers (no. 1-8 regular turn patterns, no. 9-15 random turn patterns)",
        (_C("no", "integer"), _C("sequence", "text"), _C("mean_s", "seconds"),
         _C("experiments", "integer")),
        (
            (1, "LL", 72, 18),
            (2, "RRR", 75, 15),
            (3, "LLLL", 84, 9),
            (4, "RRRRR", 78, 10),
            (5, "LLLLLL", 90, 8),
            (6, "RRRRRR", 88, 5),
            (7, "LRLRLR", 130, 4),
            (8, "RLRLRL", 135, 8),
            (9, "LLR", 69, 12),
            (10, "LRLL", 100, 10),
            (11, "RLLR", 120, 6),
            (12, "RRLRL", 150, 8),
            (13, "RLRRRL", 180, 6),
            (14, "RRLRRR", 220, 7),
            (15, "LRLLRL", 200, 5),
        ),
        "Table 2, binary-tree maze, F. sanguinea",
    ),
    3: PaperTable(
        3,
        "Results of experiments in the 'vertical trunk 1' with F. polyctena",
        (_C("no", "integer"), _C("branch", "integer"), _C("seconds", "seconds"),
         _C("scout", "text")),
        (
            (1, 10, 42, "I"),
            (2, 10, 40, "II"),
            (3, 10, 45, "III"),
            (4, 40, 300, "II"),
            (5, 40, 280, "IX"),
            (6, 13, 90, "II"),
            (7, 13, 98, "I"),
            (8, 28, 110, "III"),
            (9, 28, 120, "X"),
            (10, 20, 120, "X"),
            (11, 20, 110, "III"),
            (12, 35, 260, "III"),
            (13, 35, 250, "X"),
            (14, 30, 160, "I"),
            (15, 30, 170, "III"),
        ),
        "Table 3, comb maze 'vertical trunk 1', F. polyctena",
    ),
    4: PaperTable(
        4,
        "Correlation coefficient (r) and regression coefficients (a, b) for "
        "vertical trunk, horizontal trunk and circle set-ups, F. polyctena",
        (_C("setup", "text"), _C("sample_size", "integer"), _C("branches", "integer"),
         _C("r", "real"), _C("a", "real"), _C("b", "real")),
        (
            ("Vert.1", 15, 40, 0.93, 7.3, -28.9),
            ("Vert.2", 16, 60, 0.99, 5.88, -17.11),
            ("Horiz.1", 30, 25, 0.91, 8.54, -22.2),
            ("Horiz.2", 21, 25, 0.88, 4.92, -18.94),
            ("Circle", 38, 25, 0.98, 8.62, -24.4),
        ),
        "Table 4, fits of t = a*i + b across comb set-ups",
    ),
    5: PaperTable(
        5,
        "Transmission time against distance from the food branch to the nearest "
        "special branch (special branches 10 and 20)",
        (_C("branch", "integer"), _C("distance", "integer"), _C("seconds", "seconds")),
        (
            (26, 6, (35, 30)),
            (30, 10, (70, 65)),
            (27, 7, (65, 72)),
            (24, 4, (58, 60, 62)),
            (8, 2, (22, 20, 25)),
            (16, 4, (25, 8, 25)),
            (16, 4, (25,)),
            (22, 2, (15, 18)),
            (18, 2, (20, 25, 18, 20)),
            (15, 5, (30, 28, 35, 30)),
            (20, 0, (10, 12, 10)),
            (6, 4, (25, 28)),
            (16, 4, (30, 25)),
            (15, 5, (20, 25, 20)),
            (14, 4, (25, 28, 30, 26)),
            (17, 3, (17, 15)),
            (11, 1, (10, 12)),
        ),
        "Table 5, third stage of the frequency experiment, one year's data; "
        "one time per scout",
    ),
    6: PaperTable(
        6,
        "Correlation coefficient (r) in experiments with different special branches",
        (_C("sample_size", "integer"), _C("special_branches", "integer"),
         _C("r_first_stage", "real"), _C("r_third_stage", "real")),
        (
            (150, (10, 20), 0.95, 0.80),
            (92, (10, 19), 0.96, 0.91),
            (99, (15,), 0.99, 0.82),
        ),
        "Table 6, first- vs third-stage correlations of time with branch number",
    ),
}

TABLE_CHECKSUMS = MappingProxyType({
    1: "08a14608288eac09d009dd6d19d0beedf7864553ceede78936279ae2bbdc27e0",
    2: "94dc87b1337daea20fca873b697a74c061cfa6fd44220658129d0154ecdb20af",
    3: "4e10c3c0ced310c3f749f514aba08aa9f40e012b091408bc2e0a0e603f28375c",
    4: "b392076b1078c29992e5c9977e25c8d252c7242b85903cddfc66923821f2c131",
    5: "0377dc5fe5e77b5d3929e74b5707d9e539ec31c72ecf310864b518b6d10128bf",
    6: "0bc4b4beac3a290c2458de90773c44ccbae5e165eaa56a6e63153ad051029efa",
})


def table_ids() -> list:
    return sorted(_TABLES)


def load_table(table_id: int) -> PaperTable:
    if table_id not in _TABLES:
        raise KeyError(f"unknown table id {table_id!r}; expected one of {table_ids()}")
    table = _TABLES[table_id]
    digest = table.checksum()
    if digest != TABLE_CHECKSUMS[table_id]:
        raise RuntimeError(f"table {table_id} content does not match its pinned checksum")
    return table


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"non-numeric cell {value!r} in {where}")
    return float(value)


def table_to_dataset(table: PaperTable, mapping: dict, rows=None) -> Dataset:
    """Flatten ``table`` into (x, t, label) observations.

    ``mapping`` names the source column for roles ``x``, ``t`` and
    optionally ``label``. Multi-observation cells become one record each.
    ``rows`` selects 0-based row indices; default is every row.
    """
    unknown = set(mapping) - {"x", "t", "label"}
    if unknown or not {"x", "t"} <= set(mapping):
        raise ValueError(f"mapping needs roles x and t (and optionally label), got {sorted(mapping)}")
    xi = table._index(mapping["x"])
    ti = table._index(mapping["t"])
    li = table._index(mapping["label"]) if "label" in mapping else None
    selected = list(range(len(table.rows))) if rows is None else list(rows)
    if not selected:
        raise ValueError("empty row selection")

    records = []
    for idx in selected:
        row = table.rows[idx]
        where = f"table {table.table_id} row {idx + 1}"
        x = _number(row[xi], where)
        label = str(row[li]) if li is not None else ""
        cell = row[ti]
        for t in cell if isinstance(cell, tuple) else (cell,):
            records.append(Observation(x, _number(t, where), label))
    return Dataset(records)


def export_table_csv(table: PaperTable, stream):
    """Write ``table`` as CSV; multi-value cells are comma-joined (and quoted)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(table.column_names)
    for row in table.rows:
        writer.writerow(",".join(map(str, c)) if isinstance(c, tuple) else c for c in row)


# -- trial CSV ---------------------------------------------------------------


def _format_float(x: float) -> str:
    return repr(float(x))


def emit_csv(records, target):
    """Write trial records to a path or text stream using the fixed column order."""
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            return emit_csv(records, fh)
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(TRIAL_COLUMNS)
    for r in records:
        writer.writerow([
            r.trial_id,
            r.stage,
            r.goal,
            _format_float(r.code_length),
            _format_float(r.contact_duration),
            r.decoded_goal,
            "true" if r.success else "false",
            _format_float(r.search_time),
        ])


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            return fh.read()
    text = source.read()
    return text.decode("utf-8") if isinstance(text, bytes) else text


def _parse_int(value: str, column: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise CsvFormatError(f"column {column!r}: expected integer, got {value!r}", line) from None


def _parse_float(value: str, column: str, line: int) -> float:
    try:
        x = float(value)
    except ValueError:
        raise CsvFormatError(f"column {column!r}: expected number, got {value!r}", line) from None
    if not math.isfinite(x):
        raise CsvFormatError(f"column {column!r}: non-finite value {value!r}", line)
    return x


def _parse_bool(value: str, column: str, line: int) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "1"):
        return True
    if lowered in ("false", "0"):
        return False
    raise CsvFormatError(f"column {column!r}: expected true/false, got {value!r}", line)


def _rows(text: str):
    """Yield (line_number, row) pairs; line numbers are 1-based, header is line 1."""
    reader = csv.reader(io.StringIO(text, newline=""))
    for row in reader:
        yield reader.line_num, row


def ingest_csv(source) -> list:
    """Parse a trials CSV (path or text stream) into TrialRecords, strictly."""
    rows = _rows(_open_text(source))
    try:
        _, header = next(rows)
    except StopIteration:
        raise CsvFormatError("missing header row", 1) from None
    header = [h.strip() for h in header]
    missing = [c for c in TRIAL_COLUMNS if c not in header]
    if missing:
        raise CsvFormatError(f"missing columns {missing}", 1)
    pos = {c: header.index(c) for c in TRIAL_COLUMNS}

    records = []
    seen = set()
    for line, row in rows:
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise CsvFormatError(f"expected {len(header)} fields, got {len(row)}", line)
        cell = {c: row[i].strip() for c, i in pos.items()}
        rec = TrialRecord(
            trial_id=_parse_int(cell["trial_id"], "trial_id", line),
            stage=_parse_int(cell["stage"], "stage", line),
            goal=_parse_int(cell["goal"], "goal", line),
            code_length=_parse_float(cell["code_length"], "code_length", line),
            contact_duration=_parse_float(cell["contact_duration_s"], "contact_duration_s", line),
            decoded_goal=_parse_int(cell["decoded_goal"], "decoded_goal", line),
            success=_parse_bool(cell["success"], "success", line),
            search_time=_parse_float(cell["search_time_s"], "search_time_s", line),
        )
        if rec.trial_id in seen:
            raise CsvFormatError(f"duplicate trial_id {rec.trial_id}", line)
        seen.add(rec.trial_id)
        records.append(rec)
    return records


_RECORD_FIELDS = {
    "contact_duration_s": "contact_duration",
    "search_time_s": "search_time",
}


def trials_to_dataset(records, x_col: str, t_col: str) -> Dataset:
    """Pick two trial columns (CSV names or attribute names) as a Dataset."""
    names = {f.name for f in fields(TrialRecord)}

    def attr(col):
        name = _RECORD_FIELDS.get(col, col)
        if name not in names:
            raise KeyError(f"unknown trial column {col!r}")
        return name

    xa, ta = attr(x_col), attr(t_col)
    return Dataset(
        Observation(float(getattr(r, xa)), float(getattr(r, ta)), f"stage{r.stage}")
        for r in records
    )


def read_xy_csv(source, x_col: str, t_col: str, label_col: str | None = None) -> Dataset:
    """Read two numeric columns from any headed CSV."""
    rows = _rows(_open_text(source))
    try:
        _, header = next(rows)
    except StopIteration:
        raise CsvFormatError("missing header row", 1) from None
    header = [h.strip() for h in header]
    for col in (x_col, t_col) + ((label_col,) if label_col else ()):
        if col not in header:
            raise CsvFormatError(f"missing column {col!r}", 1)
    xi, ti = header.index(x_col), header.index(t_col)
    li = header.index(label_col) if label_col else None
    records = []
    for line, row in rows:
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise CsvFormatError(f"expected {len(header)} fields, got {len(row)}", line)
        x = _parse_float(row[xi].strip(), x_col, line)
        t = _parse_float(row[ti].strip(), t_col, line)
        if t < 0:
            raise CsvFormatError(f"column {t_col!r}: negative time {t}", line)
        records.append(Observation(x, t, row[li] if li is not None else ""))
    if not records:
        raise CsvFormatError("no data rows")
    return Dataset(records)
