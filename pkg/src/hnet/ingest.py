"""Tabular ingest: CSV parsing, type assignment and one-hot encoding.

The pipeline keeps every cell as a string until types are assigned, so
nothing is lost between parsing and typing.  Discrete features explode into
one boolean category column per observed label; numeric features stay as
float vectors and are compared by rank later on.
"""

import csv
import io
import os
import re
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    EmptyInput,
    MalformedCsv,
    NoUsableColumns,
    UnknownTypeOverride,
)

DEFAULT_NA_TOKENS = ("", "NA", "NaN", "None")


class Kind(Enum):
    DISCRETE = "discrete"
    NUMERIC = "numeric"
    EXCLUDED = "excluded"


@dataclass
class IngestConfig:
    """Knobs for parsing and typing.

    type_overrides maps column name -> Kind (or its string value) and wins
    over inference.  unique_fraction is the share of distinct values among
    present values above which an all-integer column is treated as a
    measurement rather than a code.
    """

    delimiter: str = ","
    na_tokens: tuple = DEFAULT_NA_TOKENS
    unique_fraction: float = 0.2
    type_overrides: dict = field(default_factory=dict)


@dataclass
class Column:
    name: str
    kind: Kind
    values: list  # str | None until typed; float | None once numeric


@dataclass
class FeatureTable:
    columns: list
    n_rows: int

    def column(self, name):
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def names(self):
        return [c.name for c in self.columns]


# A float-formatted integer: optional sign, digits, then only zeros after
# the point.  "1.0" and "1" should name the same category.
_TRAILING_POINT_ZEROS = re.compile(r"^([+-]?\d+)\.0+$")


def canonical_label(value):
    """Collapse float-formatted integers onto their integer spelling."""
    m = _TRAILING_POINT_ZEROS.match(value)
    return m.group(1) if m else value


def _as_text(data):
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise MalformedCsv(f"input is not valid UTF-8: {exc}") from None
    if isinstance(data, str):
        return data
    if isinstance(data, os.PathLike):
        with open(data, "rb") as fh:
            return _as_text(fh.read())
    if hasattr(data, "read"):
        return _as_text(data.read())
    raise TypeError(f"cannot read CSV from {type(data)!r}")


def parse_csv(data, config=None):
    """Parse an RFC-4180 byte/character stream into an untyped FeatureTable.

    The first record is the header.  Cells equal to one of the configured
    missing tokens become None; everything else is kept verbatim as a
    string, pending type assignment.
    """
    config = config or IngestConfig()
    text = _as_text(data)
    reader = csv.reader(io.StringIO(text, newline=""),
                        delimiter=config.delimiter)
    records = [row for row in reader if row]
    if not records:
        raise EmptyInput("no header and no rows")
    header = records[0]
    if any(name.strip() == "" for name in header):
        raise MalformedCsv("header has an empty column name")
    if len(set(header)) != len(header):
        raise MalformedCsv("header has duplicate column names")
    body = records[1:]
    width = len(header)
    for rownum, row in enumerate(body, start=2):
        if len(row) != width:
            raise MalformedCsv(
                f"row {rownum} has {len(row)} fields, expected {width}")
    na = set(config.na_tokens)
    columns = []
    for j, name in enumerate(header):
        vals = [None if row[j] in na else row[j] for row in body]
        columns.append(Column(name=name, kind=Kind.DISCRETE, values=vals))
    return FeatureTable(columns=columns, n_rows=len(body))


def _try_floats(values):
    """Parse every present cell as a finite float, or return None."""
    out = []
    for v in values:
        if v is None:
            out.append(None)
            continue
        try:
            f = float(v)
        except ValueError:
            return None
        if not np.isfinite(f):
            return None
        out.append(f)
    return out


def _infer_kind(values, unique_fraction):
    present = [v for v in values if v is not None]
    if not present:
        return Kind.DISCRETE
    floats = _try_floats(present)
    if floats is None:
        return Kind.DISCRETE
    if any(not float(f).is_integer() for f in floats):
        return Kind.NUMERIC
    uniq = len(set(floats))
    # An all-integer column is a measurement only when values spread out;
    # a column where every row is distinct is an identifier, not a scale.
    if uniq >= unique_fraction * len(present) and uniq < len(present):
        return Kind.NUMERIC
    return Kind.DISCRETE


def assign_types(table, config=None):
    """Return a new FeatureTable with every column typed and converted.

    Overrides win over inference; unknown override names raise
    UnknownTypeOverride.  Numeric columns hold float | None, discrete
    columns hold canonical label strings | None.
    """
    config = config or IngestConfig()
    overrides = {}
    for name, kind in config.type_overrides.items():
        if name not in table.names:
            raise UnknownTypeOverride(f"no such column: {name!r}")
        overrides[name] = Kind(kind) if not isinstance(kind, Kind) else kind
    typed = []
    for col in table.columns:
        kind = overrides.get(col.name)
        if kind is None:
            kind = _infer_kind(col.values, config.unique_fraction)
        if kind is Kind.NUMERIC:
            vals = []
            for v in col.values:
                if v is None:
                    vals.append(None)
                    continue
                try:
                    f = float(v)
                except ValueError:
                    f = None
                vals.append(f if f is not None and np.isfinite(f) else None)
        elif kind is Kind.DISCRETE:
            vals = [None if v is None else canonical_label(str(v))
                    for v in col.values]
        else:
            vals = list(col.values)
        typed.append(Column(name=col.name, kind=kind, values=vals))
    return FeatureTable(columns=typed, n_rows=table.n_rows)


@dataclass
class CategoryColumn:
    """One boolean category: rows where the parent feature(s) take the
    associated label(s).

    present marks rows where every parent feature was observed, so pair
    statistics can be computed on pairwise-complete rows.
    """

    parent_features: tuple
    labels: tuple
    bits: np.ndarray
    present: np.ndarray
    positives: int

    @property
    def name(self):
        return "&".join(f"{f}={l}"
                        for f, l in zip(self.parent_features, self.labels))


@dataclass
class OneHotMatrix:
    columns: list
    n_rows: int
    n_raw_categories: int

    @property
    def names(self):
        return [c.name for c in self.columns]


def one_hot_encode(table, y_min=10):
    """Explode discrete columns into CategoryColumns, dropping categories
    observed fewer than y_min times.

    Column order is feature order as parsed, labels sorted
    lexicographically within each feature.  Raises NoUsableColumns when
    nothing survives.
    """
    kept = []
    raw = 0
    for col in table.columns:
        if col.kind is not Kind.DISCRETE:
            continue
        present = np.array([v is not None for v in col.values], dtype=bool)
        labels = sorted(set(v for v in col.values if v is not None))
        raw += len(labels)
        for label in labels:
            bits = np.array([v == label for v in col.values], dtype=bool)
            positives = int(bits.sum())
            if positives < y_min:
                continue
            kept.append(CategoryColumn(
                parent_features=(col.name,),
                labels=(label,),
                bits=bits,
                present=present,
                positives=positives,
            ))
    if not kept:
        raise NoUsableColumns(
            f"no category reaches the minimum support y_min={y_min}")
    return OneHotMatrix(columns=kept, n_rows=table.n_rows,
                        n_raw_categories=raw)
