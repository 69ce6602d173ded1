"""CSV ingestion, categorical encoding and reproducible train/test splits."""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from attrition.errors import DatasetError
from attrition.rng import make_rng

KINDS = ("numeric", "ordinal", "nominal", "label")
LABEL_VALUES = {"No": 0, "Yes": 1}
POLICIES = ("integer", "onehot")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str
    levels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DatasetError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.kind in ("ordinal", "nominal"):
            if not self.levels:
                raise DatasetError(f"column {self.name!r}: {self.kind} column needs a level list")
            if len(set(self.levels)) != len(self.levels):
                raise DatasetError(f"column {self.name!r}: duplicate levels")


@dataclass(frozen=True)
class Schema:
    columns: tuple[ColumnSpec, ...]
    drop: tuple[str, ...] = ()

    def __post_init__(self):
        labels = [c.name for c in self.columns if c.kind == "label"]
        if len(labels) != 1:
            raise DatasetError(f"schema must have exactly one label column, found {len(labels)}")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DatasetError("schema lists a column twice")

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def label(self) -> str:
        return next(c.name for c in self.columns if c.kind == "label")


def parse_schema(text: str) -> Schema:
    """Parse the INI-style schema format (see ``resources/ibm_hr.schema``)."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise DatasetError(f"malformed schema: {exc}") from exc
    if not parser.has_section("columns"):
        raise DatasetError("schema has no [columns] section")
    columns = []
    for name, value in parser.items("columns"):
        kind, _, rest = value.partition(":")
        levels = tuple(v.strip() for v in rest.split(",") if v.strip()) if rest else ()
        columns.append(ColumnSpec(name, kind.strip(), levels))
    drop: tuple[str, ...] = ()
    if parser.has_option("drop", "columns"):
        drop = tuple(v.strip() for v in parser.get("drop", "columns").split(",") if v.strip())
    return Schema(tuple(columns), drop)


def load_schema(path: str | Path | None = None) -> Schema:
    """Load a schema file; ``None`` selects the bundled IBM HR schema."""
    if path is None:
        text = resources.files("attrition").joinpath("resources/ibm_hr.schema").read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DatasetError(f"cannot read schema {path}: {exc}") from exc
    return parse_schema(text)


@dataclass(frozen=True)
class RawTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.columns)

    def column(self, name: str) -> list[str]:
        j = self.columns.index(name)
        return [row[j] for row in self.rows]


def load_csv(path: str | Path, schema: Schema | Sequence[ColumnSpec]) -> RawTable:
    """Read a headed CSV and check it against the schema column names.

    Ragged rows are reported by their 1-based data row number (the header
    is not counted).
    """
    specs = schema.columns if isinstance(schema, Schema) else tuple(schema)
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"missing file: {path}")
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DatasetError(f"empty file: {path}")
        header = [h.strip() for h in header]
        expected = {c.name for c in specs}
        if set(header) != expected or len(header) != len(expected):
            missing = sorted(expected - set(header))
            extra = sorted(set(header) - expected)
            raise DatasetError(f"header does not match schema (missing {missing}, unexpected {extra})")
        rows = []
        for number, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"ragged row {number}: {len(row)} cells, expected {len(header)}"
                )
            rows.append(tuple(cell.strip() for cell in row))
    if not rows:
        raise DatasetError(f"empty file: {path} has a header but no rows")
    return RawTable(tuple(header), tuple(rows))


@dataclass(frozen=True)
class Dataset:
    """Encoded feature matrix with binary labels (1 = attrition).

    ``categories`` maps an encoded ordinal/nominal feature to its level names
    so that figure exports can label axes; ``kinds`` records the schema kind
    each feature came from.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    label_name: str = "Attrition"
    kinds: tuple[str, ...] = ()
    categories: dict = field(default_factory=dict)
    drop: tuple[str, ...] = ()
    policy: str = "integer"

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64)
        y = np.array(self.labels, dtype=np.int64)
        if X.ndim != 2:
            raise DatasetError("features must be a 2-D matrix")
        n, d = X.shape
        if n < 2 or d < 1:
            raise DatasetError(f"dataset needs n >= 2 and d >= 1, got {n}x{d}")
        if y.shape != (n,):
            raise DatasetError("labels must have one entry per row")
        if not np.all(np.isfinite(X)):
            raise DatasetError("features contain missing or non-finite values")
        if not np.all((y == 0) | (y == 1)):
            raise DatasetError("labels must be 0 or 1")
        if len(self.feature_names) != d:
            raise DatasetError("feature_names length does not match feature columns")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if not self.kinds:
            object.__setattr__(self, "kinds", ("numeric",) * d)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def column(self, name: str) -> np.ndarray:
        if name == self.label_name:
            return self.labels.astype(np.float64)
        try:
            return self.features[:, self.feature_names.index(name)]
        except ValueError:
            raise DatasetError(f"unknown feature {name!r}") from None

    def subset(self, indices) -> Dataset:
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.features[idx],
            self.labels[idx],
            self.feature_names,
            self.label_name,
            self.kinds,
            self.categories,
            self.drop,
            self.policy,
        )

    def majority_baseline(self) -> float:
        positives = int(self.labels.sum())
        return max(positives, self.n - positives) / self.n


def _parse_real(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DatasetError(f"row {row}, column {column!r}: cannot parse {cell!r} as a number") from None
    if not math.isfinite(value):
        raise DatasetError(f"row {row}, column {column!r}: non-finite value {cell!r}")
    return value


def _codes(cells: list[str], spec: ColumnSpec) -> np.ndarray:
    index = {level: i for i, level in enumerate(spec.levels)}
    out = np.empty(len(cells))
    for r, cell in enumerate(cells):
        try:
            out[r] = index[cell]
        except KeyError:
            raise DatasetError(
                f"row {r + 1}, column {spec.name!r}: value {cell!r} not in declared list {list(spec.levels)}"
            ) from None
    return out


def encode(
    table: RawTable,
    schema: Schema | Sequence[ColumnSpec],
    drop: Sequence[str] | None = None,
    policy: str = "integer",
) -> Dataset:
    """Turn a RawTable into a numeric Dataset.

    ``drop`` defaults to the schema's drop list. Feature order follows the
    schema; one-hot expansion names its columns ``Name=level``.
    """
    if isinstance(schema, Schema):
        specs = schema.columns
        drop = schema.drop if drop is None else tuple(drop)
    else:
        specs = tuple(schema)
        drop = tuple(drop or ())
    if policy not in POLICIES:
        raise DatasetError(f"unknown encoding policy {policy!r}")
    for name in list(drop) + [c.name for c in specs]:
        if name not in table.columns:
            raise DatasetError(f"column {name!r} not in table")
    labels_spec = [c for c in specs if c.kind == "label"]
    if len(labels_spec) != 1:
        raise DatasetError("schema must have exactly one label column")
    label_spec = labels_spec[0]
    if label_spec.name in drop:
        raise DatasetError("the label column cannot be dropped")

    labels = np.empty(len(table.rows), dtype=np.int64)
    for r, cell in enumerate(table.column(label_spec.name)):
        if cell not in LABEL_VALUES:
            raise DatasetError(f"row {r + 1}: label value {cell!r} outside {{Yes, No}}")
        labels[r] = LABEL_VALUES[cell]

    columns, names, kinds, categories = [], [], [], {}
    for spec in specs:
        if spec.name in drop or spec.kind == "label":
            continue
        cells = table.column(spec.name)
        if spec.kind == "numeric":
            columns.append(np.array([_parse_real(c, r + 1, spec.name) for r, c in enumerate(cells)]))
            names.append(spec.name)
            kinds.append("numeric")
        elif spec.kind == "nominal" and policy == "onehot":
            codes = _codes(cells, spec)
            for i, level in enumerate(spec.levels):
                columns.append((codes == i).astype(np.float64))
                names.append(f"{spec.name}={level}")
                kinds.append("nominal")
                categories[f"{spec.name}={level}"] = ("0", "1")
        else:
            columns.append(_codes(cells, spec))
            names.append(spec.name)
            kinds.append(spec.kind)
            categories[spec.name] = spec.levels
    if not columns:
        raise DatasetError("no feature columns left after dropping")
    return Dataset(
        np.column_stack(columns),
        labels,
        tuple(names),
        label_spec.name,
        tuple(kinds),
        categories,
        tuple(drop),
        policy,
    )


def load_dataset(
    path: str | Path,
    schema: Schema | None = None,
    drop: Sequence[str] | None = None,
    policy: str = "integer",
) -> Dataset:
    schema = schema or load_schema()
    return encode(load_csv(path, schema), schema, drop, policy)


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.30
    seed: int = 0
    stratified: bool = False

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise DatasetError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if not 0 <= self.seed < 2**64:
            raise DatasetError("seed must be a 64-bit unsigned integer")


def holdout_size(n: int, fraction: float) -> int:
    # round half up; Python's round() is banker's rounding
    return int(math.floor(n * fraction + 0.5))


def split_indices(labels, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Sorted (train, test) index arrays for a dataset with these labels."""
    labels = np.asarray(labels)
    n = len(labels)
    n_test = holdout_size(n, spec.test_fraction)
    if math.floor(n * spec.test_fraction) < 1 or n - n_test < 1:
        raise DatasetError(f"degenerate split: n={n}, test_fraction={spec.test_fraction}")
    rng = make_rng(spec.seed)
    if not spec.stratified:
        test = rng.permutation(n)[:n_test]
    else:
        classes = [np.flatnonzero(labels == c) for c in (0, 1)]
        quotas = [n_test * len(members) / n for members in classes]
        counts = [int(math.floor(q)) for q in quotas]
        # largest remainder; ties go to class 0
        order = sorted(range(2), key=lambda c: (-(quotas[c] - counts[c]), c))
        for c in order[: n_test - sum(counts)]:
            counts[c] += 1
        test = np.concatenate(
            [members[rng.permutation(len(members))[:k]] for members, k in zip(classes, counts)]
        )
    mask = np.zeros(n, dtype=bool)
    mask[test] = True
    return np.flatnonzero(~mask), np.flatnonzero(mask)


def split(data: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    train_idx, test_idx = split_indices(data.labels, spec)
    return data.subset(train_idx), data.subset(test_idx)
