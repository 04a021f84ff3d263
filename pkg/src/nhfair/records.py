"""Prediction-log data model and file parsing.

A *run* is one classifier evaluated on one dataset split: a manifest
(method, dataset, seed, split, utility kind, label/group spaces) plus one
record per sample. Records arrive as JSONL or CSV with a JSON manifest
sidecar named ``<basename>.manifest.json``; the exact layouts are
documented on :func:`parse_run` and :func:`write_run`.

Everything here is an immutable value object. Parsing is a pure function
of the file bytes, so files may be parsed concurrently and the results
shared across threads. After parsing, records are sorted by ``sample_id``
so downstream aggregation never depends on input file order.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateSampleId,
    EmptyGroup,
    MalformedLine,
    MalformedRow,
    MissingScores,
    ParseError,
    UnknownGroup,
    UnknownLabel,
    UtilityOutOfRange,
)

SPLITS = ("train", "validation", "test")
UTILITY_KINDS = ("accuracy", "auc")

# Reserved summary-CSV column names; every other column is a group.
_SUMMARY_RESERVED = ("run_id", "method", "overall", "dp", "eqodd")


@dataclass(frozen=True)
class LabelSpace:
    """Ordered set of class labels; ``positive_label`` anchors binary DP/AUC."""

    labels: tuple[str, ...]
    positive_label: str = ""

    def __post_init__(self):
        if len(self.labels) < 2:
            raise ValueError("label space needs at least 2 labels")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")
        if not self.positive_label:
            object.__setattr__(self, "positive_label", self.labels[-1])
        elif self.positive_label not in self.labels:
            raise ValueError(f"positive_label {self.positive_label!r} not in labels")

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class GroupSpace:
    """Ordered set of sensitive-group identifiers."""

    groups: tuple[str, ...]

    def __post_init__(self):
        if len(self.groups) < 2:
            raise ValueError("group space needs at least 2 groups")
        if len(set(self.groups)) != len(self.groups):
            raise ValueError("groups must be distinct")

    @property
    def size(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class PredictionRecord:
    """One sample: true label, predicted label, group, optional score map.

    ``scores`` maps labels to probabilities in [0, 1]. A partial map is
    legal; an empty map is normalized to None at parse time.
    """

    sample_id: str
    true_label: str
    predicted_label: str
    group: str
    scores: dict[str, float] | None = None


@dataclass(frozen=True)
class RunManifest:
    method: str
    dataset: str
    seed: int
    split: str
    utility_kind: str
    label_space: LabelSpace
    group_space: GroupSpace

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")
        if self.utility_kind not in UTILITY_KINDS:
            raise ValueError(
                f"utility_kind must be one of {UTILITY_KINDS}, got {self.utility_kind!r}"
            )
        if self.utility_kind == "auc" and self.label_space.size != 2:
            raise ValueError("auc runs require a binary label space")

    @property
    def run_id(self) -> str:
        return f"{self.method}:{self.dataset}:seed{self.seed}:{self.split}"


@dataclass(frozen=True)
class EvaluationRun:
    manifest: RunManifest
    records: tuple[PredictionRecord, ...]


@dataclass(frozen=True)
class RunSummary:
    """Pre-computed per-run utilities, e.g. transcribed from a results table."""

    method: str
    run_id: str
    group_utilities: dict[str, float]
    overall_utility: float
    dp: float | None = None
    eqodd: float | None = None


def _manifest_path(path: Path) -> Path:
    return path.parent / (path.stem + ".manifest.json")


def _load_manifest(record_path: Path) -> RunManifest:
    mpath = _manifest_path(record_path)
    if not mpath.exists():
        raise ParseError(f"manifest sidecar not found: {mpath}", path=str(record_path))
    try:
        raw = json.loads(mpath.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"manifest is not valid JSON: {exc}", path=str(mpath)) from exc
    try:
        label_space = LabelSpace(
            labels=tuple(str(x) for x in raw["labels"]),
            positive_label=str(raw.get("positive_label", "")),
        )
        group_space = GroupSpace(groups=tuple(str(x) for x in raw["groups"]))
        return RunManifest(
            method=str(raw["method"]),
            dataset=str(raw["dataset"]),
            seed=int(raw["seed"]),
            split=str(raw["split"]),
            utility_kind=str(raw["utility_kind"]),
            label_space=label_space,
            group_space=group_space,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedLine(f"bad manifest: {exc}", path=str(mpath)) from exc


def _validate_scores(
    scores: dict[str, float] | None,
    label_space: LabelSpace,
    path: str,
    line: int,
) -> dict[str, float] | None:
    if scores is None or len(scores) == 0:
        return None
    clean: dict[str, float] = {}
    for label in label_space.labels:  # fixed key order
        if label not in scores:
            continue
        value = scores[label]
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise MalformedLine(
                f"score for {label!r} is not a number", path=path, line=line
            ) from None
        if not math.isfinite(value) or not 0.0 <= value <= 1.0:
            raise MalformedLine(
                f"score for {label!r} out of [0, 1]: {value}", path=path, line=line
            )
        clean[label] = value
    for key in scores:
        if key not in label_space.labels:
            raise UnknownLabel(f"score key {key!r} not in label space", path=path, line=line)
    return clean


def _finish_run(
    manifest: RunManifest,
    records: list[tuple[int, PredictionRecord]],
    path: str,
) -> EvaluationRun:
    if not records:
        raise ParseError("run contains no records", path=path)

    seen: dict[str, int] = {}
    for line, rec in records:
        if rec.sample_id in seen:
            raise DuplicateSampleId(
                f"sample_id {rec.sample_id!r} already seen on line {seen[rec.sample_id]}",
                path=path,
                line=line,
            )
        seen[rec.sample_id] = line
        if rec.true_label not in manifest.label_space.labels:
            raise UnknownLabel(f"label {rec.true_label!r} not in manifest", path=path, line=line)
        if rec.predicted_label not in manifest.label_space.labels:
            raise UnknownLabel(
                f"label {rec.predicted_label!r} not in manifest", path=path, line=line
            )
        if rec.group not in manifest.group_space.groups:
            raise UnknownGroup(f"group {rec.group!r} not in manifest", path=path, line=line)
        if manifest.utility_kind == "auc":
            if rec.scores is None:
                raise MissingScores(
                    f"auc run but record {rec.sample_id!r} has no scores", path=path, line=line
                )
            if manifest.label_space.positive_label not in rec.scores:
                raise MissingScores(
                    f"auc run but record {rec.sample_id!r} lacks a score for the "
                    f"positive label {manifest.label_space.positive_label!r}",
                    path=path,
                    line=line,
                )

    present = {rec.group for _, rec in records}
    missing = [g for g in manifest.group_space.groups if g not in present]
    if missing:
        raise EmptyGroup(f"no records for group(s): {', '.join(missing)}", path=path)

    ordered = tuple(rec for _, rec in sorted(records, key=lambda pair: pair[1].sample_id))
    return EvaluationRun(manifest=manifest, records=ordered)


def _parse_jsonl_records(path: Path, manifest: RunManifest) -> list[tuple[int, PredictionRecord]]:
    out: list[tuple[int, PredictionRecord]] = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise MalformedLine(f"invalid JSON: {exc}", path=str(path), line=line_no) from exc
            if not isinstance(obj, dict):
                raise MalformedLine("record is not a JSON object", path=str(path), line=line_no)
            try:
                sample_id = str(obj["sample_id"])
                y = str(obj["y"])
                y_hat = str(obj["y_hat"])
                group = str(obj["group"])
            except KeyError as exc:
                raise MalformedLine(
                    f"missing field {exc.args[0]!r}", path=str(path), line=line_no
                ) from exc
            scores = obj.get("scores")
            if scores is not None and not isinstance(scores, dict):
                raise MalformedLine("scores must be an object", path=str(path), line=line_no)
            scores = _validate_scores(scores, manifest.label_space, str(path), line_no)
            out.append(
                (
                    line_no,
                    PredictionRecord(
                        sample_id=sample_id,
                        true_label=y,
                        predicted_label=y_hat,
                        group=group,
                        scores=scores,
                    ),
                )
            )
    return out


def _parse_csv_records(path: Path, manifest: RunManifest) -> list[tuple[int, PredictionRecord]]:
    out: list[tuple[int, PredictionRecord]] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("run contains no records", path=str(path)) from None
        expected = ["sample_id", "y", "y_hat", "group"]
        if header[: len(expected)] != expected:
            raise MalformedLine(
                f"header must start with {','.join(expected)}", path=str(path), line=1
            )
        score_labels: list[str] = []
        for col in header[len(expected) :]:
            if not col.startswith("score:"):
                raise MalformedLine(f"unexpected column {col!r}", path=str(path), line=1)
            score_labels.append(col[len("score:") :])

        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedLine(
                    f"expected {len(header)} fields, got {len(row)}",
                    path=str(path),
                    line=line_no,
                )
            scores: dict[str, float] = {}
            for label, cell in zip(score_labels, row[len(expected) :]):
                if cell == "":
                    continue  # blank cell: label absent from this record's scores
                try:
                    scores[label] = float(cell)
                except ValueError:
                    raise MalformedLine(
                        f"score cell {cell!r} is not a number", path=str(path), line=line_no
                    ) from None
            validated = _validate_scores(
                scores if scores else None, manifest.label_space, str(path), line_no
            )
            out.append(
                (
                    line_no,
                    PredictionRecord(
                        sample_id=row[0],
                        true_label=row[1],
                        predicted_label=row[2],
                        group=row[3],
                        scores=validated,
                    ),
                )
            )
    return out


def parse_run(path: str | Path, format: str | None = None) -> EvaluationRun:
    """Parse a record file plus its manifest sidecar into a validated run.

    JSONL layout: one object per line with fields ``sample_id``, ``y``,
    ``y_hat``, ``group`` and an optional ``scores`` map (label -> [0, 1]).
    CSV layout: header ``sample_id,y,y_hat,group[,score:<label>...]``;
    a blank score cell means that label is absent from the record's map.
    ``format`` defaults to the file extension.

    Records come back sorted by ``sample_id`` ascending so every
    downstream aggregation is order-deterministic.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError("file not found", path=str(path))
    if format is None:
        format = path.suffix.lstrip(".").lower()
    if format not in ("jsonl", "csv"):
        raise ParseError(f"unsupported record format {format!r}", path=str(path))
    manifest = _load_manifest(path)
    if format == "jsonl":
        records = _parse_jsonl_records(path, manifest)
    else:
        records = _parse_csv_records(path, manifest)
    return _finish_run(manifest, records, str(path))


def write_run(run: EvaluationRun, path: str | Path, format: str | None = None) -> None:
    """Serialize a run to JSONL or CSV plus the manifest sidecar.

    Round-trip stable: ``parse_run(write_run(run)) == run`` for any valid
    run (records are written in canonical sample_id order).
    """
    path = Path(path)
    if format is None:
        format = path.suffix.lstrip(".").lower()
    manifest = run.manifest
    mdoc = {
        "method": manifest.method,
        "dataset": manifest.dataset,
        "seed": manifest.seed,
        "split": manifest.split,
        "utility_kind": manifest.utility_kind,
        "labels": list(manifest.label_space.labels),
        "groups": list(manifest.group_space.groups),
        "positive_label": manifest.label_space.positive_label,
    }
    _manifest_path(path).write_text(json.dumps(mdoc, indent=2) + "\n", encoding="utf-8")

    if format == "jsonl":
        with path.open("w", encoding="utf-8") as handle:
            for rec in run.records:
                obj: dict[str, object] = {
                    "sample_id": rec.sample_id,
                    "y": rec.true_label,
                    "y_hat": rec.predicted_label,
                    "group": rec.group,
                }
                if rec.scores is not None:
                    obj["scores"] = {
                        label: rec.scores[label]
                        for label in manifest.label_space.labels
                        if label in rec.scores
                    }
                handle.write(json.dumps(obj) + "\n")
    elif format == "csv":
        any_scores = any(rec.scores is not None for rec in run.records)
        score_labels = list(manifest.label_space.labels) if any_scores else []
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                ["sample_id", "y", "y_hat", "group"] + [f"score:{lb}" for lb in score_labels]
            )
            for rec in run.records:
                row = [rec.sample_id, rec.true_label, rec.predicted_label, rec.group]
                for label in score_labels:
                    if rec.scores is not None and label in rec.scores:
                        row.append(repr(rec.scores[label]))
                    else:
                        row.append("")
                writer.writerow(row)
    else:
        raise ParseError(f"unsupported record format {format!r}", path=str(path))


def _parse_utility_cell(cell: str, percent_column: bool, path: str, line: int) -> float:
    """Parse one utility value; '%' on the header or the value means 0-100 units."""
    text = cell.strip()
    percent = percent_column
    if text.endswith("%"):
        percent = True
        text = text[:-1].strip()
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(f"utility cell {cell!r} is not a number", path=path, line=line) from None
    if percent:
        value /= 100.0
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise UtilityOutOfRange(f"utility {cell!r} outside [0, 1]", path=path, line=line)
    return value


def parse_summaries(path: str | Path) -> list[RunSummary]:
    """Parse a summary CSV: ``run_id,method,<group>[%],...,overall[%]``.

    Columns named ``dp``/``eqodd`` (optionally %-marked) populate the
    corresponding optional fields; every other non-reserved column is a
    group utility. Values in percent units must be marked with ``%`` on
    the header or on the value itself; unmarked values must already lie
    in [0, 1].
    """
    path = Path(path)
    if not path.exists():
        raise ParseError("file not found", path=str(path))
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow("empty file, expected a header", path=str(path), line=1) from None

        columns: list[tuple[str, bool]] = []  # (name, percent marker)
        for col in header:
            name = col.strip()
            percent = name.endswith("%")
            if percent:
                name = name[:-1].strip()
            columns.append((name, percent))
        names = [name for name, _ in columns]
        if "run_id" not in names or "method" not in names or "overall" not in names:
            raise MalformedRow(
                "header must contain run_id, method and overall columns",
                path=str(path),
                line=1,
            )
        group_cols = [name for name in names if name not in _SUMMARY_RESERVED]
        if len(group_cols) < 2:
            raise MalformedRow("header must name at least 2 group columns", path=str(path), line=1)
        markers = dict(columns)

        summaries: list[RunSummary] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise MalformedRow(
                    f"expected {len(columns)} fields, got {len(row)}",
                    path=str(path),
                    line=line_no,
                )
            cells = dict(zip(names, row))
            utilities = {
                g: _parse_utility_cell(cells[g], markers[g], str(path), line_no)
                for g in group_cols
            }
            overall = _parse_utility_cell(cells["overall"], markers["overall"], str(path), line_no)
            dp = eqodd = None
            if "dp" in cells and cells["dp"].strip():
                dp = _parse_utility_cell(cells["dp"], markers["dp"], str(path), line_no)
            if "eqodd" in cells and cells["eqodd"].strip():
                eqodd = _parse_utility_cell(cells["eqodd"], markers["eqodd"], str(path), line_no)
            summaries.append(
                RunSummary(
                    method=cells["method"].strip(),
                    run_id=cells["run_id"].strip(),
                    group_utilities=utilities,
                    overall_utility=overall,
                    dp=dp,
                    eqodd=eqodd,
                )
            )
    return summaries
