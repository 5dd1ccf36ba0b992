"""Challenge CSV formats and score report rendering.

Submission file::

    patientId,PredictionString
    p1,0.9 10 10 50 80 0.6 200 220 40 40
    p2,

where each prediction is ``confidence x y width height`` with ``(x, y)`` the
top-left corner. Ground-truth file::

    patientId,x,y,width,height,Target
    p1,10,10,50,80,1
    p2,,,,,0

Both parsers accept LF or CRLF line endings and a leading UTF-8 BOM. Every
rejection raises a :class:`~boxensemble.errors.ParseError` subclass carrying
the 1-based line number.
"""

from __future__ import annotations

import io as _io
import csv
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ensemble import Detection, PredictionSet
from .errors import (
    ConflictingTarget,
    DuplicateImage,
    InvalidBox,
    InvalidBoxError,
    MalformedRow,
)
from .geometry import Box
from .metric import ScoreReport, score_coefficient

__all__ = [
    "GroundTruthSet",
    "PREDICTION_HEADER",
    "GROUND_TRUTH_HEADER",
    "REPORT_FORMATS",
    "format_number",
    "parse_ground_truth_csv",
    "parse_predictions_csv",
    "read_ground_truth",
    "read_predictions",
    "write_ground_truth_csv",
    "write_predictions_csv",
    "write_report",
]

PREDICTION_HEADER = "patientId,PredictionString"
GROUND_TRUTH_HEADER = "patientId,x,y,width,height,Target"

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


@dataclass
class GroundTruthSet:
    """Ground-truth boxes by image; negative exams map to an empty list."""

    entries: dict[str, list[Box]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)


def format_number(x: float) -> str:
    """Shortest positional decimal that reads back as the same double."""
    s = np.format_float_positional(float(x), unique=True, trim="-")
    return "0" if s == "-0" else s


def _decode(data: bytes | str) -> list[str]:
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRow("input is not valid UTF-8", data[: exc.start].count(b"\n") + 1)
    else:
        text = data
    if text.startswith("\ufeff"):
        text = text[1:]
    lines = text.split("\n")
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _number(token: str, line: int, what: str) -> float:
    if not _NUMBER.fullmatch(token):
        raise MalformedRow(f"{what} is not a number: {token!r}", line)
    value = float(token)
    if not np.isfinite(value):
        raise MalformedRow(f"{what} is out of range: {token!r}", line)
    return value


def _box(x: float, y: float, w: float, h: float, line: int) -> Box:
    if w <= 0 or h <= 0:
        raise InvalidBox(f"width and height must be positive, got {w} x {h}", line)
    try:
        return Box.from_xywh(x, y, w, h)
    except InvalidBoxError as exc:
        raise InvalidBox(str(exc), line) from exc


def _check_header(lines: list[str], expected: str) -> None:
    if not lines or lines[0].strip() != expected:
        got = lines[0] if lines else ""
        raise MalformedRow(f"expected header {expected!r}, got {got!r}", 1)


def parse_predictions_csv(data: bytes | str, model_id="submission") -> PredictionSet:
    lines = _decode(data)
    _check_header(lines, PREDICTION_HEADER)
    out = PredictionSet(model_id)
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = raw.split(",")
        if len(fields) != 2:
            raise MalformedRow(f"expected 2 fields, got {len(fields)}", lineno)
        image_id = fields[0].strip()
        if not image_id:
            raise MalformedRow("empty patientId", lineno)
        if image_id in out.entries:
            raise DuplicateImage(f"patientId {image_id!r} already seen", lineno)
        tokens = fields[1].split()
        if len(tokens) % 5:
            raise MalformedRow(
                f"PredictionString has {len(tokens)} tokens, not a multiple of 5", lineno
            )
        dets = []
        for k in range(0, len(tokens), 5):
            score, x, y, w, h = (
                _number(tok, lineno, name)
                for tok, name in zip(tokens[k:k + 5], ("confidence", "x", "y", "width", "height"))
            )
            if score < 0:
                raise MalformedRow(f"negative confidence {score}", lineno)
            dets.append(Detection(_box(x, y, w, h, lineno), score, model_id))
        out.entries[image_id] = dets
    return out


def parse_ground_truth_csv(data: bytes | str) -> GroundTruthSet:
    lines = _decode(data)
    _check_header(lines, GROUND_TRUTH_HEADER)
    out = GroundTruthSet()
    target_of: dict[str, str] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = [f.strip() for f in raw.split(",")]
        if len(fields) != 6:
            raise MalformedRow(f"expected 6 fields, got {len(fields)}", lineno)
        image_id, xs, ys, ws, hs, target = fields
        if not image_id:
            raise MalformedRow("empty patientId", lineno)
        if target not in ("0", "1"):
            raise MalformedRow(f"Target must be 0 or 1, got {target!r}", lineno)
        if target_of.setdefault(image_id, target) != target:
            raise ConflictingTarget(f"patientId {image_id!r} has both Target=0 and Target=1", lineno)
        boxes = out.entries.setdefault(image_id, [])
        if target == "1":
            x, y, w, h = (
                _number(v, lineno, name) for v, name in zip((xs, ys, ws, hs), ("x", "y", "width", "height"))
            )
            boxes.append(_box(x, y, w, h, lineno))
    return out


def read_predictions(path: str | os.PathLike, model_id=None) -> PredictionSet:
    """Read a submission file; the model tag defaults to the path as given."""
    return parse_predictions_csv(Path(path).read_bytes(), str(path) if model_id is None else model_id)


def read_ground_truth(path: str | os.PathLike) -> GroundTruthSet:
    return parse_ground_truth_csv(Path(path).read_bytes())


def _xywh(b: Box) -> list[str]:
    return [format_number(v) for v in (b.x_min, b.y_min, b.x_max - b.x_min, b.y_max - b.y_min)]


def write_predictions_csv(pset: PredictionSet) -> bytes:
    rows = [PREDICTION_HEADER]
    for image_id in sorted(pset.entries):
        dets = sorted(pset.entries[image_id], key=lambda d: (-d.score, d.box.as_tuple()))
        tokens = []
        for d in dets:
            tokens.append(format_number(d.score))
            tokens.extend(_xywh(d.box))
        rows.append(f"{image_id},{' '.join(tokens)}")
    return ("\n".join(rows) + "\n").encode("utf-8")


def write_ground_truth_csv(gts: GroundTruthSet) -> bytes:
    rows = [GROUND_TRUTH_HEADER]
    for image_id in sorted(gts.entries):
        boxes = sorted(gts.entries[image_id], key=Box.as_tuple)
        if not boxes:
            rows.append(f"{image_id},,,,,0")
        for b in boxes:
            rows.append(",".join([image_id, *_xywh(b), "1"]))
    return ("\n".join(rows) + "\n").encode("utf-8")


REPORT_FORMATS = {
    "summary": "summary",
    "summary_text": "summary",
    "json": "json",
    "machine_json_lines": "json",
    "csv": "csv",
}


def _summary(report: ScoreReport) -> str:
    return (
        f"mC_dataset: {report.mc_dataset:.4f}\n"
        f"images scored: {report.included_count}\n"
        f"images excluded: {report.excluded_count}\n"
    )


def _json_lines(report: ScoreReport) -> str:
    out = []
    for s in report.per_image:
        record = {
            "image_id": s.image_id,
            "included": s.included,
            "c_i": s.c_i,
            "thresholds": [
                {"threshold": t.threshold, "tp": t.tp, "fp": t.fp, "fn": t.fn,
                 "coefficient": score_coefficient(t)}
                for t in s.tallies
            ],
        }
        out.append(json.dumps(record, sort_keys=True))
    return "".join(line + "\n" for line in out)


def _csv(report: ScoreReport) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["image_id", "included", "c_i", "threshold", "tp", "fp", "fn", "coefficient"])
    for s in report.per_image:
        if not s.included:
            w.writerow([s.image_id, 0, "", "", "", "", "", ""])
            continue
        for t in s.tallies:
            w.writerow([s.image_id, 1, format_number(s.c_i), format_number(t.threshold),
                        t.tp, t.fp, t.fn, format_number(score_coefficient(t))])
    return buf.getvalue()


def write_report(report: ScoreReport, fmt: str = "summary") -> bytes:
    try:
        kind = REPORT_FORMATS[fmt]
    except KeyError:
        raise ValueError(f"unknown report format {fmt!r}") from None
    render = {"summary": _summary, "json": _json_lines, "csv": _csv}[kind]
    return render(report).encode("utf-8")
