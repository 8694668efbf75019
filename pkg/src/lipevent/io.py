"""Readers and writers for landmark sequences, truth sidecars and result tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import FormatError
from .geometry import DEFAULT_FRAME_RATE, LandmarkSequence
from .metrics import GroundTruth

CSV_HEADER = ["frame", "landmark", "x", "y", "z"]
TRUTH_SUFFIX = ".truth.json"
RESULT_SUFFIX = ".result.json"


def read_csv(path, frame_rate: float = DEFAULT_FRAME_RATE) -> LandmarkSequence:
    """Rows must be ordered by frame, then landmark, both counting from 0."""
    frames: list[list[list[float]]] = []
    n = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_HEADER:
            raise FormatError(f"header must be exactly {','.join(CSV_HEADER)}", row=1)
        for row in reader:
            lineno = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 5:
                raise FormatError(f"expected 5 fields, got {len(row)}", row=lineno)
            try:
                f, lm = int(row[0]), int(row[1])
                xyz = [float(v) for v in row[2:]]
            except ValueError:
                raise FormatError("frame/landmark must be integers and x,y,z numbers", row=lineno) from None
            if not all(np.isfinite(xyz)):
                raise FormatError("coordinates must be finite", row=lineno)
            if f == len(frames):
                if frames and n is None:
                    n = len(frames[-1])
                if frames and len(frames[-1]) != n:
                    raise FormatError(f"frame {f - 1} has {len(frames[-1])} landmarks, expected {n}", row=lineno)
                frames.append([])
            elif f != len(frames) - 1:
                raise FormatError(f"frame {f} out of order; expected {len(frames) - 1} or {len(frames)}", row=lineno)
            if lm != len(frames[-1]):
                raise FormatError(f"landmark {lm} out of order in frame {f}; expected {len(frames[-1])}", row=lineno)
            if n is not None and lm >= n:
                raise FormatError(f"frame {f} has more than {n} landmarks", row=lineno)
            frames[-1].append(xyz)
    if not frames:
        raise FormatError("no landmark rows")
    if n is not None and len(frames[-1]) != n:
        raise FormatError(f"frame {len(frames) - 1} has {len(frames[-1])} landmarks, expected {n}")
    try:
        return LandmarkSequence(np.array(frames), frame_rate)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_csv(seq: LandmarkSequence, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for f, frame in enumerate(seq.points):
            for i, (x, y, z) in enumerate(frame):
                writer.writerow([f, i, repr(float(x)), repr(float(y)), repr(float(z))])


def read_json(path) -> LandmarkSequence:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}", row=exc.lineno) from None
    if not isinstance(data, dict) or "frames" not in data:
        raise FormatError("expected an object with 'frame_rate' and 'frames'")
    frames = data["frames"]
    if not isinstance(frames, list) or not frames:
        raise FormatError("'frames' must be a non-empty array")
    counts = [len(f) if isinstance(f, list) else -1 for f in frames]
    for i, c in enumerate(counts):
        if c != counts[0]:
            raise FormatError(f"frame {i} has {c} landmarks, expected {counts[0]}")
    try:
        pts = np.array(frames, dtype=float)
        return LandmarkSequence(pts, float(data.get("frame_rate", DEFAULT_FRAME_RATE)))
    except (ValueError, TypeError) as exc:
        raise FormatError(str(exc)) from None


def write_json(seq: LandmarkSequence, path) -> None:
    data = {"frame_rate": seq.frame_rate, "frames": seq.points.tolist()}
    Path(path).write_text(json.dumps(data) + "\n", encoding="utf-8")


def read_sequence(path, frame_rate: float = DEFAULT_FRAME_RATE) -> LandmarkSequence:
    path = Path(path)
    if path.suffix.lower() == ".json":
        return read_json(path)
    if path.suffix.lower() == ".csv":
        return read_csv(path, frame_rate)
    raise FormatError(f"unsupported file type {path.suffix!r}; use .csv or .json")


def sequence_id(path) -> str:
    name = Path(path).name
    for suffix in (TRUTH_SUFFIX, RESULT_SUFFIX, ".csv", ".json"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return Path(path).stem


def list_sequences(paths) -> list[Path]:
    """Expand directories to their landmark files, lexicographically ordered."""
    out = []
    for p in map(Path, paths):
        if p.is_dir():
            out += sorted(q for q in p.iterdir()
                          if q.suffix.lower() in (".csv", ".json")
                          and not q.name.endswith((TRUTH_SUFFIX, RESULT_SUFFIX))
                          and q.name not in ("manifest.json", "summary.csv", "report.json"))
        else:
            out.append(p)
    return out


def write_truth(truth: GroundTruth, path) -> None:
    Path(path).write_text(json.dumps(truth.to_dict()) + "\n", encoding="utf-8")


def read_truth(path) -> GroundTruth:
    try:
        return GroundTruth.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"{path}: bad truth file ({exc})") from None


def write_result(result: dict, path) -> None:
    Path(path).write_text(json.dumps(result, indent=1) + "\n", encoding="utf-8")


def read_result(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if not isinstance(data, dict) or "opening_frame" not in data or "closing_frame" not in data:
        raise FormatError(f"{path}: result needs opening_frame and closing_frame")
    return data


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
