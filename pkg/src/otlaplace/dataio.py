"""Dataset serialization.

Two formats round-trip a LabeledDataset bit-exactly:

* JSON: ``{"k": int, "clouds": [{"label": int|null, "points": [[...], ...]}]}``
* packed binary: magic ``OTLD``, u32 n, u32 m, u32 k (little endian), then
  n*m*k f64 coordinates cloud-major, then n i32 labels with -1 = unlabeled.

The binary layout requires a uniform point count per cloud.  A plain CSV
coordinate dump is provided for plotting.
"""

import json
import struct

import numpy as np

from .errors import InconsistentPointCount, ParseError
from .measures import EmpiricalMeasure, LabeledDataset

_MAGIC = b"OTLD"


def save_dataset_json(dataset: LabeledDataset, path) -> None:
    doc = {
        "k": dataset.ambient_dim,
        "clouds": [
            {
                "label": None if lab is None else int(lab),
                "points": mu.points.tolist(),
            }
            for mu, lab in zip(dataset.measures, dataset.labels)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def save_dataset_binary(dataset: LabeledDataset, path) -> None:
    counts = dataset.point_counts()
    if len(set(counts.tolist())) != 1:
        raise InconsistentPointCount(
            "binary format requires a uniform point count, got %s" % sorted(set(counts.tolist()))
        )
    n, m, k = dataset.n, int(counts[0]), dataset.ambient_dim
    coords = np.stack([mu.points for mu in dataset.measures]).astype("<f8")
    labels = np.array(
        [-1 if lab is None else int(lab) for lab in dataset.labels], dtype="<i4"
    )
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", n, m, k))
        fh.write(coords.tobytes())
        fh.write(labels.tobytes())


def export_coordinates_csv(dataset: LabeledDataset, path) -> None:
    """One row per point: cloud index, label (empty if unknown), coordinates."""
    k = dataset.ambient_dim
    header = "cloud,label," + ",".join("x%d" % j for j in range(k))
    lines = [header]
    for i, (mu, lab) in enumerate(zip(dataset.measures, dataset.labels)):
        lab_txt = "" if lab is None else str(int(lab))
        for pt in mu.points:
            lines.append("%d,%s,%s" % (i, lab_txt, ",".join(repr(float(x)) for x in pt)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _dataset_from_clouds(k, clouds, strict):
    measures = []
    labels = []
    for idx, cloud in enumerate(clouds):
        if not isinstance(cloud, dict) or "points" not in cloud:
            raise ParseError("cloud %d is not an object with points" % idx)
        pts = np.asarray(cloud["points"], dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ParseError("cloud %d has malformed points" % idx)
        if pts.shape[1] != k:
            raise ParseError(
                "cloud %d has dimension %d, header says %d" % (idx, pts.shape[1], k)
            )
        if not np.isfinite(pts).all():
            raise ParseError("cloud %d contains non-finite coordinates" % idx)
        lab = cloud.get("label")
        if lab is not None:
            lab = int(lab)
            if lab < 0:
                raise ParseError("cloud %d has negative label" % idx)
        measures.append(EmpiricalMeasure(pts))
        labels.append(lab)
    known = [lab is not None for lab in labels]
    n_lab = sum(known)
    if any(known[n_lab:]):
        raise ParseError("labeled clouds must precede unlabeled ones")
    if strict:
        counts = {mu.m for mu in measures}
        if len(counts) > 1:
            raise InconsistentPointCount(
                "point counts differ across clouds: %s" % sorted(counts)
            )
    n_classes = max((lab for lab in labels if lab is not None), default=0) + 1
    return LabeledDataset(measures, labels, n_classes=n_classes)


def _load_binary(raw, strict):
    if len(raw) < 16:
        raise ParseError("binary dataset truncated before header")
    n, m, k = struct.unpack("<III", raw[4:16])
    need = 16 + n * m * k * 8 + n * 4
    if len(raw) != need:
        raise ParseError("binary dataset has %d bytes, expected %d" % (len(raw), need))
    coords = np.frombuffer(raw, dtype="<f8", count=n * m * k, offset=16)
    labels = np.frombuffer(raw, dtype="<i4", count=n, offset=16 + n * m * k * 8)
    if not np.isfinite(coords).all():
        raise ParseError("binary dataset contains non-finite coordinates")
    coords = coords.reshape(n, m, k)
    clouds = [
        {
            "label": None if labels[i] < 0 else int(labels[i]),
            "points": coords[i],
        }
        for i in range(n)
    ]
    return _dataset_from_clouds(k, clouds, strict)


def load_point_cloud_dataset(path, strict: bool = False) -> LabeledDataset:
    """Load a dataset file, auto-detecting the JSON or binary format.

    With ``strict`` set, a non-uniform point count across clouds raises
    InconsistentPointCount.  Malformed content raises ParseError; missing
    files surface the usual OSError.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) == 0:
        raise ParseError("file %s is empty" % path)
    if raw[:4] == _MAGIC:
        return _load_binary(raw, strict)
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError("not a valid dataset file: %s" % exc) from exc
    if not isinstance(doc, dict) or "k" not in doc or "clouds" not in doc:
        raise ParseError("JSON dataset must have keys 'k' and 'clouds'")
    k = int(doc["k"])
    if k < 1:
        raise ParseError("ambient dimension must be positive")
    clouds = doc["clouds"]
    if not isinstance(clouds, list) or len(clouds) == 0:
        raise ParseError("dataset has no clouds")
    # JSON floats parse to the nearest double, so save/load round-trips exactly
    return _dataset_from_clouds(k, clouds, strict)
