"""Session persistence and performance matrices.

Layout on disk::

    <root>/<session-id>/config.json    configuration snapshot (incl. seeds)
    <root>/<session-id>/dataset.json   the MeasurementDataset

Session directories are write-once.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import UsageError
from ..protocol.dataset import MeasurementDataset
from ..protocol.estimators import estimate_max_fidelity

CONFIG_FILE = "config.json"
DATASET_FILE = "dataset.json"


@dataclass(frozen=True)
class SessionRecord:
    session_id: str
    platform: str
    timestamp: str
    config: dict
    path: Path

    @property
    def dataset_path(self) -> Path:
        return self.path / DATASET_FILE

    def dataset(self) -> MeasurementDataset:
        return MeasurementDataset.load(self.dataset_path)


def write_session(root, session_id: str, config: dict, dataset: MeasurementDataset) -> SessionRecord:
    path = Path(root) / session_id
    if path.exists():
        raise UsageError(f"session {path} already exists; sessions are immutable")
    path.mkdir(parents=True)
    (path / CONFIG_FILE).write_text(json.dumps(config, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    dataset.save(path / DATASET_FILE)
    return SessionRecord(session_id, dataset.platform, dataset.timestamp, config, path)


def load_session(path) -> SessionRecord:
    path = Path(path)
    cfg_file = path / CONFIG_FILE
    if not cfg_file.is_file() or not (path / DATASET_FILE).is_file():
        raise UsageError(f"no session at {path}")
    config = json.loads(cfg_file.read_text(encoding="utf-8"))
    header = json.loads((path / DATASET_FILE).read_text(encoding="utf-8"))["header"]
    return SessionRecord(path.name, header["platform"], header["timestamp"], config, path)


def list_sessions(root) -> list[SessionRecord]:
    root = Path(root)
    if not root.is_dir():
        raise UsageError(f"session directory not found: {root}")
    return [load_session(p) for p in sorted(root.iterdir()) if (p / CONFIG_FILE).is_file()]


@dataclass
class PerformanceMatrix:
    """Symmetric matrix of pairwise max fidelities with jackknife errors."""

    labels: list
    f_max: np.ndarray
    stderr: np.ndarray

    def to_csv(self, errors: bool = False) -> str:
        values = self.stderr if errors else self.f_max
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", *self.labels])
        for label, row in zip(self.labels, values):
            w.writerow([label, *(repr(float(v)) for v in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, fmax_text: str, stderr_text: str | None = None) -> "PerformanceMatrix":
        labels, fmax = _read_csv(fmax_text)
        stderr = np.zeros_like(fmax) if stderr_text is None else _read_csv(stderr_text)[1]
        return cls(labels, fmax, stderr)

    def to_json(self) -> str:
        return json.dumps(
            {"labels": self.labels, "f_max": self.f_max.tolist(), "stderr": self.stderr.tolist()}, indent=1
        ) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PerformanceMatrix":
        raw = json.loads(text)
        return cls(list(raw["labels"]), np.array(raw["f_max"], dtype=float), np.array(raw["stderr"], dtype=float))

    def write(self, out_dir, stem: str = "matrix") -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "csv": out / f"{stem}.csv",
            "stderr_csv": out / f"{stem}_stderr.csv",
            "json": out / f"{stem}.json",
        }
        paths["csv"].write_text(self.to_csv(), encoding="utf-8")
        paths["stderr_csv"].write_text(self.to_csv(errors=True), encoding="utf-8")
        paths["json"].write_text(self.to_json(), encoding="utf-8")
        return paths

    def __eq__(self, other):
        return (
            isinstance(other, PerformanceMatrix)
            and list(self.labels) == list(other.labels)
            and np.array_equal(self.f_max, other.f_max)
            and np.array_equal(self.stderr, other.stderr)
        )


def _read_csv(text: str):
    rows = list(csv.reader(io.StringIO(text)))
    labels = rows[0][1:]
    values = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return labels, values


def performance_matrix(datasets, labels=None, bias_correction: bool = True) -> PerformanceMatrix:
    """Pairwise F_max over draw-aligned datasets; (i, j) and (j, i) share one computation."""
    labels = list(labels or [d.platform for d in datasets])
    k = len(datasets)
    fmax = np.eye(k)
    err = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            est = estimate_max_fidelity(datasets[i], datasets[j], bias_correction)
            fmax[i, j] = fmax[j, i] = est.f_max
            err[i, j] = err[j, i] = est.stderr
    for i, d in enumerate(datasets):
        est = estimate_max_fidelity(d, d, bias_correction)
        fmax[i, i] = est.f_max
    return PerformanceMatrix(labels, fmax, err)


_COMPAT_FIELDS = ("n", "design", "protocol", "input_mode", "shots")


def compare_sessions(records, bias_correction: bool = True) -> PerformanceMatrix:
    """Performance matrix across persisted sessions (e.g. one per day)."""
    records = list(records)
    if len(records) < 2:
        raise UsageError("need at least two sessions to compare")
    datasets = [r.dataset() if isinstance(r, SessionRecord) else r for r in records]
    ref = datasets[0]
    for rec, d in zip(records, datasets):
        name = rec.session_id if isinstance(rec, SessionRecord) else d.platform
        for f in _COMPAT_FIELDS:
            if getattr(d, f) != getattr(ref, f):
                raise UsageError(f"session {name!r} differs in {f}: {getattr(d, f)!r} vs {getattr(ref, f)!r}")
        if d.truncated:
            raise UsageError(f"session {name!r} is truncated; trim it before comparing")
        if d.draws != ref.draws:
            raise UsageError(f"session {name!r} differs in draws (different draw seed?)")
    labels = [r.session_id if isinstance(r, SessionRecord) else r.platform for r in records]
    return performance_matrix(datasets, labels, bias_correction)
