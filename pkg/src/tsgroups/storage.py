"""Deterministic artifact persistence.

All composite artifacts are zip archives written with fixed entry
metadata (no compression, epoch date stamps, sorted names), so a rerun
with identical content produces byte-identical files. Numeric payloads
are little-endian 64-bit floats in row-major order; headers are
canonical JSON (sorted keys, LF endings). Digest helpers strip wall-time
fields so timing never leaks into content digests.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import zipfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .classifiers import ClassifierKind, ClassifierSpec, SoftmaxModel
from .grouped import GroupModelBundle
from .ingest import NormalizationStats
from .types import Grouping, WindowMeta, WindowedDataset

_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)
TIMING_KEYS = frozenset({"wall_time_s", "stage_timings", "timings"})


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_json(path: str | Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2))
        fh.write("\n")


def read_json(path: str | Path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def write_archive(path: str | Path, entries: dict[str, bytes]) -> None:
    """Zip archive with deterministic layout: sorted names, fixed dates."""
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", compression=zipfile.ZIP_STORED) as zf:
        for name in sorted(entries):
            info = zipfile.ZipInfo(name, date_time=_ZIP_EPOCH)
            info.external_attr = 0o644 << 16
            zf.writestr(info, entries[name])
    with open(path, "wb") as fh:
        fh.write(buffer.getvalue())


def read_archive(path: str | Path) -> dict[str, bytes]:
    with zipfile.ZipFile(path, "r") as zf:
        return {name: zf.read(name) for name in zf.namelist()}


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def content_digest(path: str | Path) -> str:
    """Digest that ignores wall-time fields inside JSON artifacts.

    JSON files are canonicalized with timing keys removed; every other
    file is digested byte-for-byte.
    """
    path = Path(path)
    if path.suffix == ".json":
        stripped = _strip_timing(read_json(path))
        return hashlib.sha256(canonical_json(stripped).encode("utf-8")).hexdigest()
    return file_digest(path)


@contextmanager
def run_lock(directory: str | Path):
    """Exclusive marker preventing concurrent writers to one run directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lock_path = directory / ".lock"
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RuntimeError(
            f"run directory {directory} is locked by another process (remove {lock_path} if stale)"
        ) from None
    try:
        os.close(fd)
        yield
    finally:
        lock_path.unlink(missing_ok=True)


def _tensor_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def _tensor_from(blob: bytes, shape: tuple[int, ...]) -> np.ndarray:
    return np.frombuffer(blob, dtype="<f8").reshape(shape).astype(np.float64)


def grouping_to_dict(grouping: Grouping) -> dict:
    return {
        "assignment": grouping.assignment.tolist(),
        "K": grouping.K,
        "measure": grouping.measure,
        "hubert_scores": {k: float(v) for k, v in grouping.hubert_scores.items()},
        "iteration_trace": [[int(k), int(s)] for k, s in grouping.iteration_trace],
    }


def grouping_from_dict(data: dict) -> Grouping:
    return Grouping(
        assignment=np.asarray(data["assignment"], dtype=np.int64),
        K=int(data["K"]),
        measure=data["measure"],
        hubert_scores={k: float(v) for k, v in data["hubert_scores"].items()},
        iteration_trace=[(int(k), int(s)) for k, s in data["iteration_trace"]],
    )


def save_dataset(path: str | Path, ds: WindowedDataset,
                 normalization: NormalizationStats | None = None,
                 has_labels: bool = True, extra: dict | None = None) -> None:
    """Canonical dataset archive: JSON header plus raw float64 tensor."""
    header = {
        "format": "windowed-dataset-v1",
        "M": ds.n_windows,
        "t": ds.n_timesteps,
        "d": ds.n_channels,
        "C": ds.n_classes,
        "class_names": list(ds.class_names),
        "labels": ds.labels.tolist() if has_labels else None,
        "meta": [
            {"driver_id": m.driver_id, "behavior": m.behavior,
             "road": m.road, "session_id": m.session_id}
            for m in ds.meta
        ],
        "normalization": normalization.to_dict() if normalization else None,
        "extra": extra or {},
    }
    write_archive(path, {
        "header.json": canonical_json(header).encode("utf-8"),
        "windows.f8": _tensor_bytes(ds.windows),
    })


def load_dataset(path: str | Path) -> tuple[WindowedDataset, NormalizationStats | None, bool, dict]:
    """Returns (dataset, normalization stats, labels-present flag, extra)."""
    entries = read_archive(path)
    header = json.loads(entries["header.json"].decode("utf-8"))
    if header.get("format") != "windowed-dataset-v1":
        raise ValueError(f"unrecognized dataset format: {header.get('format')!r}")
    m, t, d = header["M"], header["t"], header["d"]
    windows = _tensor_from(entries["windows.f8"], (m, t, d))
    has_labels = header["labels"] is not None
    labels = (np.asarray(header["labels"], dtype=np.int64) if has_labels
              else np.zeros(m, dtype=np.int64))
    meta = [WindowMeta(**item) for item in header["meta"]]
    ds = WindowedDataset(
        windows=windows,
        labels=labels,
        meta=meta,
        class_names=list(header["class_names"]),
    )
    stats = (NormalizationStats.from_dict(header["normalization"])
             if header.get("normalization") else None)
    return ds, stats, has_labels, header.get("extra", {})


def save_aecs(path: str | Path, vectors: np.ndarray, source_model_id: str) -> None:
    header = {
        "format": "aecs-v1",
        "M": int(vectors.shape[0]),
        "h": int(vectors.shape[1]),
        "source_model_id": source_model_id,
    }
    write_archive(path, {
        "header.json": canonical_json(header).encode("utf-8"),
        "vectors.f8": _tensor_bytes(vectors),
    })


def load_aecs(path: str | Path):
    from .types import AecsMatrix

    entries = read_archive(path)
    header = json.loads(entries["header.json"].decode("utf-8"))
    if header.get("format") != "aecs-v1":
        raise ValueError(f"unrecognized representation format: {header.get('format')!r}")
    vectors = _tensor_from(entries["vectors.f8"], (header["M"], header["h"]))
    return AecsMatrix(vectors=vectors, source_model_id=header["source_model_id"])


def save_bundle(path: str | Path, bundle: GroupModelBundle) -> None:
    """Bundle archive: JSON manifest plus one weight blob per model."""
    manifest = {
        "format": "group-bundle-v1",
        "spec": bundle.spec.to_dict(),
        "grouping": grouping_to_dict(bundle.grouping),
        "class_presence": bundle.class_presence.astype(int).tolist(),
        "aecs_model_id": bundle.aecs_model_id,
        "n_classes": bundle.n_classes,
        "warnings": list(bundle.warnings),
        "models": [],
    }
    entries: dict[str, bytes] = {}
    for i, model in enumerate(bundle.models):
        manifest["models"].append({
            "kind": model.kind.value,
            "n_train": model.n_train,
            "n_features": model.n_features,
            "seen_classes": model.seen_classes.tolist(),
            "weights_shape": list(model.weights.shape),
        })
        blob = b"".join([
            _tensor_bytes(model.weights),
            _tensor_bytes(model.bias),
            _tensor_bytes(model.feature_mean),
            _tensor_bytes(model.feature_std),
        ])
        entries[f"model_{i}.f8"] = blob
    entries["manifest.json"] = canonical_json(manifest).encode("utf-8")
    write_archive(path, entries)


def load_bundle(path: str | Path) -> GroupModelBundle:
    entries = read_archive(path)
    manifest = json.loads(entries["manifest.json"].decode("utf-8"))
    if manifest.get("format") != "group-bundle-v1":
        raise ValueError(f"unrecognized bundle format: {manifest.get('format')!r}")
    spec = ClassifierSpec.from_dict(manifest["spec"])
    grouping = grouping_from_dict(manifest["grouping"])
    models: list[SoftmaxModel] = []
    for i, meta in enumerate(manifest["models"]):
        blob = entries[f"model_{i}.f8"]
        n_features = int(meta["n_features"])
        n_seen = len(meta["seen_classes"])
        offset = 0

        def take(count: int, shape: tuple[int, ...]) -> np.ndarray:
            nonlocal offset
            arr = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
            offset += count * 8
            return arr.reshape(shape).astype(np.float64)

        weights = take(n_features * n_seen, (n_features, n_seen))
        bias = take(n_seen, (n_seen,))
        feature_mean = take(n_features, (n_features,))
        feature_std = take(n_features, (n_features,))
        models.append(SoftmaxModel(
            weights=weights,
            bias=bias,
            seen_classes=np.asarray(meta["seen_classes"], dtype=np.int64),
            feature_mean=feature_mean,
            feature_std=feature_std,
            kind=ClassifierKind(meta["kind"]),
            n_train=int(meta["n_train"]),
        ))
    return GroupModelBundle(
        models=models,
        class_presence=np.asarray(manifest["class_presence"], dtype=bool),
        grouping=grouping,
        spec=spec,
        aecs_model_id=manifest["aecs_model_id"],
        n_classes=int(manifest["n_classes"]),
        warnings=list(manifest["warnings"]),
    )
