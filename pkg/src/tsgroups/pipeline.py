"""End-to-end pipeline stages behind the command-line verbs.

A single JSON config document drives everything: ingest builds the
canonical train/test archives, train fits the autoencoder and the
per-group classifiers, infer routes test groups to trained models and
scores them, and report exports composition tables and projection
coordinates. Every stage records content digests of what it wrote, with
wall-time fields excluded from digests so reruns stay byte-comparable.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, fields as dataclass_fields
from pathlib import Path

import numpy as np
import scipy

from . import autoencoder as ae
from .classifiers import ClassifierSpec
from .consistent import CgfConfig, form_consistent_groups
from .distances import MEASURE_ORDER, DistanceMeasureId, fit_mahalanobis
from .grouped import predict as bundle_predict
from .grouped import train_per_group, train_single_baseline
from .group_mapping import MappingMethod, infer_with_groups
from .hierarchy import Linkage
from .ingest import (
    ACCELEROMETER_FILENAME,
    ColumnMap,
    SyntheticSpec,
    apply_normalization,
    discover_sessions,
    filter_road,
    fit_normalization,
    generate_synthetic,
    split_indices,
    window_sessions,
)
from .metrics import evaluate_metrics
from .storage import (
    content_digest,
    load_aecs,
    load_bundle,
    load_dataset,
    read_json,
    run_lock,
    save_aecs,
    save_bundle,
    save_dataset,
    write_json,
)
from .types import AecsMatrix, WindowedDataset

PACKAGE_VERSION = "0.1.0"


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


class ArtifactError(RuntimeError):
    """Missing or inconsistent run artifacts."""


def _check_keys(section: str, data: dict, allowed: set[str]) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{section}': {sorted(unknown)}; allowed: {sorted(allowed)}")


@dataclass
class IngestOptions:
    """Corpus location handling and windowing choices."""

    road: str | None = "MOTORWAY"
    window_len: int = 64
    overlap: float = 0.5
    train_fraction: float = 0.8
    seed: int = 0
    normalize: bool = True
    accelerometer_filename: str = ACCELEROMETER_FILENAME
    column_map: dict = field(default_factory=dict)
    synthetic: dict | None = None

    def columns(self) -> ColumnMap:
        try:
            return ColumnMap(**self.column_map)
        except TypeError as exc:
            raise ConfigError(f"bad column_map: {exc}") from None

    def synthetic_spec(self) -> SyntheticSpec | None:
        if self.synthetic is None:
            return None
        try:
            spec = dict(self.synthetic)
            for key in ("frequencies", "amplitudes", "noise_sigmas", "class_effect_signs"):
                if key in spec:
                    spec[key] = tuple(spec[key])
            return SyntheticSpec(**spec)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad synthetic spec: {exc}") from None


@dataclass
class PipelineConfig:
    """Validated top-level configuration for a whole run."""

    dataset_root: str | None = None
    out_dir: str = "run"
    ingest: IngestOptions = field(default_factory=IngestOptions)
    autoencoder: ae.AutoencoderConfig = field(default_factory=ae.AutoencoderConfig)
    cgf: CgfConfig = field(default_factory=CgfConfig)
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)
    mapping_method: MappingMethod = MappingMethod.AVG
    train_baseline: bool = True
    baseline_only: bool = False

    def __post_init__(self) -> None:
        self.mapping_method = MappingMethod(self.mapping_method)

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        _check_keys("config", data, {
            "paths", "ingest", "autoencoder", "cgf", "classifier", "mapping", "train",
        })
        paths = data.get("paths", {})
        _check_keys("paths", paths, {"dataset_root", "out_dir"})
        sections: dict = {}
        for name, target in (("ingest", IngestOptions), ("autoencoder", ae.AutoencoderConfig),
                             ("cgf", CgfConfig), ("classifier", ClassifierSpec)):
            payload = dict(data.get(name, {}))
            allowed = {f.name for f in dataclass_fields(target)}
            _check_keys(name, payload, allowed)
            try:
                sections[name] = target(**payload)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad '{name}' section: {exc}") from None
        mapping = data.get("mapping", {})
        _check_keys("mapping", mapping, {"method"})
        train = data.get("train", {})
        _check_keys("train", train, {"baseline", "baseline_only"})
        try:
            method = MappingMethod(mapping.get("method", "AVG"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return cls(
            dataset_root=paths.get("dataset_root"),
            out_dir=paths.get("out_dir", "run"),
            ingest=sections["ingest"],
            autoencoder=sections["autoencoder"],
            cgf=sections["cgf"],
            classifier=sections["classifier"],
            mapping_method=method,
            train_baseline=bool(train.get("baseline", True)),
            baseline_only=bool(train.get("baseline_only", False)),
        )

    def to_dict(self) -> dict:
        return {
            "paths": {"dataset_root": self.dataset_root, "out_dir": self.out_dir},
            "ingest": {
                "road": self.ingest.road,
                "window_len": self.ingest.window_len,
                "overlap": self.ingest.overlap,
                "train_fraction": self.ingest.train_fraction,
                "seed": self.ingest.seed,
                "normalize": self.ingest.normalize,
                "accelerometer_filename": self.ingest.accelerometer_filename,
                "column_map": dict(self.ingest.column_map),
                "synthetic": self.ingest.synthetic,
            },
            "autoencoder": {
                "hidden1": self.autoencoder.hidden1,
                "hidden2": self.autoencoder.hidden2,
                "epochs": self.autoencoder.epochs,
                "batch_size": self.autoencoder.batch_size,
                "learning_rate": self.autoencoder.learning_rate,
                "beta1": self.autoencoder.beta1,
                "beta2": self.autoencoder.beta2,
                "adam_epsilon": self.autoencoder.adam_epsilon,
                "early_stop_patience": self.autoencoder.early_stop_patience,
                "val_fraction": self.autoencoder.val_fraction,
                "seed": self.autoencoder.seed,
            },
            "cgf": {
                "tau": self.cgf.tau,
                "k_start": self.cgf.k_start,
                "k_max": self.cgf.k_max,
                "linkage": self.cgf.linkage.value,
                "reselect_measure_per_k": self.cgf.reselect_measure_per_k,
            },
            "classifier": self.classifier.to_dict(),
            "mapping": {"method": self.mapping_method.value},
            "train": {"baseline": self.train_baseline, "baseline_only": self.baseline_only},
        }


def load_config(path: str | Path) -> PipelineConfig:
    try:
        data = read_json(path)
    except FileNotFoundError:
        raise
    except ValueError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return PipelineConfig.from_dict(data)


ARTIFACTS = {
    "train_dataset": "train_dataset.zip",
    "test_dataset": "test_dataset.zip",
    "ingest_report": "ingest_report.json",
    "archetypes": "archetypes.json",
    "model": "model.bin",
    "train_report": "train_report.json",
    "aecs_train": "aecs_train.zip",
    "cgf_train": "cgf_train.json",
    "bundle_grouped": "bundle_grouped.zip",
    "bundle_baseline": "bundle_baseline.zip",
    "manifest_train": "manifest_train.json",
    "manifest_ingest": "manifest_ingest.json",
    "manifest_infer": "manifest_infer.json",
    "aecs_test": "aecs_test.zip",
    "cgf_test": "cgf_test.json",
    "mapping_avg": "mapping_avg.json",
    "mapping_cr_cr": "mapping_cr_cr.json",
    "predictions": "predictions.csv",
    "metrics": "metrics.json",
    "infer_report": "infer_report.json",
}


def _artifact(out_dir: str | Path, name: str) -> Path:
    return Path(out_dir) / ARTIFACTS[name]


def _versions() -> dict:
    import sys

    return {
        "package": PACKAGE_VERSION,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": sys.version.split()[0],
    }


def _write_manifest(path: Path, config: PipelineConfig, stage_timings: dict[str, float],
                    files: dict[str, Path]) -> None:
    manifest = {
        "config": config.to_dict(),
        "stage_timings": {k: float(v) for k, v in stage_timings.items()},
        "files": {name: content_digest(p) for name, p in sorted(files.items())},
        "versions": _versions(),
        "seeds": {
            "ingest": config.ingest.seed,
            "autoencoder": config.autoencoder.seed,
            "classifier": config.classifier.seed,
        },
    }
    write_json(path, manifest)


def cmd_ingest(config: PipelineConfig) -> dict:
    """Build canonical train/test dataset archives from corpus or synthesis."""
    out = Path(config.out_dir)
    opts = config.ingest
    timings: dict[str, float] = {}
    files: dict[str, Path] = {}
    with run_lock(out):
        start = time.perf_counter()
        spec = opts.synthetic_spec()
        archetypes = None
        rejected_rows = 0
        n_sessions = 0
        if spec is not None:
            ds, archetypes = generate_synthetic(spec)
        else:
            if config.dataset_root is None:
                raise ConfigError("either paths.dataset_root or ingest.synthetic must be given")
            sessions = discover_sessions(config.dataset_root, opts.columns(),
                                         opts.accelerometer_filename)
            sessions = filter_road(sessions, opts.road)
            if not sessions:
                raise ArtifactError(f"no sessions left after road filter {opts.road!r}")
            rejected_rows = sum(s.rejected_rows for s in sessions)
            n_sessions = len(sessions)
            ds = window_sessions(sessions, opts.window_len, opts.overlap)
        timings["parse"] = time.perf_counter() - start

        start = time.perf_counter()
        train_idx, test_idx = split_indices(ds, opts.train_fraction, opts.seed)
        train_ds = ds.subset(train_idx)
        test_ds = ds.subset(test_idx)
        stats = None
        if opts.normalize:
            stats = fit_normalization(train_ds)
            train_ds = apply_normalization(train_ds, stats)
            test_ds = apply_normalization(test_ds, stats)
        timings["split"] = time.perf_counter() - start

        save_dataset(_artifact(out, "train_dataset"), train_ds, stats)
        save_dataset(_artifact(out, "test_dataset"), test_ds, stats)
        files["train_dataset"] = _artifact(out, "train_dataset")
        files["test_dataset"] = _artifact(out, "test_dataset")
        if archetypes is not None:
            write_json(_artifact(out, "archetypes"), {
                "train": archetypes[train_idx].tolist(),
                "test": archetypes[test_idx].tolist(),
            })
            files["archetypes"] = _artifact(out, "archetypes")

        def class_counts(d: WindowedDataset) -> dict:
            return {name: int((d.labels == i).sum()) for i, name in enumerate(d.class_names)}

        report = {
            "synthetic": spec is not None,
            "n_sessions": n_sessions,
            "rejected_rows": rejected_rows,
            "M_total": ds.n_windows,
            "M_train": train_ds.n_windows,
            "M_test": test_ds.n_windows,
            "t": ds.n_timesteps,
            "d": ds.n_channels,
            "C": ds.n_classes,
            "class_counts_train": class_counts(train_ds),
            "class_counts_test": class_counts(test_ds),
            "normalized": opts.normalize,
        }
        write_json(_artifact(out, "ingest_report"), report)
        files["ingest_report"] = _artifact(out, "ingest_report")
        _write_manifest(_artifact(out, "manifest_ingest"), config, timings, files)
    return report


def cmd_train(config: PipelineConfig) -> dict:
    """Fit the autoencoder, form consistent groups, train per-group models."""
    out = Path(config.out_dir)
    train_path = _artifact(out, "train_dataset")
    if not train_path.is_file():
        raise ArtifactError(f"missing canonical train dataset {train_path}; run ingest first")
    timings: dict[str, float] = {}
    files: dict[str, Path] = {}
    with run_lock(out):
        try:
            ds, _, _, _ = load_dataset(train_path)
        except (ValueError, KeyError) as exc:
            raise ArtifactError(f"corrupt train dataset archive: {exc}") from None

        start = time.perf_counter()
        params, report = ae.fit(ds, config.autoencoder)
        timings["fit_autoencoder"] = time.perf_counter() - start
        ae.save_model(_artifact(out, "model"), params, config.autoencoder, ds.n_channels)
        write_json(_artifact(out, "train_report"), report.to_dict())
        files["model"] = _artifact(out, "model")
        files["train_report"] = _artifact(out, "train_report")

        start = time.perf_counter()
        aecs = ae.transform(params, ds, config.autoencoder)
        timings["transform"] = time.perf_counter() - start
        save_aecs(_artifact(out, "aecs_train"), aecs.vectors, aecs.source_model_id)
        files["aecs_train"] = _artifact(out, "aecs_train")

        summary: dict = {"autoencoder": report.to_dict()}
        if not config.baseline_only:
            start = time.perf_counter()
            cgf_result = form_consistent_groups(aecs, config.cgf)
            timings["cgf"] = time.perf_counter() - start
            payload = cgf_result.to_dict()
            payload["grouping"] = {
                "assignment": cgf_result.grouping.assignment.tolist(),
                "K": cgf_result.grouping.K,
                "measure": cgf_result.grouping.measure,
                "hubert_scores": {k: float(v) for k, v in cgf_result.grouping.hubert_scores.items()},
                "iteration_trace": [[int(a), int(b)] for a, b in cgf_result.grouping.iteration_trace],
            }
            write_json(_artifact(out, "cgf_train"), payload)
            files["cgf_train"] = _artifact(out, "cgf_train")

            start = time.perf_counter()
            bundle = train_per_group(ds, aecs, cgf_result.grouping, config.classifier)
            timings["train_groups"] = time.perf_counter() - start
            save_bundle(_artifact(out, "bundle_grouped"), bundle)
            files["bundle_grouped"] = _artifact(out, "bundle_grouped")
            summary["cgf"] = {"K": cgf_result.grouping.K, "measure": cgf_result.grouping.measure,
                              "stopped_by": cgf_result.stopped_by}
            summary["group_sizes"] = cgf_result.grouping.group_sizes().tolist()
            summary["group_warnings"] = bundle.warnings

        if config.train_baseline or config.baseline_only:
            start = time.perf_counter()
            baseline = train_single_baseline(ds, aecs, config.classifier)
            timings["train_baseline"] = time.perf_counter() - start
            save_bundle(_artifact(out, "bundle_baseline"), baseline)
            files["bundle_baseline"] = _artifact(out, "bundle_baseline")

        _write_manifest(_artifact(out, "manifest_train"), config, timings, files)
        summary["files"] = {k: str(v) for k, v in files.items()}
    return summary


def _write_predictions_csv(path: Path, predictions: np.ndarray, truth: np.ndarray | None,
                           test_assignment: np.ndarray, chosen: list[int]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance_index", "predicted", "true", "test_group", "train_group"])
        for i in range(predictions.size):
            group = int(test_assignment[i])
            writer.writerow([
                i,
                int(predictions[i]),
                "" if truth is None else int(truth[i]),
                group,
                chosen[group],
            ])


def cmd_infer(config: PipelineConfig) -> dict:
    """Group the test set, route groups to models, score the predictions."""
    out = Path(config.out_dir)
    for name in ("test_dataset", "model", "aecs_train"):
        if not _artifact(out, name).is_file():
            raise ArtifactError(f"missing artifact {_artifact(out, name)}; run earlier stages first")
    bundle_name = "bundle_baseline" if config.baseline_only else "bundle_grouped"
    if not _artifact(out, bundle_name).is_file():
        raise ArtifactError(f"missing artifact {_artifact(out, bundle_name)}; run train first")

    timings: dict[str, float] = {}
    files: dict[str, Path] = {}
    with run_lock(out):
        try:
            test_ds, _, has_labels, _ = load_dataset(_artifact(out, "test_dataset"))
            params, model_config, d = ae.load_model(_artifact(out, "model"))
            train_aecs = load_aecs(_artifact(out, "aecs_train"))
            bundle = load_bundle(_artifact(out, bundle_name))
        except (ValueError, KeyError) as exc:
            raise ArtifactError(f"corrupt run artifact: {exc}") from None
        model_digest = ae.model_id(params, model_config, d)
        if bundle.aecs_model_id != model_digest:
            raise ArtifactError("bundle was trained against a different autoencoder model")
        if train_aecs.source_model_id != model_digest:
            raise ArtifactError("stored train representations come from a different model")

        start = time.perf_counter()
        test_aecs = ae.transform(params, test_ds, model_config)
        timings["transform"] = time.perf_counter() - start
        save_aecs(_artifact(out, "aecs_test"), test_aecs.vectors, test_aecs.source_model_id)
        files["aecs_test"] = _artifact(out, "aecs_test")

        start = time.perf_counter()
        test_cgf = form_consistent_groups(test_aecs, config.cgf)
        timings["test_cgf"] = time.perf_counter() - start
        test_grouping = test_cgf.grouping
        write_json(_artifact(out, "cgf_test"), test_cgf.to_dict())
        files["cgf_test"] = _artifact(out, "cgf_test")

        try:
            measure = DistanceMeasureId(bundle.grouping.measure)
        except ValueError:
            measure = MEASURE_ORDER[0]
        ctx = (fit_mahalanobis(train_aecs)
               if measure is DistanceMeasureId.MAHALANOBIS else None)

        start = time.perf_counter()
        results = {}
        for method in (MappingMethod.AVG, MappingMethod.CR_CR):
            pred, mapping_report = infer_with_groups(
                bundle, train_aecs, test_ds, test_aecs, test_grouping,
                method=method, measure=measure, ctx=ctx,
            )
            results[method] = (pred, mapping_report)
        timings["mapping"] = time.perf_counter() - start
        write_json(_artifact(out, "mapping_avg"), results[MappingMethod.AVG][1].to_dict())
        write_json(_artifact(out, "mapping_cr_cr"), results[MappingMethod.CR_CR][1].to_dict())
        files["mapping_avg"] = _artifact(out, "mapping_avg")
        files["mapping_cr_cr"] = _artifact(out, "mapping_cr_cr")

        predictions, mapping_report = results[config.mapping_method]
        truth = test_ds.labels if has_labels else None
        _write_predictions_csv(_artifact(out, "predictions"), predictions, truth,
                               test_grouping.assignment, mapping_report.chosen())
        files["predictions"] = _artifact(out, "predictions")

        report: dict = {
            "mapping_method": config.mapping_method.value,
            "measure": measure.value,
            "test_groups": test_grouping.K,
            "chosen_avg": results[MappingMethod.AVG][1].chosen(),
            "chosen_cr_cr": results[MappingMethod.CR_CR][1].chosen(),
        }
        if has_labels:
            grouped_metrics = evaluate_metrics(predictions, test_ds.labels, test_ds.n_classes)
            write_json(_artifact(out, "metrics"), grouped_metrics.to_dict())
            files["metrics"] = _artifact(out, "metrics")
            report["grouped"] = {
                "accuracy": grouped_metrics.accuracy,
                "f1_macro": grouped_metrics.f1_macro,
                "f1_weighted": grouped_metrics.f1_weighted,
            }
            baseline_path = _artifact(out, "bundle_baseline")
            if baseline_path.is_file() and not config.baseline_only:
                baseline = load_bundle(baseline_path)
                baseline_pred = bundle_predict(baseline, 0, test_ds.windows, test_aecs.vectors)
                baseline_metrics = evaluate_metrics(baseline_pred, test_ds.labels, test_ds.n_classes)
                report["baseline"] = {
                    "accuracy": baseline_metrics.accuracy,
                    "f1_macro": baseline_metrics.f1_macro,
                    "f1_weighted": baseline_metrics.f1_weighted,
                }
                report["delta_f1_macro"] = grouped_metrics.f1_macro - baseline_metrics.f1_macro
        write_json(_artifact(out, "infer_report"), report)
        files["infer_report"] = _artifact(out, "infer_report")
        _write_manifest(_artifact(out, "manifest_infer"), config, timings, files)
    return report


def _pca_2d(x: np.ndarray) -> np.ndarray:
    """Deterministic 2-component projection with a fixed sign convention."""
    centered = x - x.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[: min(2, vt.shape[0])]
    coords = centered @ comps.T
    for i in range(coords.shape[1]):
        pivot = int(np.argmax(np.abs(comps[i])))
        if comps[i, pivot] < 0:
            coords[:, i] = -coords[:, i]
    if coords.shape[1] < 2:
        coords = np.column_stack([coords, np.zeros(coords.shape[0])])
    return coords


def cmd_report(run_dir: str | Path) -> dict:
    """Export composition tables, projection coordinates, and score bars."""
    out = Path(run_dir)
    notices: list[str] = []
    written: dict[str, str] = {}

    def note(msg: str) -> None:
        notices.append(msg)

    cgf_path = _artifact(out, "cgf_train")
    train_path = _artifact(out, "train_dataset")
    aecs_path = _artifact(out, "aecs_train")

    grouping_data = None
    if cgf_path.is_file():
        grouping_data = read_json(cgf_path)
    else:
        note(f"missing {cgf_path}; group-based tables skipped")

    if grouping_data is not None and train_path.is_file():
        ds, _, _, _ = load_dataset(train_path)
        assignment = np.asarray(grouping_data["grouping"]["assignment"], dtype=np.int64)
        counts: dict[tuple[int, str, str], int] = {}
        for i, wm in enumerate(ds.meta):
            key = (int(assignment[i]), wm.driver_id, wm.behavior)
            counts[key] = counts.get(key, 0) + 1
        path = out / "composition_train.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["group", "driver_id", "behavior", "count"])
            for key in sorted(counts):
                writer.writerow([key[0], key[1], key[2], counts[key]])
        written["composition_train"] = str(path)
    elif not train_path.is_file():
        note(f"missing {train_path}; composition table skipped")

    if grouping_data is not None and aecs_path.is_file():
        aecs = load_aecs(aecs_path)
        assignment = np.asarray(grouping_data["grouping"]["assignment"], dtype=np.int64)
        coords = _pca_2d(aecs.vectors)
        path = out / "pca_train.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "pc1", "pc2", "group"])
            for i in range(coords.shape[0]):
                writer.writerow([i, repr(float(coords[i, 0])), repr(float(coords[i, 1])),
                                 int(assignment[i])])
        written["pca_train"] = str(path)
    elif not aecs_path.is_file():
        note(f"missing {aecs_path}; projection export skipped")

    if grouping_data is not None:
        path = out / "hubert_scores.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["measure", "rho", "selected"])
            scores = grouping_data["hubert_scores"]
            for token in scores:
                writer.writerow([token, repr(float(scores[token])),
                                 int(token == grouping_data["measure"])])
        written["hubert_scores"] = str(path)

    mapping_avg = _artifact(out, "mapping_avg")
    mapping_cr = _artifact(out, "mapping_cr_cr")
    if mapping_avg.is_file() and mapping_cr.is_file():
        avg = read_json(mapping_avg)
        crcr = read_json(mapping_cr)
        path = out / "mapping_summary.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["test_group", "size", "chosen_avg", "chosen_cr_cr"])
            for row_a, row_c in zip(avg["rows"], crcr["rows"]):
                writer.writerow([row_a["test_group"], row_a["test_group_size"],
                                 row_a["chosen_train_group"], row_c["chosen_train_group"]])
        written["mapping_summary"] = str(path)
    else:
        note("mapping reports absent; mapping summary skipped")

    test_path = _artifact(out, "test_dataset")
    cgf_test_path = _artifact(out, "cgf_test")
    if test_path.is_file() and cgf_test_path.is_file():
        test_ds, _, _, _ = load_dataset(test_path)
        test_data = read_json(cgf_test_path)
        # cgf_test carries no assignment payload; recover sizes from the trace file.
        sizes = test_data.get("group_sizes", [])
        path = out / "composition_test.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["group", "size"])
            for g, size in enumerate(sizes):
                writer.writerow([g, size])
        written["composition_test"] = str(path)

    summary = {"written": written, "notices": notices}
    write_json(out / "report_summary.json", summary)
    return summary


def cmd_gradcheck(n_seeds: int = 5, epsilon: float = 1e-5, threshold: float = 1e-4) -> dict:
    """Finite-difference audit of the autoencoder gradients on tiny nets."""
    from .rng import derive_seed, seeded_rng

    config = ae.AutoencoderConfig(hidden1=3, hidden2=2, epochs=1, batch_size=1)
    results = []
    for seed in range(n_seeds):
        params = ae.init_params(config, d=2, seed=seed)
        rng = seeded_rng(derive_seed(seed, "gradcheck", "window"))
        window = rng.standard_normal((5, 2))
        worst = ae.gradient_check(params, window, config, epsilon)
        results.append({"seed": seed, "max_relative_error": worst, "ok": bool(worst < threshold)})
    return {
        "threshold": threshold,
        "results": results,
        "ok": all(r["ok"] for r in results),
    }


def cmd_selftest() -> dict:
    """Quick oracle sweep comparing fast paths against naive references."""
    from .distances import chebyshev, cross_distances, manhattan, pairwise_matrix
    from .hierarchy import agglomerate, hubert_statistic
    from .group_mapping import avg_group_distance
    from .reference import (
        naive_agglomerate,
        naive_avg_group_distance,
        naive_chebyshev,
        naive_hubert,
        naive_mahalanobis,
        naive_manhattan,
        naive_pairwise,
    )
    from .distances import mahalanobis
    from .rng import seeded_rng

    suites: dict[str, bool] = {}
    rng = seeded_rng(20_240_001)

    ok = True
    for _ in range(50):
        a = rng.standard_normal(6)
        b = rng.standard_normal(6)
        ok &= abs(chebyshev(a, b) - naive_chebyshev(a, b)) < 1e-10
        ok &= abs(manhattan(a, b) - naive_manhattan(a, b)) < 1e-10
    suites["distance_chebyshev_manhattan"] = bool(ok)

    ok = True
    for _ in range(20):
        x = rng.standard_normal((12, 4))
        ctx = fit_mahalanobis(x)
        a, b = x[0], x[1]
        ok &= abs(mahalanobis(a, b, ctx) - naive_mahalanobis(a, b, ctx)) < 1e-10
    suites["distance_mahalanobis"] = bool(ok)

    ok = True
    for _ in range(10):
        x = rng.standard_normal((10, 3))
        assignment = rng.integers(0, 3, size=10)
        assignment[:3] = [0, 1, 2]
        for measure in (DistanceMeasureId.CHEBYSHEV, DistanceMeasureId.MANHATTAN):
            fast = hubert_statistic(x, assignment, measure)
            ok &= abs(fast - naive_hubert(x, assignment, measure)) < 1e-10
    suites["hubert_statistic"] = bool(ok)

    ok = True
    for _ in range(10):
        a = rng.standard_normal((4, 3))
        b = rng.standard_normal((5, 3))
        for measure in (DistanceMeasureId.CHEBYSHEV, DistanceMeasureId.MANHATTAN):
            fast = avg_group_distance(a, b, measure)
            ok &= abs(fast - naive_avg_group_distance(a, b, measure)) < 1e-10
    suites["avg_group_distance"] = bool(ok)

    ok = True
    for trial in range(10):
        m = 4 + trial % 6
        x = rng.standard_normal((m, 3))
        for linkage in Linkage:
            dist = pairwise_matrix(x, DistanceMeasureId.MANHATTAN)
            fast = agglomerate(dist, linkage)
            ref = naive_agglomerate(dist, linkage)
            ok &= [mm[:2] for mm in fast.merges] == [mm[:2] for mm in ref.merges]
            ok &= all(abs(f[2] - r[2]) < 1e-9 for f, r in zip(fast.merges, ref.merges))
    suites["agglomerate_merge_for_merge"] = bool(ok)

    ok = True
    a = rng.standard_normal((6, 2))
    b = rng.standard_normal((7, 2))
    block = cross_distances(a, b, DistanceMeasureId.MANHATTAN)
    full = naive_pairwise(np.vstack([a, b]), DistanceMeasureId.MANHATTAN)[:6, 6:]
    ok &= bool(np.max(np.abs(block - full)) < 1e-10)
    suites["cross_distances"] = bool(ok)

    return {"suites": suites, "ok": all(suites.values())}
