"""Datasets, validation protocols and evaluation reports."""
import csv
import json
import logging
import os
from collections import defaultdict
from concurrent import futures
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from marshmallow import ValidationError

from srqa.core.constants import (DEFAULT_FOLDS, DEFAULT_IMAGE_HOLDOUT, DEFAULT_METHOD_HOLDOUT, DEFAULT_REPETITIONS,
                                 DEFAULT_TREES, PROTOCOLS, MANIFEST_HEADER, RATINGS_HEADER, CASE_COUNT, FEATURE_BLOCKS)
from srqa.core.imgcore import load_image
from srqa.core.features import extract_features
from srqa.core.regress import ForestParams, train_two_stage, predict_quality_batch, clamp_score
from srqa.core.schemas import ManifestRowSchema, RatingRowSchema, EvaluationReportSchema
from srqa.core.stats import spearman, rmse, aggregate_perceptual
from srqa.errors import ManifestError, SplitError, SrqaError, StatsError

logger = logging.getLogger(__name__)

# csv data rows start on line 2
FIRST_DATA_ROW = 2


@dataclass(frozen=True)
class ManifestEntry:
    image_path: str
    ref_id: str
    method: str
    s: int
    sigma: float
    score: float


@dataclass(frozen=True)
class Split:
    train: Tuple[int, ...]
    test: Tuple[int, ...]
    label: str = ""


@dataclass
class EvaluationReport:
    protocol: str
    kind: str
    split_descriptor: str
    splits: int
    repetitions: int
    seed: int
    overall_spearman: Optional[float]
    rmse: float
    per_method: List[Dict] = field(default_factory=list)
    family_rmse: Dict[str, float] = field(default_factory=dict)
    best_cases: List[Dict] = field(default_factory=list)
    worst_cases: List[Dict] = field(default_factory=list)
    predictions: List[Dict] = field(default_factory=list)

    def method_spearman(self, method: str) -> Optional[float]:
        for row in self.per_method:
            if row["method"] == method:
                return row["spearman"]
        raise KeyError(method)


def _read_rows(path, header: Sequence[str], schema):
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or set(reader.fieldnames) != set(header):
                raise ManifestError(f"{path}: expected header {','.join(header)}, got {reader.fieldnames}")
            rows, errors = [], []
            for number, row in enumerate(reader, start=FIRST_DATA_ROW):
                try:
                    rows.append((number, schema.load(row)))
                except ValidationError as error:
                    errors.append((number, error.messages))
    except OSError as error:
        raise ManifestError(f"unreadable file: {path}") from error
    if errors:
        detail = "; ".join(f"row {number}: {messages}" for number, messages in errors)
        raise ManifestError(f"{path}: invalid rows: {detail}", rows=[number for number, _ in errors])
    return rows


def _resolve(base_dir: str, image_path: str) -> str:
    return image_path if os.path.isabs(image_path) else os.path.normpath(os.path.join(base_dir, image_path))


def load_manifest(path, check_files: bool = True) -> List[ManifestEntry]:
    """Validated manifest entries with image paths resolved against the manifest's directory."""
    base_dir = os.path.dirname(os.path.abspath(path))
    rows = _read_rows(path, MANIFEST_HEADER, ManifestRowSchema())

    entries, seen, duplicates, missing = [], {}, [], []
    for number, row in rows:
        key = (row["ref_id"], row["method"], row["s"])
        if key in seen:
            duplicates.append((number, seen[key], key))
            continue
        seen[key] = number
        entry = ManifestEntry(image_path=_resolve(base_dir, row["image_path"]), ref_id=row["ref_id"],
                              method=row["method"], s=row["s"], sigma=row["sigma"], score=row["score"])
        if check_files and not os.path.isfile(entry.image_path):
            missing.append((number, entry.image_path))
        entries.append(entry)

    if duplicates:
        detail = "; ".join(f"row {number} repeats row {first} {key}" for number, first, key in duplicates)
        raise ManifestError(f"{path}: duplicate (ref_id, method, s): {detail}",
                            rows=[number for number, _, _ in duplicates])
    if missing:
        detail = "; ".join(f"row {number}: {image}" for number, image in missing)
        raise ManifestError(f"{path}: missing image files: {detail}", rows=[number for number, _ in missing])
    logger.info(f"Loaded {len(entries)} entries from {path}")
    return entries


def write_manifest(entries: Sequence[ManifestEntry], path) -> None:
    base_dir = os.path.dirname(os.path.abspath(path))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(MANIFEST_HEADER)
        for entry in entries:
            image_path = entry.image_path
            if os.path.isabs(image_path):
                image_path = os.path.relpath(image_path, base_dir)
            writer.writerow([image_path, entry.ref_id, entry.method, entry.s, repr(float(entry.sigma)),
                             repr(float(entry.score))])


def aggregate_ratings(path) -> List[ManifestEntry]:
    """One manifest entry per rated image, scored by the trimmed mean of its ratings.

    Relative image paths are resolved against the ratings file's directory.
    """
    rows = _read_rows(path, RATINGS_HEADER, RatingRowSchema())
    base_dir = os.path.dirname(os.path.abspath(path))
    groups = defaultdict(list)
    for _, row in rows:
        key = (_resolve(base_dir, row["image_path"]), row["ref_id"], row["method"], row["s"], row["sigma"])
        groups[key].append(row["rating"])
    entries = []
    for (image_path, ref_id, method, s, sigma), ratings in groups.items():
        try:
            score = aggregate_perceptual(ratings)
        except StatsError as error:
            raise ManifestError(f"{path}: {image_path}: {error}") from error
        entries.append(ManifestEntry(image_path=image_path, ref_id=ref_id, method=method, s=s, sigma=sigma,
                                     score=score))
    logger.info(f"Aggregated {len(rows)} ratings into {len(entries)} scores")
    return entries


def kfold_split(entries: Sequence, k: int = DEFAULT_FOLDS, seed=0) -> List[Split]:
    if k < 2:
        raise SplitError(f"k must be >= 2, got {k}")
    if k > len(entries):
        raise SplitError(f"k={k} exceeds the {len(entries)} entries")
    order = np.random.default_rng(seed).permutation(len(entries))
    everything = set(range(len(entries)))
    splits = []
    for index, fold in enumerate(np.array_split(order, k)):
        test = tuple(sorted(int(i) for i in fold))
        splits.append(Split(train=tuple(sorted(everything - set(test))), test=test, label=f"fold {index + 1}/{k}"))
    return splits


def _group_split(entries: Sequence, attribute: str, holdout: int, seed) -> List[Split]:
    labels = sorted({getattr(entry, attribute) for entry in entries})
    if holdout < 1 or holdout >= len(labels):
        raise SplitError(f"holdout {holdout} must be between 1 and the {len(labels)} distinct {attribute} values - 1")
    shuffled = [labels[i] for i in np.random.default_rng(seed).permutation(len(labels))]
    splits = []
    for start in range(0, len(shuffled), holdout):
        group = set(shuffled[start:start + holdout])
        test = tuple(i for i, entry in enumerate(entries) if getattr(entry, attribute) in group)
        train = tuple(i for i, entry in enumerate(entries) if getattr(entry, attribute) not in group)
        splits.append(Split(train=train, test=test, label=f"{attribute} out: {','.join(sorted(group))}"))
    return splits


def leave_image_out_split(entries: Sequence, holdout: int = DEFAULT_IMAGE_HOLDOUT, seed=0) -> List[Split]:
    return _group_split(entries, "ref_id", holdout, seed)


def leave_method_out_split(entries: Sequence, holdout: int = DEFAULT_METHOD_HOLDOUT, seed=0) -> List[Split]:
    return _group_split(entries, "method", holdout, seed)


def make_splits(entries: Sequence, protocol: str, folds: int = DEFAULT_FOLDS,
                image_holdout: int = DEFAULT_IMAGE_HOLDOUT, method_holdout: int = DEFAULT_METHOD_HOLDOUT,
                seed=0) -> Tuple[List[Split], str]:
    if protocol == "5fold":
        return kfold_split(entries, DEFAULT_FOLDS, seed), f"{DEFAULT_FOLDS}-fold"
    if protocol == "kfold":
        return kfold_split(entries, folds, seed), f"{folds}-fold"
    if protocol == "leave-image-out":
        return leave_image_out_split(entries, image_holdout, seed), f"leave {image_holdout} images out"
    if protocol == "leave-method-out":
        return leave_method_out_split(entries, method_holdout, seed), f"leave {method_holdout} methods out"
    raise SplitError(f"unknown protocol {protocol}; expected one of {', '.join(PROTOCOLS)}")


def extract_entry_features(entry: ManifestEntry) -> np.ndarray:
    return extract_features(load_image(entry.image_path)).as_array()


def feature_matrix(entries: Sequence[ManifestEntry], extractor: Callable = None) -> np.ndarray:
    extractor = extractor or extract_entry_features
    rows = []
    for entry in entries:
        try:
            rows.append(np.asarray(extractor(entry), dtype=np.float64))
        except SrqaError as error:
            raise type(error)(f"{entry.image_path}: {error}") from error
    return np.vstack(rows)


def _default_trainer(trees: int, params: ForestParams, kind: str, threads: int):
    def trainer(X, y, seed):
        return train_two_stage(X, y, trees=trees, params=params, seed=seed, kind=kind, threads=threads)
    return trainer


def _default_predictor(model, X):
    return predict_quality_batch(model, X)


def _run_default_job(X_train, y_train, X_test, seed, trees, params, kind):
    model = train_two_stage(X_train, y_train, trees=trees, params=params, seed=seed, kind=kind, threads=1)
    return predict_quality_batch(model, X_test)


def _safe_spearman(predicted, truth) -> Optional[float]:
    try:
        return spearman(predicted, truth)
    except StatsError:
        return None


def _case(entry: ManifestEntry, predicted: float) -> Dict:
    return {"image_path": entry.image_path, "method": entry.method, "predicted": predicted,
            "perceptual": entry.score}


def run_protocol(entries: Sequence[ManifestEntry], protocol: str = "5fold", *, folds: int = DEFAULT_FOLDS,
                 image_holdout: int = DEFAULT_IMAGE_HOLDOUT, method_holdout: int = DEFAULT_METHOD_HOLDOUT,
                 trees: int = DEFAULT_TREES, params: ForestParams = None, repetitions: int = DEFAULT_REPETITIONS,
                 seed: int = 0, kind: str = "two_stage", threads: int = 1, extractor: Callable = None,
                 trainer: Callable = None, predictor: Callable = None) -> EvaluationReport:
    """Train and test over every split, ``repetitions`` times.

    Splits are drawn once from ``seed``; repetitions only reseed the forests.
    ``trainer(X, y, seed) -> model`` and ``predictor(model, X) -> (raw, per_forest)``
    replace the forest model when given.
    """
    if repetitions < 1:
        raise SplitError(f"repetitions must be >= 1, got {repetitions}")
    params = params or ForestParams()
    splits, descriptor = make_splits(entries, protocol, folds, image_holdout, method_holdout, seed)
    X = feature_matrix(entries, extractor)
    y = np.array([entry.score for entry in entries])

    jobs = []
    for repetition, repetition_seed in enumerate(np.random.SeedSequence(seed).spawn(repetitions)):
        for split, split_seed in zip(splits, repetition_seed.spawn(len(splits))):
            jobs.append((repetition, split, split_seed))

    outcomes = [None] * len(jobs)
    if trainer is None and predictor is None and threads > 1:
        with futures.ProcessPoolExecutor(max_workers=threads) as pool:
            pending = {pool.submit(_run_default_job, X[list(split.train)], y[list(split.train)],
                                   X[list(split.test)], split_seed, trees, params, kind): index
                       for index, (_, split, split_seed) in enumerate(jobs)}
            for done in futures.as_completed(pending):
                outcomes[pending[done]] = done.result()
    else:
        trainer = trainer or _default_trainer(trees, params, kind, threads)
        predictor = predictor or _default_predictor
        for index, (repetition, split, split_seed) in enumerate(jobs):
            model = trainer(X[list(split.train)], y[list(split.train)], split_seed)
            outcomes[index] = predictor(model, X[list(split.test)])
            logger.info(f"Repetition {repetition + 1}/{repetitions}, {split.label}: {len(split.test)} tested")

    raw_sum = np.zeros(len(entries))
    counts = np.zeros(len(entries), dtype=np.int64)
    family_sum = None
    for (_, split, _), (raw, per_forest) in zip(jobs, outcomes):
        test = list(split.test)
        raw_sum[test] += raw
        counts[test] += 1
        if per_forest is not None and np.ndim(per_forest) == 2 and np.shape(per_forest)[1] == len(FEATURE_BLOCKS):
            family_sum = np.zeros((len(entries), len(FEATURE_BLOCKS))) if family_sum is None else family_sum
            family_sum[test] += per_forest

    tested = counts > 0
    raw_mean = np.where(tested, raw_sum / np.maximum(counts, 1), np.nan)
    predicted = clamp_score(raw_mean)
    return _build_report(entries, tested, raw_mean, predicted, y, family_sum, counts, protocol, kind, descriptor,
                         len(splits), repetitions, seed)


def _build_report(entries, tested, raw_mean, predicted, y, family_sum, counts, protocol, kind, descriptor,
                  split_count, repetitions, seed) -> EvaluationReport:
    index = np.flatnonzero(tested)
    per_method = []
    for method in sorted({entries[i].method for i in index}):
        members = [i for i in index if entries[i].method == method]
        per_method.append({"method": method, "count": len(members),
                           "spearman": _safe_spearman(raw_mean[members], y[members])})

    family_rmse = {}
    if kind == "two_stage" and family_sum is not None:
        family_mean = family_sum[index] / counts[index, np.newaxis]
        family_rmse = {block: rmse(family_mean[:, column], y[index])
                       for column, block in enumerate(FEATURE_BLOCKS)}

    errors = np.abs(predicted[index] - y[index])
    order = index[np.argsort(errors, kind="mergesort")]
    cases = min(CASE_COUNT, len(order))
    predictions = [{"image_path": entries[i].image_path, "ref_id": entries[i].ref_id, "method": entries[i].method,
                    "s": entries[i].s, "score": entries[i].score, "raw": float(raw_mean[i]),
                    "predicted": float(predicted[i])} for i in index]

    overall = _safe_spearman(raw_mean[index], y[index])
    report = EvaluationReport(
        protocol=protocol, kind=kind, split_descriptor=descriptor, splits=split_count, repetitions=repetitions,
        seed=int(seed), overall_spearman=overall, rmse=rmse(predicted[index], y[index]), per_method=per_method,
        family_rmse=family_rmse,
        best_cases=[_case(entries[i], float(predicted[i])) for i in order[:cases]],
        worst_cases=[_case(entries[i], float(predicted[i])) for i in order[::-1][:cases]],
        predictions=predictions)
    logger.info(f"{descriptor}: overall spearman {overall}, rmse {report.rmse:.4f}")
    return report


def _format_rho(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.3f}"


def format_report(report: EvaluationReport) -> str:
    width = max([len("Overall")] + [len(row["method"]) for row in report.per_method])
    lines = [f"{report.split_descriptor}, {report.splits} splits x {report.repetitions} repetitions ({report.kind})",
             f"{'Method'.ljust(width)}  {'N':>5}  {'SROCC':>6}"]
    for row in report.per_method:
        lines.append(f"{row['method'].ljust(width)}  {row['count']:>5}  {_format_rho(row['spearman']):>6}")
    lines.append(f"{'Overall'.ljust(width)}  {len(report.predictions):>5}  {_format_rho(report.overall_spearman):>6}")
    lines.append(f"RMSE {report.rmse:.3f}")
    for block, value in report.family_rmse.items():
        lines.append(f"RMSE ({block} forest) {value:.3f}")
    return "\n".join(lines)


def write_report(report: EvaluationReport, out_dir) -> Dict[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = {name: os.path.join(out_dir, name) for name in ("report.json", "report.csv", "predictions.csv")}

    with open(paths["report.json"], "w", encoding="utf-8") as handle:
        json.dump(EvaluationReportSchema().dump(report), handle, indent=2, sort_keys=True)

    with open(paths["report.csv"], "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["method", "count", "spearman"])
        for row in report.per_method:
            writer.writerow([row["method"], row["count"], "" if row["spearman"] is None else row["spearman"]])
        writer.writerow(["overall", len(report.predictions),
                         "" if report.overall_spearman is None else report.overall_spearman])

    with open(paths["predictions.csv"], "w", newline="", encoding="utf-8") as handle:
        columns = ["image_path", "ref_id", "method", "s", "score", "raw", "predicted"]
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        writer.writerows(report.predictions)
    return paths
