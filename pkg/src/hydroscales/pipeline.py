"""Batch orchestration: features for every (location, type, resolution),
per-slice forests and clustering, and the tabular outputs.

Every randomised step draws its seed deterministically from the config
seed and the slice identity, and every output table is sorted, so two runs
with the same manifest, config and seed produce byte-identical files
regardless of the worker count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import (
    ClusterResult,
    SweepResult,
    dissimilarity_from_proximity,
    pam,
    silhouette,
    sweep_k,
)
from .config import RunConfig
from .errors import HydroscalesError
from .features import (
    FEATURE_NAMES,
    FeatureMatrix,
    FeatureRow,
    FeatureVector,
    compute_features,
    feature_correlations,
    summarize_means,
)
from .forest import gini_importance, make_contrast, proximity, train_forest
from .ingest import DatasetManifest, ingest
from .series import TimeSeries, aggregate

OUTPUT_FILES = (
    "features.csv",
    "clusters.csv",
    "sweep.csv",
    "importance.csv",
    "summary.csv",
    "correlations.csv",
    "run_metadata.json",
)


@dataclass
class SliceAnalysis:
    """Forest-based products of one (series_type, resolution) slice."""

    series_type: str
    resolution: str
    location_ids: list[str]
    fixed: ClusterResult
    sweep: SweepResult
    importances: np.ndarray
    importance_ranks: np.ndarray
    correlations: np.ndarray


@dataclass
class RunReport:
    """What a pipeline run produced and what failed."""

    out_dir: Path
    feature_matrix: FeatureMatrix
    failures: dict[tuple[str, str], str] = field(default_factory=dict)
    written: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0


def _feature_job(args):
    """Aggregate one daily record to every resolution and featurise each.

    Runs inside worker processes; returns per-resolution vectors and error
    messages keyed by resolution name.
    """
    location_id, series_type, values, start_date, specs = args
    daily = TimeSeries(values, start_date, "1-day")
    vectors: dict[str, FeatureVector] = {}
    errors: dict[str, str] = {}
    for spec in specs:
        try:
            derived = aggregate(daily, spec)
            vectors[spec.name] = compute_features(derived, spec.frequency)
        except HydroscalesError as exc:
            errors[spec.name] = f"{exc.__class__.__name__}: {exc}"
    return location_id, series_type, vectors, errors


def extract_features(
    series_map: dict[tuple[str, str], TimeSeries], config: RunConfig
) -> tuple[FeatureMatrix, dict[tuple[str, str], str]]:
    """Compute the feature matrix for every series at every resolution.

    A failure for any location aborts its whole (series_type, resolution)
    slice: partial slices cannot be clustered and are excluded from every
    output. Returns the surviving rows and the per-slice failure reasons.
    """
    jobs = [
        (loc, stype, series.values, series.start_date, config.resolution_specs(stype))
        for (loc, stype), series in sorted(series_map.items())
    ]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_feature_job, jobs))
    else:
        results = [_feature_job(job) for job in jobs]

    failures: dict[tuple[str, str], str] = {}
    rows: list[FeatureRow] = []
    for location_id, series_type, vectors, errors in sorted(results, key=lambda r: (r[1], r[0])):
        for resolution, message in errors.items():
            failures.setdefault((series_type, resolution), f"{location_id}: {message}")
    for location_id, series_type, vectors, _errors in results:
        for resolution, vector in vectors.items():
            if (series_type, resolution) not in failures:
                rows.append(FeatureRow(location_id, series_type, resolution, vector))
    return FeatureMatrix(rows).sorted(), failures


def _slice_seed_pairs(config: RunConfig, slices: list[tuple[str, str]]) -> dict:
    """Deterministic (contrast, forest) integer seeds per slice identity."""
    children = np.random.SeedSequence(config.seed).spawn(len(slices))
    out = {}
    for key, child in zip(slices, children):
        contrast_ss, forest_ss = child.spawn(2)
        out[key] = (
            int(contrast_ss.generate_state(1)[0]),
            int(forest_ss.generate_state(1)[0]),
        )
    return out


def analyze_slices(
    matrix: FeatureMatrix,
    config: RunConfig,
    failures: dict[tuple[str, str], str] | None = None,
) -> tuple[list[SliceAnalysis], dict[tuple[str, str], str]]:
    """Forest, proximity, clustering and importances per surviving slice."""
    failures = dict(failures or {})
    all_slices = sorted(
        {(r.series_type, r.resolution) for r in matrix.rows} | set(failures)
    )
    seeds = _slice_seed_pairs(config, all_slices)
    analyses: list[SliceAnalysis] = []
    for key in all_slices:
        if key in failures:
            continue
        series_type, resolution = key
        slice_matrix = matrix.slice(series_type, resolution).sorted()
        contrast_seed, forest_seed = seeds[key]
        try:
            x = slice_matrix.to_array()
            forest = train_forest(
                make_contrast(x, contrast_seed), config.n_trees, config.mtry, forest_seed
            )
            prox = proximity(forest, x, oob_only=config.proximity_oob)
            d = dissimilarity_from_proximity(prox)
            fixed = pam(d, config.k_fixed)
            widths, avg = silhouette(d, fixed.assignments)
            fixed = ClusterResult(
                k=fixed.k,
                assignments=fixed.assignments,
                medoids=fixed.medoids,
                objective=fixed.objective,
                silhouette_widths=widths,
                average_width=avg,
                objective_trace=fixed.objective_trace,
            )
            sweep = sweep_k(d, config.k_sweep)
            importances, ranks = gini_importance(forest)
            correlations = feature_correlations(matrix, series_type, resolution)
        except HydroscalesError as exc:
            failures[key] = f"{exc.__class__.__name__}: {exc}"
            continue
        analyses.append(
            SliceAnalysis(
                series_type=series_type,
                resolution=resolution,
                location_ids=[r.location_id for r in slice_matrix.rows],
                fixed=fixed,
                sweep=sweep,
                importances=importances,
                importance_ranks=ranks,
                correlations=correlations,
            )
        )
    return analyses, failures


# -- output writing ----------------------------------------------------------

def _fmt(x) -> str:
    """Shortest decimal that round-trips to the same binary float."""
    return repr(float(x))


def _write_atomic(path: Path, lines: list[str]) -> None:
    tmp = path.with_name(f"{path.name}.tmp.{os.getpid()}")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        if lines:
            fh.write("\n")
    os.replace(tmp, path)


def write_features_csv(path: Path, matrix: FeatureMatrix) -> None:
    lines = ["location_id,series_type,resolution," + ",".join(FEATURE_NAMES)]
    for row in matrix.sorted().rows:
        values = ",".join(_fmt(v) for v in row.features.as_array())
        lines.append(f"{row.location_id},{row.series_type},{row.resolution},{values}")
    _write_atomic(path, lines)


def read_features_csv(path) -> FeatureMatrix:
    """Read a features table back into a matrix (for the cluster verb)."""
    from .errors import ParseError

    path = Path(path)
    rows: list[FeatureRow] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        expected = "location_id,series_type,resolution," + ",".join(FEATURE_NAMES)
        if header != expected:
            raise ParseError(str(path), 1, "unexpected features.csv header")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3 + len(FEATURE_NAMES):
                raise ParseError(str(path), lineno, f"expected {3 + len(FEATURE_NAMES)} fields")
            try:
                vector = FeatureVector.from_dict(
                    dict(zip(FEATURE_NAMES, (float(v) for v in parts[3:])))
                )
            except ValueError:
                raise ParseError(str(path), lineno, "invalid feature value") from None
            rows.append(FeatureRow(parts[0], parts[1], parts[2], vector))
    return FeatureMatrix(rows).sorted()


def write_clusters_csv(path: Path, analyses: list[SliceAnalysis]) -> None:
    lines = ["location_id,series_type,resolution,k,cluster_id,silhouette_width"]
    for a in analyses:
        for i, loc in enumerate(a.location_ids):
            lines.append(
                f"{loc},{a.series_type},{a.resolution},{a.fixed.k},"
                f"{a.fixed.assignments[i]},{_fmt(a.fixed.silhouette_widths[i])}"
            )
    _write_atomic(path, lines)


def write_sweep_csv(path: Path, analyses: list[SliceAnalysis]) -> None:
    lines = ["series_type,resolution,k,average_width,rank"]
    for a in analyses:
        for entry in a.sweep.entries:
            lines.append(
                f"{a.series_type},{a.resolution},{entry.k},"
                f"{_fmt(entry.average_width)},{a.sweep.ranks[entry.k]}"
            )
    _write_atomic(path, lines)


def write_importance_csv(path: Path, analyses: list[SliceAnalysis]) -> None:
    lines = ["series_type,resolution,feature,importance,rank"]
    for a in analyses:
        for i, name in enumerate(FEATURE_NAMES):
            lines.append(
                f"{a.series_type},{a.resolution},{name},"
                f"{_fmt(a.importances[i])},{a.importance_ranks[i]}"
            )
    _write_atomic(path, lines)


def write_summary_csv(path: Path, matrix: FeatureMatrix) -> None:
    lines = ["series_type,feature,resolution,mean,rank"]
    if matrix.rows:
        for record in summarize_means(matrix):
            lines.append(
                f"{record['series_type']},{record['feature']},{record['resolution']},"
                f"{_fmt(record['mean'])},{record['rank']}"
            )
    _write_atomic(path, lines)


def write_correlations_csv(path: Path, analyses: list[SliceAnalysis]) -> None:
    lines = ["series_type,resolution,feature_a,feature_b,pearson"]
    for a in analyses:
        for i, fa in enumerate(FEATURE_NAMES):
            for j, fb in enumerate(FEATURE_NAMES):
                lines.append(
                    f"{a.series_type},{a.resolution},{fa},{fb},{_fmt(a.correlations[i, j])}"
                )
    _write_atomic(path, lines)


def write_metadata(
    path: Path,
    config: RunConfig,
    manifest: DatasetManifest | None,
    matrix: FeatureMatrix,
    failures: dict[tuple[str, str], str],
    written: list[str],
) -> None:
    payload = {
        "version": __version__,
        "seed": config.seed,
        "config": config.as_mapping(),
        "manifest_entries": len(manifest.entries) if manifest is not None else None,
        "feature_rows": len(matrix.rows),
        "completed_slices": sorted(
            f"{t}/{r}" for (t, r) in {(row.series_type, row.resolution) for row in matrix.rows}
        ),
        "failed_slices": {f"{t}/{r}": msg for (t, r), msg in sorted(failures.items())},
        "outputs": written,
    }
    _write_atomic(path, [json.dumps(payload, indent=2, sort_keys=True)])


# -- entry points ------------------------------------------------------------

def _correlation_rows(matrix: FeatureMatrix, failures: dict) -> list:
    """Per-slice correlation matrices; failing slices move into ``failures``."""
    rows = []
    for key in sorted({(r.series_type, r.resolution) for r in matrix.rows}):
        try:
            rows.append((key[0], key[1], feature_correlations(matrix, key[0], key[1])))
        except HydroscalesError as exc:
            failures[key] = f"{exc.__class__.__name__}: {exc}"
    return rows


def _drop_failed(matrix: FeatureMatrix, failures: dict) -> FeatureMatrix:
    return FeatureMatrix(
        [r for r in matrix.rows if (r.series_type, r.resolution) not in failures]
    ).sorted()


def _write_correlations_only(path: Path, rows) -> None:
    lines = ["series_type,resolution,feature_a,feature_b,pearson"]
    for series_type, resolution, corr in rows:
        for i, fa in enumerate(FEATURE_NAMES):
            for j, fb in enumerate(FEATURE_NAMES):
                lines.append(f"{series_type},{resolution},{fa},{fb},{_fmt(corr[i, j])}")
    _write_atomic(path, lines)


def run_features(
    manifest: DatasetManifest, config: RunConfig, out_dir
) -> RunReport:
    """Extraction stage: features.csv plus the feature-level summaries."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    series_map = ingest(manifest)
    matrix, failures = extract_features(series_map, config)
    correlation_rows = _correlation_rows(matrix, failures)
    matrix = _drop_failed(matrix, failures)
    write_features_csv(out / "features.csv", matrix)
    write_summary_csv(out / "summary.csv", matrix)
    _write_correlations_only(out / "correlations.csv", correlation_rows)
    written = ["features.csv", "summary.csv", "correlations.csv", "run_metadata.json"]
    write_metadata(out / "run_metadata.json", config, manifest, matrix, failures, written)
    return RunReport(out_dir=out, feature_matrix=matrix, failures=failures, written=written)


def run_clustering(
    matrix: FeatureMatrix, config: RunConfig, out_dir
) -> RunReport:
    """Clustering stage from an existing feature matrix."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    analyses, failures = analyze_slices(matrix, config)
    written = ["clusters.csv", "sweep.csv", "importance.csv", "run_metadata.json"]
    write_clusters_csv(out / "clusters.csv", analyses)
    write_sweep_csv(out / "sweep.csv", analyses)
    write_importance_csv(out / "importance.csv", analyses)
    write_metadata(out / "run_metadata.json", config, None, matrix, failures, written)
    return RunReport(out_dir=out, feature_matrix=matrix, failures=failures, written=written)


def run_pipeline(
    manifest: DatasetManifest, config: RunConfig, out_dir
) -> RunReport:
    """The full batch run: ingest, featurise, cluster, write all tables."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    series_map = ingest(manifest)
    matrix, failures = extract_features(series_map, config)
    analyses, failures = analyze_slices(matrix, config, failures)
    completed = {(a.series_type, a.resolution) for a in analyses}
    surviving = FeatureMatrix(
        [r for r in matrix.rows if (r.series_type, r.resolution) in completed]
    ).sorted()
    write_features_csv(out / "features.csv", surviving)
    write_clusters_csv(out / "clusters.csv", analyses)
    write_sweep_csv(out / "sweep.csv", analyses)
    write_importance_csv(out / "importance.csv", analyses)
    write_summary_csv(out / "summary.csv", surviving)
    write_correlations_csv(out / "correlations.csv", analyses)
    written = list(OUTPUT_FILES)
    write_metadata(out / "run_metadata.json", config, manifest, surviving, failures, written)
    return RunReport(out_dir=out, feature_matrix=surviving, failures=failures, written=written)
