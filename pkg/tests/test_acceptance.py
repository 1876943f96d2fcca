"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``. The desk-scale dataset
is 40 locations x 3 series types of 8-year synthetic daily records; the
full pipeline over it is shared by several criteria.
"""

import datetime
import itertools
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from hydroscales.clustering import (
    dissimilarity_from_proximity,
    pam,
    silhouette,
    sweep_k,
)
from hydroscales.config import RunConfig
from hydroscales.correlation import acf
from hydroscales.decomposition import stl_decompose, stl_features
from hydroscales.features import FEATURE_NAMES, compute_features
from hydroscales.forest import (
    ContrastDataset,
    gini_importance,
    make_contrast,
    proximity,
    train_forest,
)
from hydroscales.ingest import ingest, read_manifest
from hydroscales.pipeline import read_features_csv, run_pipeline
from hydroscales.series import TimeSeries, aggregate, standardize_values

from conftest import START, ar1, seasonal_daily, write_manifest

EIGHT_YEARS = (datetime.date(2008, 1, 1) - START).days
DESK_TYPES = ["temperature", "precipitation", "streamflow"]

UNIT_INTERVAL = ("trend", "seasonal_strength")
CORRELATION_LIKE = ("x_acf1", "diff1_acf1", "diff2_acf1", "seas_acf1", "seas_pacf", "e_acf1")
TEN_BOUNDED = ("x_acf10", "diff1_acf10", "diff2_acf10", "e_acf10")
FIVE_BOUNDED = ("x_pacf5", "diff1x_pacf5", "diff2x_pacf5")
NON_NEGATIVE = ("lumpiness", "stability", "nonlinearity", "spike", "std1st_der")


@dataclass
class DeskRun:
    root: Path
    manifest: object
    config: RunConfig
    report: object
    elapsed: float


@pytest.fixture(scope="module")
def desk(tmp_path_factory) -> DeskRun:
    root = tmp_path_factory.mktemp("acceptance")
    manifest_path = write_manifest(root, 40, DESK_TYPES, EIGHT_YEARS, seed=2001)
    manifest = read_manifest(manifest_path)
    config = RunConfig(
        n_trees=500, mtry=2, k_fixed=4, k_sweep=tuple(range(2, 11)), seed=73, workers=2
    )
    start = time.time()
    report = run_pipeline(manifest, config, root / "out")
    elapsed = time.time() - start
    return DeskRun(root=root, manifest=manifest, config=config, report=report, elapsed=elapsed)


def _check_ranges(vector) -> None:
    values = vector.as_dict()
    for name in CORRELATION_LIKE:
        assert -1.0 <= values[name] <= 1.0, name
    for name in TEN_BOUNDED:
        assert 0.0 <= values[name] <= 10.0, name
    for name in FIVE_BOUNDED:
        assert 0.0 <= values[name] <= 5.0, name
    for name in UNIT_INTERVAL:
        assert 0.0 <= values[name] <= 1.0, name
    for name in NON_NEGATIVE:
        assert values[name] >= 0.0, name
    assert 0.0 < values["entropy"] <= 1.0
    assert all(np.isfinite(v) for v in values.values())


def test_criterion_1_count_arithmetic_and_runtime(desk):
    assert desk.report.failures == {}
    rows = len(desk.report.feature_matrix.rows)
    assert rows == 40 * 3 * 9 == 1080
    assert rows * 23 == 24_840
    assert 511 * 3 * 9 == 13_797
    assert 13_797 * 23 == 317_331
    written = read_features_csv(desk.root / "out" / "features.csv")
    assert len(written.rows) == rows
    assert desk.elapsed < 300.0
    print(
        f"\nACCEPTANCE 1 PASS: 1080 feature rows = 24840 values "
        f"(reference formula 317331 checks out); runtime {desk.elapsed:.0f}s < 300s"
    )


def test_criterion_2_frequency_table():
    config = RunConfig()
    frequencies = {s.name: s.frequency for s in config.resolution_specs("temperature")}
    assert frequencies == {
        "1-day": 365,
        "2-day": 182,
        "3-day": 121,
        "7-day": 52,
        "0.5-month": 24,
        "1-month": 12,
        "2-month": 6,
        "3-month": 4,
        "6-month": 2,
    }
    assert config.n_trees == 5000 and config.mtry == 2
    assert config.k_fixed == 4 and config.k_sweep == tuple(range(2, 11))
    print("\nACCEPTANCE 2 PASS: default frequency table is 365/182/121/52/24/12/6/4/2")


def _random_series_battery(count: int):
    """Varied seeded generators: noise, AR, random walks, seasonal, skewed."""
    for i in range(count):
        rng = np.random.default_rng([900, i])
        kind = i % 5
        n = 300
        if kind == 0:
            yield rng.normal(size=n)
        elif kind == 1:
            yield ar1(rng.uniform(-0.9, 0.9), n, rng)
        elif kind == 2:
            yield np.cumsum(rng.normal(size=n))
        elif kind == 3:
            amp = rng.uniform(0.5, 3.0)
            yield amp * np.sin(2 * np.pi * np.arange(n) / 12) + rng.normal(size=n)
        else:
            yield rng.lognormal(sigma=1.0, size=n)


def test_criterion_3_range_invariants(desk):
    for row in desk.report.feature_matrix.rows:
        _check_ranges(row.features)
    for values in _random_series_battery(1000):
        _check_ranges(compute_features(values, 12))
    print(
        "\nACCEPTANCE 3 PASS: range invariants hold on all 1080 desk vectors "
        "and 1000 seeded random series"
    )


def test_criterion_4_oracle_equivalence():
    # ACF against the direct double-loop estimator
    for i in range(20):
        rng = np.random.default_rng([901, i])
        v = rng.normal(size=int(rng.integers(40, 150)))
        mean = v.mean()
        denom = float(((v - mean) ** 2).sum())
        direct = np.array(
            [
                sum((v[t] - mean) * (v[t + k] - mean) for t in range(v.size - k)) / denom
                for k in range(1, 11)
            ]
        )
        np.testing.assert_allclose(acf(v, 10), direct, atol=1e-12)

    # spike against the naive O(n^2) leave-one-out recomputation
    for i in range(10):
        rng = np.random.default_rng([902, i])
        v = rng.normal(size=240) + np.sin(2 * np.pi * np.arange(240) / 12)
        d = stl_decompose(v, 12)
        naive = float(
            np.var([np.delete(d.remainder, j).var(ddof=1) for j in range(240)], ddof=1)
        )
        assert stl_features(d, 12)["spike"] == pytest.approx(naive, abs=1e-10)

    # PAM against exhaustive medoid search at n <= 12, k <= 3
    def brute(d, k):
        n = d.shape[0]
        return min(d[:, m].min(axis=1).sum() for m in itertools.combinations(range(n), k))

    for seed in range(8):
        rng = np.random.default_rng([310, seed])
        n_groups = rng.integers(2, 4)
        centers = rng.normal(scale=8.0, size=(n_groups, 3))
        sizes = rng.integers(2, 5, size=n_groups)
        pts = np.vstack([rng.normal(size=(s, 3)) + c for s, c in zip(sizes, centers)])[:12]
        diff = pts[:, None, :] - pts[None, :, :]
        d = np.sqrt((diff**2).sum(axis=2))
        for k in (1, 2, 3):
            assert pam(d, k).objective == pytest.approx(brute(d, k), abs=1e-10)

    # Gini decreases telescope to root minus weighted leaf impurity
    rng = np.random.default_rng([903, 0])
    real = rng.normal(size=(30, 23))
    synth = rng.normal(size=(30, 23))
    real[:, 5] += 1.0
    forest = train_forest(ContrastDataset(real, synth, 0), 50, 2, 0)
    for tree in forest.trees:
        sizes = tree.counts.sum(axis=1)
        leaves = tree.feature < 0
        leaf_term = float((sizes[leaves] * tree.impurity[leaves]).sum()) / tree.n_root
        assert tree.node_decreases().sum() == pytest.approx(
            tree.impurity[0] - leaf_term, abs=1e-10
        )
    print(
        "\nACCEPTANCE 4 PASS: ACF=double-loop@1e-12, spike=naive@1e-10, "
        "PAM=exhaustive (24 frozen instances), Gini telescoping@1e-10"
    )


def test_criterion_5_stl_reconstruction_over_desk_run(desk):
    series_map = ingest(desk.manifest)
    checked = 0
    for (location, series_type), daily in sorted(series_map.items()):
        for spec in desk.config.resolution_specs(series_type):
            derived = aggregate(daily, spec)
            v = standardize_values(derived.values)
            d = stl_decompose(v, spec.frequency)
            assert np.max(np.abs(d.seasonal + d.trend + d.remainder - v)) < 1e-10
            checked += 1
    assert checked == 1080
    print(f"\nACCEPTANCE 5 PASS: additive identity to 1e-10 on all {checked} decompositions")


def _planted_blob_trial(seed: int) -> tuple[bool, float]:
    rng = np.random.default_rng([201, seed])
    a = rng.normal(loc=+1.5, scale=0.5, size=(20, 23))
    b = rng.normal(loc=-1.5, scale=0.5, size=(20, 23))
    x = np.vstack([a, b])
    planted = np.array([0] * 20 + [1] * 20)
    forest = train_forest(make_contrast(x, seed), 250, 2, seed)
    prox = proximity(forest, x)
    within = (prox[:20, :20].sum() - 20 + prox[20:, 20:].sum() - 20) / (2 * 20 * 19)
    between = prox[:20, 20:].mean()
    d = dissimilarity_from_proximity(prox)
    labels = pam(d, 2).assignments
    matched = (labels == planted).all() or (labels == 1 - planted).all()
    _, avg = silhouette(d, labels)
    ok = within > between and matched and sweep_k(d, range(2, 11)).optimal_k == 2
    return ok, avg


def test_criterion_6_planted_structure_recovery():
    start = time.time()
    outcomes = [_planted_blob_trial(seed) for seed in range(100)]
    elapsed = time.time() - start
    wins = sum(ok for ok, _ in outcomes)
    assert wins >= 95
    assert elapsed < 120.0
    print(
        f"\nACCEPTANCE 6 PASS: proximity/PAM/sweep recovered planted blobs in "
        f"{wins}/100 seeds in {elapsed:.0f}s"
    )


def _planted_signal_rank(seed: int, n_trees: int) -> int:
    rng = np.random.default_rng([200, seed])
    real = rng.normal(size=(30, 23))
    synth = rng.normal(size=(30, 23))
    real[:, 7] += 1.5
    synth[:, 7] -= 1.5
    forest = train_forest(ContrastDataset(real, synth, seed), n_trees, 2, seed)
    _, ranks = gini_importance(forest)
    return int(ranks[7])


def test_criterion_7_planted_signal_importance():
    wins = sum(_planted_signal_rank(seed, 500) == 1 for seed in range(100))
    assert wins >= 95
    assert _planted_signal_rank(0, 5000) == 1  # reference-size forest, once
    print(
        f"\nACCEPTANCE 7 PASS: informative feature ranked 1st in {wins}/100 "
        f"seeded 500-tree runs and in the 5000-tree check"
    )


def test_criterion_8_coarser_scales_amplify_seasonality_and_variation():
    seas, sacf, std = 0, 0, 0
    config = RunConfig()
    by_name = {s.name: s for s in config.resolution_specs("temperature")}
    for seed in range(50):
        rng = np.random.default_rng([210, seed])
        doy = np.arange(EIGHT_YEARS)
        values = np.sin(2 * np.pi * doy / 365.25) + rng.normal(scale=1.0, size=EIGHT_YEARS)
        daily = TimeSeries(values, START, "1-day")
        f_day = compute_features(aggregate(daily, by_name["1-day"]), 365)
        f_qtr = compute_features(aggregate(daily, by_name["3-month"]), 4)
        f_half = compute_features(aggregate(daily, by_name["6-month"]), 2)
        seas += f_qtr.seasonal_strength > f_day.seasonal_strength
        sacf += f_qtr.seas_acf1 > f_day.seas_acf1
        std += f_half.std1st_der > f_day.std1st_der
    assert seas >= 45 and sacf >= 45 and std >= 45
    print(
        f"\nACCEPTANCE 8 PASS: seasonal_strength up at 3-month in {seas}/50, "
        f"seas_acf1 up in {sacf}/50, std1st_der up at 6-month in {std}/50"
    )


def test_criterion_9_determinism_across_worker_counts(tmp_path):
    manifest_path = write_manifest(tmp_path, 6, ["temperature", "streamflow"], EIGHT_YEARS, seed=77)
    manifest = read_manifest(manifest_path)
    base = dict(n_trees=500, mtry=2, k_fixed=3, k_sweep=(2, 3, 4, 5), seed=42)
    run_pipeline(manifest, RunConfig(workers=1, **base), tmp_path / "serial")
    run_pipeline(manifest, RunConfig(workers=3, **base), tmp_path / "parallel")
    names = ("features.csv", "clusters.csv", "sweep.csv", "importance.csv",
             "summary.csv", "correlations.csv")
    for name in names:
        assert (tmp_path / "serial" / name).read_bytes() == (
            tmp_path / "parallel" / name
        ).read_bytes(), name
    print("\nACCEPTANCE 9 PASS: byte-identical CSVs with 1 and 3 workers")


def test_criterion_10_silhouette_sanity(desk):
    lines = (desk.root / "out" / "clusters.csv").read_text().splitlines()[1:]
    widths = np.array([float(line.split(",")[5]) for line in lines])
    assert widths.size == 1080
    assert np.all(widths >= -1.0) and np.all(widths <= 1.0)

    _, blob_average = _planted_blob_trial(0)
    assert blob_average > 0.0

    d = np.array(
        [
            [0.0, 2.0, 2.0, 2.0],
            [2.0, 0.0, 2.0, 2.0],
            [2.0, 2.0, 0.0, 2.0],
            [2.0, 2.0, 2.0, 0.0],
        ]
    )
    equidistant, _ = silhouette(d, np.array([0, 0, 1, 1]))
    assert np.all(equidistant == 0.0)
    print(
        "\nACCEPTANCE 10 PASS: all 1080 widths in [-1,1]; planted-blob average "
        f"width {blob_average:.2f} > 0; equidistant construction gives exactly 0"
    )
