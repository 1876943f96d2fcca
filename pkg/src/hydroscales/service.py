"""HTTP service exposing feature extraction and clustering.

Wraps the library behind a small JSON API so multiple clients can
featurise series or cluster feature rows without touching the batch CLI.
Batch runs over manifests stay on the command line; the service works on
payloads posted inline.
"""

from __future__ import annotations

import datetime

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .clustering import dissimilarity_from_proximity, pam, silhouette, sweep_k
from .config import DEFAULT_K_SWEEP
from .errors import HydroscalesError
from .features import FEATURE_NAMES, compute_features
from .forest import gini_importance, make_contrast, proximity, train_forest
from .series import DEFAULT_FREQUENCIES, TimeSeries, default_resolutions, derive_resolutions

import numpy as np

app = FastAPI(title="hydroscales", version=__version__)


class ResolutionInfo(BaseModel):
    name: str
    frequency: int
    rule: str


class FeatureRequest(BaseModel):
    values: list[float] = Field(min_length=4)
    frequency: int = Field(ge=2)


class FeatureResponse(BaseModel):
    frequency: int
    features: dict[str, float]


class MultiscaleRequest(BaseModel):
    values: list[float] = Field(min_length=4)
    start_date: datetime.date
    statistic: str = "mean"
    resolutions: list[str] | None = None


class MultiscaleResponse(BaseModel):
    results: dict[str, FeatureResponse]


class ClusterRequest(BaseModel):
    rows: list[list[float]]
    ids: list[str] | None = None
    n_trees: int = Field(default=500, ge=1)
    mtry: int = Field(default=2, ge=1)
    k: int = Field(default=4, ge=2)
    seed: int = Field(default=0, ge=0)
    sweep: bool = False


class SweepPoint(BaseModel):
    k: int
    average_width: float
    rank: int


class ClusterResponse(BaseModel):
    ids: list[str]
    assignments: list[int]
    medoids: list[str]
    silhouette_widths: list[float]
    average_width: float
    importance: dict[str, float]
    importance_rank: dict[str, int]
    sweep: list[SweepPoint] | None = None
    optimal_k: int | None = None


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/resolutions", response_model=list[ResolutionInfo])
def resolutions() -> list[ResolutionInfo]:
    return [
        ResolutionInfo(name=spec.name, frequency=spec.frequency, rule=repr(spec.rule))
        for spec in default_resolutions()
    ]


@app.post("/features", response_model=FeatureResponse)
def features(request: FeatureRequest) -> FeatureResponse:
    """The 23 features of one series at one seasonal frequency."""
    try:
        vector = compute_features(np.asarray(request.values, dtype=float), request.frequency)
    except HydroscalesError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return FeatureResponse(frequency=request.frequency, features=vector.as_dict())


@app.post("/features/multiscale", response_model=MultiscaleResponse)
def features_multiscale(request: MultiscaleRequest) -> MultiscaleResponse:
    """Aggregate a daily series to the standard resolutions and featurise
    each; the per-resolution errors are reported, not fatal."""
    if request.statistic not in ("sum", "mean"):
        raise HTTPException(status_code=422, detail="statistic must be 'sum' or 'mean'")
    specs = default_resolutions(request.statistic)
    if request.resolutions is not None:
        unknown = [r for r in request.resolutions if r not in DEFAULT_FREQUENCIES]
        if unknown:
            raise HTTPException(status_code=422, detail=f"unknown resolutions {unknown}")
        specs = [s for s in specs if s.name in request.resolutions]
    daily = TimeSeries(np.asarray(request.values, dtype=float), request.start_date, "1-day")
    try:
        derived = derive_resolutions(daily, specs)
    except HydroscalesError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    results = {}
    for spec in specs:
        try:
            vector = compute_features(derived[spec.name], spec.frequency)
        except HydroscalesError as exc:
            raise HTTPException(
                status_code=400, detail=f"{spec.name}: {exc}"
            ) from exc
        results[spec.name] = FeatureResponse(
            frequency=spec.frequency, features=vector.as_dict()
        )
    return MultiscaleResponse(results=results)


@app.post("/cluster", response_model=ClusterResponse)
def cluster(request: ClusterRequest) -> ClusterResponse:
    """Unsupervised-forest clustering of feature rows (23 columns each)."""
    x = np.asarray(request.rows, dtype=float)
    if x.ndim != 2 or x.shape[1] != len(FEATURE_NAMES):
        raise HTTPException(
            status_code=422, detail=f"rows must have {len(FEATURE_NAMES)} columns"
        )
    ids = request.ids if request.ids is not None else [str(i) for i in range(x.shape[0])]
    if len(ids) != x.shape[0]:
        raise HTTPException(status_code=422, detail="ids must match the number of rows")
    try:
        forest = train_forest(
            make_contrast(x, request.seed), request.n_trees, request.mtry, request.seed
        )
        d = dissimilarity_from_proximity(proximity(forest, x))
        fixed = pam(d, request.k)
        widths, avg = silhouette(d, fixed.assignments)
        importances, ranks = gini_importance(forest)
        sweep_points = None
        optimal_k = None
        if request.sweep:
            swept = sweep_k(d, [k for k in DEFAULT_K_SWEEP if k <= x.shape[0]])
            sweep_points = [
                SweepPoint(k=e.k, average_width=e.average_width, rank=swept.ranks[e.k])
                for e in swept.entries
            ]
            optimal_k = swept.optimal_k
    except HydroscalesError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return ClusterResponse(
        ids=ids,
        assignments=[int(a) for a in fixed.assignments],
        medoids=[ids[i] for i in fixed.medoids],
        silhouette_widths=[float(w) for w in widths],
        average_width=avg,
        importance={name: float(importances[i]) for i, name in enumerate(FEATURE_NAMES)},
        importance_rank={name: int(ranks[i]) for i, name in enumerate(FEATURE_NAMES)},
        sweep=sweep_points,
        optimal_k=optimal_k,
    )
