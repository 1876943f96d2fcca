"""k-medoids clustering on forest dissimilarities, with silhouette
validation and a sweep over candidate cluster counts.

The dissimilarity is d = sqrt(1 - proximity). Medoids come from the
classic two-phase local search: a greedy BUILD seeding followed by SWAP
steps, each taking the single most cost-reducing (medoid, candidate)
exchange until none is left. All ties break on the smallest index, so
results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidProximity, KTooLarge, SingleCluster


@dataclass(frozen=True)
class ClusterResult:
    """Assignments, medoids and (optionally) silhouette widths for one k."""

    k: int
    assignments: np.ndarray  # cluster id per object, 0..k-1
    medoids: np.ndarray  # object index per cluster, ascending
    objective: float  # total dissimilarity of objects to their medoids
    silhouette_widths: np.ndarray | None = None
    average_width: float | None = None
    objective_trace: tuple[float, ...] = ()


@dataclass(frozen=True)
class SweepResult:
    """Clusterings at every candidate k, ranked by average silhouette width."""

    entries: list[ClusterResult]  # ascending k, silhouettes populated
    ranks: dict[int, int]  # k -> rank, 1 = best; ties rank the smaller k first
    optimal_k: int


def dissimilarity_from_proximity(prox: np.ndarray) -> np.ndarray:
    """d(i, j) = sqrt(1 - prox(i, j)), a zero-diagonal symmetric matrix."""
    p = np.asarray(prox, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise InvalidProximity(f"proximity must be square, got shape {p.shape}")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise InvalidProximity("proximity entries must lie in [0, 1]")
    p = (p + p.T) / 2.0
    d = np.sqrt(np.clip(1.0 - p, 0.0, None))
    np.fill_diagonal(d, 0.0)
    return d


def _build(d: np.ndarray, k: int) -> list[int]:
    """Greedy seeding: first the object with the least total dissimilarity,
    then repeatedly the object yielding the largest cost reduction."""
    medoids = [int(np.argmin(d.sum(axis=1)))]
    nearest = d[:, medoids[0]].copy()
    while len(medoids) < k:
        gains = np.maximum(nearest[:, None] - d, 0.0).sum(axis=0)
        gains[medoids] = -np.inf
        best = int(np.argmax(gains))
        medoids.append(best)
        nearest = np.minimum(nearest, d[:, best])
    return sorted(medoids)


def _assign(d: np.ndarray, medoids: list[int]) -> tuple[np.ndarray, float]:
    cols = d[:, medoids]
    assignments = np.argmin(cols, axis=1)  # ties go to the lower medoid index
    cost = float(cols[np.arange(d.shape[0]), assignments].sum())
    return assignments.astype(np.int64), cost


def pam(d: np.ndarray, k: int, seed: int = 0) -> ClusterResult:
    """Partition around medoids: BUILD seeding plus SWAP local search.

    Deterministic: exact ties in the BUILD gain, in the SWAP cost change,
    and in assignment all resolve to the smallest index, so the seed
    argument is accepted for interface stability but never consulted.

    Raises KTooLarge when k exceeds the number of objects.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if not 1 <= k <= n:
        raise KTooLarge(f"k must be in [1, {n}], got {k}")
    medoids = _build(d, k)
    _, cost = _assign(d, medoids)
    trace = [cost]
    rows = np.arange(n)

    while True:
        medoid_arr = np.array(medoids)
        cols = d[:, medoid_arr]
        order = np.argsort(cols, axis=1, kind="stable")
        d1 = cols[rows, order[:, 0]]
        nearest = medoid_arr[order[:, 0]]
        d2 = cols[rows, order[:, 1]] if k > 1 else np.full(n, np.inf)

        is_medoid = np.zeros(n, dtype=bool)
        is_medoid[medoid_arr] = True
        candidates = np.nonzero(~is_medoid)[0]
        if candidates.size == 0:
            break
        d_cand = d[:, candidates]

        best_delta = 0.0
        best_swap: tuple[int, int] | None = None
        for m in medoids:
            owned = nearest == m
            # objects losing medoid m move to min(candidate, second-nearest);
            # the rest switch only if the candidate comes closer
            move = np.minimum(d_cand[owned], d2[owned, None]) - d1[owned, None]
            keep = np.minimum(d_cand[~owned] - d1[~owned, None], 0.0)
            delta = move.sum(axis=0) + keep.sum(axis=0)
            j = int(np.argmin(delta))
            if delta[j] < best_delta - 1e-12:  # margin guards fp swap cycles
                best_delta = float(delta[j])
                best_swap = (m, int(candidates[j]))
        if best_swap is None:
            break
        medoids.remove(best_swap[0])
        medoids.append(best_swap[1])
        medoids.sort()
        _, cost = _assign(d, medoids)
        trace.append(cost)

    assignments, cost = _assign(d, medoids)
    return ClusterResult(
        k=k,
        assignments=assignments,
        medoids=np.array(medoids, dtype=np.int64),
        objective=cost,
        objective_trace=tuple(trace),
    )


def silhouette(d: np.ndarray, assignments: np.ndarray) -> tuple[np.ndarray, float]:
    """Per-object silhouette widths and their average.

    s(i) = (b - a) / max(a, b) with a the mean dissimilarity to the own
    cluster (excluding self) and b the smallest mean dissimilarity to any
    other cluster. Members of singleton clusters get width 0.
    """
    d = np.asarray(d, dtype=float)
    labels = np.asarray(assignments)
    ids = np.unique(labels)
    if ids.size < 2:
        raise SingleCluster("silhouette widths need >= 2 clusters")
    members = {int(c): np.nonzero(labels == c)[0] for c in ids}
    widths = np.zeros(d.shape[0])
    for i in range(d.shape[0]):
        own = members[int(labels[i])]
        if own.size == 1:
            continue
        a = d[i, own].sum() / (own.size - 1)
        b = min(d[i, members[int(c)]].mean() for c in ids if c != labels[i])
        peak = max(a, b)
        widths[i] = 0.0 if peak == 0.0 else (b - a) / peak
    return widths, float(widths.mean())


def sweep_k(d: np.ndarray, k_values, seed: int = 0) -> SweepResult:
    """Cluster and validate at every candidate k; best k maximises the
    average silhouette width, ties preferring the smaller k."""
    ks = sorted({int(k) for k in k_values})
    entries = []
    for k in ks:
        result = pam(d, k, seed)
        widths, avg = silhouette(d, result.assignments)
        entries.append(
            ClusterResult(
                k=k,
                assignments=result.assignments,
                medoids=result.medoids,
                objective=result.objective,
                silhouette_widths=widths,
                average_width=avg,
                objective_trace=result.objective_trace,
            )
        )
    order = sorted(range(len(entries)), key=lambda i: (-entries[i].average_width, entries[i].k))
    ranks = {entries[i].k: pos + 1 for pos, i in enumerate(order)}
    return SweepResult(entries=entries, ranks=ranks, optimal_k=entries[order[0]].k)
