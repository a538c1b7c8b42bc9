"""Seeded K-means (k-means++ init, Lloyd iterations) over embedding
vectors. Hand-rolled on numpy so clustering is exactly reproducible
from (vectors, k, seed) with no library version drift."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_TOL = 1e-9


@dataclass(frozen=True)
class ClusterModel:
    k: int
    centroids: np.ndarray = field(repr=False)  # shape (k, dim)
    assignments: tuple[int, ...]  # point index -> cluster id
    objective: float  # sum of squared distances to assigned centroids

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.centroids.shape[0] != self.k:
            raise ValueError("one centroid per cluster required")
        if any(not (0 <= a < self.k) for a in self.assignments):
            raise ValueError("assignment outside [0, k)")
        self.centroids.setflags(write=False)

    def members(self, cluster_id: int) -> list[int]:
        return [i for i, a in enumerate(self.assignments) if a == cluster_id]


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # (n, k) squared Euclidean distances
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _plus_plus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    while len(chosen) < k:
        d2 = _sq_dists(points, points[chosen]).min(axis=1)
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining mass sits on already-chosen coordinates
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        chosen.append(idx)
    return points[chosen].copy()


def kmeans(
    vectors, k: int, seed: int = 0, max_iters: int = 100
) -> ClusterModel:
    points = np.asarray(vectors, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("kmeans needs a non-empty 2D array of vectors")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > points.shape[0]:
        raise ValueError(f"k={k} exceeds the {points.shape[0]} available vectors")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")

    rng = np.random.default_rng(seed)
    centroids = _plus_plus_init(points, k, rng)

    def assign_to(cents: np.ndarray) -> np.ndarray:
        return _sq_dists(points, cents).argmin(axis=1)

    def fix_empty(assign: np.ndarray, cents: np.ndarray) -> None:
        # an empty cluster steals the point farthest from its centroid
        for c in range(k):
            if np.any(assign == c):
                continue
            dist = _sq_dists(points, cents)[np.arange(len(points)), assign]
            j = int(dist.argmax())
            assign[j] = c
            cents[c] = points[j]

    def objective_of(assign: np.ndarray, cents: np.ndarray) -> float:
        d2 = _sq_dists(points, cents)
        return float(d2[np.arange(len(points)), assign].sum())

    assign = assign_to(centroids)
    fix_empty(assign, centroids)
    objective = objective_of(assign, centroids)

    for _ in range(max_iters):
        new_centroids = centroids.copy()
        for c in range(k):
            members = points[assign == c]
            if len(members):
                new_centroids[c] = members.mean(axis=0)
        new_assign = assign_to(new_centroids)
        fix_empty(new_assign, new_centroids)
        new_objective = objective_of(new_assign, new_centroids)
        if new_objective > objective + _TOL:
            raise AssertionError(
                f"objective increased {objective} -> {new_objective}"
            )
        converged = bool(np.array_equal(new_assign, assign))
        centroids, assign, objective = new_centroids, new_assign, new_objective
        if converged:
            break

    # the returned assignment must be nearest w.r.t. returned centroids,
    # even when the loop ran out of iterations mid-update
    final_assign = assign_to(centroids)
    final_objective = objective_of(final_assign, centroids)
    if final_objective > objective + _TOL:
        raise AssertionError(
            f"objective increased {objective} -> {final_objective}"
        )
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=tuple(int(a) for a in final_assign),
        objective=final_objective,
    )
