"""Density-based clustering over 2-D points.

Plain DBSCAN with a closed eps-neighbourhood: a point is core when at
least ``min_samples`` points, itself included, lie within ``eps`` of it.
Clusters are grown breadth-first from the first unclaimed core point in
scan order, so labels are deterministic for a fixed input order; border
points shared between clusters go to the cluster discovered first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

NOISE = -1
_UNSET = -2


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_samples: int

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.min_samples < 1:
            raise ValueError("min_samples must be >= 1")


def dbscan(points: Sequence[tuple[float, float]], params: DbscanParams) -> list[int]:
    """Label each point with its cluster index, or NOISE (-1).

    Cluster indices are assigned in discovery order starting at 0.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return []
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    if not np.isfinite(pts).all():
        raise ValueError("points must be finite")

    n = len(pts)
    # Window-sized inputs, so the O(n^2) neighbourhood matrix is fine.
    diff = pts[:, None, :] - pts[None, :, :]
    within = (diff * diff).sum(axis=2) <= params.eps * params.eps
    core = within.sum(axis=1) >= params.min_samples

    labels = [_UNSET] * n
    cluster = 0
    for i in range(n):
        if labels[i] != _UNSET or not core[i]:
            continue
        labels[i] = cluster
        queue: deque[int] = deque([i])
        while queue:
            j = queue.popleft()
            for m in np.flatnonzero(within[j]):
                if labels[m] == _UNSET:
                    labels[m] = cluster
                    if core[m]:
                        queue.append(int(m))
        cluster += 1
    return [lbl if lbl != _UNSET else NOISE for lbl in labels]
