"""Independent reference implementations the real code is checked against.

Everything here favors obviousness over speed: pure-Python loops,
exhaustive scans, and fixpoint iteration instead of the algorithms
under test.
"""

from __future__ import annotations

import math


def dbscan_oracle(
    points: list[tuple[float, float]], eps: float, min_samples: int
) -> list[int]:
    """Brute-force DBSCAN: neighborhoods by O(n^2) scan, clusters by fixpoint.

    Core points are density-connected through core-core links; a border
    point joins the earliest-numbered cluster that has a core point in
    its neighborhood, mirroring scan-order discovery.
    """
    n = len(points)
    eps2 = eps * eps
    neigh: list[list[int]] = []
    for i in range(n):
        xi, yi = points[i]
        row = []
        for j in range(n):
            dx = xi - points[j][0]
            dy = yi - points[j][1]
            if dx * dx + dy * dy <= eps2:
                row.append(j)
        neigh.append(row)

    core = [len(neigh[i]) >= min_samples for i in range(n)]

    # Min-label propagation to fixpoint: each core point ends tagged with
    # the smallest core index reachable through core-core links.
    comp = {i: i for i in range(n) if core[i]}
    changed = True
    while changed:
        changed = False
        for i in comp:
            best = comp[i]
            for j in neigh[i]:
                if core[j] and comp[j] < best:
                    best = comp[j]
            if best < comp[i]:
                comp[i] = best
                changed = True

    roots = sorted(set(comp.values()))
    cluster_of_root = {root: idx for idx, root in enumerate(roots)}

    labels = [-1] * n
    for i in range(n):
        if core[i]:
            labels[i] = cluster_of_root[comp[i]]
    for i in range(n):
        if not core[i]:
            owners = [cluster_of_root[comp[j]] for j in neigh[i] if core[j]]
            if owners:
                labels[i] = min(owners)
    return labels


def canonical_labels(labels: list[int]) -> list[int]:
    """Renumber clusters in first-appearance order; noise stays -1."""
    mapping: dict[int, int] = {}
    out = []
    for lbl in labels:
        if lbl == -1:
            out.append(-1)
            continue
        if lbl not in mapping:
            mapping[lbl] = len(mapping)
        out.append(mapping[lbl])
    return out


def cosine_reference(u, v) -> float:
    """Cosine similarity with fsum accumulation for extended precision."""
    dot = math.fsum(float(a) * float(b) for a, b in zip(u, v))
    nu = math.sqrt(math.fsum(float(a) * float(a) for a in u))
    nv = math.sqrt(math.fsum(float(b) * float(b) for b in v))
    return dot / (nu * nv)


def topk_oracle(entries: list[tuple[str, list[float]]], query: list[float], k: int):
    """Full sort of every entry by (cosine desc, id asc), then cut at k."""
    scored = [(cid, cosine_reference(vec, query)) for cid, vec in entries]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]
