"""Undirected weighted simple graphs, their matrix views, and Cartesian products.

Matrices are plain dense ``numpy.ndarray`` objects. Product graphs use the
lexicographic vertex order ``(i1, i2) -> i1 * n2 + i2``; every Kronecker-sum
identity in this package is relative to that order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (
    DataError,
    DegenerateFeaturesError,
    DuplicateEdgeError,
    IndexOutOfRangeError,
    LoopEdgeError,
    NonpositiveWeightError,
    NonSquareInputError,
)

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class Graph:
    """Validated simple graph. Build with :func:`new_graph`, not directly.

    ``edges`` holds each unordered pair once as ``(i, j, w)`` with ``i < j``,
    sorted by ``(i, j)``.
    """

    n: int
    edges: tuple[Edge, ...]

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def new_graph(n: int, edges: Iterable[Sequence[float]]) -> Graph:
    """Validate an edge list and return a :class:`Graph`.

    Raises:
        LoopEdgeError: an edge joins a vertex to itself.
        DuplicateEdgeError: an unordered pair appears twice.
        IndexOutOfRangeError: an endpoint is outside ``[0, n)``.
        NonpositiveWeightError: a weight is zero, negative or not finite.
    """
    if int(n) != n or n < 1:
        raise DataError(f"vertex count must be a positive integer, got {n!r}")
    n = int(n)
    seen: dict[tuple[int, int], float] = {}
    for edge in edges:
        if len(edge) != 3:
            raise DataError(f"edge must be (i, j, w), got {edge!r}")
        i, j, w = edge
        if int(i) != i or int(j) != j:
            raise IndexOutOfRangeError(f"non-integer vertex index in {edge!r}")
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise IndexOutOfRangeError(f"edge ({i}, {j}) outside [0, {n})")
        if i == j:
            raise LoopEdgeError(f"loop at vertex {i}")
        if not np.isfinite(w) or w <= 0.0:
            raise NonpositiveWeightError(f"edge ({i}, {j}) has weight {w}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdgeError(f"edge {key} listed twice")
        seen[key] = w
    return Graph(n, tuple((i, j, w) for (i, j), w in sorted(seen.items())))


def adjacency_matrix(g: Graph) -> np.ndarray:
    w = np.zeros((g.n, g.n))
    for i, j, weight in g.edges:
        w[i, j] = weight
        w[j, i] = weight
    return w


def degree_matrix(g: Graph) -> np.ndarray:
    """Diagonal matrix of weighted degrees."""
    return np.diag(adjacency_matrix(g).sum(axis=1))


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian ``D - W``."""
    w = adjacency_matrix(g)
    return np.diag(w.sum(axis=1)) - w


def cartesian_product(g1: Graph, g2: Graph) -> Graph:
    """Cartesian product ``g1 □ g2`` with lexicographic vertex numbering."""
    n2 = g2.n
    edges: list[Edge] = []
    # Moves along g1 with the g2 coordinate fixed.
    for i1, j1, w in g1.edges:
        for i2 in range(n2):
            edges.append((i1 * n2 + i2, j1 * n2 + i2, w))
    # Moves along g2 with the g1 coordinate fixed.
    for i1 in range(g1.n):
        for i2, j2, w in g2.edges:
            edges.append((i1 * n2 + i2, i1 * n2 + j2, w))
    return new_graph(g1.n * n2, edges)


def kronecker_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``A ⊕ B = A ⊗ I_n + I_m ⊗ B`` for square ``A`` (m×m) and ``B`` (n×n)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for name, mat in (("a", a), ("b", b)):
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise NonSquareInputError(f"{name} must be square, got shape {mat.shape}")
    m, n = a.shape[0], b.shape[0]
    return np.kron(a, np.eye(n)) + np.kron(np.eye(m), b)


def _distance_matrix(x: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        return cdist(x, x, metric="euclidean")
    if metric == "cosine":
        norms = np.linalg.norm(x, axis=1)
        zero = norms == 0.0
        unit = np.divide(x, norms[:, None], out=np.zeros_like(x), where=~zero[:, None])
        d = 1.0 - unit @ unit.T
        # Two zero rows are identical, so they sit at distance 0.
        d[np.ix_(zero, zero)] = 0.0
        return np.clip(d, 0.0, 2.0)
    raise ValueError(f"unknown metric {metric!r}; expected 'cosine' or 'euclidean'")


def knn_graph(x: np.ndarray, k: int = 5, metric: str = "cosine") -> Graph:
    """Unit-weight k-nearest-neighbour graph, symmetrised by union.

    Distances are rounded to 12 decimals before ranking so that ties are
    exact, and tied candidates are taken in increasing index order.

    Raises:
        DegenerateFeaturesError: every row is identical under the cosine metric.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DataError(f"features must be a 2-D array, got shape {x.shape}")
    n = x.shape[0]
    if n < 2:
        raise DataError("knn_graph needs at least 2 samples")
    if not 1 <= k < n:
        raise DataError(f"k must satisfy 1 <= k < N={n}, got {k}")
    if not np.all(np.isfinite(x)):
        raise DataError("features contain non-finite values")

    d = np.round(_distance_matrix(x, metric), 12)
    if metric == "cosine" and not np.any(d):
        raise DegenerateFeaturesError("all rows are identical under the cosine metric")
    np.fill_diagonal(d, np.inf)
    # Stable sort keeps index order among equal distances.
    nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
    rows = np.repeat(np.arange(n), k)
    cols = nearest.ravel()
    pairs = np.unique(np.stack([np.minimum(rows, cols), np.maximum(rows, cols)], axis=1), axis=0)
    return new_graph(n, ((int(i), int(j), 1.0) for i, j in pairs))


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [[i, j, w] for i, j, w in g.edges]}


def graph_from_json(obj: dict) -> Graph:
    try:
        return new_graph(obj["n"], obj["edges"])
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed graph JSON: {exc}") from exc


def load_graph(path: str | Path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON ({exc})") from exc
    return graph_from_json(obj)


def save_graph(g: Graph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(graph_to_json(g), fh)
        fh.write("\n")


def path_graph(n: int) -> Graph:
    return new_graph(n, [(i, i + 1, 1.0) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise DataError("a simple cycle needs at least 3 vertices")
    return new_graph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])
