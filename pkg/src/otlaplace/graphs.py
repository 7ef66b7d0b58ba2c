"""Random geometric graphs over a distance matrix.

Kernel weights w_ij = eta(d_ij / eps) / eps^d with an admissible profile
eta (non-increasing, positive at zero, compactly supported); intrinsic_dim
d = 0 switches the normalization off, reproducing plain 0/1 indicator
weights.  Also kNN graphs, connectivity tests and the minimal-connectivity
radius (the bottleneck edge of the minimum spanning tree).
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import (
    DegenerateInput,
    DimensionMismatch,
    InvalidEpsilon,
    InvalidK,
    InvalidSpec,
)


@dataclass(frozen=True)
class Kernel:
    """Admissible edge-weight profile eta.

    kinds: "indicator" (value a on [0, r), matching the strict d < eps
    convention of 0/1 weights), "triangular" (1 - t/R on [0, R]) and
    "table" (piecewise-linear through given knots, zero beyond the last).
    intrinsic_dim is the d of the 1/eps^d normalization; 0 disables it.
    """

    kind: str
    a: float = 1.0
    r: float = 1.0
    R: float = 1.0
    knots: tuple = ()
    values: tuple = ()
    intrinsic_dim: int = 0

    def __post_init__(self):
        if self.kind not in ("indicator", "triangular", "table"):
            raise InvalidSpec("unknown kernel kind %r" % self.kind)
        if self.intrinsic_dim < 0:
            raise InvalidSpec("intrinsic_dim must be >= 0")
        if self.kind == "indicator":
            if not (self.a > 0 and self.r > 0):
                raise InvalidSpec("indicator kernel needs a > 0 and r > 0")
        elif self.kind == "triangular":
            if not self.R > 0:
                raise InvalidSpec("triangular kernel needs R > 0")
        else:
            ts = np.asarray(self.knots, dtype=float)
            vs = np.asarray(self.values, dtype=float)
            if ts.ndim != 1 or ts.shape != vs.shape or len(ts) < 2:
                raise InvalidSpec("table kernel needs matching knot/value vectors")
            if ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
                raise InvalidSpec("table knots must start at 0 and increase")
            if np.any(vs < 0) or np.any(np.diff(vs) > 0):
                raise InvalidSpec("table values must be nonnegative and non-increasing")
            if vs[0] <= 0:
                raise InvalidSpec("eta(0) must be positive")
            if vs[-1] != 0.0:
                raise InvalidSpec("table kernel must vanish at its last knot")
        self.check_admissible()

    @classmethod
    def indicator(cls, a: float = 1.0, r: float = 1.0, intrinsic_dim: int = 0):
        return cls("indicator", a=a, r=r, intrinsic_dim=intrinsic_dim)

    @classmethod
    def triangular(cls, R: float = 1.0, intrinsic_dim: int = 0):
        return cls("triangular", R=R, intrinsic_dim=intrinsic_dim)

    @classmethod
    def table(cls, knots, values, intrinsic_dim: int = 0):
        return cls("table", knots=tuple(knots), values=tuple(values), intrinsic_dim=intrinsic_dim)

    @property
    def support_radius(self) -> float:
        if self.kind == "indicator":
            return self.r
        if self.kind == "triangular":
            return self.R
        return float(self.knots[-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "indicator":
            return np.where(t < self.r, self.a, 0.0)
        if self.kind == "triangular":
            return np.maximum(0.0, 1.0 - t / self.R)
        out = np.interp(t, self.knots, self.values, right=0.0)
        return out

    def check_admissible(self, samples: int = 257) -> None:
        """Grid check of the admissibility conditions (monotone, eta(0) > 0,
        compact support)."""
        grid = np.linspace(0.0, self.support_radius * 1.5 + 1e-12, samples)
        vals = self(grid)
        if not self(0.0) > 0:
            raise InvalidSpec("eta(0) must be positive")
        if np.any(np.diff(vals) > 1e-12):
            raise InvalidSpec("eta must be non-increasing")
        beyond = grid > self.support_radius
        if np.any(vals[beyond] != 0.0):
            raise InvalidSpec("eta must vanish beyond its support radius")


@dataclass
class WeightedGraph:
    """Symmetric weighted graph; each undirected edge stored once (i < j)."""

    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    epsilon: float = 1.0
    kernel: Kernel | None = None
    graph_kind: str = "epsilon"

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.intp)
        self.cols = np.asarray(self.cols, dtype=np.intp)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if not (len(self.rows) == len(self.cols) == len(self.weights)):
            raise InvalidSpec("edge arrays must have equal lengths")
        if len(self.rows) and (
            (self.rows >= self.cols).any()
            or self.rows.min() < 0
            or self.cols.max() >= self.n
        ):
            raise InvalidSpec("edges must satisfy 0 <= i < j < n")
        if len(self.weights) and (
            not np.isfinite(self.weights).all() or (self.weights <= 0).any()
        ):
            raise InvalidSpec("edge weights must be finite and positive")

    @property
    def num_edges(self) -> int:
        return len(self.weights)

    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.rows, weights=self.weights, minlength=self.n)
        deg += np.bincount(self.cols, weights=self.weights, minlength=self.n)
        return deg

    def weight_matrix(self) -> sparse.csr_matrix:
        w = sparse.coo_matrix(
            (
                np.concatenate([self.weights, self.weights]),
                (
                    np.concatenate([self.rows, self.cols]),
                    np.concatenate([self.cols, self.rows]),
                ),
            ),
            shape=(self.n, self.n),
        )
        return w.tocsr()

    def to_dense(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        w[self.rows, self.cols] = self.weights
        w[self.cols, self.rows] = self.weights
        return w


def pairwise_distances(dataset, metric: str = "w2", embedding=None) -> np.ndarray:
    """Symmetric matrix of pairwise distances between dataset measures.

    metric "w2" solves exact optimal transport per pair (uniform 1-D
    point clouds collapse to one sorted-matrix distance computation);
    metric "lot" reads distances off a prebuilt LotEmbedding.
    """
    from .lot import lot_pairwise
    from .transport import w2_exact

    if metric == "lot":
        if embedding is None:
            raise InvalidSpec("lot metric needs an embedding")
        if embedding.n != dataset.n:
            raise DimensionMismatch("embedding size differs from dataset")
        return lot_pairwise(embedding)
    if metric != "w2":
        raise InvalidSpec("metric must be 'w2' or 'lot'")

    n = dataset.n
    counts = dataset.point_counts()
    if dataset.ambient_dim == 1 and len(set(counts.tolist())) == 1:
        # sorted uniform 1-D clouds: W2 is the L2 distance of quantile rows
        from scipy.spatial.distance import cdist

        m = int(counts[0])
        q = np.stack([np.sort(mu.points[:, 0]) for mu in dataset.measures])
        d = cdist(q, q) / np.sqrt(m)
        np.fill_diagonal(d, 0.0)
        return d

    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dij, _ = w2_exact(dataset.measures[i], dataset.measures[j])
            d[i, j] = d[j, i] = dij
    return d


def epsilon_graph(distances, epsilon: float, kernel: Kernel) -> WeightedGraph:
    """Kernel-weighted graph: w_ij = eta(d_ij/eps)/eps^d, positive edges only."""
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise InvalidEpsilon("epsilon must be positive and finite, got %r" % epsilon)
    d = _as_distance_matrix(distances)
    n = d.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    w = kernel(d[iu, ju] / epsilon) / epsilon**kernel.intrinsic_dim
    keep = w > 0
    return WeightedGraph(
        n, iu[keep], ju[keep], w[keep], epsilon=epsilon, kernel=kernel, graph_kind="epsilon"
    )


def knn_graph(distances, k: int) -> WeightedGraph:
    """Symmetrized k-nearest-neighbor graph with unit weights.

    Edge iff i is among the k nearest of j or vice versa; ties at the k-th
    distance break toward the lower index.
    """
    d = _as_distance_matrix(distances)
    n = d.shape[0]
    if not 1 <= k < n:
        raise InvalidK("k must satisfy 1 <= k < n, got %d" % k)
    work = d.copy()
    np.fill_diagonal(work, np.inf)
    order = np.argsort(work, axis=1, kind="stable")[:, :k]
    adj = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), k)
    adj[rows, order.ravel()] = True
    adj |= adj.T
    iu, ju = np.nonzero(np.triu(adj, k=1))
    return WeightedGraph(
        n, iu, ju, np.ones(len(iu)), epsilon=1.0, kernel=None, graph_kind="knn"
    )


def connectivity_epsilon(distances) -> float:
    """Largest edge of the minimum spanning tree (the bottleneck radius).

    An indicator epsilon-graph with r = 1 is connected for any eps above
    this value and disconnected below it.
    """
    d = _as_distance_matrix(distances)
    n = d.shape[0]
    if n < 2:
        raise DegenerateInput("connectivity radius needs n >= 2")
    # Prim's algorithm on the dense matrix
    best = d[0].copy()
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best[0] = np.inf
    bottleneck = 0.0
    for _ in range(n - 1):
        j = int(np.argmin(np.where(in_tree, np.inf, best)))
        bottleneck = max(bottleneck, best[j])
        in_tree[j] = True
        best = np.where(in_tree, np.inf, np.minimum(best, d[j]))
    return float(bottleneck)


def is_connected(graph: WeightedGraph) -> bool:
    """Union-find over the positive-weight edges."""
    parent = np.arange(graph.n)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    components = graph.n
    for i, j in zip(graph.rows, graph.cols):
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[ri] = rj
            components -= 1
    return components == 1


def connected_components(graph: WeightedGraph):
    """List of node-index lists, one per connected component."""
    w = graph.weight_matrix()
    from scipy.sparse.csgraph import connected_components as cc

    ncomp, labels = cc(w, directed=False)
    return [np.nonzero(labels == c)[0].tolist() for c in range(ncomp)]


def _as_distance_matrix(distances) -> np.ndarray:
    d = np.asarray(distances, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DimensionMismatch("distance matrix must be square")
    if not np.isfinite(d).all():
        raise InvalidSpec("distance matrix must be finite")
    return d


def export_edges_csv(graph: WeightedGraph, path) -> None:
    lines = ["i,j,w"]
    for i, j, w in zip(graph.rows, graph.cols, graph.weights):
        lines.append("%d,%d,%s" % (i, j, repr(float(w))))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def export_distances_csv(distances, path) -> None:
    d = _as_distance_matrix(distances)
    lines = [",".join(repr(float(x)) for x in row) for row in d]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
