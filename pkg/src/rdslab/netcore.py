"""Graph data model and population-level structure statistics.

A :class:`Network` is an immutable undirected graph over a binary node
attribute (:class:`Group`). Structure is held in compressed sparse row form:
``indices[indptr[i]:indptr[i+1]]`` lists the neighbors of node ``i`` in
ascending order, and ``weights`` (when present) aligns with ``indices`` and
is symmetric across the two stored directions of every edge.

:func:`compute_stats` reports the quantities the estimators target: group
share, the row-stochastic cross-link matrix, group mean degrees, homophily
and the activity ratio. Quantities whose defining ratio has an empty
denominator are ``None``, never NaN.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from .errors import ValidationError


class Group(IntEnum):
    """Binary node attribute. A is the focal (minority) group."""

    A = 0
    B = 1

    @classmethod
    def parse(cls, token: str) -> "Group":
        t = token.strip().upper()
        if t == "A":
            return cls.A
        if t == "B":
            return cls.B
        raise ValidationError(f"unknown group token {token!r}, expected A or B")

    def other(self) -> "Group":
        return Group.B if self is Group.A else Group.A

    def __str__(self) -> str:  # pragma: no cover - trivial
        return self.name


@dataclass(frozen=True)
class RecruitmentMatrix:
    """Row-stochastic 2x2 matrix of link or recruitment proportions.

    ``s_xy`` is the proportion of ties (or recruitments) out of group X that
    point into group Y. A row is ``None``/``None`` when group X contributes
    no observations, so downstream code can distinguish "no data" from a
    legitimate zero.
    """

    s_aa: Optional[float]
    s_ab: Optional[float]
    s_ba: Optional[float]
    s_bb: Optional[float]

    @classmethod
    def from_counts(cls, c_aa: float, c_ab: float, c_ba: float, c_bb: float) -> "RecruitmentMatrix":
        row_a = c_aa + c_ab
        row_b = c_ba + c_bb
        if row_a > 0:
            s_aa, s_ab = c_aa / row_a, c_ab / row_a
        else:
            s_aa = s_ab = None
        if row_b > 0:
            s_ba, s_bb = c_ba / row_b, c_bb / row_b
        else:
            s_ba = s_bb = None
        return cls(s_aa, s_ab, s_ba, s_bb)

    @property
    def row_a_defined(self) -> bool:
        return self.s_ab is not None

    @property
    def row_b_defined(self) -> bool:
        return self.s_ba is not None

    def as_array(self) -> np.ndarray:
        """2x2 float array with NaN in place of undefined entries."""
        out = np.full((2, 2), np.nan)
        for (r, c), v in zip(
            ((0, 0), (0, 1), (1, 0), (1, 1)),
            (self.s_aa, self.s_ab, self.s_ba, self.s_bb),
        ):
            if v is not None:
                out[r, c] = v
        return out


@dataclass(frozen=True)
class NetworkStats:
    """Population-level structure of a labeled network."""

    n: int
    n_a: int
    n_b: int
    p_a: float
    edge_count: int
    mean_degree: float
    mean_degree_a: Optional[float]
    mean_degree_b: Optional[float]
    s_star: RecruitmentMatrix
    homophily: Optional[float]
    activity_ratio: Optional[float]


@dataclass(frozen=True)
class Network:
    """Immutable undirected simple graph with binary group labels.

    Node ids are dense ``0..n-1``. Use :meth:`from_edges` to build from an
    edge list; the constructor trusts its arguments and freezes the arrays.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    groups: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.groups, self.weights):
            if arr is not None:
                arr.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: np.ndarray,
        groups: Sequence[int],
        weights: Optional[np.ndarray] = None,
    ) -> "Network":
        """Build from an array of undirected edges, each listed once.

        ``edges`` is an ``(m, 2)`` integer array. Self loops, duplicate edges
        (in either orientation) and out-of-range endpoints are rejected.
        """
        if n < 1:
            raise ValidationError("network must have at least one node")
        groups = np.asarray(groups, dtype=np.uint8)
        if groups.shape != (n,):
            raise ValidationError(f"expected {n} group labels, got {groups.shape}")
        if groups.size and groups.max() > 1:
            raise ValidationError("group labels must be 0 (A) or 1 (B)")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        m = edges.shape[0]
        if weights is not None:
            weights = np.asarray(weights, dtype=np.float64)
            if weights.shape != (m,):
                raise ValidationError("weights must align with edges")
            if m and weights.min() <= 0:
                raise ValidationError("edge weights must be positive")
        if m:
            if edges.min() < 0 or edges.max() >= n:
                raise ValidationError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValidationError("self loops are not allowed")
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            key = lo * n + hi
            if np.unique(key).size != m:
                raise ValidationError("duplicate edges are not allowed")
        # Duplicate each edge into both directions, then sort rows.
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        if weights is not None:
            wboth = np.concatenate([weights, weights])
        order = np.lexsort((dst, src))
        src = src[order]
        dst = dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        w = wboth[order] if weights is not None else None
        return cls(n=n, indptr=indptr, indices=dst, groups=groups, weights=w)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def group_of(self, i: int) -> Group:
        return Group(int(self.groups[i]))

    def group_counts(self) -> Tuple[int, int]:
        n_a = int(np.count_nonzero(self.groups == Group.A))
        return n_a, self.n - n_a

    def edge_list(self) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
        """Each undirected edge once as ``(u, v[, w])`` with ``u < v``."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = src < self.indices
        u = src[mask]
        v = self.indices[mask]
        w = self.weights[mask] if self.weights is not None else None
        return u, v, w

    def neighbor_group_counts(self) -> Tuple[np.ndarray, np.ndarray]:
        """Per node, the number of A alters and B alters."""
        is_a = (self.groups[self.indices] == Group.A).astype(np.int64)
        cum = np.concatenate([[0], np.cumsum(is_a)])
        n_a = cum[self.indptr[1:]] - cum[self.indptr[:-1]]
        return n_a, self.degrees - n_a

    def with_groups(self, groups: Sequence[int]) -> "Network":
        groups = np.asarray(groups, dtype=np.uint8).copy()
        if groups.shape != (self.n,):
            raise ValidationError("group labels must cover every node")
        if groups.size and groups.max() > 1:
            raise ValidationError("group labels must be 0 (A) or 1 (B)")
        return Network(
            n=self.n,
            indptr=self.indptr,
            indices=self.indices,
            groups=groups,
            weights=self.weights,
        )

    def iter_nodes(self) -> Iterator[int]:  # pragma: no cover - trivial
        return iter(range(self.n))

    def _adjacency(self) -> csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        ncomp = csgraph.connected_components(self._adjacency(), directed=False, return_labels=False)
        return int(ncomp) == 1

    def validate(self) -> None:
        """Check structural invariants; raises ValidationError on breach."""
        if self.indptr.shape != (self.n + 1,) or self.indptr[0] != 0:
            raise ValidationError("malformed row pointer")
        if np.any(np.diff(self.indptr) < 0):
            raise ValidationError("row pointer must be nondecreasing")
        if self.indptr[-1] != self.indices.size:
            raise ValidationError("row pointer does not span the index array")
        if self.indices.size:
            if self.indices.min() < 0 or self.indices.max() >= self.n:
                raise ValidationError("neighbor index out of range")
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        if np.any(src == self.indices):
            raise ValidationError("self loop detected")
        for i in range(self.n):
            row = self.neighbors(i)
            if row.size > 1 and np.any(np.diff(row) <= 0):
                raise ValidationError(f"neighbors of node {i} not strictly ascending")
        # Symmetry: the directed pair set must equal its own transpose.
        fwd = np.stack([src, self.indices], axis=1)
        rev = np.stack([self.indices, src], axis=1)
        fwd_sorted = fwd[np.lexsort((fwd[:, 1], fwd[:, 0]))]
        rev_sorted = rev[np.lexsort((rev[:, 1], rev[:, 0]))]
        if not np.array_equal(fwd_sorted, rev_sorted):
            raise ValidationError("adjacency is not symmetric")
        if self.weights is not None:
            if self.weights.shape != self.indices.shape:
                raise ValidationError("weights must align with indices")
            if self.weights.size and self.weights.min() <= 0:
                raise ValidationError("edge weights must be positive")


def compute_stats(net: Network) -> NetworkStats:
    """Population structure: group share, cross-link matrix, degrees, h, w.

    Cross-link proportions count ordered edge endpoints: ``s_ab`` is the
    fraction of edge ends rooted in A whose far end is in B. Homophily is
    ``1 - s_ab / p_b`` (zero for group-blind mixing, one for none). The
    activity ratio is the A-to-B mean degree ratio. Each is ``None`` when
    its denominator is empty.
    """
    if net.n < 1:
        raise ValidationError("statistics need at least one node")
    deg = net.degrees
    src_groups = np.repeat(net.groups, deg)
    dst_groups = net.groups[net.indices]
    counts = np.bincount(src_groups.astype(np.int64) * 2 + dst_groups, minlength=4)
    s_star = RecruitmentMatrix.from_counts(*(int(c) for c in counts))
    n_a, n_b = net.group_counts()
    p_a = n_a / net.n
    p_b = 1.0 - p_a
    mean_degree = float(deg.mean())
    mean_degree_a = float(deg[net.groups == Group.A].mean()) if n_a else None
    mean_degree_b = float(deg[net.groups == Group.B].mean()) if n_b else None
    homophily = None
    if s_star.s_ab is not None and p_b > 0:
        homophily = 1.0 - s_star.s_ab / p_b
    activity_ratio = None
    if mean_degree_a is not None and mean_degree_b is not None and mean_degree_b > 0:
        activity_ratio = mean_degree_a / mean_degree_b
    return NetworkStats(
        n=net.n,
        n_a=n_a,
        n_b=n_b,
        p_a=p_a,
        edge_count=net.edge_count,
        mean_degree=mean_degree,
        mean_degree_a=mean_degree_a,
        mean_degree_b=mean_degree_b,
        s_star=s_star,
        homophily=homophily,
        activity_ratio=activity_ratio,
    )


def average_clustering(net: Network) -> float:
    """Mean local clustering coefficient; degree-below-2 nodes count zero."""
    if net.n < 1:
        raise ValidationError("clustering needs at least one node")
    neighbor_sets = [set(map(int, net.neighbors(i))) for i in range(net.n)]
    total = 0.0
    for i in range(net.n):
        nbrs = sorted(neighbor_sets[i])
        d = len(nbrs)
        if d < 2:
            continue
        links = 0
        for a in range(d):
            sa = neighbor_sets[nbrs[a]]
            for b in range(a + 1, d):
                if nbrs[b] in sa:
                    links += 1
        total += 2.0 * links / (d * (d - 1))
    return total / net.n


def giant_component(net: Network) -> Network:
    """Induced subgraph on the largest connected component.

    Ties go to the component containing the smallest node id. Surviving
    nodes are relabeled densely in ascending original-id order.
    """
    if net.n == 1 or net.is_connected():
        return net
    ncomp, labels = csgraph.connected_components(net._adjacency(), directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    best_size = sizes.max()
    candidates = np.flatnonzero(sizes == best_size)
    first_seen = np.full(ncomp, net.n, dtype=np.int64)
    np.minimum.at(first_seen, labels, np.arange(net.n, dtype=np.int64))
    best = candidates[np.argmin(first_seen[candidates])]
    keep = np.flatnonzero(labels == best)
    remap = np.full(net.n, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size, dtype=np.int64)
    u, v, w = net.edge_list()
    mask = (remap[u] >= 0) & (remap[v] >= 0)
    edges = np.stack([remap[u[mask]], remap[v[mask]]], axis=1)
    weights = w[mask] if w is not None else None
    return Network.from_edges(keep.size, edges, net.groups[keep], weights)
