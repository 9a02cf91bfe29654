"""Tree topology over all leaves by incremental quartet-guided insertion.

The first three leaves form a star around one hidden node. Every further
leaf ``x`` is located by walking the current tree: at a hidden node the
quartet test between ``x`` and representatives of three branches tells
which branch ``x`` lies in (or that it hangs off the node itself). The walk
ends by attaching ``x`` to a hidden node or by subdividing an edge with a
new hidden node.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._backend import kernels
from .model import (
    DEFAULT_TOL,
    CorrelationMatrix,
    LatentTreeError,
    NotStarDecomposable,
    NotTreeDecomposable,
    Tolerances,
    Topology,
    tree_is_valid,
)
from .params import path_loading, subtree_leaves
from .quartet import QuartetClass, all_quads, check_all_triplets, classify_quartet, classify_quartets
from .star import is_star_decomposable


class LabelError(LatentTreeError, ValueError):
    pass


class _Builder:
    def __init__(self, cm: CorrelationMatrix, tol: Tolerances):
        self.r = cm.values
        self.names = cm.names
        self.n = cm.n
        self.tol = tol
        self.adj: dict[int, set[int]] = {}
        self.next_hidden = self.n

    def _new_hidden(self) -> int:
        h = self.next_hidden
        self.next_hidden += 1
        self.adj[h] = set()
        return h

    def _link(self, a, b):
        self.adj.setdefault(a, set()).add(b)
        self.adj.setdefault(b, set()).add(a)

    def _unlink(self, a, b):
        self.adj[a].discard(b)
        self.adj[b].discard(a)

    def start(self, a, b, c):
        r = self.r
        decision = is_star_decomposable(r[a, b], r[a, c], r[b, c], self.tol)
        if not decision:
            raise NotStarDecomposable(
                f"triplet ({self.names[a]}, {self.names[b]}, {self.names[c]}) fails the {decision.reason} condition"
            )
        h = self._new_hidden()
        for leaf in (a, b, c):
            self._link(h, leaf)

    def _rep(self, start: int, blocked: int) -> int:
        best = None
        stack = [start]
        seen = {blocked, start}
        while stack:
            u = stack.pop()
            if u < self.n and (best is None or u < best):
                best = u
            for v in self.adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return best

    def _classify(self, x, p, q, s) -> QuartetClass:
        idx = [x, p, q, s]
        return classify_quartet(self.r[np.ix_(idx, idx)], self.tol, labels=[self.names[i] for i in idx])

    def direction(self, x: int, center: int) -> int | None:
        """Neighbor of ``center`` whose branch contains ``x``; None if ``x`` hangs off ``center``."""
        branches = sorted((self._rep(nb, center), nb) for nb in self.adj[center])
        (ra, na), (rb, nb), (rc, nc) = branches[:3]
        cls = self._classify(x, ra, rb, rc)
        if cls is QuartetClass.PAIR_12_34:
            return na
        if cls is QuartetClass.PAIR_13_24:
            return nb
        if cls is QuartetClass.PAIR_14_23:
            return nc
        for rt, nt in branches[3:]:
            cls = self._classify(x, rt, ra, rb)
            if cls is QuartetClass.PAIR_12_34:
                return nt
            if cls is not QuartetClass.DEGENERATE:
                quad = ", ".join(self.names[i] for i in (x, rt, ra, rb))
                raise NotTreeDecomposable(f"quartet ({quad}) contradicts an earlier degenerate quartet")
        return None

    def insert(self, x: int):
        w = min(h for h in self.adj if h >= self.n)
        d = self.direction(x, w)
        while d is not None:
            if d < self.n:
                self._subdivide(w, d, x)
                return
            back = self.direction(x, d)
            if back == w:
                self._subdivide(w, d, x)
                return
            w, d = d, back
        self._link(w, x)

    def _subdivide(self, a, b, x):
        h = self._new_hidden()
        self._unlink(a, b)
        self._link(a, h)
        self._link(h, b)
        self._link(h, x)

    def topology(self) -> Topology:
        m = self.next_hidden - self.n
        hidden = _hidden_ids(self.names, m)
        edges = sorted((a, b) for a in self.adj for b in self.adj[a] if a < b)
        return Topology(self.names, hidden, tuple(edges))


def _hidden_ids(leaf_names, m: int) -> tuple[str, ...]:
    taken = set(leaf_names)
    prefix = "w"
    while any(f"{prefix}{k}" in taken for k in range(1, m + 1)):
        prefix = "_" + prefix
    return tuple(f"{prefix}{k}" for k in range(1, m + 1))


def _as_correlation(rho) -> CorrelationMatrix:
    return rho if isinstance(rho, CorrelationMatrix) else CorrelationMatrix(rho)


def build_topology(
    rho,
    tol: Tolerances = DEFAULT_TOL,
    order: Sequence[int] | None = None,
    verify: bool = True,
) -> Topology:
    """Recover the latent tree topology from leaf correlations.

    ``order`` sets the leaf insertion order (default: index order). With
    ``verify`` every triplet and every quartet of the input is checked
    against the finished tree, so a successful return guarantees that all
    4-subsets classify identically under the tree and the data.
    """
    cm = _as_correlation(rho)
    n = cm.n
    if n < 3:
        raise ValueError(f"need at least 3 leaves, got {n}")
    order = list(range(n)) if order is None else [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the leaf indices")

    b = _Builder(cm, tol)
    b.start(*order[:3])
    for x in order[3:]:
        b.insert(x)
    topo = b.topology()
    if verify:
        verify_topology(cm, topo, tol)
    return replace(topo, coincident=_coincidences(cm, topo, tol))


def _coincidences(cm: CorrelationMatrix, topo: Topology, tol: Tolerances):
    adj = topo.adjacency()
    n = topo.n_leaves
    out = []
    for leaf in range(n):
        (w,) = adj[leaf]
        if abs(path_loading(cm.values, adj, n, leaf, w, tol)) >= 1.0 - tol.unit_tol:
            out.append((w, leaf))
    return tuple(out)


def induced_quartet_codes(topo: Topology, quads=None) -> np.ndarray:
    """Quartet classes implied by the tree shape alone.

    Every edge gets correlation 1/2, so path products are exact powers of
    two and the cross-product comparison reduces to comparing path lengths.
    """
    a, b = zip(*topo.edges)
    corr = kernels.node_correlations(topo.n_nodes, np.array(a), np.array(b), np.full(len(a), 0.5))
    n = topo.n_leaves
    leaf = corr[:n, :n]
    if quads is None:
        quads = all_quads(n)
    return kernels.classify_quartets(leaf, quads, 1e-12)


def verify_topology(rho, topo: Topology, tol: Tolerances = DEFAULT_TOL) -> None:
    """Raise unless every triplet is a star and every quartet matches ``topo``."""
    cm = _as_correlation(rho)
    check_all_triplets(cm, tol)
    quads = all_quads(cm.n)
    if not len(quads):
        return
    data = classify_quartets(cm.values, quads, tol)
    tree = induced_quartet_codes(topo, quads)
    bad = np.flatnonzero(data != tree)
    if bad.size:
        q = quads[bad[0]]
        quad = ", ".join(cm.names[i] for i in q)
        code = int(data[bad[0]])
        if code < 0:
            raise NotTreeDecomposable(f"quartet ({quad}): no consistent characteristic equality")
        raise NotTreeDecomposable(
            f"quartet ({quad}) classifies as {QuartetClass(code).name} but the tree implies "
            f"{QuartetClass(int(tree[bad[0]])).name}"
        )


def _splits(topo: Topology) -> Counter:
    report = tree_is_valid(topo)
    if any(v.startswith(("tree", "connectivity", "edges")) for v in report.violations):
        raise ValueError("not a tree: " + "; ".join(report.violations))
    adj = topo.adjacency()
    n = topo.n_leaves
    ref = min(range(n), key=lambda i: topo.leaf_names[i])
    out = Counter()
    for a, b in topo.edges:
        side = set()
        stack = [b]
        seen = {a, b}
        while stack:
            u = stack.pop()
            if u < n:
                side.add(topo.leaf_names[u])
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if topo.leaf_names[ref] in side:
            side = set(topo.leaf_names) - side
        out[frozenset(side)] += 1
    return out


def topology_isomorphic(a: Topology, b: Topology) -> bool:
    """True when the trees agree up to renaming hidden nodes (leaf labels fixed).

    Compares the multisets of leaf bipartitions induced by the edges.
    """
    if set(a.leaf_names) != set(b.leaf_names) or len(a.leaf_names) != len(b.leaf_names):
        raise LabelError("topologies are over different leaf sets")
    if len(a.hidden) != len(b.hidden) or len(a.edges) != len(b.edges):
        return False
    return _splits(a) == _splits(b)


@dataclass(frozen=True)
class ConsistencyReport:
    max_disagreement: float
    worst: tuple[str, str] | None
    eq_tol: float

    @property
    def passed(self) -> bool:
        return self.max_disagreement <= self.eq_tol


def consistency_check(rho, topo: Topology, tol: Tolerances = DEFAULT_TOL) -> ConsistencyReport:
    """Worst relative spread of the squared loading estimates at each hidden node.

    For hidden node ``w`` and leaf ``i``, every pair ``(j, k)`` from two
    further branches of ``w`` estimates ``rho_iw^2 = rho_ij rho_ik / rho_jk``.
    """
    cm = _as_correlation(rho)
    r = cm.values
    n = topo.n_leaves
    adj = topo.adjacency()
    worst = 0.0
    where = None
    for w in range(n, topo.n_nodes):
        branches = list(subtree_leaves(adj, w, n).values())
        label = np.empty(n, dtype=int)
        for k, leaves in enumerate(branches):
            label[leaves] = k
        for i in range(n):
            others = np.flatnonzero(label != label[i])
            if len(others) < 2:
                continue
            rj = r[i, others]
            est = np.abs(np.outer(rj, rj) / r[np.ix_(others, others)])
            mask = label[others][:, None] != label[others][None, :]
            vals = est[mask]
            hi = vals.max()
            spread = (hi - vals.min()) / hi
            if where is None or spread > worst:
                worst = spread
                where = (topo.hidden[w - n], cm.names[i])
    return ConsistencyReport(float(worst), where, tol.eq_tol)
