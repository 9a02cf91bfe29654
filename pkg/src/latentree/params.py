"""Recover edge correlations and conditionals for a known topology.

All hidden nodes are standardized. Under that convention the leaf-to-hidden
correlation comes from a star decomposition of a triplet centered at the
hidden node, and an internal edge is the ratio of two such correlations
measured from the same leaf.

Sign gauge: every hidden node is oriented so that its correlation with leaf
0 is positive. Internal edges are then always positive and the edge of leaf
``i`` carries the sign of ``rho[i, 0]``.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ._backend import kernels
from .model import (
    DEFAULT_TOL,
    GenuineDependencyError,
    InconsistencyError,
    LinearGaussian,
    NotStarDecomposable,
    Tolerances,
    Topology,
    TreeModel,
    tree_is_valid,
)
from .star import is_star_decomposable


def components(adj: Sequence[Sequence[int]], center: int) -> dict[int, int]:
    """Map every node except ``center`` to the neighbor of ``center`` it hangs off."""
    label: dict[int, int] = {}
    for nb in adj[center]:
        label[nb] = nb
        stack = [nb]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v != center and v not in label:
                    label[v] = nb
                    stack.append(v)
    return label


def subtree_leaves(adj, center: int, n_leaves: int) -> dict[int, list[int]]:
    """Leaves of each branch around ``center``, keyed by the branch's neighbor."""
    out: dict[int, list[int]] = {nb: [] for nb in adj[center]}
    for node, nb in components(adj, center).items():
        if node < n_leaves:
            out[nb].append(node)
    for leaves in out.values():
        leaves.sort()
    return out


def _gauge_sign(r: np.ndarray, leaf: int) -> float:
    return 1.0 if leaf == 0 else math.copysign(1.0, r[leaf, 0])


def path_loading(r, adj, n_leaves: int, leaf: int, hidden: int, tol: Tolerances = DEFAULT_TOL) -> float:
    """Correlation between ``leaf`` and hidden node ``hidden`` (gauge-fixed).

    Uses the two lowest-indexed representatives of branches around
    ``hidden`` that do not contain ``leaf``.
    """
    branches = subtree_leaves(adj, hidden, n_leaves)
    reps = sorted(lv[0] for lv in branches.values() if lv and leaf not in lv)
    if len(reps) < 2:
        raise ValueError(f"hidden node {hidden} has fewer than two branches away from leaf {leaf}")
    j, k = reps[0], reps[1]
    decision = is_star_decomposable(r[leaf, j], r[leaf, k], r[j, k], tol)
    if not decision:
        raise NotStarDecomposable(f"triplet ({leaf}, {j}, {k}) fails the {decision.reason} condition")
    mag = math.sqrt(abs(r[leaf, j] * r[leaf, k] / r[j, k]))
    return _gauge_sign(r, leaf) * mag


def _rho(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "values", rho), dtype=float)


def recover_leaf_edges(topology: Topology, rho, tol: Tolerances = DEFAULT_TOL) -> dict[int, float]:
    """Correlation on the edge of every leaf, keyed by leaf index.

    Magnitudes that reach ``1 - unit_tol`` are snapped to exactly 1; these
    are the coincident (noise-free) leaves.
    """
    r = _rho(rho)
    n = topology.n_leaves
    adj = topology.adjacency()
    out = {}
    for leaf in range(n):
        (w,) = adj[leaf]
        val = path_loading(r, adj, n, leaf, w, tol)
        if abs(val) >= 1.0 - tol.unit_tol:
            if abs(val) > 1.0 + tol.eq_tol:
                raise InconsistencyError(f"leaf {topology.leaf_names[leaf]!r} has |rho| = {abs(val):.6g} > 1")
            val = math.copysign(1.0, val)
        out[leaf] = val
    return out


def recover_internal_edge(r_x_w1: float, r_x_w2: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Edge correlation between adjacent hidden nodes w1 and w2.

    ``r_x_w1`` and ``r_x_w2`` are the correlations of one leaf on the w1 side
    with each hidden node; with standardized hidden nodes the path product
    ``rho(x, w2) = rho(x, w1) * rho(w1, w2)`` gives the ratio.
    """
    if abs(r_x_w1) < tol.dep_floor:
        raise GenuineDependencyError(f"|rho(x, w1)| = {abs(r_x_w1):g} below dep_floor")
    edge = r_x_w2 / r_x_w1
    if abs(edge) >= 1.0 - tol.unit_tol:
        raise InconsistencyError(
            f"internal edge correlation {edge:.6g} has magnitude >= 1; "
            "topology or input is not tree-decomposable"
        )
    return edge


def _side_leaf(adj, n: int, w1: int, w2: int) -> int:
    """A leaf on w1's side of edge (w1, w2); an adjacent leaf when one exists."""
    direct = [v for v in adj[w1] if v < n]
    if direct:
        return direct[0]
    label = components(adj, w1)
    return min(v for v, nb in label.items() if v < n and nb != w2)


def recover_internal_edges(topology: Topology, rho, tol: Tolerances = DEFAULT_TOL) -> dict[tuple[int, int], float]:
    r = _rho(rho)
    n = topology.n_leaves
    adj = topology.adjacency()
    out = {}
    for a, b in topology.edges:
        if a < n or b < n:
            continue
        # measure from the side that has a leaf hanging directly off it
        w1, w2 = (a, b) if any(v < n for v in adj[a]) or not any(v < n for v in adj[b]) else (b, a)
        x = _side_leaf(adj, n, w1, w2)
        out[(a, b)] = recover_internal_edge(
            path_loading(r, adj, n, x, w1, tol), path_loading(r, adj, n, x, w2, tol), tol
        )
    return out


def assemble_tree_model(
    topology: Topology,
    rho,
    means: Sequence[float] | None = None,
    variances: Sequence[float] | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> TreeModel:
    """Attach edge correlations and leaf moments to a topology."""
    report = tree_is_valid(topology, tol)
    if not report:
        raise ValueError("invalid topology: " + "; ".join(report.violations))
    n = topology.n_leaves
    means = tuple(float(v) for v in (np.zeros(n) if means is None else means))
    variances = tuple(float(v) for v in (np.ones(n) if variances is None else variances))
    if len(means) != n or len(variances) != n:
        raise ValueError("means and variances must have one entry per leaf")

    leaf_edges = recover_leaf_edges(topology, rho, tol)
    internal = recover_internal_edges(topology, rho, tol)
    adj = topology.adjacency()
    edges = []
    for a, b in topology.edges:
        if a < n:
            edges.append((a, b, leaf_edges[a]))
        elif b < n:
            edges.append((a, b, leaf_edges[b]))
        else:
            edges.append((a, b, internal[(a, b)]))

    coincident = set(topology.coincident)
    for leaf, val in leaf_edges.items():
        if abs(val) == 1.0:
            coincident.add((adj[leaf][0], leaf))
    coincident = tuple(sorted(coincident))
    notes = tuple(
        f"{topology.node_name(h)} coincides with leaf {topology.leaf_names[leaf]}" for h, leaf in coincident
    )
    return TreeModel(
        leaf_names=topology.leaf_names,
        leaf_means=means,
        leaf_variances=variances,
        hidden=topology.hidden,
        edges=tuple(sorted(edges)),
        root=n,
        coincident=coincident,
        notes=notes,
    )


def direct_conditional(
    rho, topology: Topology, leaf: int, hidden: int, mean: float = 0.0, variance: float = 1.0,
    tol: Tolerances = DEFAULT_TOL,
) -> LinearGaussian:
    """f(leaf | hidden) straight from a star decomposition centered at ``hidden``."""
    loading = path_loading(_rho(rho), topology.adjacency(), topology.n_leaves, leaf, hidden, tol)
    sd = math.sqrt(variance)
    return LinearGaussian(slope=loading * sd, intercept=mean, noise_var=max(0.0, variance * (1.0 - loading ** 2)))


def canonicalize_signs(model: TreeModel) -> TreeModel:
    """Flip hidden nodes so each has positive correlation with leaf 0."""
    n = model.n_leaves
    a, b, c = zip(*model.edges)
    corr = kernels.node_correlations(model.n_nodes, np.array(a), np.array(b), np.array(c))
    sign = np.ones(model.n_nodes)
    sign[n:] = np.where(corr[n:, 0] < 0, -1.0, 1.0)
    edges = tuple((u, v, float(r * sign[u] * sign[v])) for u, v, r in model.edges)
    return TreeModel(
        model.leaf_names, model.leaf_means, model.leaf_variances, model.hidden,
        edges, model.root, model.coincident, model.notes,
    )
