"""Independent oracles and corpus generators shared by the tests.

Nothing here goes through the package's own path-product or quartet code,
so these can check it.
"""
import itertools
import math

import networkx as nx
import numpy as np

from latentree import TreeModel

EXACT_TOL = dict(eq_tol=1e-9, dep_floor=1e-15)


def make_model(leaf_names, hidden, named_edges, root=None, means=None, variances=None):
    names = list(leaf_names) + list(hidden)
    idx = {name: i for i, name in enumerate(names)}
    edges = tuple(sorted((min(idx[a], idx[b]), max(idx[a], idx[b]), float(r)) for a, b, r in named_edges))
    n = len(leaf_names)
    return TreeModel(
        leaf_names=tuple(leaf_names),
        leaf_means=tuple(means or [0.0] * n),
        leaf_variances=tuple(variances or [1.0] * n),
        hidden=tuple(hidden),
        edges=edges,
        root=idx[root] if root else n,
    )


def two_star():
    return make_model(
        ["x1", "x2", "x3", "x4"], ["w1", "w2"],
        [("x1", "w1", 0.8), ("x2", "w1", 0.8), ("w1", "w2", 0.5), ("x3", "w2", 0.8), ("x4", "w2", 0.8)],
    )


def five_leaf():
    """Fixed 5-leaf, 2-hidden model used by the statistical runs."""
    return make_model(
        ["x1", "x2", "x3", "x4", "x5"], ["w1", "w2"],
        [("x1", "w1", 0.9), ("x2", "w1", -0.85), ("w1", "w2", 0.6),
         ("x3", "w2", 0.9), ("x4", "w2", -0.8), ("x5", "w2", 0.85)],
    )


def graph_of(model):
    g = nx.Graph()
    g.add_nodes_from(range(model.n_nodes))
    for a, b, r in model.edges:
        g.add_edge(a, b, rho=r)
    return g


def brute_leaf_correlations(model):
    """Path products via networkx shortest paths."""
    g = graph_of(model)
    n = model.n_leaves
    out = np.eye(n)
    for i, j in itertools.combinations(range(n), 2):
        path = nx.shortest_path(g, i, j)
        out[i, j] = out[j, i] = math.prod(g.edges[u, v]["rho"] for u, v in zip(path, path[1:]))
    return out


def sem_covariance(model):
    """Covariance of the linear SEM ``v = B v + e`` as ``(I-B)^-1 D (I-B)^-T``.

    Solves the structural equations directly instead of the root-down recursion.
    """
    size = model.n_nodes
    B = np.zeros((size, size))
    D = np.zeros(size)
    D[model.root] = 1.0
    for parent, child in model.traversal():
        lg = model.edge_conditional(child, parent)
        B[child, parent] = lg.slope
        D[child] = lg.noise_var
    inv = np.linalg.inv(np.eye(size) - B)
    return inv @ np.diag(D) @ inv.T


def induced_pairing(model_or_topo, quad):
    """Tree-induced class of a quartet from topological path lengths (four-point rule).

    Returns 0/1/2 for {12|34, 13|24, 14|23} in the order of ``quad``, or 3 for a single center.
    """
    g = nx.Graph()
    g.add_edges_from((e[0], e[1]) for e in model_or_topo.edges)
    d = lambda a, b: nx.shortest_path_length(g, a, b)
    i, j, k, l = quad
    sums = [d(i, j) + d(k, l), d(i, k) + d(j, l), d(i, l) + d(j, k)]
    lo = min(sums)
    if sums.count(lo) > 1:
        return 3
    return sums.index(lo)


def networkx_isomorphic(topo_a, topo_b):
    """Leaf-label-preserving isomorphism through VF2."""
    def graph(t):
        g = nx.Graph()
        for i in range(t.n_nodes):
            g.add_node(i, label=t.leaf_names[i] if i < t.n_leaves else "")
        g.add_edges_from((e[0], e[1]) for e in t.edges)
        return g
    return nx.is_isomorphic(graph(topo_a), graph(topo_b), node_match=lambda a, b: a["label"] == b["label"])


def tree_shapes(n_leaves):
    """All unlabeled trees with ``n_leaves`` leaves and every internal degree >= 3."""
    shapes = []
    for size in range(n_leaves + 1, 2 * n_leaves - 1):
        for g in nx.nonisomorphic_trees(size):
            deg = dict(g.degree())
            leaves = [v for v in g if deg[v] == 1]
            if len(leaves) == n_leaves and all(deg[v] >= 3 for v in g if deg[v] != 1):
                shapes.append(g)
    return shapes


def model_from_shape(g, rng, corr_range=(0.2, 0.95)):
    """Random leaf labeling and random signed edge correlations on a shape."""
    deg = dict(g.degree())
    leaves = [v for v in g if deg[v] == 1]
    internal = [v for v in g if deg[v] != 1]
    n = len(leaves)
    perm = rng.permutation(n)
    idx = {v: int(perm[k]) for k, v in enumerate(leaves)}
    idx.update({v: n + k for k, v in enumerate(internal)})
    lo, hi = corr_range
    edges = []
    for a, b in g.edges():
        mag = rng.uniform(lo, hi)
        edges.append((min(idx[a], idx[b]), max(idx[a], idx[b]), float(mag if rng.random() < 0.5 else -mag)))
    return TreeModel(
        leaf_names=tuple(f"x{i + 1}" for i in range(n)),
        leaf_means=(0.0,) * n,
        leaf_variances=(1.0,) * n,
        hidden=tuple(f"w{k + 1}" for k in range(len(internal))),
        edges=tuple(sorted(edges)),
        root=n,
    )


def edges_by_split(model):
    """Map each edge's leaf bipartition (side without leaf 0) to its correlation."""
    g = graph_of(model)
    out = {}
    for a, b, r in model.edges:
        h = g.copy()
        h.remove_edge(a, b)
        side = {v for v in nx.node_connected_component(h, b) if v < model.n_leaves}
        if 0 in side:
            side = set(range(model.n_leaves)) - side
        out[frozenset(side)] = r
    return out
