"""Pure-Python kernels; the reference the compiled ``_kernels`` must match.

Quartet class codes: 0 = pairs {1,2}{3,4}, 1 = {1,3}{2,4}, 2 = {1,4}{2,3},
3 = degenerate (single center), -1 = no characteristic equality holds,
-2 = an equality holds but its products are not the smallest.

Star violation codes: 1 = dependency floor, 2 = sign, 3 = magnitude.
"""
import itertools

import numpy as np

PAIR_12_34, PAIR_13_24, PAIR_14_23, DEGENERATE = 0, 1, 2, 3
NO_EQUALITY, NOT_MINIMAL = -1, -2


def _close(x, y, eq_tol):
    return abs(x - y) <= eq_tol * max(x, y)


def classify_products(pa, pb, pc, eq_tol):
    """Classify from ``pa = r13*r24``, ``pb = r12*r34``, ``pc = r14*r23``."""
    # plain floats: numpy bools would add as logical or in the count below
    a, b, c = abs(float(pa)), abs(float(pb)), abs(float(pc))
    e_ac = int(_close(a, c, eq_tol))
    e_bc = int(_close(b, c, eq_tol))
    e_ab = int(_close(a, b, eq_tol))
    if e_ac + e_bc + e_ab >= 2:
        return DEGENERATE
    if e_ac:
        return PAIR_12_34 if b > max(a, c) else NOT_MINIMAL
    if e_bc:
        return PAIR_13_24 if a > max(b, c) else NOT_MINIMAL
    if e_ab:
        return PAIR_14_23 if c > max(a, b) else NOT_MINIMAL
    return NO_EQUALITY


def star_code(r12, r13, r23, dep_floor, unit_tol):
    a12, a13, a23 = abs(r12), abs(r13), abs(r23)
    if a12 < dep_floor or a13 < dep_floor or a23 < dep_floor:
        return 1
    if r12 * r13 * r23 <= 0:
        return 2
    s = 1.0 - unit_tol
    if a23 < a12 * a13 * s or a13 < a12 * a23 * s or a12 < a13 * a23 * s:
        return 3
    return 0


def first_star_violation(rho, dep_floor, unit_tol):
    """First triplet ``(i, j, k, code)`` in lexicographic order that fails, else None."""
    rho = np.asarray(rho, dtype=float)
    n = rho.shape[0]
    for i, j, k in itertools.combinations(range(n), 3):
        code = star_code(rho[i, j], rho[i, k], rho[j, k], dep_floor, unit_tol)
        if code:
            return i, j, k, code
    return None


def classify_quartets(rho, quads, eq_tol):
    rho = np.asarray(rho, dtype=float)
    quads = np.asarray(quads, dtype=np.intp).reshape(-1, 4)
    out = np.empty(len(quads), dtype=np.int8)
    for q, (i, j, k, l) in enumerate(quads):
        out[q] = classify_products(rho[i, k] * rho[j, l], rho[i, j] * rho[k, l], rho[i, l] * rho[j, k], eq_tol)
    return out


def node_correlations(n_nodes, edge_a, edge_b, corr):
    """Path-product correlation between every pair of nodes of a tree."""
    if not len(edge_a) == len(edge_b) == len(corr):
        raise ValueError("edge arrays differ in length")
    adj = [[] for _ in range(n_nodes)]
    for e, (a, b, r) in enumerate(zip(edge_a, edge_b, corr)):
        if not (0 <= a < n_nodes and 0 <= b < n_nodes):
            raise IndexError(f"edge {e} references a node outside 0..{n_nodes - 1}")
        adj[a].append((b, float(r)))
        adj[b].append((a, float(r)))
    out = np.zeros((n_nodes, n_nodes))
    for s in range(n_nodes):
        row = out[s]
        row[s] = 1.0
        seen = [False] * n_nodes
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for v, r in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    row[v] = row[u] * r
                    stack.append(v)
    return out
