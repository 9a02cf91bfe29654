# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels. Semantics mirror ``_kernels_py`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

PAIR_12_34, PAIR_13_24, PAIR_14_23, DEGENERATE = 0, 1, 2, 3
NO_EQUALITY, NOT_MINIMAL = -1, -2


cdef inline bint _close(double x, double y, double eq_tol) nogil:
    cdef double m = x if x > y else y
    return fabs(x - y) <= eq_tol * m


cdef inline double _max2(double x, double y) nogil:
    return x if x > y else y


cdef inline int _classify(double pa, double pb, double pc, double eq_tol) nogil:
    cdef double a = fabs(pa), b = fabs(pb), c = fabs(pc)
    cdef int e_ac = _close(a, c, eq_tol)
    cdef int e_bc = _close(b, c, eq_tol)
    cdef int e_ab = _close(a, b, eq_tol)
    if e_ac + e_bc + e_ab >= 2:
        return 3
    if e_ac:
        return 0 if b > _max2(a, c) else -2
    if e_bc:
        return 1 if a > _max2(b, c) else -2
    if e_ab:
        return 2 if c > _max2(a, b) else -2
    return -1


cdef inline int _star_code(double r12, double r13, double r23, double dep_floor, double unit_tol) nogil:
    cdef double a12 = fabs(r12), a13 = fabs(r13), a23 = fabs(r23)
    cdef double s = 1.0 - unit_tol
    if a12 < dep_floor or a13 < dep_floor or a23 < dep_floor:
        return 1
    if r12 * r13 * r23 <= 0:
        return 2
    if a23 < a12 * a13 * s or a13 < a12 * a23 * s or a12 < a13 * a23 * s:
        return 3
    return 0


def classify_products(double pa, double pb, double pc, double eq_tol):
    return _classify(pa, pb, pc, eq_tol)


def star_code(double r12, double r13, double r23, double dep_floor, double unit_tol):
    return _star_code(r12, r13, r23, dep_floor, unit_tol)


def first_star_violation(rho, double dep_floor, double unit_tol):
    cdef const double[:, ::1] r = np.ascontiguousarray(rho, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0], i, j, k
    cdef int code
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                code = _star_code(r[i, j], r[i, k], r[j, k], dep_floor, unit_tol)
                if code:
                    return int(i), int(j), int(k), code
    return None


def classify_quartets(rho, quads, double eq_tol):
    cdef const double[:, ::1] r = np.ascontiguousarray(rho, dtype=np.float64)
    cdef const cnp.intp_t[:, ::1] q = np.ascontiguousarray(np.asarray(quads, dtype=np.intp).reshape(-1, 4))
    cdef Py_ssize_t nq = q.shape[0], t
    cdef Py_ssize_t i, j, k, l
    out = np.empty(nq, dtype=np.int8)
    cdef cnp.int8_t[::1] o = out
    with nogil:
        for t in range(nq):
            i = q[t, 0]; j = q[t, 1]; k = q[t, 2]; l = q[t, 3]
            o[t] = _classify(r[i, k] * r[j, l], r[i, j] * r[k, l], r[i, l] * r[j, k], eq_tol)
    return out


def node_correlations(Py_ssize_t n_nodes, edge_a, edge_b, corr):
    cdef const cnp.intp_t[::1] ea = np.ascontiguousarray(edge_a, dtype=np.intp)
    cdef const cnp.intp_t[::1] eb = np.ascontiguousarray(edge_b, dtype=np.intp)
    cdef const double[::1] ec = np.ascontiguousarray(corr, dtype=np.float64)
    cdef Py_ssize_t n_edges = ea.shape[0], e, s, u, v, p, top
    if eb.shape[0] != n_edges or ec.shape[0] != n_edges:
        raise ValueError("edge arrays differ in length")
    for e in range(n_edges):
        if ea[e] < 0 or ea[e] >= n_nodes or eb[e] < 0 or eb[e] >= n_nodes:
            raise IndexError(f"edge {e} references a node outside 0..{n_nodes - 1}")

    # CSR adjacency
    deg_np = np.zeros(n_nodes + 1, dtype=np.intp)
    cdef cnp.intp_t[::1] ptr = deg_np
    for e in range(n_edges):
        ptr[ea[e] + 1] += 1
        ptr[eb[e] + 1] += 1
    for u in range(n_nodes):
        ptr[u + 1] += ptr[u]
    nbr_np = np.empty(2 * n_edges, dtype=np.intp)
    w_np = np.empty(2 * n_edges, dtype=np.float64)
    fill_np = np.array(deg_np[:n_nodes], copy=True)
    cdef cnp.intp_t[::1] nbr = nbr_np
    cdef double[::1] w = w_np
    cdef cnp.intp_t[::1] fill = fill_np
    for e in range(n_edges):
        u = ea[e]; v = eb[e]
        nbr[fill[u]] = v; w[fill[u]] = ec[e]; fill[u] += 1
        nbr[fill[v]] = u; w[fill[v]] = ec[e]; fill[v] += 1

    out_np = np.zeros((n_nodes, n_nodes), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    seen_np = np.empty(n_nodes, dtype=np.uint8)
    stack_np = np.empty(n_nodes, dtype=np.intp)
    cdef cnp.uint8_t[::1] seen = seen_np
    cdef cnp.intp_t[::1] stack = stack_np
    with nogil:
        for s in range(n_nodes):
            for u in range(n_nodes):
                seen[u] = 0
            out[s, s] = 1.0
            seen[s] = 1
            stack[0] = s
            top = 1
            while top > 0:
                top -= 1
                u = stack[top]
                for p in range(ptr[u], ptr[u + 1]):
                    v = nbr[p]
                    if not seen[v]:
                        seen[v] = 1
                        out[s, v] = out[s, u] * w[p]
                        stack[top] = v
                        top += 1
    return out_np
