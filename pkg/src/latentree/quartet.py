"""Topology of four leaves from their cross-products of correlations.

For leaves ``1..4`` the three pairings have products
``p_a = r13*r24``, ``p_b = r12*r34`` and ``p_c = r14*r23``. In a tree the two
products that cross the internal edge are equal and smaller than the third.
"""
from __future__ import annotations

import enum
import itertools

import numpy as np

from ._backend import kernels
from .model import DEFAULT_TOL, NotStarDecomposable, NotTreeDecomposable, Tolerances
from .star import is_star_decomposable


class QuartetClass(enum.Enum):
    PAIR_12_34 = 0
    PAIR_13_24 = 1
    PAIR_14_23 = 2
    DEGENERATE = 3

    def pairs(self) -> tuple[tuple[int, int], tuple[int, int]] | None:
        """The two sibling pairs as 0-based positions, or None when degenerate."""
        return _PAIRS.get(self)


_PAIRS = {
    QuartetClass.PAIR_12_34: ((0, 1), (2, 3)),
    QuartetClass.PAIR_13_24: ((0, 2), (1, 3)),
    QuartetClass.PAIR_14_23: ((0, 3), (1, 2)),
}


def _as_array(rho) -> np.ndarray:
    arr = np.asarray(getattr(rho, "values", rho), dtype=float)
    if arr.shape != (4, 4):
        raise ValueError(f"expected a 4x4 correlation block, got shape {arr.shape}")
    return arr


def cross_products(rho) -> tuple[float, float, float]:
    r = _as_array(rho)
    return r[0, 2] * r[1, 3], r[0, 1] * r[2, 3], r[0, 3] * r[1, 2]


def classify_quartet(rho, tol: Tolerances = DEFAULT_TOL, labels=None) -> QuartetClass:
    """Classify a 4x4 correlation block into one of the four topologies.

    Every triplet must be star-decomposable first. ``labels`` only feeds the
    error messages.
    """
    r = _as_array(rho)
    labels = labels or (1, 2, 3, 4)
    for i, j, k in itertools.combinations(range(4), 3):
        decision = is_star_decomposable(r[i, j], r[i, k], r[j, k], tol)
        if not decision:
            raise NotStarDecomposable(
                f"triplet ({labels[i]}, {labels[j]}, {labels[k]}) fails the {decision.reason} condition"
            )
    code = kernels.classify_products(*cross_products(r), tol.eq_tol)
    if code < 0:
        raise NotTreeDecomposable(_quartet_failure(code, labels))
    return QuartetClass(code)


def _quartet_failure(code: int, labels) -> str:
    quad = ", ".join(str(x) for x in labels)
    if code == kernels.NO_EQUALITY:
        return f"quartet ({quad}): no characteristic equality holds"
    return f"quartet ({quad}): equal cross-products are not the smallest pair"


def classify_quartets(rho, quads=None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Batch classification; returns raw kernel codes (negative = failure).

    ``quads`` defaults to every 4-subset in lexicographic order. Triplet
    preconditions are not checked here; see :func:`check_all_triplets`.
    """
    r = np.asarray(getattr(rho, "values", rho), dtype=float)
    if quads is None:
        quads = all_quads(r.shape[0])
    return kernels.classify_quartets(r, quads, tol.eq_tol)


def all_quads(n: int) -> np.ndarray:
    quads = np.array(list(itertools.combinations(range(n), 4)), dtype=np.intp)
    return quads.reshape(-1, 4)


def check_all_triplets(rho, tol: Tolerances = DEFAULT_TOL, names=None) -> None:
    """Raise on the first triplet that is not star-decomposable."""
    r = np.asarray(getattr(rho, "values", rho), dtype=float)
    hit = kernels.first_star_violation(r, tol.dep_floor, tol.unit_tol)
    if hit is None:
        return
    i, j, k, code = hit
    names = names or getattr(rho, "names", None) or [str(x) for x in range(r.shape[0])]
    # re-run the scalar test for the proper exception type and reason
    is_star_decomposable(r[i, j], r[i, k], r[j, k], tol)
    reason = {2: "sign", 3: "magnitude"}[code]
    raise NotStarDecomposable(f"triplet ({names[i]}, {names[j]}, {names[k]}) fails the {reason} condition")
