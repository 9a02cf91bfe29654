"""Star decomposition of correlation triplets.

A triplet ``(x1, x2, x3)`` is star-decomposable when all three variables are
conditionally independent given a single standardized hidden center ``w``.
The correlations then factor as ``rho_ij = rho_iw * rho_jw``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .model import (
    DEFAULT_TOL,
    GenuineDependencyError,
    LinearGaussian,
    NotStarDecomposable,
    Tolerances,
)

SIGN = "sign"
MAGNITUDE = "magnitude"


class StarDecision(NamedTuple):
    decomposable: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.decomposable


@dataclass(frozen=True)
class StarSolution:
    loadings: tuple[float, float, float]
    leaf_conditionals: tuple[LinearGaussian, LinearGaussian, LinearGaussian] | None = None
    degenerate_with_leaf: int | None = None


def _check_inputs(rhos, tol: Tolerances) -> None:
    for r in rhos:
        if not -1.0 <= r <= 1.0:
            raise ValueError(f"correlation {r!r} outside [-1, 1]")
        if abs(r) < tol.dep_floor:
            raise GenuineDependencyError(
                f"|rho| = {abs(r):g} is below dep_floor {tol.dep_floor:g}; "
                "the pair is treated as independent"
            )


def is_star_decomposable(r12: float, r13: float, r23: float, tol: Tolerances = DEFAULT_TOL) -> StarDecision:
    """Test whether the triplet admits a hidden center.

    Two conditions are checked in order: the product of the three
    correlations must be positive, and for every rotation
    ``|rho_jk| >= |rho_ji| * |rho_ik|``. The magnitude test allows a relative
    slack of ``unit_tol`` so that exact boundary cases (a center coinciding
    with a leaf) survive rounding.
    """
    _check_inputs((r12, r13, r23), tol)
    if r12 * r13 * r23 <= 0:
        return StarDecision(False, SIGN)
    a12, a13, a23 = abs(r12), abs(r13), abs(r23)
    slack = 1.0 - tol.unit_tol
    if a23 < a12 * a13 * slack or a13 < a12 * a23 * slack or a12 < a13 * a23 * slack:
        return StarDecision(False, MAGNITUDE)
    return StarDecision(True)


def solve_star_loadings(r12: float, r13: float, r23: float, tol: Tolerances = DEFAULT_TOL) -> StarSolution:
    """Loadings ``(rho_1w, rho_2w, rho_3w)`` with ``rho_1w`` taken positive."""
    decision = is_star_decomposable(r12, r13, r23, tol)
    if not decision:
        raise NotStarDecomposable(
            f"triplet ({r12:g}, {r13:g}, {r23:g}) fails the {decision.reason} condition"
        )
    l1 = math.sqrt(abs(r12 * r13 / r23))
    l2 = r12 / l1
    l3 = r13 / l1
    loadings = [l1, l2, l3]
    degenerate = None
    for i, val in enumerate(loadings):
        if abs(val) >= 1.0 - tol.unit_tol:
            # within the slack band: snap onto the unit boundary
            loadings[i] = math.copysign(min(abs(val), 1.0), val)
            if degenerate is None:
                degenerate = i
    return StarSolution(tuple(loadings), None, degenerate)


def star_conditionals(
    loadings: Sequence[float],
    means: Sequence[float] = (0.0, 0.0, 0.0),
    variances: Sequence[float] = (1.0, 1.0, 1.0),
) -> tuple[LinearGaussian, LinearGaussian, LinearGaussian]:
    """Leaf conditionals f(x_i | w) for a standard-normal center ``w``."""
    out = []
    for rho, mu, var in zip(loadings, means, variances):
        if not var > 0:
            raise ValueError(f"leaf variance must be positive, got {var}")
        if abs(rho) > 1.0:
            raise ValueError(f"loading {rho} has magnitude above 1")
        out.append(LinearGaussian(
            slope=rho * math.sqrt(var),
            intercept=float(mu),
            noise_var=max(0.0, var * (1.0 - rho * rho)),
        ))
    return tuple(out)


def solve_star(
    r12: float,
    r13: float,
    r23: float,
    means: Sequence[float] = (0.0, 0.0, 0.0),
    variances: Sequence[float] = (1.0, 1.0, 1.0),
    tol: Tolerances = DEFAULT_TOL,
) -> StarSolution:
    """Loadings plus leaf conditionals in one call."""
    sol = solve_star_loadings(r12, r13, r23, tol)
    return StarSolution(sol.loadings, star_conditionals(sol.loadings, means, variances), sol.degenerate_with_leaf)
