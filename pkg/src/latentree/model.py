"""Shared domain types, exceptions and validity checks.

Node indexing convention used throughout the package: leaves occupy node
indices ``0 .. n-1`` (in the order of ``leaf_names``) and hidden nodes occupy
``n .. n+m-1`` (in the order of ``hidden``).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class LatentTreeError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(LatentTreeError, ValueError):
    pass


class DegenerateVariableError(LatentTreeError, ValueError):
    """A variable has zero (or negative) variance."""


class GenuineDependencyError(LatentTreeError, ValueError):
    """A correlation is too close to zero to count as a real dependency."""


class NotTreeDecomposable(LatentTreeError):
    """The correlations cannot be produced by a Gaussian latent tree."""


class NotStarDecomposable(NotTreeDecomposable):
    """A triplet of correlations admits no single hidden center."""


class InconsistencyError(NotTreeDecomposable):
    """Recovered parameters contradict each other (|rho| >= 1 on an internal edge)."""


class DegenerateModelWarning(UserWarning):
    """The model contains a noise-free edge; its joint covariance is singular."""


@dataclass(frozen=True)
class Tolerances:
    eq_tol: float = 1e-6
    psd_tol: float = 1e-10
    dep_floor: float = 1e-3
    unit_tol: float = 1e-9

    def __post_init__(self):
        for name in ("eq_tol", "psd_tol", "dep_floor", "unit_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.eq_tol < 1:
            raise ValueError("eq_tol must be < 1")


DEFAULT_TOL = Tolerances()


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _default_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Pairwise correlations of the observed leaves.

    Only squareness is enforced on construction; the remaining invariants
    are reported by :func:`validate_correlation_matrix`.
    """

    values: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeError(f"correlation matrix must be square, got shape {arr.shape}")
        object.__setattr__(self, "values", _frozen(arr))
        names = tuple(self.names) if self.names else _default_names(arr.shape[0])
        if len(names) != arr.shape[0]:
            raise ShapeError(f"{len(names)} names for a {arr.shape[0]}x{arr.shape[0]} matrix")
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, key):
        return self.values[key]

    def submatrix(self, indices: Sequence[int]) -> "CorrelationMatrix":
        idx = list(indices)
        return CorrelationMatrix(self.values[np.ix_(idx, idx)], tuple(self.names[i] for i in idx))


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    values: np.ndarray
    means: np.ndarray | None = None
    names: tuple[str, ...] = ()

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeError(f"covariance matrix must be square, got shape {arr.shape}")
        n = arr.shape[0]
        object.__setattr__(self, "values", _frozen(arr))
        means = np.zeros(n) if self.means is None else np.asarray(self.means, dtype=float)
        if means.shape != (n,):
            raise ShapeError(f"means must have shape ({n},), got {means.shape}")
        object.__setattr__(self, "means", _frozen(means))
        names = tuple(self.names) if self.names else _default_names(n)
        if len(names) != n:
            raise ShapeError(f"{len(names)} names for a {n}x{n} matrix")
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class LinearGaussian:
    """Edge conditional ``child = intercept + slope * parent + N(0, noise_var)``."""

    slope: float
    intercept: float = 0.0
    noise_var: float = 0.0

    def __post_init__(self):
        if self.noise_var < 0:
            raise ValueError(f"noise_var must be >= 0, got {self.noise_var}")

    def compose(self, upstream: "LinearGaussian") -> "LinearGaussian":
        """Conditional of the child given the parent of ``upstream``'s child.

        ``self`` is f(x | a) and ``upstream`` is f(a | b); the result is
        f(x | b) obtained by integrating a out.
        """
        return LinearGaussian(
            slope=self.slope * upstream.slope,
            intercept=self.intercept + self.slope * upstream.intercept,
            noise_var=self.noise_var + self.slope ** 2 * upstream.noise_var,
        )


@dataclass(frozen=True)
class Topology:
    """Tree structure over named leaves and anonymous hidden nodes.

    ``edges`` hold node-index pairs with ``a < b``. ``coincident`` lists
    ``(hidden_index, leaf_index)`` pairs where the hidden center is
    indistinguishable from the leaf (a noise-free edge).
    """

    leaf_names: tuple[str, ...]
    hidden: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    coincident: tuple[tuple[int, int], ...] = ()

    @property
    def n_leaves(self) -> int:
        return len(self.leaf_names)

    @property
    def n_nodes(self) -> int:
        return len(self.leaf_names) + len(self.hidden)

    def node_name(self, idx: int) -> str:
        n = self.n_leaves
        return self.leaf_names[idx] if idx < n else self.hidden[idx - n]

    def adjacency(self) -> list[list[int]]:
        return adjacency(self.n_nodes, self.edges)


@dataclass(frozen=True)
class TreeModel:
    """A fully parameterized Gaussian latent tree.

    Hidden nodes are standardized (mean 0, variance 1). ``edges`` carry the
    undirected edge correlation as a third element. Directed conditionals
    away from ``root`` are derived by :meth:`conditionals`.
    """

    leaf_names: tuple[str, ...]
    leaf_means: tuple[float, ...]
    leaf_variances: tuple[float, ...]
    hidden: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...]
    root: int
    coincident: tuple[tuple[int, int], ...] = ()
    notes: tuple[str, ...] = field(default=())

    @property
    def n_leaves(self) -> int:
        return len(self.leaf_names)

    @property
    def n_nodes(self) -> int:
        return len(self.leaf_names) + len(self.hidden)

    @property
    def degenerate(self) -> bool:
        return bool(self.coincident)

    def node_name(self, idx: int) -> str:
        n = self.n_leaves
        return self.leaf_names[idx] if idx < n else self.hidden[idx - n]

    def node_index(self, name: str) -> int:
        names = self.leaf_names + self.hidden
        return names.index(name)

    def topology(self) -> Topology:
        return Topology(
            self.leaf_names,
            self.hidden,
            tuple((a, b) for a, b, _ in self.edges),
            self.coincident,
        )

    def adjacency(self) -> list[list[int]]:
        return adjacency(self.n_nodes, [(a, b) for a, b, _ in self.edges])

    def edge_correlation(self, a: int, b: int) -> float:
        for u, v, r in self.edges:
            if (u, v) == (a, b) or (u, v) == (b, a):
                return r
        raise KeyError(f"no edge between nodes {a} and {b}")

    def traversal(self) -> list[tuple[int, int]]:
        """``(parent, child)`` pairs in breadth-first order from the root."""
        adj = self.adjacency()
        out = []
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    out.append((u, v))
                    queue.append(v)
        return out

    def edge_conditional(self, child: int, parent: int) -> LinearGaussian:
        """f(child | parent) for any pair of adjacent nodes, either direction."""
        rho = self.edge_correlation(child, parent)
        n = self.n_leaves
        if parent < n:
            # leaf parent: standardize it before regressing
            sd = np.sqrt(self.leaf_variances[parent])
            mu = self.leaf_means[parent]
            base = LinearGaussian(slope=rho / sd, intercept=-rho * mu / sd, noise_var=1.0 - rho ** 2)
        else:
            base = LinearGaussian(slope=rho, intercept=0.0, noise_var=max(0.0, 1.0 - rho ** 2))
        if child < n:
            sd = np.sqrt(self.leaf_variances[child])
            return LinearGaussian(
                slope=base.slope * sd,
                intercept=self.leaf_means[child] + base.intercept * sd,
                noise_var=max(0.0, base.noise_var) * self.leaf_variances[child],
            )
        return base

    def conditionals(self) -> dict[tuple[int, int], LinearGaussian]:
        return {(p, c): self.edge_conditional(c, p) for p, c in self.traversal()}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def adjacency(n_nodes: int, edges) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n_nodes)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    for row in adj:
        row.sort()
    return adj


def validate_correlation_matrix(m, tol: Tolerances = DEFAULT_TOL) -> ValidationReport:
    """Check symmetry, unit diagonal, range, PSD and the dependency floor."""
    arr = np.asarray(m.values if isinstance(m, CorrelationMatrix) else m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"correlation matrix must be square, got shape {arr.shape}")
    n = arr.shape[0]
    problems = []
    if not np.all(np.isfinite(arr)):
        return ValidationReport(("non-finite entries",))
    if np.any(np.abs(arr) > 1.0):
        i, j = np.argwhere(np.abs(arr) > 1.0)[0]
        problems.append(f"range: |rho[{i},{j}]| = {abs(arr[i, j]):g} exceeds 1")
    if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-12):
        problems.append("asymmetry: matrix is not symmetric")
    if not np.allclose(np.diag(arr), 1.0, rtol=0.0, atol=1e-12):
        problems.append("diagonal: diagonal entries are not all 1")
    eig = np.linalg.eigvalsh((arr + arr.T) / 2)
    if eig[0] < -tol.psd_tol * max(eig[-1], 1.0):
        problems.append(f"psd: smallest eigenvalue {eig[0]:.3g} is negative")
    off = np.abs(arr[~np.eye(n, dtype=bool)])
    if off.size and off.min() < tol.dep_floor:
        problems.append(f"dependency: min |rho| = {off.min():.3g} below dep_floor {tol.dep_floor:g}")
    return ValidationReport(tuple(problems))


def covariance_to_correlation(c: CovarianceMatrix) -> CorrelationMatrix:
    arr = c.values
    d = np.diag(arr)
    if np.any(d <= 0):
        bad = int(np.argmax(d <= 0))
        raise DegenerateVariableError(f"variable {c.names[bad]!r} has non-positive variance {d[bad]:g}")
    sd = np.sqrt(d)
    rho = arr / np.outer(sd, sd)
    np.fill_diagonal(rho, 1.0)
    return CorrelationMatrix(rho, c.names)


def _structure_violations(n_leaves: int, n_hidden: int, edges) -> list[str]:
    problems = []
    n_nodes = n_leaves + n_hidden
    for a, b in edges:
        if not (0 <= a < n_nodes and 0 <= b < n_nodes) or a == b:
            return [f"edges: invalid edge ({a}, {b})"]
    if len(edges) != n_nodes - 1:
        problems.append(f"tree: {len(edges)} edges for {n_nodes} nodes")
    adj = adjacency(n_nodes, edges)
    if n_nodes:
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != n_nodes:
            problems.append("connectivity: tree is not connected")
    if len({frozenset(e) for e in edges}) != len(edges):
        problems.append("edges: duplicate edge")
    for i in range(n_leaves):
        if len(adj[i]) != 1:
            problems.append(f"leaf degree: leaf {i} has degree {len(adj[i])}")
    for h in range(n_leaves, n_nodes):
        if len(adj[h]) < 3:
            problems.append(f"hidden degree: hidden node {h} has degree {len(adj[h])} < 3")
    if n_hidden > max(n_leaves - 2, 0):
        problems.append(f"hidden count: {n_hidden} hidden nodes for {n_leaves} leaves")
    return problems


def tree_is_valid(t: TreeModel | Topology, tol: Tolerances = DEFAULT_TOL) -> ValidationReport:
    """Report every violated structural (and, for models, parameter) invariant."""
    n, m = len(t.leaf_names), len(t.hidden)
    pairs = [(e[0], e[1]) for e in t.edges]
    problems = _structure_violations(n, m, pairs)
    names = list(t.leaf_names) + list(t.hidden)
    if len(set(names)) != len(names):
        problems.append("names: leaf names and hidden ids must be unique")
    if isinstance(t, TreeModel):
        if not (n <= t.root < n + m):
            problems.append(f"root: node {t.root} is not a hidden node")
        if any(not v > 0 for v in t.leaf_variances):
            problems.append("variance: leaf variances must be positive")
        if len(t.leaf_means) != n or len(t.leaf_variances) != n:
            problems.append("leaves: means/variances do not match leaf count")
        allowed = {frozenset(p) for p in t.coincident}
        for a, b, r in t.edges:
            mag = abs(r)
            if mag < tol.dep_floor:
                problems.append(f"edge ({a}, {b}): |rho| = {mag:g} below dep_floor")
            elif mag > 1.0 - tol.unit_tol and not (frozenset((a, b)) in allowed and mag <= 1.0):
                problems.append(f"edge ({a}, {b}): |rho| = {mag:g} too close to 1")
    return ValidationReport(tuple(problems))
