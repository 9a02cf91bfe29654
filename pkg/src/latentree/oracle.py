"""Forward model: implied correlations, joint covariance, sampling, estimation."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import kernels
from .model import (
    CorrelationMatrix,
    CovarianceMatrix,
    DegenerateModelWarning,
    DegenerateVariableError,
    ShapeError,
    TreeModel,
    covariance_to_correlation,
    tree_is_valid,
)


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != len(self.names):
            raise ShapeError(f"{len(self.names)} names for sample array of shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("a sample matrix needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sample matrix contains missing or non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]


def _require_valid(t: TreeModel) -> None:
    report = tree_is_valid(t)
    if not report:
        raise ValueError("invalid tree model: " + "; ".join(report.violations))


def node_correlations(t: TreeModel) -> np.ndarray:
    """Path-product correlations between all ``n + m`` nodes."""
    a, b, c = zip(*t.edges)
    return kernels.node_correlations(t.n_nodes, np.array(a), np.array(b), np.array(c, dtype=float))


def leaf_correlations(t: TreeModel) -> CorrelationMatrix:
    """Correlation of every leaf pair as the product of edge correlations on their path."""
    _require_valid(t)
    n = t.n_leaves
    return CorrelationMatrix(node_correlations(t)[:n, :n], t.leaf_names)


def joint_covariance(t: TreeModel) -> CovarianceMatrix:
    """Covariance over all leaves and hidden nodes, built root-down.

    Emits :class:`DegenerateModelWarning` when some edge is noise-free; the
    matrix is then singular but still PSD.
    """
    _require_valid(t)
    size = t.n_nodes
    cov = np.zeros((size, size))
    means = np.zeros(size)
    cov[t.root, t.root] = 1.0
    done = [t.root]
    degenerate = False
    for parent, child in t.traversal():
        lg = t.edge_conditional(child, parent)
        if lg.noise_var == 0.0:
            degenerate = True
        row = lg.slope * cov[parent, done]
        cov[child, done] = row
        cov[done, child] = row
        cov[child, child] = lg.slope ** 2 * cov[parent, parent] + lg.noise_var
        means[child] = lg.intercept + lg.slope * means[parent]
        done.append(child)
    if degenerate:
        warnings.warn("model has a noise-free edge; joint covariance is singular", DegenerateModelWarning, stacklevel=2)
    return CovarianceMatrix(cov, means, t.leaf_names + t.hidden)


def marginal_leaf_block(c: CovarianceMatrix, indices: Sequence[int]) -> CovarianceMatrix:
    """Marginal of a Gaussian over ``indices``: the matching sub-block."""
    idx = [int(i) for i in indices]
    if not idx or any(not 0 <= i < c.n for i in idx) or len(set(idx)) != len(idx):
        raise IndexError(f"bad index set {list(indices)} for a {c.n}-variable covariance")
    return CovarianceMatrix(c.values[np.ix_(idx, idx)], c.means[idx], tuple(c.names[i] for i in idx))


def sample(t: TreeModel, n_obs: int, seed: int | None = None) -> SampleMatrix:
    """Ancestral sampling from the root down; only leaf columns are returned."""
    if n_obs < 1:
        raise ValueError(f"n_obs must be >= 1, got {n_obs}")
    _require_valid(t)
    if t.degenerate:
        warnings.warn("sampling a model with a noise-free edge", DegenerateModelWarning, stacklevel=2)
    rng = np.random.default_rng(seed)
    values = np.empty((t.n_nodes, n_obs))
    values[t.root] = rng.standard_normal(n_obs)
    for parent, child in t.traversal():
        lg = t.edge_conditional(child, parent)
        noise = rng.standard_normal(n_obs) * np.sqrt(lg.noise_var)
        values[child] = lg.intercept + lg.slope * values[parent] + noise
    return SampleMatrix(t.leaf_names, values[: t.n_leaves].T)


def estimate_correlations(s: SampleMatrix) -> CorrelationMatrix:
    """Sample correlations (divisor ``n_obs - 1``), clamped into [-1, 1]."""
    if s.n_obs < 2:
        raise ValueError(f"need at least 2 observations, got {s.n_obs}")
    cov = np.atleast_2d(np.cov(s.values, rowvar=False, ddof=1))
    var = np.diag(cov)
    if np.any(var <= 0):
        bad = int(np.argmax(var <= 0))
        raise DegenerateVariableError(f"column {s.names[bad]!r} is constant")
    rho = covariance_to_correlation(CovarianceMatrix(cov, s.values.mean(axis=0), s.names)).values
    return CorrelationMatrix(np.clip(rho, -1.0, 1.0), s.names)


def sample_moments(s: SampleMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Column means and unbiased variances."""
    return s.values.mean(axis=0), s.values.var(axis=0, ddof=1)


def random_tree_model(
    n_leaves: int,
    rng: np.random.Generator,
    corr_range: tuple[float, float] = (0.2, 0.95),
    attach_prob: float = 0.3,
    leaf_names: Sequence[str] | None = None,
) -> TreeModel:
    """Random valid tree: grow from a 3-star by subdividing edges or attaching to hidden nodes.

    Edge correlation magnitudes are uniform on ``corr_range`` with random signs;
    leaves are shuffled so their labels carry no positional information.
    """
    if n_leaves < 3:
        raise ValueError("need at least 3 leaves")
    # build with provisional ids: leaves 0.., hidden from 1000
    hid = [1000]
    edges = [(1000, 0), (1000, 1), (1000, 2)]
    for x in range(3, n_leaves):
        if rng.random() < attach_prob:
            w = hid[rng.integers(len(hid))]
            edges.append((w, x))
        else:
            k = rng.integers(len(edges))
            a, b = edges.pop(k)
            h = 1000 + len(hid)
            hid.append(h)
            edges += [(a, h), (h, b), (h, x)]
    perm = rng.permutation(n_leaves)
    remap = {i: int(perm[i]) for i in range(n_leaves)}
    remap.update({h: n_leaves + k for k, h in enumerate(hid)})
    lo, hi = corr_range
    out = []
    for a, b in edges:
        u, v = sorted((remap[a], remap[b]))
        mag = rng.uniform(lo, hi)
        out.append((u, v, float(mag if rng.random() < 0.5 else -mag)))
    names = tuple(leaf_names) if leaf_names else tuple(f"x{i + 1}" for i in range(n_leaves))
    return TreeModel(
        leaf_names=names,
        leaf_means=(0.0,) * n_leaves,
        leaf_variances=(1.0,) * n_leaves,
        hidden=tuple(f"w{k + 1}" for k in range(len(hid))),
        edges=tuple(sorted(out)),
        root=n_leaves,
    )
