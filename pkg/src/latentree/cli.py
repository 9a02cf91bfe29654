"""Command-line front end.

Exit codes: 0 success, 1 input or I/O error, 2 mathematical rejection
(not decomposable, or validation outside tolerance).
"""
from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import __version__
from .builder import build_topology, consistency_check
from .io import (
    InputFormatError,
    dumps_model,
    looks_like_matrix,
    read_matrix,
    read_model,
    read_rows,
    read_samples,
    samples_to_csv,
    write_model,
)
from .model import (
    CorrelationMatrix,
    CovarianceMatrix,
    DegenerateModelWarning,
    DegenerateVariableError,
    GenuineDependencyError,
    NotTreeDecomposable,
    ShapeError,
    Tolerances,
    covariance_to_correlation,
    validate_correlation_matrix,
)
from .oracle import estimate_correlations, leaf_correlations, sample, sample_moments
from .params import assemble_tree_model
from .star import is_star_decomposable, solve_star

EXIT_OK, EXIT_INPUT, EXIT_REJECT = 0, 1, 2


class _InputError(Exception):
    pass


def _tolerances(args) -> Tolerances:
    defaults = Tolerances()
    try:
        return Tolerances(
            eq_tol=args.tol if getattr(args, "tol", None) is not None else defaults.eq_tol,
            dep_floor=args.dep_floor if args.dep_floor is not None else defaults.dep_floor,
        )
    except ValueError as exc:
        raise _InputError(str(exc)) from None


def _load_correlations(path, covariance: bool):
    """Returns (correlation matrix, means, variances)."""
    names, values = read_matrix(path)
    if covariance:
        cov = CovarianceMatrix(values, None, names)
        return covariance_to_correlation(cov), np.zeros(len(names)), np.diag(values).copy()
    return CorrelationMatrix(values, names), np.zeros(len(names)), np.ones(len(names))


def _resolve_leaf(token: str, names) -> int:
    if token in names:
        return names.index(token)
    try:
        idx = int(token)
    except ValueError:
        raise _InputError(f"unknown variable {token!r}") from None
    if not 0 <= idx < len(names):
        raise _InputError(f"index {idx} out of range for {len(names)} variables")
    return idx


def cmd_check_star(args) -> int:
    tol = _tolerances(args)
    cm, means, variances = _load_correlations(args.matrix, args.covariance)
    names = list(cm.names)
    if args.triple:
        if len(args.triple) != 3:
            raise _InputError("give exactly three variables")
        idx = [_resolve_leaf(t, names) for t in args.triple]
    elif cm.n == 3:
        idx = [0, 1, 2]
    else:
        raise _InputError("matrix has more than 3 variables; name the triple to check")
    if len(set(idx)) != 3:
        raise _InputError("the three variables must be distinct")
    i, j, k = idx
    r = cm.values
    rhos = (r[i, j], r[i, k], r[j, k])
    labels = [names[x] for x in idx]
    print(f"triple: {', '.join(labels)}")
    print(f"correlations: {rhos[0]:.12g} {rhos[1]:.12g} {rhos[2]:.12g}")
    decision = is_star_decomposable(*rhos, tol)
    if not decision:
        print("decomposable: no")
        print(f"reason: {decision.reason} inequality")
        return EXIT_REJECT
    sol = solve_star(*rhos, means=means[idx], variances=variances[idx], tol=tol)
    print("decomposable: yes")
    for name, load in zip(labels, sol.loadings):
        print(f"loading {name}: {load:.12g}")
    for name, lg in zip(labels, sol.leaf_conditionals):
        print(f"conditional {name}|w: slope={lg.slope:.12g} intercept={lg.intercept:.12g} noise_var={lg.noise_var:.12g}")
    print("prior w: mean=0 variance=1")
    if sol.degenerate_with_leaf is not None:
        print(f"degenerate: hidden center coincides with {labels[sol.degenerate_with_leaf]}")
    return EXIT_OK


def cmd_build(args) -> int:
    tol = _tolerances(args)
    kind = args.input_kind
    if kind == "auto":
        kind = "matrix" if looks_like_matrix(read_rows(args.input)) else "samples"
    if kind == "samples":
        s = read_samples(args.input)
        if s.n_obs < 2:
            raise _InputError("need at least 2 observations")
        cm = estimate_correlations(s)
        means, variances = sample_moments(s)
    else:
        cm, means, variances = _load_correlations(args.input, args.covariance)
    report = validate_correlation_matrix(cm, tol)
    if not report:
        for v in report.violations:
            print(f"invalid input: {v}", file=sys.stderr)
        return EXIT_REJECT
    topo = build_topology(cm, tol)
    model = assemble_tree_model(topo, cm, means, variances, tol)
    cons = consistency_check(cm, topo, tol)
    if args.output:
        write_model(args.output, model)
    else:
        sys.stdout.write(dumps_model(model))
    print(f"leaves: {model.n_leaves}", file=sys.stderr)
    print(f"hidden: {len(model.hidden)}", file=sys.stderr)
    print(f"edges: {len(model.edges)}", file=sys.stderr)
    where = f" at {cons.worst[0]}/{cons.worst[1]}" if cons.worst else ""
    print(f"consistency: max_disagreement={cons.max_disagreement:.3g}{where} "
          f"({'pass' if cons.passed else 'fail'} at eq_tol={tol.eq_tol:g})", file=sys.stderr)
    for note in model.notes:
        print(f"degenerate: {note}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = read_model(args.model)
    if args.n_obs < 1:
        raise _InputError("--n-obs must be >= 1")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateModelWarning)
        s = sample(model, args.n_obs, args.seed)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    text = samples_to_csv(s)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    model = read_model(args.model)
    cm, _, _ = _load_correlations(args.matrix, args.covariance)
    if set(cm.names) != set(model.leaf_names) or len(cm.names) != model.n_leaves:
        raise _InputError("leaf names in the model and the matrix differ")
    order = [cm.names.index(name) for name in model.leaf_names]
    given = cm.values[np.ix_(order, order)]
    implied = leaf_correlations(model).values
    diff = np.abs(implied - given)
    i, j = np.unravel_index(np.argmax(diff), diff.shape)
    worst = float(diff[i, j])
    ok = worst <= args.tol
    print(f"max_discrepancy: {worst:.6g}")
    print(f"worst_pair: {model.leaf_names[i]}, {model.leaf_names[j]}")
    print(f"tolerance: {args.tol:g}")
    print(f"result: {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_REJECT


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latentree", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def tol_flags(p, tol_help="relative tolerance for quartet equalities (eq_tol)"):
        p.add_argument("--tol", type=float, default=None, help=tol_help)
        p.add_argument("--dep-floor", type=float, default=None, help="smallest |rho| treated as a dependency")
        p.add_argument("--covariance", action="store_true", help="matrix file holds covariances, not correlations")

    p = sub.add_parser("check-star", help="test one triplet for a hidden center")
    p.add_argument("matrix", help="CSV matrix with names in the first row and column")
    p.add_argument("triple", nargs="*", help="three variable names or 0-based indices")
    tol_flags(p)
    p.set_defaults(func=cmd_check_star)

    p = sub.add_parser("build", help="recover a tree model from a matrix or samples")
    p.add_argument("input", help="CSV correlation/covariance matrix or samples")
    p.add_argument("-o", "--output", help="model JSON path (default: stdout)")
    p.add_argument("--input-kind", choices=("auto", "matrix", "samples"), default="auto")
    tol_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="draw samples from a model")
    p.add_argument("model", help="model JSON path")
    p.add_argument("-n", "--n-obs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="samples CSV path (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="compare a model's implied correlations with a matrix")
    p.add_argument("model")
    p.add_argument("matrix")
    p.add_argument("--tol", type=float, default=1e-6, help="largest allowed entrywise discrepancy")
    p.add_argument("--covariance", action="store_true")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotTreeDecomposable as exc:
        print(f"not decomposable: {exc}", file=sys.stderr)
        return EXIT_REJECT
    except GenuineDependencyError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECT
    except (InputFormatError, _InputError, ShapeError, DegenerateVariableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
