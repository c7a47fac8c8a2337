# Licensed under an MIT open source license - see LICENSE
'''
Command-line interface: ``dualmarg <subcommand> ...``.

Exit codes are 0 on success, 2 for invalid input and 3 for numerical
failures.
'''

import argparse
import sys

import numpy as np
from astropy import log
from astropy.table import Table, vstack

from .. import __version__
from ..exceptions import ValidationError, NumericalError
from ..io.model_input import load_model
from ..io.output import write_csv, read_csv
from ..inference.exact import primal_exact, dual_exact
from ..inference.belief_propagation import (build_primal_fg, build_dual_fg,
                                            run_bp)
from ..duality.mapping import map_all_edges
from ..sampling.subgraphs_world import swp_estimate
from .curves import emit_curves, make_grid
from .experiment import ExperimentSpec, run_experiment, presets


__all__ = ['main', 'build_parser']


exit_ok = 0
exit_validation = 2
exit_numerical = 3


def _summary_row(domain, kind, value):
    return (domain, kind, -1, -1, float(value))


def cmd_exact(args):
    model = load_model(args.config, seed=args.seed)
    factors = model.factors()

    domains = ("primal", "dual") if args.domain == "both" else (args.domain,)

    tables = []
    summary = []
    results = {}
    for domain in domains:
        if domain == "primal":
            result = primal_exact(model.graph, factors)
        else:
            result = dual_exact(model.graph, factors.transform())
        results[domain] = result
        tables.append(result.to_table())
        summary.append(_summary_row(domain, "partition",
                                    result.partition_value))
        log.info("{0} partition function: {1:.17g}"
                 .format(domain, result.partition_value))

    if len(results) == 2:
        scale = results["dual"].partition_value / \
            results["primal"].partition_value
        summary.append(_summary_row("both", "alpha", scale))
        log.info("Duality scale factor: {:.17g}".format(scale))

    tables.append(Table(rows=summary,
                        names=("domain", "kind", "index", "a", "value")))
    table = vstack(tables)

    write_csv(table, args.out)
    return exit_ok


def cmd_bp(args):
    model = load_model(args.config, seed=args.seed)
    factors = model.factors()

    if args.domain == "primal":
        fg = build_primal_fg(model.graph, factors)
    else:
        fg = build_dual_fg(model.graph, factors.transform())

    report = run_bp(fg, damping=args.damping, tol=args.tol,
                    max_iter=args.max_iter, seed=model.seed, init=args.init)
    log.info(report.summary())

    report.write_csv(args.out,
                     metadata=None if args.out is None else
                     {"domain": report.domain,
                      "converged": report.converged,
                      "iterations": report.iterations,
                      "final_delta": report.final_delta})
    return exit_ok


def cmd_swp(args):
    model = load_model(args.config, seed=args.seed)

    estimate = swp_estimate(model.graph, model.params, sweeps=args.sweeps,
                            burn_in=args.burn_in, seed=model.seed,
                            batches=args.batches,
                            show_progress=args.progress)
    meta = estimate.metadata()
    log.info("Subgraphs-world run: seed {seed}, {sweeps} sweeps, {steps} "
             "steps, acceptance {acceptance_rate:.4f}".format(**meta))

    estimate.write_csv(args.out,
                       metadata=None if args.out is None else meta)
    return exit_ok


def cmd_map(args):
    model = load_model(args.config, seed=args.seed)
    factors = model.factors()

    source, target = (("pi_d", "pi_p") if args.direction == "dual_to_primal"
                      else ("pi_p", "pi_d"))

    try:
        marg_table = read_csv(args.marginals)
    except (OSError, ValueError) as err:
        raise ValidationError("Cannot read the marginals file {0}: {1}"
                              .format(args.marginals, err))
    for col in ("edge", "a", source):
        if col not in marg_table.colnames:
            raise ValidationError("The marginals file needs the columns "
                                  "edge, a and {}.".format(source))

    q = model.params.q
    n_edges = model.graph.edge_count
    marginals = np.full((n_edges, q), np.nan)
    for row in marg_table:
        edge, a = int(row["edge"]), int(row["a"])
        if not (0 <= edge < n_edges and 0 <= a < q):
            raise ValidationError("Row ({0}, {1}) is outside the model."
                                  .format(edge, a))
        marginals[edge, a] = float(row[source])
    if np.any(np.isnan(marginals)):
        raise ValidationError("The marginals file does not cover every "
                              "(edge, a) pair.")

    mapped = map_all_edges(marginals, factors, direction=args.direction)

    table = Table([np.repeat(np.arange(n_edges), q),
                   np.tile(np.arange(q), n_edges), mapped.ravel()],
                  names=("edge", "a", target))
    write_csv(table, args.out)
    return exit_ok


def cmd_fixedpoint(args):
    grid = make_grid(*args.grid)
    kind = "fixedpoint-ising" if args.model == "ising" else "fixedpoint-potts"
    write_csv(emit_curves(kind, grid, q=args.q), args.out)
    return exit_ok


def cmd_bounds(args):
    grid = make_grid(*args.grid)
    write_csv(emit_curves("bounds", grid), args.out)
    return exit_ok


def cmd_experiment(args):
    if (args.config is None) == (args.preset is None):
        raise ValidationError("Give either an experiment file or --preset.")
    if args.preset is not None:
        spec = ExperimentSpec.preset(args.preset)
    else:
        spec = ExperimentSpec.from_json(args.config)
    if args.out is not None:
        spec.output = args.out

    result = run_experiment(spec, num_threads=args.threads,
                            show_progress=args.progress)
    log.info("Experiment finished: {} records".format(len(result.records)))

    if spec.output is None:
        write_csv(result.to_table(), None)
    else:
        log.info("Wrote {}".format(spec.output))
    return exit_ok


def build_parser():
    '''
    The argument parser with one subparser per command.
    '''

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None,
                        help="Output CSV path. Standard output when "
                             "omitted.")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true",
                           help="Log debugging output.")
    verbosity.add_argument("--quiet", action="store_true",
                           help="Only log warnings and errors.")

    parser = argparse.ArgumentParser(
        prog="dualmarg",
        description="Primal and dual marginals of Ising and Potts models.")
    parser.add_argument("--version", action="version",
                        version="%(prog)s {}".format(__version__))
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    p = sub.add_parser("exact", parents=[common],
                       help="Exact marginals by enumeration.")
    p.add_argument("config", help="Model JSON file.")
    p.add_argument("--domain", choices=("primal", "dual", "both"),
                   default="both")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bp", parents=[common],
                       help="Belief propagation edge beliefs.")
    p.add_argument("config", help="Model JSON file.")
    p.add_argument("--domain", choices=("primal", "dual"),
                   default="primal")
    p.add_argument("--damping", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--init", choices=("uniform", "random"),
                   default="uniform")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_bp)

    p = sub.add_parser("swp", parents=[common],
                       help="Subgraphs-world estimates of the dual edge "
                            "marginals.")
    p.add_argument("config", help="Model JSON file.")
    p.add_argument("--sweeps", type=int, default=10000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--batches", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_swp)

    p = sub.add_parser("map", parents=[common],
                       help="Map edge marginals between domains.")
    p.add_argument("config", help="Model JSON file.")
    p.add_argument("--marginals", required=True,
                   help="CSV with columns edge, a and pi_d (or pi_p).")
    p.add_argument("--direction", choices=("dual_to_primal",
                                           "primal_to_dual"),
                   default="dual_to_primal")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("fixedpoint", parents=[common],
                       help="Fixed points of the edge mapping.")
    p.add_argument("--model", choices=("ising", "potts"), default="ising")
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--grid", type=float, nargs=3, default=(0., 3., 0.01),
                   metavar=("START", "STOP", "STEP"))
    p.set_defaults(func=cmd_fixedpoint)

    p = sub.add_parser("bounds", parents=[common],
                       help="Lower bounds on the edge marginals.")
    p.add_argument("--grid", type=float, nargs=3, default=(0., 3., 0.01),
                   metavar=("START", "STOP", "STEP"))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("experiment", parents=[common],
                       help="Relative-error sweep against the oracle.")
    p.add_argument("config", nargs="?", default=None,
                   help="Experiment JSON file.")
    p.add_argument("--preset", choices=sorted(presets), default=None,
                   help="Run a built-in sweep instead of a file.")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None):
    '''
    Entry point of the ``dualmarg`` command. Returns the exit code.
    '''

    parser = build_parser()
    args = parser.parse_args(argv)

    # astropy logs INFO and DEBUG to stdout, which carries the CSV without
    # --out.
    if args.quiet or args.out is None:
        log.setLevel("WARNING")
    elif args.verbose:
        log.setLevel("DEBUG")
    else:
        log.setLevel("INFO")

    try:
        return args.func(args)
    except ValidationError as err:
        log.error(str(err))
        return exit_validation
    except NumericalError as err:
        log.error(str(err))
        return exit_numerical


if __name__ == "__main__":
    sys.exit(main())
