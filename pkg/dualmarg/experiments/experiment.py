# Licensed under an MIT open source license - see LICENSE

import copy
import json
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from astropy.table import Table
from astropy.utils.console import ProgressBar

from .._astropy_init import conf, get_num_threads
from ..base_result import BaseResultMixIn
from ..exceptions import (ValidationError, EnumerationBudgetError,
                          BoundViolationWarning)
from ..models.graph import build_graph
from ..models.factors import ModelParams, model_factors
from ..io.model_input import make_couplings, make_fields
from ..inference.exact import primal_exact
from ..inference.belief_propagation import (build_primal_fg, build_dual_fg,
                                            run_bp, bp_edge_marginals)
from ..duality.mapping import map_all_edges
from ..duality.fixed_points import bounds_slack
from ..sampling.subgraphs_world import swp_estimate, dual_from_inclusion


__all__ = ['ExperimentSpec', 'ErrorRecord', 'ExperimentResult',
           'run_experiment', 'relative_error', 'experiment_methods',
           'sweep_variables', 'presets']


experiment_methods = ("exact", "bp-primal", "bp-dual+map", "swp+map")

sweep_variables = ("beta_j", "sigma2", "beta_j_max")

_periodic4 = {"kind": "grid", "rows": 4, "cols": 4, "periodic": True}

# Reference sweeps, scaled to sizes the enumeration oracle can check.
presets = {
    # Homogeneous couplings in a constant field; the sampler is included.
    "homogeneous-field-grid": {
        "model": {"graph": _periodic4, "fields": 0.15},
        "methods": ["bp-primal", "bp-dual+map", "swp+map"],
        "sweep": {"variable": "beta_j",
                  "grid": {"start": 0.05, "stop": 0.75, "step": 0.1}},
        "realizations": 1,
        "swp": {"sweeps": 100000, "burn_in": 1000}},
    "halfnormal-grid": {
        "model": {"graph": _periodic4, "fields": 0.},
        "methods": ["bp-primal", "bp-dual+map"],
        "sweep": {"variable": "sigma2",
                  "grid": {"start": 0.05, "stop": 0.85, "step": 0.1}},
        "realizations": 200},
    "uniform-complete": {
        "model": {"graph": {"kind": "complete", "n": 10}, "fields": 0.},
        "methods": ["bp-primal", "bp-dual+map"],
        "sweep": {"variable": "beta_j_max",
                  "grid": {"start": 0.1, "stop": 0.65, "step": 0.05}},
        "realizations": 50},
}

# Largest instances the enumeration oracle is run on.
max_grid_vertices = 16
max_complete_vertices = 12

error_columns = ("sweep_value", "method", "mean_rel_error", "std_rel_error",
                 "median_rel_error", "mean_of_realization_means",
                 "realizations", "seed")


def relative_error(estimate, exact):
    '''
    ``|estimate(0) - exact(0)| / exact(0)``.

    Both arguments are marginal vectors, or arrays of them with the symbol
    on the last axis.
    '''

    estimate = np.asarray(estimate, dtype=float)
    exact = np.asarray(exact, dtype=float)

    ex0 = exact[..., 0]
    if np.any(ex0 <= 0):
        raise ValidationError("The exact value of pi(0) must be positive.")

    err = np.abs(estimate[..., 0] - ex0) / ex0
    if err.ndim == 0:
        return float(err)
    return err


def _parse_grid(grid):
    if isinstance(grid, dict):
        try:
            start = float(grid["start"])
            stop = float(grid["stop"])
            if "num" in grid:
                num = int(grid["num"])
            else:
                num = int(round((stop - start) / float(grid["step"]))) + 1
        except KeyError as err:
            raise ValidationError("A grid object needs start, stop and num "
                                  "or step. Missing {}".format(err))
        return np.linspace(start, stop, num)
    return np.atleast_1d(np.asarray(grid, dtype=float))


class ExperimentSpec(object):
    """
    Relative-error sweep over one model parameter.

    Parameters
    ----------
    model : dict
        Model description (see `~dualmarg.io.load_model`). Its couplings are
        replaced by the sweep.
    methods : sequence of str
        Subset of ``experiment_methods``.
    sweep_variable : {"beta_j", "sigma2", "beta_j_max"}
        Homogeneous coupling, half-normal variance, or the upper end of
        uniform couplings on ``[uniform_min, beta_j_max]``.
    grid : array-like
        Strictly increasing sweep values.
    realizations : int
        Random instances per grid point. Realization ``r`` uses seed
        ``seed + r``.
    seed : int
        Master seed.
    output : str, optional
        CSV path.
    bp : dict, optional
        ``damping``, ``tol`` and ``max_iter`` for belief propagation.
    swp : dict, optional
        ``sweeps``, ``burn_in`` and ``batches`` for the sampler.
    uniform_min : float, optional
        Lower end of uniform couplings.
    """

    def __init__(self, model, methods, sweep_variable, grid,
                 realizations=1, seed=0, output=None, bp=None, swp=None,
                 uniform_min=0.05):
        self.model = model
        self.methods = tuple(methods)
        self.sweep_variable = sweep_variable
        self.grid = _parse_grid(grid)
        self.realizations = int(realizations)
        self.seed = int(seed)
        self.output = output
        self.bp = dict(bp) if bp is not None else {}
        self.swp = dict(swp) if swp is not None else {}
        self.uniform_min = float(uniform_min)

    @classmethod
    def from_json(cls, source):
        '''
        Read an experiment from a JSON file or dictionary. ``model`` may be
        an inline description or the path of a model file.
        '''

        if isinstance(source, dict):
            description = source
        else:
            try:
                with open(source, 'r') as input_file:
                    description = json.load(input_file)
            except OSError as err:
                raise ValidationError("Cannot read {0}: {1}"
                                      .format(source, err))
            except ValueError as err:
                raise ValidationError("Invalid JSON in {0}: {1}"
                                      .format(source, err))

        for key in ("model", "methods", "sweep"):
            if key not in description:
                raise ValidationError("The experiment needs a '{}' entry."
                                      .format(key))

        model = description["model"]
        if isinstance(model, str):
            try:
                with open(model, 'r') as input_file:
                    model = json.load(input_file)
            except (OSError, ValueError) as err:
                raise ValidationError("Cannot read the model file {0}: {1}"
                                      .format(model, err))

        sweep = description["sweep"]
        if not isinstance(sweep, dict) or "variable" not in sweep or \
                "grid" not in sweep:
            raise ValidationError("sweep must be an object with 'variable' "
                                  "and 'grid'.")

        return cls(model, description["methods"], sweep["variable"],
                   sweep["grid"],
                   realizations=description.get("realizations", 1),
                   seed=description.get("seed", 0),
                   output=description.get("output"),
                   bp=description.get("bp"), swp=description.get("swp"),
                   uniform_min=description.get("uniform_min", 0.05))

    @classmethod
    def preset(cls, name, **overrides):
        '''
        One of the `presets`, with top-level entries such as ``sweep``,
        ``realizations``, ``seed`` or ``swp`` replaced by ``overrides``.
        '''
        if name not in presets:
            raise ValidationError("Unknown preset {0}. Must be one of {1}"
                                  .format(name, sorted(presets)))
        description = copy.deepcopy(presets[name])
        description.update(overrides)
        return cls.from_json(description)

    @property
    def model_kind(self):
        return self.model.get("model", "ising")

    @property
    def q(self):
        return int(self.model.get("q", 2))

    def validate(self):
        '''
        Check the experiment before any work is done.

        Raises
        ------
        ValidationError
            For a bad grid, method or model mismatch.
        EnumerationBudgetError
            When the oracle instance is too large.
        '''

        if len(self.methods) == 0:
            raise ValidationError("At least one method is needed.")
        for method in self.methods:
            if method not in experiment_methods:
                raise ValidationError("Unknown method {0}. Must be one of "
                                      "{1}".format(method,
                                                   experiment_methods))

        if self.sweep_variable not in sweep_variables:
            raise ValidationError("Unknown sweep variable {0}. Must be one "
                                  "of {1}".format(self.sweep_variable,
                                                  sweep_variables))

        if self.grid.size == 0 or np.any(np.diff(self.grid) <= 0):
            raise ValidationError("The grid must be nonempty and strictly "
                                  "increasing.")
        if self.realizations < 1:
            raise ValidationError("realizations must be at least 1.")

        if not isinstance(self.model, dict) or "graph" not in self.model:
            raise ValidationError("The model needs a graph description.")

        graph = build_graph(self.model["graph"])
        self._check_size(graph)

        if self.sweep_variable == "beta_j_max" and \
                self.grid[0] <= self.uniform_min:
            raise ValidationError("beta_j_max values must exceed "
                                  "uniform_min={}".format(self.uniform_min))

        positive_couplings = (np.all(self.grid > 0) and
                              (self.sweep_variable != "beta_j_max" or
                               self.uniform_min > 0))

        needs_dual = [m for m in self.methods if m in ("bp-dual+map",
                                                       "swp+map")]
        # Random fields are drawn per realization, as in `instance`.
        fields = np.concatenate([
            make_fields(self.model.get("fields", 0.), graph.vertex_count,
                        seed=self.seed + r)
            for r in range(self.realizations)])

        if needs_dual:
            if not positive_couplings:
                raise ValidationError("{} need positive couplings."
                                      .format(needs_dual))
            if np.any(fields < 0):
                raise ValidationError("{} need nonnegative fields."
                                      .format(needs_dual))

        if "swp+map" in self.methods:
            if self.model_kind != "ising":
                raise ValidationError("swp+map is only defined for Ising "
                                      "models.")
            if np.any(fields <= 0):
                raise ValidationError("swp+map needs strictly positive "
                                      "fields.")

        return self

    def _check_size(self, graph):
        spec = self.model["graph"]
        kind = spec.get("kind") if isinstance(spec, dict) else None
        if kind == "complete":
            limit = max_complete_vertices
        else:
            limit = max_grid_vertices
        if graph.vertex_count > limit:
            raise EnumerationBudgetError(
                "The oracle is limited to {0} vertices for {1} graphs. "
                "Found {2}".format(limit, kind or "these",
                                   graph.vertex_count))
        if self.q ** graph.vertex_count > conf.enumeration_budget:
            raise EnumerationBudgetError(
                "{0}^{1} configurations exceed the enumeration budget."
                .format(self.q, graph.vertex_count))

    def coupling_spec(self, value):
        if self.sweep_variable == "beta_j":
            return float(value)
        if self.sweep_variable == "sigma2":
            return {"kind": "halfnormal", "sigma2": float(value)}
        return {"kind": "uniform", "min": self.uniform_min,
                "max": float(value)}

    def instance(self, value, realization):
        '''
        Graph and parameters of one realization at one grid value.
        '''
        seed = self.seed + realization
        graph = build_graph(self.model["graph"])
        couplings = make_couplings(self.coupling_spec(value),
                                   graph.edge_count, seed=seed)
        fields = make_fields(self.model.get("fields", 0.),
                             graph.vertex_count, seed=seed)
        params = ModelParams(couplings, fields, q=self.q,
                             model=self.model_kind)
        return graph, params, seed

    def metadata(self):
        return {"methods": list(self.methods),
                "sweep_variable": self.sweep_variable,
                "grid": self.grid.tolist(),
                "realizations": self.realizations, "seed": self.seed,
                "bp": self.bp, "swp": self.swp,
                "uniform_min": self.uniform_min}


class ErrorRecord(object):
    """
    Relative error of ``pi_p,e(0)`` for one method at one grid value,
    pooled over all edges and realizations.
    """

    def __init__(self, sweep_value, method, mean_rel_error, std_rel_error,
                 median_rel_error, mean_of_realization_means, realizations,
                 seed):
        self.sweep_value = float(sweep_value)
        self.method = method
        self.mean_rel_error = float(mean_rel_error)
        self.std_rel_error = float(std_rel_error)
        self.median_rel_error = float(median_rel_error)
        self.mean_of_realization_means = float(mean_of_realization_means)
        self.realizations = int(realizations)
        self.seed = int(seed)

    def as_row(self):
        return tuple(getattr(self, name) for name in error_columns)

    def __repr__(self):
        return "ErrorRecord(sweep_value={0}, method={1}, mean={2:.3e})"\
            .format(self.sweep_value, self.method, self.mean_rel_error)


class ExperimentResult(BaseResultMixIn):
    """
    Error records of an experiment, ordered by grid value and method.
    """

    _bulky_attributes = ("errors",)

    def __init__(self, spec, records, errors=None):
        self.spec = spec
        self.records = records
        self.errors = errors

    def to_table(self):
        if len(self.records) == 0:
            return Table(names=error_columns,
                         dtype=(float, str, float, float, float, float, int,
                                int))
        return Table(rows=[rec.as_row() for rec in self.records],
                     names=error_columns)

    def record(self, sweep_value, method):
        for rec in self.records:
            if rec.method == method and np.isclose(rec.sweep_value,
                                                   sweep_value):
                return rec
        raise KeyError((sweep_value, method))


def _check_bounds(params, exact_marg, factors):
    if not (np.all(params.couplings > 0) and np.all(params.fields >= 0)):
        return
    if params.model != "ising":
        return
    dual_marg = map_all_edges(exact_marg, factors,
                              direction="primal_to_dual")
    slacks = bounds_slack(exact_marg[:, 0], dual_marg[:, 0],
                          params.couplings)
    worst = min(float(np.min(slack)) for slack in slacks)
    if worst < -1e-12:
        warnings.warn("An oracle marginal violates the ferromagnetic "
                      "bounds by {:.3e}.".format(-worst),
                      BoundViolationWarning)


def _run_instance(spec, value, realization):
    '''
    Per-edge relative errors of every method on one instance.
    '''

    graph, params, seed = spec.instance(value, realization)
    factors = model_factors(graph, params)
    exact = primal_exact(graph, factors)
    exact_marg = exact.edge_marginals

    _check_bounds(params, exact_marg, factors)

    bp_kwargs = {key: spec.bp[key] for key in ("damping", "tol", "max_iter")
                 if key in spec.bp}

    errors = {}
    for method in spec.methods:
        if method == "exact":
            estimate = exact_marg
        elif method == "bp-primal":
            report = run_bp(build_primal_fg(graph, factors), **bp_kwargs)
            estimate = bp_edge_marginals(report, "primal")
        elif method == "bp-dual+map":
            dual_factors = factors.transform()
            report = run_bp(build_dual_fg(graph, dual_factors), **bp_kwargs)
            estimate = map_all_edges(bp_edge_marginals(report, "dual"),
                                     factors, dual_factors)
        else:
            sampled = swp_estimate(graph, params,
                                   sweeps=spec.swp.get("sweeps", 10000),
                                   burn_in=spec.swp.get("burn_in", 1000),
                                   batches=spec.swp.get("batches"),
                                   seed=seed)
            estimate = map_all_edges(dual_from_inclusion(sampled.p_hat),
                                     factors)
        errors[method] = relative_error(estimate, exact_marg)

    return errors


def run_experiment(spec, num_threads=None, show_progress=False):
    '''
    Run a relative-error sweep against the enumeration oracle.

    Every (grid value, realization) instance is independent. They run on a
    thread pool and are gathered in (grid index, realization index) order,
    so the output does not depend on the schedule.

    Parameters
    ----------
    spec : `ExperimentSpec`
    num_threads : int, optional
        Worker threads. Defaults to `~dualmarg.get_num_threads`.
    show_progress : bool, optional
        Show a progress bar over the instances.

    Returns
    -------
    result : `ExperimentResult`
        Written to ``spec.output`` when that is set.
    '''

    spec.validate()

    if num_threads is None:
        num_threads = get_num_threads()

    tasks = [(value, r) for value in spec.grid
             for r in range(spec.realizations)]

    if show_progress:
        bar = ProgressBar(len(tasks))

    results = []
    with ThreadPoolExecutor(max_workers=max(int(num_threads), 1)) as pool:
        for i, errors in enumerate(pool.map(
                lambda task: _run_instance(spec, *task), tasks)):
            results.append(errors)
            if show_progress:
                bar.update(i + 1)

    records = []
    all_errors = {}
    for g, value in enumerate(spec.grid):
        block = results[g * spec.realizations:(g + 1) * spec.realizations]
        for method in spec.methods:
            per_real = [errors[method] for errors in block]
            pooled = np.concatenate(per_real)
            all_errors[(float(value), method)] = pooled
            records.append(ErrorRecord(
                value, method, pooled.mean(),
                pooled.std(ddof=1) if pooled.size > 1 else 0.,
                np.median(pooled),
                np.mean([err.mean() for err in per_real]),
                spec.realizations, spec.seed))

    result = ExperimentResult(spec, records, errors=all_errors)

    if spec.output is not None:
        result.write_csv(spec.output, metadata=spec.metadata())

    return result
