# Licensed under an MIT open source license - see LICENSE

import math
import warnings

import numpy as np
from astropy.table import Table
from astropy.utils.console import ProgressBar

from .._astropy_init import conf
from ..base_result import BaseResultMixIn
from ..exceptions import (EnumerationBudgetError, DegenerateModelError,
                          ValidationError, SignedMarginalWarning)
from ..models.factors import (FactorSet, FactorTable, dft_q,
                              edge_differences, dual_vertex_sums,
                              random_factors)


__all__ = ['ExactResult', 'ExtrinsicVector', 'primal_exact', 'dual_exact',
           'extrinsic', 'vertex_extrinsic', 'alpha', 'partition_functions',
           'intermediate_factors']


class ExactResult(BaseResultMixIn):
    """
    Partition function and marginals obtained by enumerating every
    configuration of one domain.

    Parameters
    ----------
    partition_value : float
        Z_p or Z_d.
    edge_marginals : `~numpy.ndarray`
        ``(|E|, q)`` array. Row e is the marginal of ``y_e`` (primal) or of
        the dual edge variable.
    vertex_marginals : `~numpy.ndarray`
        ``(N, q)`` array of the vertex marginals.
    domain : {"primal", "dual"}
    signed_flag : bool
        Set when the dual factors or any marginal entry are negative. The
        vectors are then marginal functions rather than densities.
    """

    _bulky_attributes = ()

    def __init__(self, partition_value, edge_marginals, vertex_marginals,
                 domain, signed_flag=False):
        self.partition_value = float(partition_value)
        self.edge_marginals = np.asarray(edge_marginals)
        self.vertex_marginals = np.asarray(vertex_marginals)
        self.domain = domain
        self.signed_flag = bool(signed_flag)

    @property
    def q(self):
        return self.edge_marginals.shape[1]

    def edge_marginal(self, e):
        return self.edge_marginals[e]

    def vertex_marginal(self, v):
        return self.vertex_marginals[v]

    def to_table(self):
        '''
        Long-form table with columns (domain, kind, index, a, value).
        '''

        rows = []
        for kind, marg in (("edge", self.edge_marginals),
                           ("vertex", self.vertex_marginals)):
            for index in range(marg.shape[0]):
                for a in range(marg.shape[1]):
                    rows.append((self.domain, kind, index, a,
                                 float(marg[index, a])))

        names = ("domain", "kind", "index", "a", "value")
        if len(rows) == 0:
            return Table(names=names, dtype=(str, str, int, int, float))
        return Table(rows=rows, names=names)

    def __repr__(self):
        return ("ExactResult(domain={0}, Z={1:.17g}, signed={2})"
                .format(self.domain, self.partition_value, self.signed_flag))


class ExtrinsicVector(object):
    """
    Extrinsic vector of one edge (or vertex): the weight of all
    configurations with the local variable clamped, leaving out the local
    factor itself.
    """

    def __init__(self, values, index, domain, kind="edge"):
        self.values = np.asarray(values, dtype=float)
        self.index = int(index)
        self.domain = domain
        self.kind = kind

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return "ExtrinsicVector({0}, {1}={2}, domain={3})".format(
            self.values, self.kind, self.index, self.domain)


def _check_budget(q, n_vars, budget):
    if budget is None:
        budget = conf.enumeration_budget
    # Exact integer comparison; q ** n_vars can be astronomically large.
    n_terms = int(q) ** int(n_vars)
    if n_terms > budget:
        raise EnumerationBudgetError(
            "Enumerating {0}^{1} = {2} configurations exceeds the budget of "
            "{3} terms.".format(q, n_vars, n_terms, budget))
    return n_terms


def _ordered_fsum(partials):
    '''
    Entrywise `math.fsum` over the leading axis, in chunk order.
    '''
    stacked = np.stack(partials)
    out = np.empty(stacked.shape[1:])
    for idx in np.ndindex(*out.shape):
        out[idx] = math.fsum(stacked[(slice(None),) + idx])
    return out


def _enumerate(graph, factors, budget=None, chunk_size=None,
               show_progress=False):
    '''
    Sum the weights of all configurations of ``factors.domain``.

    Returns the total weight and the ``(|E|, q)`` and ``(N, q)`` arrays of
    weight sums with each edge or vertex variable clamped.
    '''

    if not factors.is_real:
        raise ValidationError("Enumeration needs real factor tables.")

    if chunk_size is None:
        chunk_size = conf.chunk_size
    chunk_size = max(int(chunk_size), 1)

    q = factors.q
    n_edges = graph.edge_count
    n_vertices = graph.vertex_count

    if factors.domain == "primal":
        n_vars = n_vertices
    else:
        n_vars = n_edges

    n_terms = _check_budget(q, n_vars, budget)

    powers = q ** np.arange(n_vars, dtype=np.int64)
    edge_idx = np.arange(n_edges)[np.newaxis, :]
    vertex_idx = np.arange(n_vertices)[np.newaxis, :]

    z_parts = []
    edge_parts = []
    vertex_parts = []

    starts = range(0, n_terms, chunk_size)
    if show_progress:
        bar = ProgressBar(len(starts))

    for i, start in enumerate(starts):
        index = np.arange(start, min(start + chunk_size, n_terms),
                          dtype=np.int64)
        digits = (index[:, np.newaxis] // powers) % q

        if factors.domain == "primal":
            x = digits
            y = edge_differences(x, graph, q)
        else:
            y = digits
            x = dual_vertex_sums(y, graph, q)

        weights = np.prod(factors.edge_tables[edge_idx, y], axis=1) * \
            np.prod(factors.vertex_tables[vertex_idx, x], axis=1)

        z_parts.append(np.array([weights.sum()]))

        edge_chunk = np.empty((n_edges, q))
        vertex_chunk = np.empty((n_vertices, q))
        for a in range(q):
            edge_chunk[:, a] = np.where(y == a, weights[:, np.newaxis],
                                        0.).sum(axis=0)
            vertex_chunk[:, a] = np.where(x == a, weights[:, np.newaxis],
                                          0.).sum(axis=0)
        edge_parts.append(edge_chunk)
        vertex_parts.append(vertex_chunk)

        if show_progress:
            bar.update(i + 1)

    partition = _ordered_fsum(z_parts)[0]

    return partition, _ordered_fsum(edge_parts), _ordered_fsum(vertex_parts)


def _as_domain(factors, domain):
    if not isinstance(factors, FactorSet):
        raise ValidationError("factors must be a FactorSet.")
    if factors.domain == domain:
        return factors
    return factors.transform()


def primal_exact(graph, factors, budget=None, chunk_size=None,
                 show_progress=False):
    '''
    Exact primal partition function and marginals.

    Parameters
    ----------
    graph : `~dualmarg.models.Graph`
    factors : `~dualmarg.models.FactorSet`
        Primal factors. Dual factors are transformed back first.
    budget : int, optional
        Largest number of configurations to enumerate. Defaults to
        ``conf.enumeration_budget``.
    chunk_size : int, optional
        Configurations per vectorized block.
    show_progress : bool, optional
        Show a progress bar over the blocks.

    Returns
    -------
    result : `ExactResult`
    '''

    factors = _as_domain(factors, "primal")
    factors.check_graph(graph)

    partition, edge_sums, vertex_sums = \
        _enumerate(graph, factors, budget=budget, chunk_size=chunk_size,
                   show_progress=show_progress)

    if not partition > 0:
        raise DegenerateModelError("The primal partition function is {}."
                                   .format(partition))

    return ExactResult(partition, edge_sums / partition,
                       vertex_sums / partition, domain="primal",
                       signed_flag=False)


def dual_exact(graph, dual_factors, budget=None, chunk_size=None,
               show_progress=False):
    '''
    Exact dual partition function and marginals.

    The dual vertex variable is the oriented sum of the incident dual edge
    variables. When the dual tables take negative values the returned
    vectors are signed marginal functions; they still sum to one.

    Parameters
    ----------
    graph : `~dualmarg.models.Graph`
    dual_factors : `~dualmarg.models.FactorSet`
        Dual factors. Primal factors are transformed first.
    budget : int, optional
        Largest number of configurations to enumerate.
    chunk_size : int, optional
        Configurations per vectorized block.
    show_progress : bool, optional
        Show a progress bar over the blocks.

    Returns
    -------
    result : `ExactResult`
    '''

    dual_factors = _as_domain(dual_factors, "dual")
    dual_factors.check_graph(graph)

    partition, edge_sums, vertex_sums = \
        _enumerate(graph, dual_factors, budget=budget, chunk_size=chunk_size,
                   show_progress=show_progress)

    if not partition > 0:
        raise DegenerateModelError("The dual partition function is {}."
                                   .format(partition))

    edge_marg = edge_sums / partition
    vertex_marg = vertex_sums / partition

    negative_marg = bool(np.any(edge_marg < 0) or np.any(vertex_marg < 0))
    if negative_marg:
        warnings.warn("Dual factors take negative values; the dual "
                      "marginals are signed marginal functions.",
                      SignedMarginalWarning)

    signed = negative_marg or dual_factors.has_negative_entries

    return ExactResult(partition, edge_marg, vertex_marg, domain="dual",
                       signed_flag=signed)


def _clamped_set(factors, kind, index):
    edge_tables = np.array(factors.edge_tables)
    vertex_tables = np.array(factors.vertex_tables)
    if kind == "edge":
        edge_tables[index] = 1.
    else:
        vertex_tables[index] = 1.
    return FactorSet(edge_tables, vertex_tables, domain=factors.domain)


def extrinsic(graph, factors, e, budget=None):
    '''
    Extrinsic vector ``S_e(a)`` of edge ``e`` in the domain of ``factors``:
    the summed weight of all configurations with the edge variable equal to
    ``a``, leaving out the factor of edge ``e``.

    ``sum_a table_e(a) * S_e(a)`` is the partition function of the domain.
    '''

    if not isinstance(factors, FactorSet):
        raise ValidationError("factors must be a FactorSet.")
    factors.check_graph(graph)
    if e < 0 or e >= graph.edge_count:
        raise ValidationError("Edge index {0} outside 0..{1}"
                              .format(e, graph.edge_count - 1))

    clamped = _clamped_set(factors, "edge", e)
    _, edge_sums, _ = _enumerate(graph, clamped, budget=budget)

    return ExtrinsicVector(edge_sums[e], e, factors.domain, kind="edge")


def vertex_extrinsic(graph, factors, v, budget=None):
    '''
    Vertex analog of `extrinsic`.
    '''

    if not isinstance(factors, FactorSet):
        raise ValidationError("factors must be a FactorSet.")
    factors.check_graph(graph)
    if v < 0 or v >= graph.vertex_count:
        raise ValidationError("Vertex index {0} outside 0..{1}"
                              .format(v, graph.vertex_count - 1))

    clamped = _clamped_set(factors, "vertex", v)
    _, _, vertex_sums = _enumerate(graph, clamped, budget=budget)

    return ExtrinsicVector(vertex_sums[v], v, factors.domain, kind="vertex")


def intermediate_factors(q, a):
    '''
    The clamping factor ``delta(y - a)`` and its DFT.

    Replacing an edge factor by the delta factor turns the partition
    function into the extrinsic value ``S_e(a)``. The DFT is
    ``exp(-2 pi i k a / q)`` and is complex for q > 2 unless ``a = 0``.

    Returns
    -------
    primal, dual : `~dualmarg.models.FactorTable`
    '''

    q = int(q)
    if a < 0 or a >= q:
        raise ValidationError("a must lie in 0..{}".format(q - 1))

    delta = np.zeros(q)
    delta[a] = 1.
    primal = FactorTable(delta, domain="primal")

    return primal, dft_q(primal)


def partition_functions(graph, factors, dual_factors=None, budget=None):
    '''
    Primal and dual partition functions and their ratio.

    Parameters
    ----------
    graph : `~dualmarg.models.Graph`
    factors : `~dualmarg.models.FactorSet`
        Primal factors.
    dual_factors : `~dualmarg.models.FactorSet`, optional
        Dual factors. Defaults to the DFT of ``factors``.

    Returns
    -------
    z_primal, z_dual, scale : float
    '''

    factors = _as_domain(factors, "primal")
    if dual_factors is None:
        dual_factors = factors.transform()
    else:
        dual_factors = _as_domain(dual_factors, "dual")

    factors.check_graph(graph)
    dual_factors.check_graph(graph)

    z_primal, _, _ = _enumerate(graph, factors, budget=budget)
    z_dual, _, _ = _enumerate(graph, dual_factors, budget=budget)

    if not z_primal > 0:
        raise DegenerateModelError("The primal partition function is {}."
                                   .format(z_primal))
    if z_dual == 0:
        raise DegenerateModelError("The dual partition function is 0.")

    return z_primal, z_dual, z_dual / z_primal


def alpha(graph, q, factors=None, budget=None):
    '''
    Measured duality scale factor ``Z_d / Z_p``.

    The value depends only on the graph and the alphabet order, not on the
    factors. Without ``factors`` a fixed set of random symmetric positive
    factors is used.
    '''

    if factors is None:
        factors = random_factors(graph, q=q, seed=0, symmetric=True)
    elif factors.q != q:
        raise ValidationError("factors have q={0}, expected {1}"
                              .format(factors.q, q))

    return partition_functions(graph, factors, budget=budget)[2]
