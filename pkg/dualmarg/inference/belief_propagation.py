# Licensed under an MIT open source license - see LICENSE

import warnings

import numpy as np
import networkx as nx
from astropy.table import Table

from .._astropy_init import conf
from ..base_result import BaseResultMixIn
from ..exceptions import (DomainError, ValidationError, ConvergenceWarning)
from ..models.factors import FactorSet


__all__ = ['FactorGraph', 'BpReport', 'build_primal_fg', 'build_dual_fg',
           'run_bp', 'bp_edge_marginals', 'bp_vertex_marginals',
           'sum_factor_messages']


def _normalize(arr):
    total = arr.sum(axis=-1, keepdims=True)
    return arr / np.where(total > 0, total, 1.)


def _leave_one_out(arr):
    '''
    Products over axis 1 leaving out each entry in turn, without division.
    '''
    ones = np.ones_like(arr[:, :1])
    prefix = np.concatenate([ones, np.cumprod(arr[:, :-1], axis=1)], axis=1)
    suffix = np.concatenate([np.cumprod(arr[:, :0:-1], axis=1)[:, ::-1],
                             ones], axis=1)
    return prefix * suffix


def _sum_index(signs, q):
    '''
    ``index[n, k, y, z] = (signs[n, k] * y + z) mod q``.
    '''
    symbols = np.arange(q)
    return (signs[:, :, np.newaxis, np.newaxis] *
            symbols[np.newaxis, np.newaxis, :, np.newaxis] +
            symbols[np.newaxis, np.newaxis, np.newaxis, :]) % q


def _signed_sum_distribution(incoming, signs, leave_one_out=True):
    '''
    Distribution of ``sum_l s_l y_l (mod q)`` under independent messages,
    by products of length-q DFTs. With ``leave_one_out`` the entry for slot
    k omits the message of slot k.
    '''
    q = incoming.shape[-1]
    negated = (-np.arange(q)) % q
    reindexed = np.where(signs[..., np.newaxis] > 0, incoming,
                         incoming[..., negated])
    spectra = np.fft.fft(reindexed, axis=-1)

    if leave_one_out:
        spectra = _leave_one_out(spectra)
    else:
        spectra = np.prod(spectra, axis=1)

    return np.clip(np.fft.ifft(spectra, axis=-1).real, 0., None)


def _sum_messages_dft(incoming, signs, tables, index=None):
    n, d, q = incoming.shape
    if index is None:
        index = _sum_index(signs, q)
    partial = _signed_sum_distribution(incoming, signs)
    expanded = tables[np.arange(n)[:, np.newaxis, np.newaxis, np.newaxis],
                      index]
    return np.einsum('nkyz,nkz->nky', expanded, partial)


def _sum_messages_direct(incoming, signs, table):
    d, q = incoming.shape
    configs = (np.arange(q ** d)[:, np.newaxis] //
               q ** np.arange(d)[np.newaxis, :]) % q
    weights = table[(configs @ signs) % q]
    local = incoming[np.arange(d)[np.newaxis, :], configs]

    out = np.zeros((d, q))
    for k in range(d):
        others = np.prod(np.delete(local, k, axis=1), axis=1)
        out[k] = np.bincount(configs[:, k], weights=weights * others,
                             minlength=q)
    return out


def sum_factor_messages(incoming, signs, table, method="dft"):
    '''
    Outgoing messages of a factor ``table(sum_k s_k y_k mod q)``.

    ``m_k(y) = sum over the other variables of
    table(s_k y + sum_{l != k} s_l y_l) prod_{l != k} incoming_l(y_l)``.

    Parameters
    ----------
    incoming : array-like
        ``(d, q)`` variable-to-factor messages.
    signs : array-like
        ``(d,)`` orientation signs, each +1 or -1.
    table : array-like
        ``(q,)`` factor table.
    method : {"dft", "direct"}
        ``"dft"`` convolves with length-q DFTs; ``"direct"`` enumerates the
        ``q^d`` configurations.

    Returns
    -------
    messages : `~numpy.ndarray`
        ``(d, q)`` unnormalized messages.
    '''

    incoming = np.asarray(incoming, dtype=float)
    signs = np.asarray(signs, dtype=int)
    table = np.asarray(table, dtype=float)

    if incoming.ndim != 2 or signs.shape != (incoming.shape[0],) or \
            table.shape != (incoming.shape[1],):
        raise ValidationError("Expected incoming (d, q), signs (d,) and "
                              "table (q,).")
    if not np.all(np.abs(signs) == 1):
        raise ValidationError("signs must be +1 or -1.")

    if method == "dft":
        return _sum_messages_dft(incoming[np.newaxis], signs[np.newaxis],
                                 table[np.newaxis])[0]
    elif method == "direct":
        return _sum_messages_direct(incoming, signs, table)
    else:
        raise ValidationError("method must be 'dft' or 'direct'. Found {}"
                              .format(method))


class FactorGraph(object):
    """
    Factor graph with unary, pairwise difference-kind and sum-kind factors.

    Messages live on sockets, one per (factor, slot) pair. Sockets are laid
    out as the unary factors, the first and then the second slot of every
    pairwise factor, and finally the sum-kind factors grouped by degree.

    Parameters
    ----------
    q : int
        Alphabet order.
    n_variables : int
        Number of variables.
    unary_vars : array-like
        Variable of every unary factor.
    unary_tables : array-like
        ``(n_unary, q)`` tables.
    pair_vars : array-like
        ``(n_pair, 2)`` variables ``(i, j)`` of the pairwise factors.
    pair_tables : array-like
        ``(n_pair, q)`` tables evaluated at ``x_i - x_j (mod q)``.
    sum_scopes : sequence of sequences
        Variables of every sum-kind factor.
    sum_signs : sequence of sequences
        Orientation signs aligned with ``sum_scopes``.
    sum_tables : array-like
        ``(n_sum, q)`` tables evaluated at the signed sum.
    domain : {"primal", "dual"}
    graph : `~dualmarg.models.Graph`, optional
        The model graph the factor graph was built from.
    """

    def __init__(self, q, n_variables, unary_vars=(), unary_tables=None,
                 pair_vars=None, pair_tables=None, sum_scopes=(),
                 sum_signs=(), sum_tables=None, domain="primal", graph=None):

        self.q = int(q)
        self.n_variables = int(n_variables)
        self.domain = domain
        self.graph = graph

        q = self.q

        self.unary_vars = np.asarray(unary_vars, dtype=int).reshape(-1)
        self.unary_tables = np.asarray(
            unary_tables if unary_tables is not None else np.empty((0, q)),
            dtype=float).reshape(-1, q)

        self.pair_vars = np.asarray(
            pair_vars if pair_vars is not None else np.empty((0, 2)),
            dtype=int).reshape(-1, 2)
        self.pair_tables = np.asarray(
            pair_tables if pair_tables is not None else np.empty((0, q)),
            dtype=float).reshape(-1, q)

        sum_tables = np.asarray(
            sum_tables if sum_tables is not None else np.empty((0, q)),
            dtype=float).reshape(-1, q)
        self.sum_scopes = tuple(tuple(int(v) for v in scope)
                                for scope in sum_scopes)
        self.sum_signs = tuple(tuple(int(s) for s in sgn)
                               for sgn in sum_signs)
        self.sum_tables = sum_tables

        if self.unary_tables.shape[0] != self.unary_vars.size:
            raise ValidationError("Every unary factor needs one table.")
        if self.pair_tables.shape[0] != self.pair_vars.shape[0]:
            raise ValidationError("Every pairwise factor needs one table.")
        if not (len(self.sum_scopes) == len(self.sum_signs) ==
                sum_tables.shape[0]):
            raise ValidationError("Every sum-kind factor needs a scope, "
                                  "signs and a table.")

        for scope, sgn in zip(self.sum_scopes, self.sum_signs):
            if len(scope) == 0:
                raise ValidationError("Sum-kind factors need a nonempty "
                                      "scope.")
            if len(scope) != len(sgn) or any(abs(s) != 1 for s in sgn):
                raise ValidationError("Sum-kind signs must be +1 or -1, one "
                                      "per variable.")

        for arr in (self.unary_vars, self.pair_vars.ravel(),
                    np.array([v for scope in self.sum_scopes
                              for v in scope], dtype=int)):
            if arr.size > 0 and (arr.min() < 0 or
                                 arr.max() >= self.n_variables):
                raise ValidationError("Factor scope references a variable "
                                      "outside 0..{}"
                                      .format(self.n_variables - 1))

        if np.any(self.unary_tables < 0) or np.any(self.pair_tables < 0) \
                or np.any(self.sum_tables < 0):
            raise DomainError("Belief propagation needs nonnegative factor "
                              "tables.")

        self._build_sockets()

    def _build_sockets(self):

        q = self.q
        n_unary = self.unary_vars.size
        n_pair = self.pair_vars.shape[0]

        socket_var = [self.unary_vars, self.pair_vars[:, 0],
                      self.pair_vars[:, 1]]

        self._pair_offset = n_unary
        offset = n_unary + 2 * n_pair

        degrees = np.array([len(scope) for scope in self.sum_scopes],
                           dtype=int)
        self._sum_groups = []
        for d in np.unique(degrees):
            ids = np.flatnonzero(degrees == d)
            scopes = np.array([self.sum_scopes[i] for i in ids], dtype=int)
            signs = np.array([self.sum_signs[i] for i in ids], dtype=int)
            sockets = offset + np.arange(ids.size * d).reshape(ids.size, d)
            self._sum_groups.append({"ids": ids, "degree": int(d),
                                     "sockets": sockets, "signs": signs,
                                     "tables": self.sum_tables[ids],
                                     "index": _sum_index(signs, q)})
            socket_var.append(scopes.ravel())
            offset += ids.size * d

        self.socket_var = np.concatenate(socket_var).astype(int)
        self.n_sockets = self.socket_var.size

        per_var = [[] for _ in range(self.n_variables)]
        for s, v in enumerate(self.socket_var):
            per_var[v].append(s)

        counts = np.array([len(socks) for socks in per_var], dtype=int)
        self._var_groups = []
        for d in np.unique(counts):
            var_ids = np.flatnonzero(counts == d)
            if d == 0:
                self._var_groups.append((var_ids, None))
                continue
            sockets = np.array([per_var[v] for v in var_ids], dtype=int)
            self._var_groups.append((var_ids, sockets))

        symbols = np.arange(q)
        self._pair_matrices = self.pair_tables[
            :, (symbols[:, np.newaxis] - symbols[np.newaxis, :]) % q]

    @property
    def factor_count(self):
        return self.unary_vars.size + self.pair_vars.shape[0] + \
            len(self.sum_scopes)

    @property
    def unary_count(self):
        return self.unary_vars.size

    @property
    def pairwise_count(self):
        return self.pair_vars.shape[0]

    @property
    def sum_count(self):
        return len(self.sum_scopes)

    def scopes(self):
        '''
        Scopes of all factors: unary, pairwise, then sum-kind.
        '''
        return ([(int(v),) for v in self.unary_vars] +
                [tuple(int(v) for v in pair) for pair in self.pair_vars] +
                list(self.sum_scopes))

    def to_networkx(self):
        '''
        Bipartite graph of variable nodes ``("v", i)`` and factor nodes
        ``("f", k)``.
        '''
        fg = nx.MultiGraph()
        fg.add_nodes_from(("v", i) for i in range(self.n_variables))
        for k, scope in enumerate(self.scopes()):
            fg.add_node(("f", k))
            for v in scope:
                fg.add_edge(("f", k), ("v", v))
        return fg

    @property
    def is_cycle_free(self):
        return nx.is_forest(nx.Graph(self.to_networkx())) and \
            not self._has_repeated_scope_variable()

    def _has_repeated_scope_variable(self):
        return any(len(set(scope)) != len(scope) for scope in self.scopes())

    def initial_messages(self, init="uniform", seed=None):
        '''
        Factor-to-variable messages at the start of a run.
        '''
        q = self.q
        if init == "uniform":
            messages = np.full((self.n_sockets, q), 1. / q)
        elif init == "random":
            rng = np.random.Generator(np.random.Philox(seed))
            messages = _normalize(rng.uniform(0.1, 1., (self.n_sockets, q)))
        else:
            raise ValidationError("init must be 'uniform' or 'random'. "
                                  "Found {}".format(init))

        messages[:self.unary_count] = _normalize(self.unary_tables)
        return messages

    def variable_messages(self, f2v):
        '''
        Variable-to-factor messages and variable beliefs from the
        factor-to-variable messages.
        '''
        q = self.q
        v2f = np.empty_like(f2v)
        beliefs = np.full((self.n_variables, q), 1. / q)

        for var_ids, sockets in self._var_groups:
            if sockets is None:
                continue
            incoming = f2v[sockets]
            v2f[sockets] = _normalize(_leave_one_out(incoming))
            beliefs[var_ids] = _normalize(np.prod(incoming, axis=1))

        return v2f, beliefs

    def factor_messages(self, v2f):
        '''
        Factor-to-variable messages from the variable-to-factor messages.
        '''
        out = np.empty_like(v2f)

        n_unary = self.unary_count
        n_pair = self.pairwise_count
        out[:n_unary] = _normalize(self.unary_tables)

        first = slice(n_unary, n_unary + n_pair)
        second = slice(n_unary + n_pair, n_unary + 2 * n_pair)
        out[first] = _normalize(np.einsum('nab,nb->na', self._pair_matrices,
                                          v2f[second]))
        out[second] = _normalize(np.einsum('nab,na->nb',
                                           self._pair_matrices, v2f[first]))

        for group in self._sum_groups:
            sockets = group["sockets"]
            out[sockets] = _normalize(
                _sum_messages_dft(v2f[sockets], group["signs"],
                                  group["tables"], index=group["index"]))

        return out

    def factor_beliefs(self, v2f):
        '''
        Beliefs of the pairwise factors on their difference variable and of
        the sum-kind factors on their signed sum.
        '''
        q = self.q
        n_unary = self.unary_count
        n_pair = self.pairwise_count

        first = v2f[n_unary:n_unary + n_pair]
        second = v2f[n_unary + n_pair:n_unary + 2 * n_pair]
        joint = self._pair_matrices * first[:, :, np.newaxis] * \
            second[:, np.newaxis, :]

        symbols = np.arange(q)
        # joint[n, a, (a - y) mod q] summed over a gives the weight of y
        diff_index = (symbols[:, np.newaxis] - symbols[np.newaxis, :]) % q
        pair_beliefs = _normalize(
            joint[:, symbols[:, np.newaxis], diff_index].sum(axis=1))

        sum_beliefs = np.empty((self.sum_count, q))
        for group in self._sum_groups:
            dist = _signed_sum_distribution(v2f[group["sockets"]],
                                            group["signs"],
                                            leave_one_out=False)
            sum_beliefs[group["ids"]] = _normalize(group["tables"] * dist)

        return pair_beliefs, sum_beliefs

    def __repr__(self):
        return ("FactorGraph(domain={0}, q={1}, variables={2}, unary={3}, "
                "pairwise={4}, sum={5})".format(self.domain, self.q,
                                                self.n_variables,
                                                self.unary_count,
                                                self.pairwise_count,
                                                self.sum_count))


def _as_factor_set(factors, domain):
    if not isinstance(factors, FactorSet):
        raise ValidationError("factors must be a FactorSet.")
    if factors.domain != domain:
        factors = factors.transform()
    return factors


def build_primal_fg(graph, factors):
    '''
    Primal factor graph: one variable per vertex, a pairwise factor
    ``psi_e(x_i - x_j)`` per edge and a unary factor ``phi_v`` per vertex.
    '''

    factors = _as_factor_set(factors, "primal")
    factors.check_graph(graph)

    return FactorGraph(factors.q, graph.vertex_count,
                       unary_vars=np.arange(graph.vertex_count),
                       unary_tables=factors.vertex_tables,
                       pair_vars=graph.edge_array,
                       pair_tables=factors.edge_tables,
                       domain="primal", graph=graph)


def build_dual_fg(graph, dual_factors):
    '''
    Dual factor graph: one variable per edge with its unary factor
    ``psi~_e``, and per vertex a factor ``phi~_v`` of the oriented sum of
    the incident edge variables.

    Raises
    ------
    DomainError
        When a dual table is negative. The dual model is then not a
        probability distribution and its marginals are signed functions.
    '''

    dual_factors = _as_factor_set(dual_factors, "dual")
    dual_factors.check_graph(graph)

    if graph.edge_count == 0:
        raise ValidationError("The dual factor graph needs at least one "
                              "edge.")

    if dual_factors.has_negative_entries:
        raise DomainError("Dual factor tables take negative values (e.g. an "
                          "antiferromagnetic coupling or a negative field). "
                          "The dual model is then not a valid PMF and its "
                          "marginals are signed functions.")

    return FactorGraph(dual_factors.q, graph.edge_count,
                       unary_vars=np.arange(graph.edge_count),
                       unary_tables=dual_factors.edge_tables,
                       sum_scopes=graph.incidence,
                       sum_signs=graph.incidence_signs,
                       sum_tables=dual_factors.vertex_tables,
                       domain="dual", graph=graph)


class BpReport(BaseResultMixIn):
    """
    Outcome of a belief propagation run.

    Parameters
    ----------
    variable_beliefs : `~numpy.ndarray`
        ``(n_variables, q)`` beliefs.
    pair_beliefs : `~numpy.ndarray`
        ``(n_pair, q)`` beliefs of the pairwise factors on their
        difference variable.
    sum_beliefs : `~numpy.ndarray`
        ``(n_sum, q)`` beliefs of the sum-kind factors on their signed sum.
    converged : bool
    iterations : int
    final_delta : float
        Largest absolute change of a factor-to-variable message in the last
        iteration.
    domain : {"primal", "dual"}
    """

    _bulky_attributes = ("messages",)

    def __init__(self, variable_beliefs, pair_beliefs, sum_beliefs,
                 converged, iterations, final_delta, domain, messages=None):
        self.variable_beliefs = variable_beliefs
        self.pair_beliefs = pair_beliefs
        self.sum_beliefs = sum_beliefs
        self.converged = bool(converged)
        self.iterations = int(iterations)
        self.final_delta = float(final_delta)
        self.domain = domain
        self.messages = messages

    @property
    def edge_marginals(self):
        return bp_edge_marginals(self)

    @property
    def vertex_marginals(self):
        return bp_vertex_marginals(self)

    def summary(self):
        return ("BP ({0}) {1} after {2} iterations, final delta {3:.3e}"
                .format(self.domain,
                        "converged" if self.converged else "did not converge",
                        self.iterations, self.final_delta))

    def to_table(self):
        '''
        Per-edge beliefs with columns (edge, a, belief).
        '''
        marg = self.edge_marginals
        n_edges, q = marg.shape
        return Table([np.repeat(np.arange(n_edges), q),
                      np.tile(np.arange(q), n_edges),
                      marg.ravel()],
                     names=("edge", "a", "belief"))


def run_bp(fg, damping=None, tol=None, max_iter=None, seed=None,
           init="uniform", callback=None):
    '''
    Loopy sum-product belief propagation with a flooding schedule.

    Every iteration recomputes all factor-to-variable messages, mixes them
    with the previous ones as ``(1 - damping) * new + damping * old`` and
    normalizes them.

    Parameters
    ----------
    fg : `FactorGraph`
    damping : float, optional
        In [0, 1). Defaults to ``conf.bp_damping``.
    tol : float, optional
        Stop when no message changes by more than ``tol``. Defaults to
        ``conf.bp_tol``.
    max_iter : int, optional
        Iteration cap. Defaults to ``conf.bp_max_iter``.
    seed : int, optional
        Seed of the random initialization.
    init : {"uniform", "random"}
        Message initialization.
    callback : callable, optional
        Called as ``callback(iteration, messages)`` with the normalized
        factor-to-variable messages after every iteration.

    Returns
    -------
    report : `BpReport`
        ``converged`` is False when ``max_iter`` was reached; a
        `~dualmarg.exceptions.ConvergenceWarning` is emitted then.
    '''

    if damping is None:
        damping = conf.bp_damping
    if tol is None:
        tol = conf.bp_tol
    if max_iter is None:
        max_iter = conf.bp_max_iter

    damping = float(damping)
    if not 0 <= damping < 1:
        raise ValidationError("damping must lie in [0, 1). Found {}"
                              .format(damping))
    if not tol > 0:
        raise ValidationError("tol must be positive. Found {}".format(tol))
    if int(max_iter) < 1:
        raise ValidationError("max_iter must be at least 1. Found {}"
                              .format(max_iter))

    f2v = fg.initial_messages(init=init, seed=seed)

    converged = False
    delta = np.inf
    iteration = 0

    for iteration in range(1, int(max_iter) + 1):
        v2f, _ = fg.variable_messages(f2v)
        computed = fg.factor_messages(v2f)
        updated = _normalize((1. - damping) * computed + damping * f2v)

        delta = float(np.max(np.abs(updated - f2v))) if f2v.size else 0.
        f2v = updated

        if callback is not None:
            callback(iteration, f2v)

        if delta <= tol:
            converged = True
            break

    if not converged:
        warnings.warn("Belief propagation did not converge after {0} "
                      "iterations (final delta {1:.3e})."
                      .format(iteration, delta), ConvergenceWarning)

    v2f, variable_beliefs = fg.variable_messages(f2v)
    pair_beliefs, sum_beliefs = fg.factor_beliefs(v2f)

    return BpReport(variable_beliefs, pair_beliefs, sum_beliefs,
                    converged=converged, iterations=iteration,
                    final_delta=delta, domain=fg.domain, messages=f2v)


def _check_domain(report, domain):
    if domain is None:
        return report.domain
    if domain != report.domain:
        raise ValidationError("The report comes from a {0} factor graph, "
                              "not {1}.".format(report.domain, domain))
    return domain


def bp_edge_marginals(report, domain=None):
    '''
    Per-edge marginals from a BP report.

    Primal: the belief of the pairwise factor on ``y_e``. Dual: the belief
    of the edge variable.

    Returns
    -------
    marginals : `~numpy.ndarray`
        ``(|E|, q)`` array.
    '''
    domain = _check_domain(report, domain)
    if domain == "primal":
        return report.pair_beliefs
    return report.variable_beliefs


def bp_vertex_marginals(report, domain=None):
    '''
    Per-vertex marginals from a BP report.

    Primal: the variable belief of ``x_v``. Dual: the belief of the vertex
    factor on the signed sum of its edge variables.
    '''
    domain = _check_domain(report, domain)
    if domain == "primal":
        return report.variable_beliefs
    return report.sum_beliefs
