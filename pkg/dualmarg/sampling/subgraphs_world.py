# Licensed under an MIT open source license - see LICENSE

import math

import numpy as np
from astropy.table import Table
from astropy.utils.console import ProgressBar

from .._astropy_init import conf
from ..base_result import BaseResultMixIn
from ..exceptions import DomainError, ModeError, ValidationError
from ..inference.exact import _check_budget, _ordered_fsum


__all__ = ['SwpState', 'SwpEstimate', 'swp_weight', 'swp_log_weight',
           'swp_step', 'swp_estimate', 'swp_exact_small', 'merge_estimates',
           'dual_from_inclusion']


def _log_tanh(graph, params):
    '''
    ``ln tanh`` of the couplings and fields, checking the chain's domain.
    '''

    if params.q != 2 or params.model != "ising":
        raise ModeError("The subgraphs-world process is defined for the "
                        "Ising model only.")
    params.validate(graph)

    if np.any(params.couplings <= 0):
        bad = np.flatnonzero(params.couplings <= 0)
        raise DomainError("The subgraphs-world process needs positive "
                          "couplings. Edges {} are not.".format(bad.tolist()))
    if np.any(params.fields <= 0):
        bad = np.flatnonzero(params.fields <= 0)
        raise DomainError("The subgraphs-world process needs positive "
                          "fields. Vertices {} are not.".format(bad.tolist()))

    return np.log(np.tanh(params.couplings)), np.log(np.tanh(params.fields))


def _as_mask(subset, n_edges):
    subset = np.asarray(subset)
    if subset.dtype == bool:
        if subset.shape != (n_edges,):
            raise ValidationError("A subset mask needs {} entries."
                                  .format(n_edges))
        return subset.copy()
    mask = np.zeros(n_edges, dtype=bool)
    idx = subset.astype(int).ravel()
    if idx.size > 0 and (idx.min() < 0 or idx.max() >= n_edges):
        raise ValidationError("Edge indices must lie in 0..{}"
                              .format(n_edges - 1))
    mask[idx] = True
    return mask


def swp_log_weight(subset, graph, params):
    '''
    ``sum_{v in odd(W)} ln tanh(bH_v) + sum_{e in W} ln tanh(bJ_e)``.
    '''
    log_tj, log_th = _log_tanh(graph, params)
    mask = _as_mask(subset, graph.edge_count)
    degree = np.bincount(graph.edge_array[mask].ravel(),
                         minlength=graph.vertex_count)
    return float(log_tj[mask].sum() + log_th[degree % 2 == 1].sum())


def swp_weight(subset, graph, params):
    '''
    Subgraphs-world weight
    ``prod_{v in odd(W)} tanh(bH_v) * prod_{e in W} tanh(bJ_e)``.

    Parameters
    ----------
    subset : array-like
        Boolean edge mask or a sequence of edge indices.
    graph : `~dualmarg.models.Graph`
    params : `~dualmarg.models.ModelParams`
        Ising parameters with positive couplings and fields.
    '''
    log_tj, log_th = _log_tanh(graph, params)
    mask = _as_mask(subset, graph.edge_count)
    degree = np.bincount(graph.edge_array[mask].ravel(),
                         minlength=graph.vertex_count)
    return float(np.prod(np.exp(log_tj[mask])) *
                 np.prod(np.exp(log_th[degree % 2 == 1])))


class SwpState(object):
    """
    Edge subset W with cached vertex degrees, odd-vertex count and
    log-weight. `swp_step` updates the state in place.
    """

    def __init__(self, subset, degree, odd_count, log_weight, edges,
                 log_tanh_j, log_tanh_h):
        self.subset = subset
        self.degree = degree
        self.odd_count = int(odd_count)
        self.log_weight = float(log_weight)
        self.steps = 0
        self.accepted = 0
        self._edges = edges
        self._log_tanh_j = log_tanh_j
        self._log_tanh_h = log_tanh_h
        self._edge_list = [tuple(edge) for edge in np.asarray(edges).tolist()]
        self._log_j = np.asarray(log_tanh_j, dtype=float).tolist()
        self._log_h = np.asarray(log_tanh_h, dtype=float).tolist()

    @classmethod
    def from_subset(cls, subset, graph, params):
        '''
        Build a state from a boolean edge mask or edge indices.
        '''
        log_tj, log_th = _log_tanh(graph, params)
        mask = _as_mask(subset, graph.edge_count)
        degree = np.bincount(graph.edge_array[mask].ravel(),
                             minlength=graph.vertex_count)
        odd = degree % 2 == 1
        log_weight = log_tj[mask].sum() + log_th[odd].sum()
        return cls(mask, degree.astype(int), odd.sum(), log_weight,
                   graph.edge_array, log_tj, log_th)

    @classmethod
    def empty(cls, graph, params):
        return cls.from_subset(np.zeros(graph.edge_count, dtype=bool),
                               graph, params)

    def recompute(self):
        '''
        Degree, odd count and log-weight recomputed from the subset.
        '''
        mask = np.asarray(self.subset, dtype=bool)
        degree = np.bincount(self._edges[mask].ravel(),
                             minlength=self.degree.size)
        odd = degree % 2 == 1
        log_weight = self._log_tanh_j[mask].sum() + \
            self._log_tanh_h[odd].sum()
        return degree, int(odd.sum()), float(log_weight)

    def is_consistent(self, atol=1e-9):
        degree, odd_count, log_weight = self.recompute()
        return (np.array_equal(degree, self.degree) and
                odd_count == self.odd_count and
                abs(log_weight - self.log_weight) < atol)

    @property
    def acceptance_rate(self):
        if self.steps == 0:
            return np.nan
        return self.accepted / self.steps

    def toggle_delta(self, e):
        '''
        Change of (log-weight, odd count) from toggling edge ``e``.
        '''
        log_h = self._log_h
        delta = -self._log_j[e] if self.subset[e] else self._log_j[e]
        delta_odd = 0
        for v in self._edge_list[e]:
            if self.degree[v] & 1:
                delta -= log_h[v]
                delta_odd -= 1
            else:
                delta += log_h[v]
                delta_odd += 1
        return delta, delta_odd

    def toggle(self, e, delta=None, delta_odd=None):
        if delta is None:
            delta, delta_odd = self.toggle_delta(e)
        i, j = self._edge_list[e]
        step = -1 if self.subset[e] else 1
        self.subset[e] = not self.subset[e]
        self.degree[i] += step
        self.degree[j] += step
        self.odd_count += delta_odd
        self.log_weight += delta

    def step(self, e, u):
        '''
        Metropolis update for a proposed toggle of edge ``e`` and a uniform
        draw ``u``: accept when ``u < min(1, w(W') / w(W))``. Returns
        whether the toggle was accepted.
        '''
        delta, delta_odd = self.toggle_delta(e)
        self.steps += 1
        if delta >= 0 or u < math.exp(delta):
            self.toggle(e, delta, delta_odd)
            self.accepted += 1
            return True
        return False

    def __repr__(self):
        return "SwpState(|W|={0}, odd={1}, log_weight={2:.6g})".format(
            int(np.sum(self.subset)), self.odd_count, self.log_weight)


def swp_step(state, rng):
    '''
    One Metropolis step: pick an edge uniformly, toggle it and accept with
    probability ``min(1, w(W') / w(W))``.

    Parameters
    ----------
    state : `SwpState`
        Updated in place.
    rng : `~numpy.random.Generator`

    Returns
    -------
    state : `SwpState`
    '''
    e = int(rng.integers(0, state.subset.size))
    state.step(e, rng.random())
    return state


class SwpEstimate(BaseResultMixIn):
    """
    Edge inclusion frequencies of a subgraphs-world chain; ``p_hat[e]``
    estimates the dual marginal ``pi_d,e(1)``.
    """

    _bulky_attributes = ("batch_means",)

    def __init__(self, p_hat, std_err, sweeps, burn_in, seed, steps,
                 accepted, batch_means=None):
        self.p_hat = np.asarray(p_hat, dtype=float)
        self.std_err = np.asarray(std_err, dtype=float)
        self.sweeps = int(sweeps)
        self.burn_in = int(burn_in)
        self.seed = seed
        self.steps = int(steps)
        self.accepted = int(accepted)
        self.batch_means = batch_means

    @property
    def samples(self):
        return self.sweeps

    @property
    def acceptance_rate(self):
        if self.steps == 0:
            return np.nan
        return self.accepted / self.steps

    @property
    def dual_marginals(self):
        return dual_from_inclusion(self.p_hat)

    def metadata(self):
        return {"seed": self.seed, "sweeps": self.sweeps,
                "burn_in": self.burn_in, "steps": self.steps,
                "samples": self.samples,
                "acceptance_rate": self.acceptance_rate}

    def to_table(self):
        return Table([np.arange(self.p_hat.size), self.p_hat, self.std_err],
                     names=("edge", "p_hat", "std_err"))

    def __repr__(self):
        return "SwpEstimate(sweeps={0}, seed={1}, acceptance={2:.3f})".format(
            self.sweeps, self.seed, self.acceptance_rate)


def swp_estimate(graph, params, sweeps, burn_in=0, seed=0, batches=None,
                 show_progress=False):
    '''
    Estimate the dual edge marginals ``pi_d,e(1)`` with the single-edge
    Metropolis chain on edge subsets.

    One sweep is ``|E|`` steps; the subset is recorded after every
    post-burn-in sweep. Standard errors come from batch means.

    Parameters
    ----------
    graph : `~dualmarg.models.Graph`
    params : `~dualmarg.models.ModelParams`
        Ising parameters with positive couplings and fields.
    sweeps : int
        Recorded sweeps.
    burn_in : int, optional
        Discarded sweeps.
    seed : int, optional
        Seed of the Philox generator.
    batches : int, optional
        Number of batches. Defaults to ``conf.swp_batches``.
    show_progress : bool, optional
        Show a progress bar over the sweeps.

    Returns
    -------
    estimate : `SwpEstimate`
    '''

    sweeps = int(sweeps)
    burn_in = int(burn_in)
    if sweeps < 1:
        raise ValidationError("sweeps must be at least 1. Found {}"
                              .format(sweeps))
    if burn_in < 0:
        raise ValidationError("burn_in must be nonnegative. Found {}"
                              .format(burn_in))
    if graph.edge_count == 0:
        raise ValidationError("The graph has no edges to sample.")
    if batches is None:
        batches = conf.swp_batches
    batches = max(1, min(int(batches), sweeps))

    state = SwpState.empty(graph, params)
    rng = np.random.Generator(np.random.Philox(seed))
    n_edges = graph.edge_count

    batch_sums = np.zeros((batches, n_edges))
    batch_counts = np.zeros(batches)

    total = burn_in + sweeps
    if show_progress:
        bar = ProgressBar(total)

    for sweep in range(total):
        picks = rng.integers(0, n_edges, size=n_edges).tolist()
        uniforms = rng.random(n_edges).tolist()

        for e, u in zip(picks, uniforms):
            state.step(e, u)

        if sweep >= burn_in:
            batch = (sweep - burn_in) * batches // sweeps
            batch_sums[batch] += state.subset
            batch_counts[batch] += 1

        if show_progress:
            bar.update(sweep + 1)

    batch_means = batch_sums / batch_counts[:, np.newaxis]
    p_hat = batch_sums.sum(axis=0) / sweeps

    if batches > 1:
        std_err = batch_means.std(axis=0, ddof=1) / np.sqrt(batches)
    else:
        std_err = np.full(n_edges, np.nan)

    return SwpEstimate(p_hat, std_err, sweeps, burn_in, seed,
                       steps=state.steps, accepted=state.accepted,
                       batch_means=batch_means)


def merge_estimates(estimates):
    '''
    Combine independent chains, ordered by seed. Estimates are weighted by
    their number of sweeps.
    '''

    estimates = sorted(estimates, key=lambda est: est.seed)
    if len(estimates) == 0:
        raise ValidationError("No estimates to merge.")

    weights = np.array([est.sweeps for est in estimates], dtype=float)
    p_hat = np.sum([w * est.p_hat for w, est in zip(weights, estimates)],
                   axis=0) / weights.sum()
    std_err = np.sqrt(np.sum([(w * est.std_err) ** 2
                              for w, est in zip(weights, estimates)],
                             axis=0)) / weights.sum()

    return SwpEstimate(p_hat, std_err, int(weights.sum()),
                       sum(est.burn_in for est in estimates),
                       [est.seed for est in estimates],
                       steps=sum(est.steps for est in estimates),
                       accepted=sum(est.accepted for est in estimates))


def swp_exact_small(graph, params, budget=None, chunk_size=None,
                    return_partition=False):
    '''
    Exact inclusion probabilities ``P(e in W)`` of the subgraphs-world
    distribution by enumerating all ``2^|E|`` subsets.

    Parameters
    ----------
    return_partition : bool, optional
        Also return the sum of all subset weights.
    '''

    log_tj, log_th = _log_tanh(graph, params)
    n_edges = graph.edge_count
    n_terms = _check_budget(2, n_edges, budget)

    if chunk_size is None:
        chunk_size = conf.chunk_size

    tanh_j = np.exp(log_tj)
    tanh_h = np.exp(log_th)
    incidence = np.zeros((graph.vertex_count, n_edges), dtype=int)
    for e, (i, j) in enumerate(graph.edges):
        incidence[i, e] = 1
        incidence[j, e] = 1

    powers = 2 ** np.arange(n_edges, dtype=np.int64)

    z_parts = []
    edge_parts = []
    for start in range(0, n_terms, int(chunk_size)):
        index = np.arange(start, min(start + int(chunk_size), n_terms),
                          dtype=np.int64)
        mask = (index[:, np.newaxis] // powers) % 2
        odd = (mask @ incidence.T) % 2
        weights = np.prod(np.where(mask == 1, tanh_j, 1.), axis=1) * \
            np.prod(np.where(odd == 1, tanh_h, 1.), axis=1)
        z_parts.append(np.array([weights.sum()]))
        edge_parts.append((mask * weights[:, np.newaxis]).sum(axis=0))

    partition = _ordered_fsum(z_parts)[0]
    inclusion = _ordered_fsum(edge_parts) / partition

    if return_partition:
        return inclusion, partition
    return inclusion


def dual_from_inclusion(p_hat):
    '''
    Dual edge marginals ``[1 - p, p]`` from inclusion probabilities.
    '''
    p_hat = np.asarray(p_hat, dtype=float)
    return np.stack([1. - p_hat, p_hat], axis=-1)
