# Licensed under an MIT open source license - see LICENSE

import numpy as np

from .._astropy_init import conf
from ..exceptions import (SingularMappingError, ValidationError,
                          ComplexTableError)
from ..models.factors import FactorTable, FactorSet, dft_q, dft_matrix


__all__ = ['MappingMatrix', 'mapping_matrix', 'map_edge_dual_to_primal',
           'map_edge_primal_to_dual', 'map_vertex', 'map_all_edges',
           'map_all_vertices', 'ising_mapping_matrix', 'potts_map_reduced',
           'potts_symmetry_residual', 'directions']


directions = ("dual_to_primal", "primal_to_dual")

_map_methods = ("auto", "full", "reduced")


def _table_values(table):
    if isinstance(table, FactorTable):
        return table.values
    return np.asarray(table)


def _check_direction(direction):
    if direction not in directions:
        raise ValidationError("direction must be one of {0}. Found {1}"
                              .format(directions, direction))


def _check_nonsingular(values, name):
    zeros = np.flatnonzero(values == 0)
    if zeros.size > 0:
        raise SingularMappingError(
            "{0} vanishes at {1}; the mapping is undefined there (e.g. a "
            "zero coupling or a zero field).".format(name, zeros.tolist()))


def _check_marginal(pi, q, atol=1e-8):
    pi = np.asarray(pi)
    if pi.shape != (q,):
        raise ValidationError("Expected a marginal vector of length {0}. "
                              "Found shape {1}".format(q, pi.shape))
    if np.iscomplexobj(pi):
        raise ValidationError("Marginal vectors must be real.")
    total = pi.sum()
    if abs(total - 1.) > atol:
        raise ValidationError("Marginal vector sums to {}, not 1."
                              .format(total))
    return pi.astype(float)


def _real_output(values, tol=None):
    if tol is None:
        tol = conf.real_tolerance
    if not np.iscomplexobj(values):
        return values
    scale = max(1., float(np.max(np.abs(values))))
    if np.any(np.abs(values.imag) > tol * scale):
        raise ComplexTableError("The mapped vector is not real; the factors "
                                "are not symmetric.")
    return values.real.copy()


class MappingMatrix(object):
    """
    Linear map between the primal and dual marginals of one edge or vertex.

    ``dual_to_primal`` is ``diag(table) W_q diag(1 / dual_table)``, and
    ``primal_to_dual`` is its inverse
    ``diag(dual_table) conj(W_q) / q diag(1 / table)``.
    """

    def __init__(self, entries, direction):
        _check_direction(direction)
        entries = np.asarray(entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValidationError("A mapping matrix must be square.")
        entries.setflags(write=False)
        self._entries = entries
        self._direction = direction

    @property
    def entries(self):
        return self._entries

    @property
    def direction(self):
        return self._direction

    @property
    def q(self):
        return self._entries.shape[0]

    def apply(self, pi, tol=None):
        '''
        Map a marginal vector. The output is real and sums to one
        whenever the input does.
        '''
        pi = _check_marginal(pi, self.q)
        return _real_output(self.entries @ pi, tol=tol)

    def inverse(self):
        other = directions[1 - directions.index(self.direction)]
        return MappingMatrix(np.linalg.inv(self.entries), other)

    def __repr__(self):
        return "MappingMatrix(direction={0}, q={1})".format(self.direction,
                                                            self.q)


def mapping_matrix(table, dual_table=None, direction="dual_to_primal"):
    '''
    Build the `MappingMatrix` of a local factor and its DFT.

    Parameters
    ----------
    table : `~dualmarg.models.FactorTable` or array-like
        Primal factor (``psi_e`` or ``phi_v``).
    dual_table : `~dualmarg.models.FactorTable` or array-like, optional
        Its DFT. Computed with `~dualmarg.models.dft_q` when omitted.
    direction : {"dual_to_primal", "primal_to_dual"}

    Raises
    ------
    SingularMappingError
        When an entry of either table is zero.
    '''

    _check_direction(direction)

    values = _table_values(table)
    if dual_table is None:
        dual_table = dft_q(FactorTable(values, domain="primal"))
    dual_values = _table_values(dual_table)

    if values.shape != dual_values.shape:
        raise ValidationError("The factor and its DFT must have the same "
                              "length.")

    _check_nonsingular(values, "The primal factor")
    _check_nonsingular(dual_values, "The dual factor")

    q = values.size
    w = dft_matrix(q)

    if direction == "dual_to_primal":
        entries = values[:, np.newaxis] * w / dual_values[np.newaxis, :]
    else:
        entries = dual_values[:, np.newaxis] * np.conj(w) / q / \
            values[np.newaxis, :]

    if q == 2:
        entries = entries.real

    return MappingMatrix(entries, direction)


def ising_mapping_matrix(beta_j, direction="dual_to_primal"):
    '''
    Closed-form Ising edge mapping at coupling ``beta_j``.

    The dual-to-primal matrix is

    ``[[e^J / (2 cosh J),  e^J / (2 sinh J)],
      [e^-J / (2 cosh J), -e^-J / (2 sinh J)]]``.
    '''

    _check_direction(direction)
    beta_j = float(beta_j)
    if beta_j == 0:
        raise SingularMappingError("The Ising mapping is undefined at "
                                   "beta_J = 0 (sinh vanishes).")

    ep = np.exp(beta_j)
    em = np.exp(-beta_j)
    ch = np.cosh(beta_j)
    sh = np.sinh(beta_j)

    if direction == "dual_to_primal":
        entries = np.array([[ep / (2 * ch), ep / (2 * sh)],
                            [em / (2 * ch), -em / (2 * sh)]])
    else:
        entries = np.array([[ch * em, ch * ep],
                            [sh * em, -sh * ep]])

    return MappingMatrix(entries, direction)


def _is_potts_symmetric(values, tol=1e-12):
    values = np.asarray(values)
    if values.size < 3:
        return True
    scale = max(1., float(np.max(np.abs(values))))
    return bool(np.all(np.abs(values[1:] - values[1]) <= tol * scale))


def potts_symmetry_residual(pi, table):
    '''
    Largest deviation of ``pi(t) / table(t)`` from ``pi(1) / table(1)`` over
    ``t = 1..q-1``. Zero for marginals of Potts models.
    '''
    pi = np.asarray(pi, dtype=float)
    values = np.asarray(_table_values(table), dtype=float)
    _check_nonsingular(values, "The factor")
    ratios = pi[1:] / values[1:]
    return float(np.max(np.abs(ratios - ratios[0])))


def potts_map_reduced(pi, table, dual_table, direction="dual_to_primal"):
    '''
    Edge mapping for Potts-symmetric tables in O(q) operations.

    With ``r0 = pi(0) / d(0)`` and ``r1 = pi(t) / d(t)`` on the source side
    (``d`` the source table), the target is
    ``target(0) * (r0 + (q - 1) r1) / s`` and ``target(t) * (r0 - r1) / s``
    with ``s = 1`` for dual-to-primal and ``s = q`` for primal-to-dual.
    '''

    _check_direction(direction)

    values = np.asarray(_table_values(table), dtype=float)
    dual_values = np.asarray(_table_values(dual_table), dtype=float)
    q = values.size
    pi = _check_marginal(pi, q)

    for vals, name in ((values, "The primal factor"),
                       (dual_values, "The dual factor"), (pi, "The input")):
        if not _is_potts_symmetric(vals):
            raise ValidationError("{} is not symmetric over the nonzero "
                                  "symbols.".format(name))

    _check_nonsingular(values, "The primal factor")
    _check_nonsingular(dual_values, "The dual factor")

    if direction == "dual_to_primal":
        source, target, scale = dual_values, values, 1.
    else:
        source, target, scale = values, dual_values, float(q)

    r0 = pi[0] / source[0]
    r1 = pi[1] / source[1]

    out = np.empty(q)
    out[0] = target[0] * (r0 + (q - 1) * r1) / scale
    out[1:] = target[1:] * (r0 - r1) / scale

    return out


def _map_edge(pi, table, dual_table, direction, method):

    if method not in _map_methods:
        raise ValidationError("method must be one of {0}. Found {1}"
                              .format(_map_methods, method))

    values = _table_values(table)
    if dual_table is None:
        dual_table = dft_q(FactorTable(values, domain="primal"))
    dual_values = _table_values(dual_table)

    if method == "auto":
        use_reduced = (values.size > 2 and
                       not np.iscomplexobj(dual_values) and
                       _is_potts_symmetric(values) and
                       _is_potts_symmetric(dual_values) and
                       _is_potts_symmetric(pi))
        method = "reduced" if use_reduced else "full"

    if method == "reduced":
        return potts_map_reduced(pi, values, dual_values,
                                 direction=direction)

    return mapping_matrix(values, dual_values, direction=direction).apply(pi)


def map_edge_dual_to_primal(pi_d, psi, psi_dual=None, method="auto"):
    '''
    Primal edge marginal from a dual edge marginal.

    ``pi_p(a) / psi(a) = sum_a' w^(a a') pi_d(a') / psi~(a')``. The output
    sums to one whenever the input does.

    Parameters
    ----------
    pi_d : array-like
        Dual edge marginal (may be signed).
    psi : `~dualmarg.models.FactorTable` or array-like
        Primal edge factor.
    psi_dual : `~dualmarg.models.FactorTable` or array-like, optional
        DFT of ``psi``.
    method : {"auto", "full", "reduced"}
        ``"reduced"`` uses the O(q) Potts-symmetric form. ``"auto"`` picks
        it for q > 2 when the tables and input are symmetric.

    Returns
    -------
    pi_p : `~numpy.ndarray`
    '''
    return _map_edge(pi_d, psi, psi_dual, "dual_to_primal", method)


def map_edge_primal_to_dual(pi_p, psi, psi_dual=None, method="auto"):
    '''
    Dual edge marginal from a primal edge marginal; the inverse of
    `map_edge_dual_to_primal`.
    '''
    return _map_edge(pi_p, psi, psi_dual, "primal_to_dual", method)


def map_vertex(pi_v, phi, phi_dual=None, direction="dual_to_primal",
               method="auto"):
    '''
    Vertex analog of the edge mappings,
    ``pi_p(a) / phi(a) = sum_a' w^(a a') pi_d(a') / phi~(a')``.

    Raises `~dualmarg.exceptions.SingularMappingError` for a zero field,
    where the dual vertex factor vanishes.
    '''
    _check_direction(direction)
    return _map_edge(pi_v, phi, phi_dual, direction, method)


def _dual_pair(factors, dual_factors):
    if not isinstance(factors, FactorSet):
        raise ValidationError("factors must be a FactorSet.")
    if factors.domain == "dual":
        factors, dual_factors = factors.transform(), factors
    if dual_factors is None:
        dual_factors = factors.transform()
    return factors, dual_factors


def map_all_edges(marginals, factors, dual_factors=None,
                  direction="dual_to_primal", method="auto"):
    '''
    Map the ``(|E|, q)`` array of edge marginals of a whole model.
    '''

    _check_direction(direction)
    factors, dual_factors = _dual_pair(factors, dual_factors)
    marginals = np.asarray(marginals, dtype=float)

    if marginals.shape != factors.edge_tables.shape:
        raise ValidationError("Expected edge marginals of shape {0}. Found "
                              "{1}".format(factors.edge_tables.shape,
                                           marginals.shape))

    return np.array([_map_edge(marginals[e], factors.edge_tables[e],
                               dual_factors.edge_tables[e], direction,
                               method)
                     for e in range(marginals.shape[0])])


def map_all_vertices(marginals, factors, dual_factors=None,
                     direction="dual_to_primal", method="auto"):
    '''
    Map the ``(N, q)`` array of vertex marginals of a whole model.
    '''

    _check_direction(direction)
    factors, dual_factors = _dual_pair(factors, dual_factors)
    marginals = np.asarray(marginals, dtype=float)

    if marginals.shape != factors.vertex_tables.shape:
        raise ValidationError("Expected vertex marginals of shape {0}. Found "
                              "{1}".format(factors.vertex_tables.shape,
                                           marginals.shape))

    return np.array([_map_edge(marginals[v], factors.vertex_tables[v],
                               dual_factors.vertex_tables[v], direction,
                               method)
                     for v in range(marginals.shape[0])])
