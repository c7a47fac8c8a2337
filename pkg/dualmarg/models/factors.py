# Licensed under an MIT open source license - see LICENSE

import numpy as np

from .._astropy_init import conf
from ..exceptions import (ValidationError, ModeError, UnsupportedFeatureError,
                          ComplexTableError)


__all__ = ['ModelParams', 'FactorTable', 'FactorSet', 'Configuration',
           'ising_factors', 'potts_factors', 'model_factors', 'random_factors',
           'dft_q', 'inverse_dft_q', 'dft_matrix', 'hamiltonian',
           'edge_differences', 'dual_vertex_sums', 'oriented_incidence',
           'interaction_energy_per_site']


model_kinds = ("ising", "potts")


class ModelParams(object):
    """
    Dimensionless parameters of an Ising or Potts model. The inverse
    temperature is absorbed into the couplings and fields.

    Parameters
    ----------
    couplings : array-like
        Per-edge couplings beta * J_e.
    fields : array-like
        Per-vertex fields beta * H_v. Must be all zero for Potts models.
    q : int, optional
        Alphabet order. Must be 2 for the Ising model.
    model : {"ising", "potts"}, optional
        Model family.
    """

    def __init__(self, couplings, fields, q=2, model="ising"):

        if model not in model_kinds:
            raise ValidationError("model must be one of {0}. Found {1}"
                                  .format(model_kinds, model))

        q = int(q)
        if q < 2:
            raise ModeError("q must be at least 2. Found {}".format(q))
        if model == "ising" and q != 2:
            raise ModeError("The Ising model requires q=2. Found q={}"
                            .format(q))

        couplings = np.array(couplings, dtype=float).ravel()
        fields = np.array(fields, dtype=float).ravel()

        if not np.all(np.isfinite(couplings)):
            raise ValidationError("Couplings must be finite.")
        if not np.all(np.isfinite(fields)):
            raise ValidationError("Fields must be finite.")

        couplings.setflags(write=False)
        fields.setflags(write=False)

        self._couplings = couplings
        self._fields = fields
        self._q = q
        self._model = model

    @classmethod
    def homogeneous(cls, graph, beta_j, beta_h=0., q=2, model="ising"):
        '''
        Constant couplings and fields on every edge and vertex of ``graph``.
        '''
        return cls(np.full(graph.edge_count, float(beta_j)),
                   np.full(graph.vertex_count, float(beta_h)),
                   q=q, model=model)

    @property
    def couplings(self):
        return self._couplings

    @property
    def fields(self):
        return self._fields

    @property
    def q(self):
        return self._q

    @property
    def model(self):
        return self._model

    @property
    def is_ferromagnetic(self):
        return bool(np.all(self.couplings >= 0))

    @property
    def has_nonnegative_field(self):
        return bool(np.all(self.fields >= 0))

    def validate(self, graph):
        '''
        Check that the parameter lengths match ``graph``.
        '''
        if self.couplings.size != graph.edge_count:
            raise ValidationError("Expected {0} couplings for the graph. "
                                  "Found {1}".format(graph.edge_count,
                                                     self.couplings.size))
        if self.fields.size != graph.vertex_count:
            raise ValidationError("Expected {0} fields for the graph. Found "
                                  "{1}".format(graph.vertex_count,
                                               self.fields.size))
        if self.model == "potts" and np.any(self.fields != 0):
            raise UnsupportedFeatureError("Potts models are only supported "
                                          "without an external field.")

    def __repr__(self):
        return ("ModelParams(model={0}, q={1}, |E|={2}, N={3})"
                .format(self.model, self.q, self.couplings.size,
                        self.fields.size))


class FactorTable(object):
    """
    Length-q weight vector attached to an edge or a vertex.

    Parameters
    ----------
    values : array-like
        Table entries. Real primal tables must be nonnegative.
    domain : {"primal", "dual"}
        Domain the table lives in.
    attachment : tuple, optional
        ``("edge", index)`` or ``("vertex", index)``.
    check : bool, optional
        Reject negative real primal entries. Transform outputs are built
        unchecked.
    """

    def __init__(self, values, domain="primal", attachment=None, check=True):

        if domain not in ("primal", "dual"):
            raise ValidationError("domain must be 'primal' or 'dual'.")

        values = np.array(values)
        if values.ndim != 1 or values.size < 2:
            raise ValidationError("A factor table must be a vector of "
                                  "length q >= 2.")
        if np.iscomplexobj(values):
            values = values.astype(complex)
        else:
            values = values.astype(float)

        if check and domain == "primal" and not np.iscomplexobj(values):
            if np.any(values < 0):
                raise ValidationError("Primal factor tables must be "
                                      "nonnegative.")

        values.setflags(write=False)

        self._values = values
        self._domain = domain
        self._attachment = attachment

    @property
    def values(self):
        return self._values

    @property
    def domain(self):
        return self._domain

    @property
    def attachment(self):
        return self._attachment

    @property
    def q(self):
        return self._values.size

    @property
    def is_real(self):
        return not np.iscomplexobj(self._values)

    def __len__(self):
        return self.q

    def __repr__(self):
        return "FactorTable({0}, domain={1}, attachment={2})".format(
            self.values, self.domain, self.attachment)


def dft_matrix(q):
    '''
    The q-point DFT matrix, ``w[k, l] = exp(-2 pi i k l / q)``.
    '''
    idx = np.arange(int(q))
    return np.exp(-2j * np.pi * np.outer(idx, idx) / q)


def _truncate_imaginary(values, tol):
    '''
    Drop imaginary parts below ``tol`` and snap real entries of that size
    to exactly zero.
    '''
    if not np.iscomplexobj(values):
        return values
    scale = max(1., float(np.max(np.abs(values))))
    if np.all(np.abs(values.imag) <= tol * scale):
        real = values.real.copy()
        real[np.abs(real) <= tol * scale] = 0.
        return real
    return values


def _flip_domain(domain):
    return "dual" if domain == "primal" else "primal"


def dft_q(table, tol=None):
    '''
    DFT of a factor table, ``W_q . values``.

    For q=2 the output is exactly ``[v0 + v1, v0 - v1]``. Imaginary parts
    below ``tol`` (relative to the largest magnitude, floored at one) are
    dropped so symmetric tables give real tables.

    Parameters
    ----------
    table : `FactorTable` or array-like
        Table to transform. Arrays may hold any real or complex values.
    tol : float, optional
        Truncation tolerance. Defaults to ``conf.real_tolerance``.

    Returns
    -------
    transformed : `FactorTable`
        The transformed table, flagged dual. Signed outputs are allowed.
    '''

    if tol is None:
        tol = conf.real_tolerance

    if not isinstance(table, FactorTable):
        table = FactorTable(table, domain="primal", check=False)

    values = table.values

    if table.q == 2 and table.is_real:
        out = np.array([values[0] + values[1], values[0] - values[1]])
    else:
        out = _truncate_imaginary(np.fft.fft(values), tol)

    return FactorTable(out, domain="dual", attachment=table.attachment,
                       check=False)


def inverse_dft_q(table, tol=None):
    '''
    Inverse DFT of a factor table, ``conj(W_q) . values / q``. The output
    is flagged primal and is not checked for sign.
    '''

    if tol is None:
        tol = conf.real_tolerance

    if not isinstance(table, FactorTable):
        table = FactorTable(table, domain="dual")

    values = table.values

    if table.q == 2 and table.is_real:
        out = np.array([values[0] + values[1], values[0] - values[1]]) / 2.
    else:
        out = _truncate_imaginary(np.fft.ifft(values), tol)

    return FactorTable(out, domain="primal", attachment=table.attachment,
                       check=False)


class FactorSet(object):
    """
    All edge and vertex tables of a model in one domain.

    Parameters
    ----------
    edge_tables : array-like
        ``(|E|, q)`` array; row e is the table of edge e.
    vertex_tables : array-like
        ``(N, q)`` array; row v is the table of vertex v.
    domain : {"primal", "dual"}
        Domain of the tables.
    check : bool, optional
        Reject negative real primal entries.
    """

    def __init__(self, edge_tables, vertex_tables, domain="primal",
                 check=True):

        edge_tables = np.atleast_2d(np.array(edge_tables))
        vertex_tables = np.atleast_2d(np.array(vertex_tables))

        if edge_tables.shape[1] != vertex_tables.shape[1]:
            raise ValidationError("Edge and vertex tables must share the "
                                  "alphabet size.")
        if domain not in ("primal", "dual"):
            raise ValidationError("domain must be 'primal' or 'dual'.")

        if np.iscomplexobj(edge_tables) or np.iscomplexobj(vertex_tables):
            edge_tables = edge_tables.astype(complex)
            vertex_tables = vertex_tables.astype(complex)
        else:
            edge_tables = edge_tables.astype(float)
            vertex_tables = vertex_tables.astype(float)

        if check and domain == "primal" and \
                not np.iscomplexobj(edge_tables):
            if np.any(edge_tables < 0) or np.any(vertex_tables < 0):
                raise ValidationError("Primal factor tables must be "
                                      "nonnegative.")

        edge_tables.setflags(write=False)
        vertex_tables.setflags(write=False)

        self._edge_tables = edge_tables
        self._vertex_tables = vertex_tables
        self._domain = domain

    @property
    def edge_tables(self):
        return self._edge_tables

    @property
    def vertex_tables(self):
        return self._vertex_tables

    @property
    def domain(self):
        return self._domain

    @property
    def q(self):
        return self._edge_tables.shape[1]

    @property
    def is_real(self):
        return not np.iscomplexobj(self._edge_tables)

    @property
    def has_negative_entries(self):
        if not self.is_real:
            return True
        return bool(np.any(self.edge_tables < 0) or
                    np.any(self.vertex_tables < 0))

    def edge_table(self, e):
        return FactorTable(self.edge_tables[e], domain=self.domain,
                           attachment=("edge", int(e)))

    def vertex_table(self, v):
        return FactorTable(self.vertex_tables[v], domain=self.domain,
                           attachment=("vertex", int(v)))

    def check_graph(self, graph):
        if self.edge_tables.shape[0] != graph.edge_count:
            raise ValidationError("Expected {0} edge tables. Found {1}"
                                  .format(graph.edge_count,
                                          self.edge_tables.shape[0]))
        if self.vertex_tables.shape[0] != graph.vertex_count:
            raise ValidationError("Expected {0} vertex tables. Found {1}"
                                  .format(graph.vertex_count,
                                          self.vertex_tables.shape[0]))

    def transform(self, tol=None, allow_complex=False):
        '''
        Apply `dft_q` to every table (the inverse DFT for dual sets),
        giving the factor set of the other domain.

        Parameters
        ----------
        tol : float, optional
            Real-truncation tolerance.
        allow_complex : bool, optional
            Keep complex tables instead of raising `ComplexTableError`.
        '''

        if tol is None:
            tol = conf.real_tolerance

        if self.domain == "primal":
            edge = np.fft.fft(self.edge_tables, axis=1)
            vertex = np.fft.fft(self.vertex_tables, axis=1)
        else:
            edge = np.fft.ifft(self.edge_tables, axis=1)
            vertex = np.fft.ifft(self.vertex_tables, axis=1)

        if self.q == 2 and self.is_real:
            scale = 1. if self.domain == "primal" else 0.5
            edge = scale * np.column_stack(
                [self.edge_tables[:, 0] + self.edge_tables[:, 1],
                 self.edge_tables[:, 0] - self.edge_tables[:, 1]])
            vertex = scale * np.column_stack(
                [self.vertex_tables[:, 0] + self.vertex_tables[:, 1],
                 self.vertex_tables[:, 0] - self.vertex_tables[:, 1]])
        else:
            edge = _truncate_imaginary(edge, tol)
            vertex = _truncate_imaginary(vertex, tol)
            if np.iscomplexobj(edge) != np.iscomplexobj(vertex):
                edge = edge.astype(complex)
                vertex = vertex.astype(complex)

        if np.iscomplexobj(edge) and not allow_complex:
            raise ComplexTableError("The transformed tables are complex. "
                                    "Only factors with real transforms "
                                    "(e.g. symmetric tables) are supported.")

        return FactorSet(edge, vertex, domain=_flip_domain(self.domain),
                         check=False)

    def __repr__(self):
        return "FactorSet(domain={0}, q={1}, |E|={2}, N={3})".format(
            self.domain, self.q, self.edge_tables.shape[0],
            self.vertex_tables.shape[0])


def ising_factors(graph, params):
    '''
    Primal factors of the Ising model,
    ``psi_e = [exp(bJ_e), exp(-bJ_e)]`` and ``phi_v = [exp(bH_v), exp(-bH_v)]``.
    '''

    if params.q != 2:
        raise ModeError("Ising factors require q=2. Found q={}"
                        .format(params.q))
    params.validate(graph)

    bj = params.couplings
    bh = params.fields

    edge_tables = np.column_stack([np.exp(bj), np.exp(-bj)])
    vertex_tables = np.column_stack([np.exp(bh), np.exp(-bh)])

    return FactorSet(edge_tables, vertex_tables, domain="primal")


def potts_factors(graph, params):
    '''
    Primal factors of the zero-field Potts model,
    ``psi_e = [exp(bJ_e), 1, ..., 1]`` and all-ones vertex tables.
    '''

    if np.any(params.fields != 0):
        raise UnsupportedFeatureError("Potts models are only supported "
                                      "without an external field.")
    params.validate(graph)

    q = params.q
    edge_tables = np.ones((graph.edge_count, q))
    edge_tables[:, 0] = np.exp(params.couplings)
    vertex_tables = np.ones((graph.vertex_count, q))

    return FactorSet(edge_tables, vertex_tables, domain="primal")


def model_factors(graph, params):
    '''
    Primal factors for the model family named in ``params``.
    '''
    if params.model == "ising":
        return ising_factors(graph, params)
    return potts_factors(graph, params)


def random_factors(graph, q=2, seed=0, symmetric=True, low=0.1, high=2.):
    '''
    Strictly positive random primal factors.

    With ``symmetric=True`` every table satisfies ``t(a) = t(-a mod q)``,
    so its DFT is real.
    '''

    rng = np.random.Generator(np.random.Philox(seed))

    def draw(rows):
        tables = rng.uniform(low, high, size=(rows, q))
        if symmetric:
            tables = 0.5 * (tables + tables[:, (-np.arange(q)) % q])
        return tables

    return FactorSet(draw(graph.edge_count), draw(graph.vertex_count),
                     domain="primal")


def oriented_incidence(graph):
    '''
    ``(N, |E|)`` matrix with +1 where edge e enters vertex v and -1 where
    it leaves it.
    '''
    mat = np.zeros((graph.vertex_count, graph.edge_count), dtype=int)
    for e, (i, j) in enumerate(graph.edges):
        mat[i, e] = -1
        mat[j, e] = 1
    return mat


def edge_differences(x, graph, q):
    '''
    Edge variables ``y_e = x_i - x_j (mod q)`` for one or many primal
    configurations (last axis indexes vertices).
    '''
    x = np.asarray(x)
    edges = graph.edge_array
    return (x[..., edges[:, 0]] - x[..., edges[:, 1]]) % q


def dual_vertex_sums(y, graph, q):
    '''
    Dual vertex variables ``x~_v = sum_in y~_e - sum_out y~_e (mod q)`` for
    one or many dual configurations (last axis indexes edges). For q=2 this
    is the parity of the selected incident edges.
    '''
    y = np.asarray(y)
    return (y @ oriented_incidence(graph).T) % q


class Configuration(object):
    """
    A primal (one symbol per vertex) or dual (one symbol per edge)
    configuration.
    """

    def __init__(self, assignment, q, domain="primal"):

        assignment = np.array(assignment, dtype=int).ravel()
        q = int(q)
        if np.any(assignment < 0) or np.any(assignment >= q):
            raise ValidationError("Configuration entries must lie in "
                                  "0..{}".format(q - 1))
        if domain not in ("primal", "dual"):
            raise ValidationError("domain must be 'primal' or 'dual'.")

        assignment.setflags(write=False)
        self._assignment = assignment
        self._q = q
        self._domain = domain

    @property
    def assignment(self):
        return self._assignment

    @property
    def q(self):
        return self._q

    @property
    def domain(self):
        return self._domain

    def _check(self, graph, domain):
        if self.domain != domain:
            raise ValidationError("Expected a {} configuration.".format(domain))
        size = graph.vertex_count if domain == "primal" else graph.edge_count
        if self.assignment.size != size:
            raise ValidationError("Configuration has {0} entries, the graph "
                                  "needs {1}".format(self.assignment.size,
                                                     size))

    def edge_differences(self, graph):
        self._check(graph, "primal")
        return edge_differences(self.assignment, graph, self.q)

    def dual_vertex_sums(self, graph):
        self._check(graph, "dual")
        return dual_vertex_sums(self.assignment, graph, self.q)


def hamiltonian(config, graph, params):
    '''
    Dimensionless energy ``beta * H(x)`` of a primal configuration.

    Ising: ``-sum_e bJ_e (2 delta(y_e) - 1) - sum_v bH_v (2 delta(x_v) - 1)``.
    Potts: ``-sum_e bJ_e delta(y_e)``.
    '''

    if not isinstance(config, Configuration):
        config = Configuration(config, params.q, domain="primal")
    params.validate(graph)

    y = config.edge_differences(graph)
    x = config.assignment

    if params.model == "ising":
        return float(-np.sum(params.couplings * (2 * (y == 0) - 1)) -
                     np.sum(params.fields * (2 * (x == 0) - 1)))

    return float(-np.sum(params.couplings * (y == 0)))


def interaction_energy_per_site(pi_p1, degree=4):
    '''
    Average Ising interaction energy per site, in units of J, from the
    probability ``pi_p1`` that an edge joins unequal spins on a lattice with
    ``degree / 2`` edges per site. ``-2 (1 - 2 pi_p1)`` on the square lattice.
    '''
    pi_p1 = np.asarray(pi_p1, dtype=float)
    return -(degree / 2.) * (1. - 2. * pi_p1)
