# Licensed under an MIT open source license - see LICENSE

import numpy as np

from ..exceptions import ValidationError, ModeError


__all__ = ['FixedPoint', 'ising_fixed_point', 'potts_fixed_point',
           'ising_fixed_point_at_criticality', 'potts_fixed_point_limit',
           'ising_bounds', 'uncertainty_product', 'bounds_slack',
           'criticality']


class FixedPoint(object):
    """
    Edge marginal left unchanged by the dual-to-primal edge mapping of a
    homogeneous model.
    """

    def __init__(self, q, beta_j, vector):
        self.q = int(q)
        self.beta_j = float(beta_j)
        self.vector = np.asarray(vector, dtype=float)
        self.vector.setflags(write=False)

    def __getitem__(self, idx):
        return self.vector[idx]

    def __repr__(self):
        return "FixedPoint(q={0}, beta_J={1}, vector={2})".format(
            self.q, self.beta_j, self.vector)


def _check_positive(beta_j, name="beta_J"):
    arr = np.asarray(beta_j, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValidationError("{0} must be positive. Found {1}"
                              .format(name, beta_j))
    return arr


def ising_fixed_point(beta_j):
    '''
    Fixed point of the Ising edge mapping,
    ``[e^J cosh J, e^-J sinh J] / (1 + sinh 2J)``.

    Evaluated through ``t = e^(-2J)`` so that large couplings do not
    overflow.
    '''

    beta_j = float(_check_positive(beta_j))

    t = np.exp(-2 * beta_j)
    denom = 2 * t + 1 - t ** 2
    vector = np.array([(1 + t) / denom, t * (1 - t) / denom])

    return FixedPoint(2, beta_j, vector)


def ising_fixed_point_at_criticality():
    '''
    The Ising fixed point at the critical coupling,
    ``[(2 + sqrt 2) / 4, (2 - sqrt 2) / 4]``.
    '''
    root2 = np.sqrt(2.)
    return FixedPoint(2, criticality(2, "ising"),
                      [(2 + root2) / 4., (2 - root2) / 4.])


def potts_fixed_point(beta_j, q):
    '''
    Fixed point of the Potts edge mapping.

    With ``x = e^J`` and ``D = x^2 - 2 (1 - q) x + 1 - q`` the entries are
    ``x (x - 1 + q) / D`` at 0 and ``(x - 1) / D`` elsewhere.
    '''

    beta_j = float(_check_positive(beta_j))
    q = int(q)
    if q < 2:
        raise ModeError("q must be at least 2. Found {}".format(q))

    x = np.exp(beta_j)
    xm1 = np.expm1(beta_j)
    denom = x ** 2 - 2 * (1 - q) * x + 1 - q

    vector = np.full(q, xm1 / denom)
    vector[0] = x * (xm1 + q) / denom

    return FixedPoint(q, beta_j, vector)


def potts_fixed_point_limit():
    '''
    Limit of the critical Potts fixed point ``pi*(0)`` as q grows.
    '''
    return 0.5


def ising_bounds(beta_j):
    '''
    Lower bounds on ``pi_p,e(0)`` and ``pi_d,e(0)`` for a ferromagnetic
    Ising model with nonnegative field.

    Returns
    -------
    primal_bound, dual_bound : float or `~numpy.ndarray`
        ``1 / (1 + e^(-2J))`` and ``(1 + e^(-2J)) / 2``.
    '''

    beta_j = _check_positive(beta_j, "beta_J_e")
    t = np.exp(-2 * beta_j)

    primal = 1. / (1. + t)
    dual = (1. + t) / 2.

    if primal.ndim == 0:
        return float(primal), float(dual)
    return primal, dual


def uncertainty_product(pi_p0, pi_d0):
    '''
    Slack of ``pi_p,e(0) * pi_d,e(0) >= 1/2``. Nonnegative when the product
    bound holds.
    '''
    slack = np.asarray(pi_p0, dtype=float) * np.asarray(pi_d0, dtype=float) \
        - 0.5
    if slack.ndim == 0:
        return float(slack)
    return slack


def bounds_slack(pi_p0, pi_d0, beta_j):
    '''
    Slacks of the primal bound, the dual bound and the product bound for
    measured marginals. All three are nonnegative for ferromagnetic models
    with nonnegative fields.
    '''
    primal, dual = ising_bounds(beta_j)
    return (np.asarray(pi_p0) - primal, np.asarray(pi_d0) - dual,
            uncertainty_product(pi_p0, pi_d0))


def criticality(q=2, model="ising"):
    '''
    Critical coupling of the 2D square lattice.

    ``ln(1 + sqrt 2) / 2`` for the Ising model (q=2) and ``ln(1 + sqrt q)``
    for the q-state Potts model. The Potts value at q=2 is twice the Ising
    value since the Potts edge factor is ``[e^J, 1]`` rather than
    ``[e^J, e^-J]``.
    '''

    q = int(q)
    if q < 2:
        raise ModeError("q must be at least 2. Found {}".format(q))

    if model == "ising":
        if q != 2:
            raise ModeError("The Ising model requires q=2. Found q={}"
                            .format(q))
        return float(np.log1p(np.sqrt(2.)) / 2.)
    elif model == "potts":
        return float(np.log1p(np.sqrt(q)))
    else:
        raise ValidationError("model must be 'ising' or 'potts'. Found {}"
                              .format(model))
