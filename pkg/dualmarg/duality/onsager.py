# Licensed under an MIT open source license - see LICENSE
'''
Closed-form reference values of the zero-field Ising model on the infinite
square lattice.
'''

import warnings

import numpy as np
from scipy import integrate

from ..exceptions import (ValidationError, QuadratureError,
                          AlternatePrefactorWarning)
from .fixed_points import criticality


__all__ = ['onsager_internal_energy', 'onsager_free_energy', 'onsager_kappa']


prefactors = {"standard": 2. / np.pi, "alternate": 1. / (2. * np.pi)}


def _sech(x):
    return 2. * np.exp(-x) / (1. + np.exp(-2. * x))


def onsager_kappa(beta_j):
    '''
    Elliptic modulus ``2 sinh 2J / cosh^2 2J``. Equal to 1 at criticality.
    '''
    return 2. * np.tanh(2. * beta_j) * _sech(2. * beta_j)


def _quad(func, epsabs, epsrel, limit):

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(func, 0., np.pi / 2., epsabs=epsabs,
                                       epsrel=epsrel, limit=limit)

    failures = [w for w in caught
                if issubclass(w.category, integrate.IntegrationWarning)]
    if len(failures) > 0:
        raise QuadratureError("Quadrature did not converge: {}"
                              .format(failures[0].message),
                              diagnostics={"value": value, "abserr": abserr,
                                           "epsabs": epsabs,
                                           "limit": limit})
    return value


def onsager_internal_energy(beta_j, prefactor="standard", epsabs=1e-9,
                           epsrel=1e-10, limit=200):
    '''
    Internal energy per site, in units of J.

    ``U = -coth 2J [1 - c (1 - kappa sinh 2J) K(kappa)]`` with ``K`` the
    complete elliptic integral of the first kind, evaluated by adaptive
    quadrature. At criticality ``kappa = 1``, the bracketed factor vanishes
    and ``-coth 2J_c = -sqrt 2`` is returned without touching the divergent
    integral.

    Parameters
    ----------
    beta_j : float
        Positive coupling.
    prefactor : {"standard", "alternate"}
        ``c = 2 / pi`` (standard) or ``c = 1 / (2 pi)``. The alternate variant
        does not reach -2 at strong coupling and emits
        `~dualmarg.exceptions.AlternatePrefactorWarning`.
    epsabs, epsrel, limit :
        Passed to `scipy.integrate.quad`.

    Raises
    ------
    QuadratureError
        When the integral does not converge.
    '''

    if prefactor not in prefactors:
        raise ValidationError("prefactor must be one of {0}. Found {1}"
                              .format(list(prefactors), prefactor))
    if prefactor == "alternate":
        warnings.warn("Using the 1/(2 pi) prefactor; the strong-coupling "
                      "limit does not recover -2.", AlternatePrefactorWarning)

    beta_j = float(beta_j)
    if not np.isfinite(beta_j) or beta_j <= 0:
        raise ValidationError("beta_J must be positive. Found {}"
                              .format(beta_j))

    coth = 1. / np.tanh(2. * beta_j)
    kappa = onsager_kappa(beta_j)

    if abs(kappa - 1.) < 1e-12 or \
            abs(beta_j - criticality(2, "ising")) < 1e-15:
        return -coth

    # kappa * sinh 2J
    ks = 2. * np.tanh(2. * beta_j) ** 2

    elliptic = _quad(lambda theta: 1. / np.sqrt(1. - (kappa *
                                                      np.sin(theta)) ** 2),
                     epsabs, epsrel, limit)

    return float(-coth * (1. - prefactors[prefactor] * (1. - ks) *
                          elliptic))


def onsager_free_energy(beta_j, epsabs=1e-12, epsrel=1e-12, limit=200):
    '''
    ``lim ln Z / N`` of the zero-field model,
    ``ln(sqrt 2 cosh 2J) + (1 / pi) int_0^(pi/2) ln(1 + sqrt(1 - kappa^2
    sin^2 theta)) d theta``. Its derivative with respect to ``beta_j`` is
    ``-onsager_internal_energy``.
    '''

    beta_j = float(beta_j)
    if not np.isfinite(beta_j) or beta_j < 0:
        raise ValidationError("beta_J must be nonnegative. Found {}"
                              .format(beta_j))

    # ln cosh 2J without overflow
    log_cosh = np.logaddexp(2. * beta_j, -2. * beta_j) - np.log(2.)

    kappa = onsager_kappa(beta_j)
    integral = _quad(lambda theta: np.log1p(np.sqrt(np.clip(
        1. - (kappa * np.sin(theta)) ** 2, 0., None))),
        epsabs, epsrel, limit)

    return float(0.5 * np.log(2.) + log_cosh + integral / np.pi)
