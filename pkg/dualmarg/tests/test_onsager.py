# Licensed under an MIT open source license - see LICENSE

import pytest

import numpy as np
import numpy.testing as npt
from scipy import special

from ..duality import (onsager_internal_energy, onsager_free_energy,
                       onsager_kappa, criticality)
from ..exceptions import (AlternatePrefactorWarning, ValidationError,
                          QuadratureError)


def test_kappa_one_at_criticality():
    npt.assert_allclose(onsager_kappa(criticality()), 1., atol=1e-12)


def test_internal_energy_at_criticality():
    npt.assert_allclose(onsager_internal_energy(criticality()), -np.sqrt(2),
                        atol=1e-12)


def test_internal_energy_strong_coupling():
    npt.assert_allclose(onsager_internal_energy(5.), -2., atol=1e-6)


def test_internal_energy_weak_coupling():
    # High-temperature series: U ~ -2 tanh(J) to leading order.
    npt.assert_allclose(onsager_internal_energy(1e-3), -2e-3, rtol=1e-3)


@pytest.mark.parametrize('beta_j', [0.2, 0.35, 0.6, 1.])
def test_internal_energy_against_ellipk(beta_j):
    kappa = onsager_kappa(beta_j)
    coth = 1. / np.tanh(2 * beta_j)
    expected = -coth * (1 + (2 / np.pi) * (2 * np.tanh(2 * beta_j) ** 2 - 1) *
                        special.ellipk(kappa ** 2))
    npt.assert_allclose(onsager_internal_energy(beta_j), expected, rtol=1e-8)


@pytest.mark.parametrize('beta_j', [0.25, 0.7])
def test_free_energy_derivative(beta_j):
    step = 1e-4
    deriv = (onsager_free_energy(beta_j + step) -
             onsager_free_energy(beta_j - step)) / (2 * step)
    npt.assert_allclose(-deriv, onsager_internal_energy(beta_j), rtol=1e-6)


def test_free_energy_zero_coupling():
    npt.assert_allclose(onsager_free_energy(0.), np.log(2.), atol=1e-12)


def test_alternate_prefactor():
    with pytest.warns(AlternatePrefactorWarning):
        value = onsager_internal_energy(8., prefactor="alternate")
    npt.assert_allclose(value, -1.25, atol=1e-6)


def test_invalid_inputs():
    with pytest.raises(ValidationError):
        onsager_internal_energy(0.)
    with pytest.raises(ValidationError):
        onsager_internal_energy(0.5, prefactor="other")
    with pytest.raises(ValidationError):
        onsager_free_energy(-1.)


def test_quadrature_failure():
    # Close to criticality the integrand is sharply peaked.
    beta_j = 0.43
    with pytest.raises(QuadratureError) as err:
        onsager_internal_energy(beta_j, epsabs=1e-15, epsrel=1e-15, limit=1)
    assert "abserr" in err.value.diagnostics
