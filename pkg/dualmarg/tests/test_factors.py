# Licensed under an MIT open source license - see LICENSE

import pytest

import numpy as np
import numpy.testing as npt

from ..models import (ModelParams, FactorTable, FactorSet, Configuration,
                      dft_q, inverse_dft_q, dft_matrix, ising_factors,
                      potts_factors, random_factors, edge_differences,
                      dual_vertex_sums, hamiltonian,
                      interaction_energy_per_site)
from ..inference import primal_exact
from ..exceptions import (ModeError, UnsupportedFeatureError,
                          ValidationError, ComplexTableError)
from ._testing_data import (triangle, grid3_open, grid3_periodic,
                            random_ising)


def test_dft_q_binary_exact():
    out = dft_q([np.exp(0.5), np.exp(-0.5)])
    assert out.domain == "dual"
    npt.assert_allclose(out.values, [2 * np.cosh(0.5), 2 * np.sinh(0.5)],
                        rtol=1e-15)
    # The q=2 path is exact, not an FFT.
    assert out.values[0] == np.exp(0.5) + np.exp(-0.5)


def test_dft_q_potts_table():
    out = dft_q([np.e, 1., 1.])
    npt.assert_allclose(out.values, [np.e + 2, np.e - 1, np.e - 1])
    assert out.is_real


@pytest.mark.parametrize('q', [2, 3, 4, 5, 6, 7])
def test_dft_twice_reverses(q):
    rng = np.random.default_rng(q)
    reversal = (-np.arange(q)) % q
    for values in (rng.uniform(0.1, 2., q), rng.normal(size=q)):
        twice = dft_q(dft_q(values))
        assert twice.domain == "dual"
        assert twice.is_real
        npt.assert_allclose(twice.values, q * values[reversal], atol=1e-12)

        signed = FactorTable(values, domain="dual")
        npt.assert_allclose(dft_q(dft_q(signed)).values, q * values[reversal],
                            atol=1e-12)

        back = inverse_dft_q(dft_q(values))
        assert back.domain == "primal"
        npt.assert_allclose(back.values, values, atol=1e-12)
        npt.assert_allclose(dft_matrix(q) @ values, dft_q(values).values,
                            atol=1e-12)


def test_dft_q_binary_signed():
    out = dft_q([1., -3.])
    assert out.domain == "dual"
    npt.assert_array_equal(out.values, [-2., 4.])
    npt.assert_array_equal(dft_q(out).values, [2., -6.])
    npt.assert_array_equal(inverse_dft_q(out).values, [1., -3.])


def test_dft_asymmetric_stays_complex():
    out = dft_q([1., 2., 3.])
    assert not out.is_real


def test_factor_table_validation():
    with pytest.raises(ValidationError):
        FactorTable([1., -1.], domain="primal")
    # Dual tables may be signed.
    assert FactorTable([1., -1.], domain="dual").q == 2


def test_model_params_checks(tmp_path):
    with pytest.raises(ModeError):
        ModelParams([1.], [0., 0.], q=3, model="ising")
    with pytest.raises(ModeError):
        ModelParams([1.], [0., 0.], q=1, model="potts")

    params = ModelParams([1., 1., 1.], [0.1, 0.1, 0.1], q=3, model="potts")
    with pytest.raises(UnsupportedFeatureError):
        params.validate(triangle)

    params = ModelParams([1., 1.], [0., 0., 0.])
    with pytest.raises(ValidationError, match="couplings"):
        params.validate(triangle)

    params = ModelParams.homogeneous(triangle, 0.5, 0.3)
    assert params.is_ferromagnetic
    assert params.has_nonnegative_field
    with pytest.raises(ValueError):
        params.couplings[0] = 2.


def test_ising_factor_values():
    params = ModelParams.homogeneous(triangle, 0.5, 0.3)
    factors = ising_factors(triangle, params)
    npt.assert_allclose(factors.edge_tables[0], [np.exp(0.5), np.exp(-0.5)])
    npt.assert_allclose(factors.vertex_tables[0],
                        [np.exp(0.3), np.exp(-0.3)])

    dual = factors.transform()
    assert dual.domain == "dual"
    npt.assert_allclose(dual.edge_tables[0],
                        [2 * np.cosh(0.5), 2 * np.sinh(0.5)])
    npt.assert_allclose(dual.vertex_tables[0],
                        [2 * np.cosh(0.3), 2 * np.sinh(0.3)])

    # Inverse transform recovers the primal tables.
    npt.assert_allclose(dual.transform().edge_tables, factors.edge_tables)


@pytest.mark.parametrize('q', [3, 4, 10])
def test_potts_dual_nonnegative(q):
    params = ModelParams.homogeneous(triangle, 0.7, q=q, model="potts")
    dual = potts_factors(triangle, params).transform()
    assert dual.is_real
    assert not dual.has_negative_entries
    npt.assert_allclose(dual.edge_tables[0, 0], np.exp(0.7) + q - 1)
    npt.assert_allclose(dual.edge_tables[0, 1:], np.expm1(0.7))
    # All-ones vertex tables become q * delta.
    npt.assert_allclose(dual.vertex_tables[0],
                        np.r_[q, np.zeros(q - 1)], atol=1e-12)


@pytest.mark.parametrize('q', [3, 4, 10])
def test_potts_dual_signed_antiferromagnetic(q):
    params = ModelParams.homogeneous(triangle, -0.7, q=q, model="potts")
    dual = potts_factors(triangle, params).transform()
    assert dual.is_real
    assert dual.has_negative_entries
    npt.assert_allclose(dual.edge_tables[:, 1:], np.expm1(-0.7))
    assert np.all(dual.edge_tables[:, 1:] < 0)
    # Zero coupling sits on the boundary: nonnegative.
    params = ModelParams.homogeneous(triangle, 0., q=q, model="potts")
    assert not potts_factors(triangle, params).transform() \
        .has_negative_entries


def test_negative_field_dual_signed():
    params = ModelParams.homogeneous(triangle, 0.5, -0.3)
    dual = ising_factors(triangle, params).transform()
    assert dual.has_negative_entries


def test_asymmetric_transform_raises():
    edge = np.tile([1., 2., 3.], (3, 1))
    vertex = np.ones((3, 3))
    factors = FactorSet(edge, vertex)
    with pytest.raises(ComplexTableError):
        factors.transform()
    assert not factors.transform(allow_complex=True).is_real


def test_random_factors_symmetric():
    factors = random_factors(grid3_periodic, q=3, seed=4)
    assert factors.transform().is_real
    assert np.all(factors.edge_tables > 0)


def test_edge_differences_and_sums():
    x = np.array([0, 1, 1])
    npt.assert_array_equal(edge_differences(x, triangle, 2), [1, 0, 1])

    # Edges (0,1),(1,2),(2,0): vertex 0 has edge 2 entering and 0 leaving.
    y = np.array([1, 2, 0])
    npt.assert_array_equal(dual_vertex_sums(y, triangle, 3),
                           [(0 - 1) % 3, (1 - 2) % 3, (2 - 0) % 3])

    # Every primal configuration gives a dual-consistent edge vector.
    config = Configuration([2, 0, 1], q=3)
    npt.assert_array_equal(config.edge_differences(triangle), [2, 2, 2])

    with pytest.raises(ValidationError):
        Configuration([0, 3], q=3)
    with pytest.raises(ValidationError):
        Configuration([0, 1, 1], q=2, domain="dual").edge_differences(
            triangle)


def test_hamiltonian_ising():
    params = ModelParams.homogeneous(triangle, 0.5, 0.3)
    # All equal spins at 0: three satisfied edges, three aligned fields.
    assert hamiltonian([0, 0, 0], triangle, params) == pytest.approx(-2.4)
    # One flipped spin: one satisfied edge, fields sum to 0.3.
    assert hamiltonian([0, 0, 1], triangle, params) == pytest.approx(0.5 - 0.3)


def test_hamiltonian_potts():
    params = ModelParams.homogeneous(triangle, 0.7, q=3, model="potts")
    assert hamiltonian([1, 1, 1], triangle, params) == pytest.approx(-2.1)
    assert hamiltonian([0, 1, 2], triangle, params) == pytest.approx(0.)


def test_primal_weights_are_gibbs():
    '''
    Factor products reproduce exp(-beta H) on a 3x3 open grid.
    '''
    params = random_ising(grid3_open, seed=11)
    factors = ising_factors(grid3_open, params)

    rng = np.random.default_rng(0)
    configs = rng.integers(0, 2, size=(20, grid3_open.vertex_count))
    log_ratio = []
    for x in configs:
        y = edge_differences(x, grid3_open, 2)
        weight = np.prod(factors.edge_tables[np.arange(12), y]) * \
            np.prod(factors.vertex_tables[np.arange(9), x])
        log_ratio.append(np.log(weight) + hamiltonian(x, grid3_open, params))

    npt.assert_allclose(log_ratio, 0., atol=1e-12)

    # And the enumeration agrees on the normalizer.
    all_x = (np.arange(2 ** 9)[:, np.newaxis] // 2 ** np.arange(9)) % 2
    z = np.sum([np.exp(-hamiltonian(x, grid3_open, params)) for x in all_x])
    npt.assert_allclose(primal_exact(grid3_open, factors).partition_value, z,
                        rtol=1e-12)


def test_interaction_energy_per_site():
    npt.assert_allclose(interaction_energy_per_site(0.), -2.)
    npt.assert_allclose(interaction_energy_per_site(0.5), 0.)
