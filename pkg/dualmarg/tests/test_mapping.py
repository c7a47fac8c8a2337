# Licensed under an MIT open source license - see LICENSE

import warnings

import pytest

import numpy as np
import numpy.testing as npt

from ..models import ModelParams, ising_factors, potts_factors, random_factors
from ..inference import primal_exact, dual_exact
from ..duality import (mapping_matrix, ising_mapping_matrix,
                       map_edge_dual_to_primal, map_edge_primal_to_dual,
                       map_vertex, map_all_edges, map_all_vertices,
                       potts_map_reduced, potts_symmetry_residual)
from ..exceptions import (SingularMappingError, ValidationError,
                          SignedMarginalWarning)
from ._testing_data import (triangle, four_cycle, grid3_periodic,
                            random_ising, random_potts)


def exact_pair(graph, factors):
    primal = primal_exact(graph, factors)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SignedMarginalWarning)
        dual = dual_exact(graph, factors.transform())
    return primal, dual


instances = [((triangle, four_cycle, grid3_periodic)[seed % 3], seed)
             for seed in range(25)]


@pytest.mark.parametrize(('graph', 'seed'), instances)
def test_dual_to_primal_exact(graph, seed):
    params = random_ising(graph, seed=seed, coupling_range=(0.2, 1.),
                          field_range=(0.2, 1.))
    factors = ising_factors(graph, params)
    primal, dual = exact_pair(graph, factors)

    mapped = map_all_edges(dual.edge_marginals, factors,
                           direction="dual_to_primal")
    npt.assert_allclose(mapped, primal.edge_marginals, atol=1e-10)

    mapped_v = map_all_vertices(dual.vertex_marginals, factors,
                                direction="dual_to_primal")
    npt.assert_allclose(mapped_v, primal.vertex_marginals, atol=1e-10)


@pytest.mark.parametrize(('graph', 'seed'), instances)
def test_primal_to_dual_exact(graph, seed):
    params = random_ising(graph, seed=100 + seed, coupling_range=(0.2, 1.),
                          field_range=(0.2, 1.))
    factors = ising_factors(graph, params)
    primal, dual = exact_pair(graph, factors)

    mapped = map_all_edges(primal.edge_marginals, factors,
                           direction="primal_to_dual")
    npt.assert_allclose(mapped, dual.edge_marginals, atol=1e-10)


def test_single_edge_example():
    psi = [np.exp(0.5), np.exp(-0.5)]
    out = map_edge_dual_to_primal([1., 0.], psi)
    npt.assert_allclose(out, [0.7310586, 0.2689414], atol=1e-7)
    npt.assert_allclose(out.sum(), 1.)


@pytest.mark.parametrize('beta_j', [0.1, 0.5, -0.7, 2.])
def test_ising_closed_form(beta_j):
    psi = [np.exp(beta_j), np.exp(-beta_j)]
    for direction in ("dual_to_primal", "primal_to_dual"):
        npt.assert_allclose(ising_mapping_matrix(beta_j, direction).entries,
                            mapping_matrix(psi, direction=direction).entries,
                            rtol=1e-12)


@pytest.mark.parametrize('q', [2, 3, 5])
def test_column_sums_and_inverse(q):
    rng = np.random.default_rng(q)
    table = rng.uniform(0.2, 2., q)
    table = 0.5 * (table + table[(-np.arange(q)) % q])

    forward = mapping_matrix(table, direction="dual_to_primal")
    backward = mapping_matrix(table, direction="primal_to_dual")

    npt.assert_allclose(forward.entries.sum(axis=0), 1., atol=1e-12)
    npt.assert_allclose(backward.entries.sum(axis=0), 1., atol=1e-12)
    npt.assert_allclose(forward.entries @ backward.entries, np.eye(q),
                        atol=1e-12)
    npt.assert_allclose(forward.inverse().entries, backward.entries,
                        atol=1e-12)
    assert forward.inverse().direction == "primal_to_dual"


def test_round_trip():
    psi = [np.exp(0.8), np.exp(-0.8)]
    pi_p = np.array([0.7, 0.3])
    back = map_edge_dual_to_primal(map_edge_primal_to_dual(pi_p, psi), psi)
    npt.assert_allclose(back, pi_p, atol=1e-14)


def test_singular_mapping():
    with pytest.raises(SingularMappingError):
        ising_mapping_matrix(0.)
    with pytest.raises(SingularMappingError):
        map_edge_dual_to_primal([0.5, 0.5], [1., 1.])
    # A zero field gives a vanishing dual vertex factor.
    with pytest.raises(SingularMappingError):
        map_vertex([0.5, 0.5], [1., 1.])


def test_input_checks():
    psi = [np.exp(0.5), np.exp(-0.5)]
    with pytest.raises(ValidationError, match="sums to"):
        map_edge_dual_to_primal([0.5, 0.6], psi)
    with pytest.raises(ValidationError):
        map_edge_dual_to_primal([0.2, 0.3, 0.5], psi)
    with pytest.raises(ValidationError):
        map_edge_dual_to_primal([1., 0.], psi, method="fast")

    factors = ising_factors(triangle, ModelParams.homogeneous(triangle, 0.4))
    with pytest.raises(ValidationError):
        map_all_edges(np.full((2, 2), 0.5), factors)


def test_signed_input_allowed():
    psi = [np.exp(0.5), np.exp(-0.5)]
    out = map_edge_dual_to_primal([1.2, -0.2], psi)
    npt.assert_allclose(out.sum(), 1.)


@pytest.mark.parametrize('q', [3, 4])
def test_potts_reduced_matches_full(q):
    params = random_potts(triangle, seed=q, q=q)
    factors = potts_factors(triangle, params)
    primal, dual = exact_pair(triangle, factors)
    dual_tables = factors.transform()

    for e in range(triangle.edge_count):
        psi = factors.edge_tables[e]
        psi_dual = dual_tables.edge_tables[e]
        full = map_edge_dual_to_primal(dual.edge_marginals[e], psi,
                                       psi_dual, method="full")
        reduced = map_edge_dual_to_primal(dual.edge_marginals[e], psi,
                                          psi_dual, method="reduced")
        npt.assert_allclose(full, reduced, atol=1e-12)
        npt.assert_allclose(reduced, primal.edge_marginals[e], atol=1e-10)

        back = potts_map_reduced(primal.edge_marginals[e], psi, psi_dual,
                                 direction="primal_to_dual")
        npt.assert_allclose(back, dual.edge_marginals[e], atol=1e-10)

        assert potts_symmetry_residual(primal.edge_marginals[e], psi) < 1e-12

    npt.assert_allclose(map_all_edges(dual.edge_marginals, factors),
                        primal.edge_marginals, atol=1e-10)


def test_potts_reduced_rejects_asymmetric():
    psi = np.array([np.e, 1., 1.])
    psi_dual = np.array([np.e + 2, np.e - 1, np.e - 1])
    with pytest.raises(ValidationError):
        potts_map_reduced([0.5, 0.3, 0.2], psi, psi_dual)


def test_symmetric_q3_full_mapping():
    factors = random_factors(four_cycle, q=3, seed=17)
    primal, dual = exact_pair(four_cycle, factors)
    mapped = map_all_edges(dual.edge_marginals, factors, method="full")
    npt.assert_allclose(mapped, primal.edge_marginals, atol=1e-9)
