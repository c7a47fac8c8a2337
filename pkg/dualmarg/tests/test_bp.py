# Licensed under an MIT open source license - see LICENSE

import pytest

import numpy as np
import numpy.testing as npt

from ..models import ModelParams, ising_factors, potts_factors, model_factors
from ..inference import (FactorGraph, BpReport, build_primal_fg,
                         build_dual_fg, run_bp, bp_edge_marginals,
                         bp_vertex_marginals, sum_factor_messages,
                         primal_exact, dual_exact)
from ..duality import ising_bounds, map_all_edges
from ..exceptions import DomainError, ValidationError, ConvergenceWarning
from ._testing_data import (triangle, grid3_open, grid3_periodic, random_tree,
                            random_ising, random_potts)


def test_factor_counts():
    params = ModelParams.homogeneous(grid3_periodic, 0.3, 0.1)
    factors = ising_factors(grid3_periodic, params)

    primal = build_primal_fg(grid3_periodic, factors)
    assert primal.n_variables == 9
    assert primal.unary_count == 9
    assert primal.pairwise_count == 18
    assert primal.sum_count == 0
    assert primal.factor_count == 27

    dual = build_dual_fg(grid3_periodic, factors.transform())
    assert dual.n_variables == 18
    assert dual.unary_count == 18
    assert dual.sum_count == 9
    assert all(len(scope) == 4 for scope in dual.sum_scopes)


def test_cycle_free():
    tree = random_tree(7, seed=0)
    params = random_ising(tree, seed=0, ferromagnetic=True)
    factors = ising_factors(tree, params)
    assert build_primal_fg(tree, factors).is_cycle_free
    assert build_dual_fg(tree, factors.transform()).is_cycle_free

    params = ModelParams.homogeneous(triangle, 0.3, 0.1)
    factors = ising_factors(triangle, params)
    assert not build_primal_fg(triangle, factors).is_cycle_free
    assert not build_dual_fg(triangle, factors.transform()).is_cycle_free


tree_cases = [(n, seed) for n in (2, 5, 9, 12) for seed in range(3)]


@pytest.mark.parametrize(('n', 'seed'), tree_cases)
def test_tree_exact_ising(n, seed):
    tree = random_tree(n, seed=seed)
    params = random_ising(tree, seed=seed, ferromagnetic=True)
    factors = ising_factors(tree, params)

    exact = primal_exact(tree, factors)
    report = run_bp(build_primal_fg(tree, factors), damping=0., tol=1e-13)
    assert report.converged
    npt.assert_allclose(bp_edge_marginals(report), exact.edge_marginals,
                        atol=1e-10)
    npt.assert_allclose(bp_vertex_marginals(report), exact.vertex_marginals,
                        atol=1e-10)

    dual_factors = factors.transform()
    dual = dual_exact(tree, dual_factors)
    report = run_bp(build_dual_fg(tree, dual_factors), damping=0.,
                    tol=1e-13)
    assert report.converged
    npt.assert_allclose(bp_edge_marginals(report, "dual"),
                        dual.edge_marginals, atol=1e-10)
    npt.assert_allclose(bp_vertex_marginals(report, "dual"),
                        dual.vertex_marginals, atol=1e-10)


@pytest.mark.parametrize('seed', range(3))
def test_tree_exact_potts(seed):
    tree = random_tree(6, seed=10 + seed)
    params = random_potts(tree, seed=seed, q=3)
    factors = potts_factors(tree, params)

    exact = primal_exact(tree, factors)
    report = run_bp(build_primal_fg(tree, factors), damping=0., tol=1e-13)
    npt.assert_allclose(report.edge_marginals, exact.edge_marginals,
                        atol=1e-10)

    dual_factors = factors.transform()
    dual = dual_exact(tree, dual_factors)
    report = run_bp(build_dual_fg(tree, dual_factors), damping=0.,
                    tol=1e-13)
    npt.assert_allclose(report.edge_marginals, dual.edge_marginals,
                        atol=1e-10)


def test_primal_tree_signed_couplings():
    tree = random_tree(7, seed=3)
    params = random_ising(tree, seed=3)
    factors = ising_factors(tree, params)
    report = run_bp(build_primal_fg(tree, factors), damping=0., tol=1e-13)
    npt.assert_allclose(report.edge_marginals,
                        primal_exact(tree, factors).edge_marginals,
                        atol=1e-10)


def test_loopy_weak_coupling_accuracy():
    params = ModelParams.homogeneous(grid3_periodic, 0.1, 0.1)
    factors = ising_factors(grid3_periodic, params)
    exact = primal_exact(grid3_periodic, factors)
    report = run_bp(build_primal_fg(grid3_periodic, factors))
    assert report.converged
    npt.assert_allclose(report.edge_marginals, exact.edge_marginals,
                        atol=5e-3)


def test_zero_field_primal_bound():
    '''
    Without a field the primal messages stay uniform, so BP returns the
    single-edge marginal.
    '''
    params = ModelParams.homogeneous(grid3_periodic, 0.6)
    report = run_bp(build_primal_fg(grid3_periodic,
                                    ising_factors(grid3_periodic, params)))
    npt.assert_allclose(report.edge_marginals[:, 0], ising_bounds(0.6)[0],
                        atol=1e-12)


@pytest.mark.parametrize(('d', 'q'), [(1, 2), (3, 2), (3, 3), (4, 5)])
def test_sum_messages_dft_matches_direct(d, q):
    rng = np.random.default_rng(10 * d + q)
    incoming = rng.uniform(0.1, 1., (d, q))
    incoming /= incoming.sum(axis=1, keepdims=True)
    signs = rng.choice([-1, 1], size=d)
    table = rng.uniform(0., 2., q)

    dft = sum_factor_messages(incoming, signs, table, method="dft")
    direct = sum_factor_messages(incoming, signs, table, method="direct")
    npt.assert_allclose(dft, direct, atol=1e-12)

    with pytest.raises(ValidationError):
        sum_factor_messages(incoming, signs, table, method="fft")
    with pytest.raises(ValidationError):
        sum_factor_messages(incoming, 2 * signs, table)


def test_damping_same_fixed_point():
    tree = random_tree(8, seed=5)
    params = random_ising(tree, seed=5, ferromagnetic=True)
    fg = build_primal_fg(tree, ising_factors(tree, params))

    undamped = run_bp(fg, damping=0., tol=1e-13)
    damped = run_bp(fg, damping=0.5, tol=1e-13)
    assert damped.iterations > undamped.iterations
    npt.assert_allclose(damped.edge_marginals, undamped.edge_marginals,
                        atol=1e-10)


def test_damping_same_fixed_point_loopy():
    params = ModelParams.homogeneous(grid3_open, 0.2, 0.15)
    fg = build_primal_fg(grid3_open, ising_factors(grid3_open, params))

    tol = 1e-13
    undamped = run_bp(fg, damping=0., tol=tol)
    damped = run_bp(fg, damping=0.5, tol=tol)
    assert undamped.converged and damped.converged
    npt.assert_allclose(damped.edge_marginals, undamped.edge_marginals,
                        atol=100 * tol)
    npt.assert_allclose(damped.vertex_marginals, undamped.vertex_marginals,
                        atol=100 * tol)


@pytest.mark.parametrize('domain', ["primal", "dual"])
def test_messages_stay_normalized(domain):
    params = ModelParams.homogeneous(grid3_periodic, 0.2, 0.15)
    factors = ising_factors(grid3_periodic, params)
    if domain == "primal":
        fg = build_primal_fg(grid3_periodic, factors)
    else:
        fg = build_dual_fg(grid3_periodic, factors.transform())

    seen = []

    def check(iteration, messages):
        seen.append(iteration)
        assert np.all(messages >= 0)
        npt.assert_allclose(messages.sum(axis=1), 1., atol=1e-12)

    report = run_bp(fg, init="random", seed=2, callback=check)
    assert report.converged
    assert seen == list(range(1, report.iterations + 1))


def test_dual_bp_mapped_matches_oracle():
    params = ModelParams.homogeneous(grid3_periodic, 0.2, 0.15)
    factors = ising_factors(grid3_periodic, params)
    exact = primal_exact(grid3_periodic, factors).edge_marginals

    report = run_bp(build_dual_fg(grid3_periodic, factors.transform()))
    assert report.converged
    mapped = map_all_edges(bp_edge_marginals(report, "dual"), factors)
    npt.assert_allclose(mapped.sum(axis=1), 1.)
    assert np.all(mapped >= 0)
    npt.assert_allclose(mapped, exact, atol=0.05)



def test_random_init_same_fixed_point():
    tree = random_tree(8, seed=6)
    params = random_ising(tree, seed=6, ferromagnetic=True)
    fg = build_dual_fg(tree, ising_factors(tree, params).transform())

    uniform = run_bp(fg, damping=0., tol=1e-13)
    random = run_bp(fg, damping=0., tol=1e-13, init="random", seed=4)
    npt.assert_allclose(random.edge_marginals, uniform.edge_marginals,
                        atol=1e-10)

    with pytest.raises(ValidationError):
        run_bp(fg, init="ones")


def test_nonconvergence_warning():
    params = random_ising(grid3_periodic, seed=2, ferromagnetic=True)
    fg = build_primal_fg(grid3_periodic, ising_factors(grid3_periodic,
                                                       params))
    with pytest.warns(ConvergenceWarning):
        report = run_bp(fg, max_iter=1)
    assert not report.converged
    assert report.iterations == 1
    assert "did not converge" in report.summary()


def test_run_bp_argument_checks():
    params = ModelParams.homogeneous(triangle, 0.3, 0.1)
    fg = build_primal_fg(triangle, ising_factors(triangle, params))
    with pytest.raises(ValidationError):
        run_bp(fg, damping=1.)
    with pytest.raises(ValidationError):
        run_bp(fg, tol=0.)
    with pytest.raises(ValidationError):
        run_bp(fg, max_iter=0)


def test_dual_domain_errors():
    params = ModelParams.homogeneous(triangle, 0.3, -0.1)
    with pytest.raises(DomainError):
        build_dual_fg(triangle, ising_factors(triangle, params).transform())

    params = ModelParams.homogeneous(triangle, -0.3, 0.1)
    with pytest.raises(DomainError):
        build_dual_fg(triangle, model_factors(triangle, params))

    with pytest.raises(DomainError):
        FactorGraph(2, 1, unary_vars=[0], unary_tables=[[1., -1.]])


def test_factor_graph_validation():
    with pytest.raises(ValidationError):
        FactorGraph(2, 2, pair_vars=[[0, 2]], pair_tables=[[1., 1.]])
    with pytest.raises(ValidationError):
        FactorGraph(2, 2, sum_scopes=[(0, 1)], sum_signs=[(1,)],
                    sum_tables=[[1., 1.]])


def test_report_output(tmp_path):
    params = ModelParams.homogeneous(triangle, 0.3, 0.1)
    report = run_bp(build_primal_fg(triangle,
                                    ising_factors(triangle, params)))

    tab = report.to_table()
    assert tab.colnames == ["edge", "a", "belief"]
    assert len(tab) == 6

    with pytest.raises(ValidationError):
        bp_edge_marginals(report, "dual")

    output = str(tmp_path / "bp.pkl")
    report.save_results(output)
    loaded = BpReport.load_results(output)
    assert loaded.messages is None
    npt.assert_allclose(loaded.pair_beliefs, report.pair_beliefs)
