# Licensed under an MIT open source license - see LICENSE

import pytest

import numpy as np
import numpy.testing as npt

from ..experiments import emit_curves, make_grid
from ..exceptions import ValidationError


def test_make_grid():
    grid = make_grid(0., 3., 0.01)
    assert grid.size == 301
    npt.assert_allclose(grid[[0, -1]], [0., 3.])
    with pytest.raises(ValidationError):
        make_grid(1., 0., 0.1)


def test_ising_curve():
    tab = emit_curves("fixedpoint-ising", make_grid(0., 3., 0.01))
    assert tab.colnames == ["beta_j", "pi0", "pi1", "marker"]
    # beta_J = 0 is skipped; the criticality row is appended.
    assert len(tab) == 301
    crit = tab[tab["marker"] == "criticality"]
    assert len(crit) == 1
    npt.assert_allclose(crit["beta_j"][0], 0.4407, atol=1e-4)
    npt.assert_allclose(crit["pi0"][0], 0.85355, atol=1e-5)
    npt.assert_allclose(tab["pi0"] + tab["pi1"], 1.)


def test_potts_curve():
    tab = emit_curves("fixedpoint-potts", [0.5, 1., 1.5], q=5)
    assert tab.colnames == ["beta_j", "pi0", "pi_t", "marker"]
    row = tab[tab["marker"] == "criticality"][0]
    npt.assert_allclose(row["beta_j"], np.log(1 + np.sqrt(5)))
    npt.assert_allclose(row["pi0"], 0.7236, atol=1e-4)
    npt.assert_allclose(tab["pi0"] + 4 * tab["pi_t"], 1.)

    with pytest.raises(ValidationError):
        emit_curves("fixedpoint-potts", [0.5, 1.])


def test_bounds_curve():
    tab = emit_curves("bounds", [0.2, 0.4, 0.8])
    assert tab.colnames == ["beta_j", "primal_bound", "dual_bound", "marker"]
    npt.assert_allclose(tab["primal_bound"] * tab["dual_bound"], 0.5)
    row = tab[tab["marker"] == "criticality"][0]
    npt.assert_allclose(row["primal_bound"], 1 / np.sqrt(2))
    npt.assert_allclose(row["dual_bound"], 1 / np.sqrt(2))


def test_curve_errors():
    with pytest.raises(ValidationError):
        emit_curves("magnetization", [0.5])
    with pytest.raises(ValidationError):
        emit_curves("bounds", [0.5, 0.4])
