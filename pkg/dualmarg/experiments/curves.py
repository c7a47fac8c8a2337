# Licensed under an MIT open source license - see LICENSE

import numpy as np
from astropy.table import Table

from ..exceptions import ValidationError
from ..duality.fixed_points import (ising_fixed_point, potts_fixed_point,
                                    ising_bounds, criticality,
                                    ising_fixed_point_at_criticality)


__all__ = ['emit_curves', 'curve_kinds', 'make_grid']


curve_kinds = ("fixedpoint-ising", "fixedpoint-potts", "bounds")


def make_grid(start, stop, step):
    '''
    Inclusive, evenly spaced grid from ``start`` to ``stop``.
    '''
    if not step > 0 or stop < start:
        raise ValidationError("Need step > 0 and stop >= start.")
    num = int(round((stop - start) / step)) + 1
    return np.linspace(start, stop, num)


def emit_curves(kind, grid, q=None):
    '''
    Closed-form curves as a function of the coupling.

    The closed forms need a positive coupling, so nonpositive grid values
    are skipped. The critical point is appended as a row whose ``marker``
    column reads ``"criticality"``; curve rows have an empty marker.

    Parameters
    ----------
    kind : {"fixedpoint-ising", "fixedpoint-potts", "bounds"}
        ``fixedpoint-ising`` gives columns ``pi0, pi1``,
        ``fixedpoint-potts`` gives ``pi0, pi_t`` and ``bounds`` gives
        ``primal_bound, dual_bound``.
    grid : array-like
        Strictly increasing coupling values.
    q : int, optional
        Alphabet order for ``fixedpoint-potts``.

    Returns
    -------
    table : `~astropy.table.Table`
    '''

    if kind not in curve_kinds:
        raise ValidationError("kind must be one of {0}. Found {1}"
                              .format(curve_kinds, kind))

    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValidationError("The grid must be nonempty and strictly "
                              "increasing.")
    grid = grid[grid > 0]

    if kind == "fixedpoint-ising":
        names = ("beta_j", "pi0", "pi1", "marker")
        rows = [(b,) + tuple(ising_fixed_point(b).vector) + ("",)
                for b in grid]
        crit = ising_fixed_point_at_criticality()
        rows.append((crit.beta_j,) + tuple(crit.vector) + ("criticality",))

    elif kind == "fixedpoint-potts":
        if q is None:
            raise ValidationError("fixedpoint-potts needs q.")
        names = ("beta_j", "pi0", "pi_t", "marker")
        rows = []
        for b in grid:
            vec = potts_fixed_point(b, q).vector
            rows.append((b, vec[0], vec[1], ""))
        b_c = criticality(q, "potts")
        vec = potts_fixed_point(b_c, q).vector
        rows.append((b_c, vec[0], vec[1], "criticality"))

    else:
        names = ("beta_j", "primal_bound", "dual_bound", "marker")
        rows = [(b,) + ising_bounds(b) + ("",) for b in grid]
        b_c = criticality(2, "ising")
        rows.append((b_c,) + ising_bounds(b_c) + ("criticality",))

    return Table(rows=rows, names=names,
                 dtype=(float, float, float, 'U11'))
