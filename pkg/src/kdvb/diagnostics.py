"""Error norms, conserved quantities and peak detection on nodal values."""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .basis import NodalTable
from .discretization import Grid, SolutionState, nodal_values
from .stepper import PhysicalParams


class ConservedQuantities(NamedTuple):
    c1: float
    c2: float
    c3: float
    c4: float


class Peak(NamedTuple):
    position: float
    height: float


def linf_error(state: SolutionState, table: NodalTable, grid: Grid, exact: Callable, t: float) -> float:
    """Largest nodal deviation of ``U`` from ``exact(x, t)``."""
    u = nodal_values(state, table, grid).U
    return float(np.max(np.abs(exact(grid.nodes, t) - u)))


def _trapezoid(f, h):
    return float(h * (0.5 * f[0] + f[1:-1].sum() + 0.5 * f[-1]))


def conserved_quantities(state: SolutionState, table: NodalTable, grid: Grid, params: PhysicalParams) -> ConservedQuantities:
    """The four lowest KdV invariants by composite trapezoid over the nodes.

    Derivatives in the integrands come from the spline nodal formulas of
    ``U``, not from differences of nodal values.
    """
    if params.epsilon == 0:
        raise ValueError("epsilon must be non-zero for C3 and C4")
    nv = nodal_values(state, table, grid)
    u, ux, uxx = nv.U, nv.Ux, nv.Uxx
    r = params.mu / params.epsilon
    h = grid.h
    return ConservedQuantities(
        c1=_trapezoid(u, h),
        c2=_trapezoid(u**2, h),
        c3=_trapezoid(u**3 - 3.0 * r * ux**2, h),
        c4=_trapezoid(u**4 - 12.0 * r * u * ux**2 + 7.2 * r**2 * uxx**2, h),
    )


def find_peaks(state: SolutionState, table: NodalTable, grid: Grid, threshold: float = 0.5) -> list[Peak]:
    """Strict maxima of the nodal ``U`` over five-node windows, rightmost first.

    A node counts only if it exceeds each of its four neighbours by more
    than a few rounding units, so flat plateaus report nothing, and its
    height is at least ``threshold``. The two nodes at each end are never
    reported.
    """
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    u = nodal_values(state, table, grid).U
    x = grid.nodes
    tol = 64.0 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(u))))
    centre = u[2:-2]
    is_peak = centre >= threshold
    for off in (-2, -1, 1, 2):
        is_peak &= centre > u[2 + off: u.size - 2 + off] + tol
    idx = np.flatnonzero(is_peak) + 2
    return [Peak(float(x[i]), float(u[i])) for i in idx[::-1]]
