"""Extended cubic B-spline collocation solver for the KdV-Burgers equation.

``u_t + eps*u*u_x - theta*u_xx + mu*u_xxx = 0`` is rewritten as a first/second
order system in ``(u, v = u_x)``, collocated at the nodes of a uniform grid
with the one-parameter extended cubic B-spline basis, and marched with a
linearised Crank-Nicolson scheme.
"""

from .basis import BasisConfig, NodalTable, eval_basis, eval_basis_deriv, nodal_table
from .boundary import BoundaryClosure, EndRelation, neumann_closure, well_posed_neumann_closure
from .diagnostics import ConservedQuantities, Peak, conserved_quantities, find_peaks, linf_error
from .discretization import Grid, SolutionState, eval_at, fit_initial, nodal_values
from .linalg import BandedMatrix, SingularMatrixError, band_solve
from .scenarios import Scenario, Simulation, make_example1, make_example2, make_scenario, simulate
from .stepper import PhysicalParams, SolverError, advance, build_system, step

__all__ = [
    "BandedMatrix", "BasisConfig", "BoundaryClosure", "ConservedQuantities", "EndRelation",
    "Grid", "NodalTable", "Peak", "PhysicalParams", "Scenario", "Simulation", "SingularMatrixError",
    "SolutionState", "SolverError", "advance", "band_solve", "build_system", "conserved_quantities",
    "eval_at", "eval_basis", "eval_basis_deriv", "find_peaks", "fit_initial", "linf_error",
    "make_example1", "make_example2", "make_scenario", "neumann_closure", "nodal_table",
    "nodal_values", "simulate", "step", "well_posed_neumann_closure",
]

__version__ = "0.1.0"
