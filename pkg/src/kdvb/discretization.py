"""Uniform grid, spline solution state, nodal evaluation and initial fitting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .basis import BasisConfig, NodalTable, eval_basis, nodal_table
from .boundary import BoundaryClosure, EndRelation
from .linalg import BandedMatrix, band_solve


@dataclass(frozen=True)
class Grid:
    """Uniform partition ``a = x_0 < ... < x_N = b``."""

    a: float
    b: float
    n_cells: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got a={self.a}, b={self.b}")
        if int(self.n_cells) != self.n_cells or self.n_cells < 4:
            raise ValueError(f"n_cells must be an integer >= 4, got {self.n_cells!r}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n_cells + 1)

    @classmethod
    def from_spacing(cls, a: float, b: float, h: float, rtol: float = 1e-9) -> Grid:
        """Build a grid from a spacing that must divide ``b - a`` evenly."""
        ratio = (b - a) / h
        n = int(round(ratio))
        if n < 1 or abs(ratio - n) > rtol * max(1.0, ratio):
            raise ValueError(f"h={h} does not divide [{a}, {b}] into a whole number of cells")
        return cls(a, b, n)


@dataclass
class SolutionState:
    """Spline coefficients of ``U`` (``delta``) and ``V = U_x`` (``phi``).

    Both vectors hold indices ``-1 .. N+1``, so position ``k`` in the array is
    coefficient ``k - 1``.
    """

    delta: np.ndarray
    phi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.delta = np.asarray(self.delta, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        if self.delta.ndim != 1 or self.delta.shape != self.phi.shape:
            raise ValueError("delta and phi must be 1-D vectors of equal length")
        if self.t < 0:
            raise ValueError(f"time must be non-negative, got {self.t}")

    @property
    def n_cells(self) -> int:
        return self.delta.size - 3


class NodalValues(NamedTuple):
    U: np.ndarray
    Ux: np.ndarray
    Uxx: np.ndarray
    V: np.ndarray
    Vx: np.ndarray
    Vxx: np.ndarray


def _three_point(c, w_side, w_mid):
    return w_side * c[:-2] + w_mid * c[1:-1] + w_side * c[2:]


def nodal_values(state: SolutionState, table: NodalTable, grid: Grid | None = None) -> NodalValues:
    """Values and first two derivatives of ``U`` and ``V`` at every node."""
    if grid is not None and state.delta.size != grid.n_cells + 3:
        raise ValueError(f"state has {state.delta.size} coefficients, grid needs {grid.n_cells + 3}")
    d, p = state.delta, state.phi
    b1 = table.beta1
    return NodalValues(
        U=_three_point(d, table.alpha1, table.alpha2),
        Ux=b1 * (d[:-2] - d[2:]),
        Uxx=_three_point(d, table.gamma1, table.gamma2),
        V=_three_point(p, table.alpha1, table.alpha2),
        Vx=b1 * (p[:-2] - p[2:]),
        Vxx=_three_point(p, table.gamma1, table.gamma2),
    )


def eval_at(state: SolutionState, cfg: BasisConfig, grid: Grid, x: float) -> tuple[float, float]:
    """``(U(x), V(x))`` at an arbitrary point of ``[a, b]``."""
    if not grid.a <= x <= grid.b:
        raise ValueError(f"x={x} lies outside [{grid.a}, {grid.b}]")
    if state.delta.size != grid.n_cells + 3:
        raise ValueError("state does not match grid")
    k = min(int(np.floor((x - grid.a) / grid.h)), grid.n_cells - 1)
    idx = np.arange(k - 1, k + 3)
    w = np.array([eval_basis(cfg, i, x, origin=grid.a) for i in idx])
    return float(w @ state.delta[idx + 1]), float(w @ state.phi[idx + 1])


def _fit_matrix(n_cells: int, table: NodalTable, left_row, right_row) -> BandedMatrix:
    # rows 0 and N+2 are end conditions; row i+1 interpolates at node i
    size = n_cells + 3
    reach = max(len(left_row), len(right_row)) - 1
    m = BandedMatrix.zeros(size, max(2, reach), max(2, reach))
    for c, v in enumerate(left_row):
        m[0, c] = v
    for c, v in enumerate(right_row):
        m[size - 1, size - 1 - c] = v
    for i in range(n_cells + 1):
        r = i + 1
        m[r, i] = table.alpha1
        m[r, i + 1] = table.alpha2
        m[r, i + 2] = table.alpha1
    return m


def _closure_row(rel: EndRelation) -> tuple[tuple[float, ...], float]:
    # c_phantom - sum_k w_k c_k = s(0), written outward-in
    return (1.0,) + tuple(-w for w in rel.weights), rel.offset(0.0)


def fit_initial(
    grid: Grid,
    cfg: BasisConfig,
    f: Callable[[np.ndarray], np.ndarray],
    f_prime: Callable[[np.ndarray], np.ndarray],
    closure: Optional[BoundaryClosure] = None,
) -> SolutionState:
    """Spline coefficients that interpolate ``f`` and ``f_prime`` at the nodes.

    By default ``delta`` interpolates ``f`` with ``U_xx = 0`` at both ends and
    ``phi`` interpolates ``f_prime`` with ``V_x = 0`` at both ends.

    Parameters
    ----------
    grid : Grid
    cfg : BasisConfig
    f, f_prime : callable
        Initial profile and its derivative, vectorised over node arrays.
    closure : BoundaryClosure, optional
        If given, its four relations at ``t = 0`` replace the default end
        rows, so the fitted state already satisfies the boundary conditions
        the stepper will impose. Interpolation at the nodes is unaffected.

    Raises
    ------
    SingularMatrixError
        If the fit system is singular (only for degenerate ``lam``).
    """
    table = nodal_table(cfg)
    x = grid.nodes
    fx = np.asarray(f(x), dtype=float) * np.ones_like(x)
    fpx = np.asarray(f_prime(x), dtype=float) * np.ones_like(x)

    if closure is None:
        d_rows = ((table.gamma1, table.gamma2, table.gamma1), 0.0), ((table.gamma1, table.gamma2, table.gamma1), 0.0)
        p_rows = ((table.beta1, 0.0, -table.beta1), 0.0), ((-table.beta1, 0.0, table.beta1), 0.0)
    else:
        d_rows = _closure_row(closure.left_delta), _closure_row(closure.right_delta)
        p_rows = _closure_row(closure.left_phi), _closure_row(closure.right_phi)

    coeffs = []
    for (left, lo), (right, ro), values in ((*d_rows, fx), (*p_rows, fpx)):
        m = _fit_matrix(grid.n_cells, table, left, right)
        coeffs.append(band_solve(m, np.concatenate(([lo], values, [ro]))))
    return SolutionState(coeffs[0], coeffs[1], 0.0)
