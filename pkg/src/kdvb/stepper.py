"""Crank-Nicolson collocation stepper for the order-reduced KdV-Burgers system.

With ``v = u_x`` the equation ``u_t + eps*u*u_x - theta*u_xx + mu*u_xxx = 0``
becomes the pair

    u_t + eps*u*v - theta*v_x + mu*v_xx = 0
    u_x - v = 0

Both are averaged between time levels and collocated at every node. The
product ``(UV)^{n+1}`` is linearised as ``U^{n+1} V^n + U^n V^{n+1} - U^n V^n``
so each step is one linear solve.

Unknowns of the linear system are interleaved as
``(delta_0, phi_0, delta_1, phi_1, ..., delta_N, phi_N)``; the phantom
coefficients ``delta_{-1}, phi_{-1}, delta_{N+1}, phi_{N+1}`` are eliminated
with a :class:`~kdvb.boundary.BoundaryClosure`.
Row ``2m`` is the evolution equation at node ``m`` and row ``2m+1`` the
constraint ``U_x = V``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .basis import NodalTable
from .boundary import BoundaryClosure, well_posed_neumann_closure
from .discretization import SolutionState
from .linalg import BandedMatrix, SingularMatrixError, band_solve

logger = logging.getLogger(__name__)

# Each collocation row touches the six unknowns of nodes m-1, m, m+1, which in
# the interleaved ordering sit at offsets -3..+3 from the row index.
BANDWIDTH = 3


@dataclass(frozen=True)
class PhysicalParams:
    """PDE coefficients and time step.

    ``theta = 0`` is allowed and gives the KdV equation.
    """

    epsilon: float
    theta: float
    mu: float
    dt: float

    def __post_init__(self):
        if self.mu == 0:
            raise ValueError("mu must be non-zero")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.theta < 0:
            raise ValueError(f"theta must be non-negative, got {self.theta}")


@dataclass(frozen=True)
class StepCoefficients:
    """Row coefficients at one node for one step.

    ``nu1 .. nu5`` multiply unknowns of the evolution row, ``nu6 .. nu10`` the
    known level-``n`` coefficients on its right side; ``nu11 .. nu13`` build
    the constraint row. ``K`` and ``L`` are ``U`` and ``V`` at the node at
    level ``n``.
    """

    nu1: float
    nu2: float
    nu3: float
    nu4: float
    nu5: float
    nu6: float
    nu7: float
    nu8: float
    nu9: float
    nu10: float
    nu11: float
    nu12: float
    nu13: float
    K: float
    L: float


class SolverError(RuntimeError):
    """A time step could not be completed."""

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index


def _nu(params: PhysicalParams, tb: NodalTable, K, L):
    eps, th, mu, r = params.epsilon, params.theta, params.mu, 2.0 / params.dt
    a1, a2, b1, g1, g2 = tb.alpha1, tb.alpha2, tb.beta1, tb.gamma1, tb.gamma2
    return dict(
        nu1=(r + eps * L) * a1,
        nu2=eps * K * a1 - th * b1 + mu * g1,
        nu3=(r + eps * L) * a2,
        nu4=eps * K * a2 + mu * g2,
        nu5=eps * K * a1 + th * b1 + mu * g1,
        nu6=r * a1,
        nu7=th * b1 - mu * g1,
        nu8=r * a2,
        nu9=-mu * g2,
        nu10=-th * b1 - mu * g1,
        nu11=b1,
        nu12=-a1,
        nu13=-a2,
    )


def _level_values(state: SolutionState, tb: NodalTable):
    d, p = state.delta, state.phi
    K = tb.alpha1 * (d[:-2] + d[2:]) + tb.alpha2 * d[1:-1]
    L = tb.alpha1 * (p[:-2] + p[2:]) + tb.alpha2 * p[1:-1]
    return K, L


def assemble_row(params: PhysicalParams, table: NodalTable, state: SolutionState, m: int) -> StepCoefficients:
    """Coefficients of the two collocation rows at node ``m``."""
    n = state.n_cells
    if not 0 <= m <= n:
        raise IndexError(f"node index {m} outside 0..{n}")
    K, L = _level_values(state, table)
    k, l = float(K[m]), float(L[m])
    return StepCoefficients(**_nu(params, table, k, l), K=k, L=l)


def _row_weights(params: PhysicalParams, tb: NodalTable, state: SolutionState):
    """Per-node weights on ``(d_{m-1}, p_{m-1}, d_m, p_m, d_{m+1}, p_{m+1})``.

    Returns four ``(N+1, 6)`` arrays: evolution row left/right sides and
    constraint row left/right sides.
    """
    K, L = _level_values(state, tb)
    nu = _nu(params, tb, K, L)
    ones = np.ones_like(K)

    pde_lhs = np.stack([nu["nu1"], nu["nu2"], nu["nu3"], nu["nu4"], nu["nu1"], nu["nu5"]], axis=1)
    pde_rhs = np.stack([nu["nu6"] * ones, nu["nu7"] * ones, nu["nu8"] * ones,
                        nu["nu9"] * ones, nu["nu6"] * ones, nu["nu10"] * ones], axis=1)
    # U_x - V at node m; the d_{m+1} and p_{m+1} weights are -nu11 and +nu12.
    con = np.array([nu["nu11"], nu["nu12"], 0.0, nu["nu13"], -nu["nu11"], nu["nu12"]])
    con_lhs = np.tile(con, (K.size, 1))
    con_rhs = -con_lhs
    return pde_lhs, pde_rhs, con_lhs, con_rhs


def _closure_or_default(closure: BoundaryClosure | None, params: PhysicalParams) -> BoundaryClosure:
    return well_posed_neumann_closure(params.mu) if closure is None else closure


def build_system(
    params: PhysicalParams,
    table: NodalTable,
    state: SolutionState,
    closure: BoundaryClosure | None = None,
) -> tuple[BandedMatrix, np.ndarray]:
    """Banded matrix and right side of the step from ``state``.

    The phantom coefficients of the new level are eliminated with
    ``closure`` (default :func:`well_posed_neumann_closure`); its sources are
    evaluated at ``state.t + dt``. The right side uses the full coefficient
    vectors of ``state``, phantoms included.
    """
    closure = _closure_or_default(closure, params)
    n = state.n_cells
    size = 2 * n + 2
    t_new = state.t + params.dt
    bw = max(BANDWIDTH, 2 * closure.reach - 1)
    pde_lhs, pde_rhs, con_lhs, con_rhs = _row_weights(params, table, state)

    d, p = state.delta, state.phi
    local = np.stack([d[:-2], p[:-2], d[1:-1], p[1:-1], d[2:], p[2:]], axis=1)
    rhs = np.empty(size)
    rhs[0::2] = np.sum(pde_rhs * local, axis=1)
    rhs[1::2] = np.sum(con_rhs * local, axis=1)

    m = np.arange(n + 1)[:, None]
    j = m + np.array([-1, -1, 0, 0, 1, 1])[None, :]
    cols = 2 * j + np.array([0, 1, 0, 1, 0, 1])[None, :]
    A = BandedMatrix.zeros(size, bw, bw)
    inside = (j >= 0) & (j <= n)
    for parity, w in ((0, pde_lhs), (1, con_lhs)):
        rows = 2 * m + parity + 0 * cols
        np.add.at(A.ab, (bw + rows[inside] - cols[inside], cols[inside]), w[inside])

        # phantom columns: node 0 positions 0/1, node N positions 4/5
        for node, pos, rel, right in (
            (0, 0, closure.left_delta, False),
            (0, 1, closure.left_phi, False),
            (n, 4, closure.right_delta, True),
            (n, 5, closure.right_phi, True),
        ):
            row = 2 * node + parity
            coef = w[node, pos]
            var = pos % 2
            for k, wk in enumerate(rel.weights):
                if wk == 0.0:
                    continue
                col = 2 * (n - k if right else k) + var
                A.ab[bw + row - col, col] += coef * wk
            rhs[row] -= coef * rel.offset(t_new)
    return A, rhs


def build_full_system(params: PhysicalParams, table: NodalTable, state: SolutionState):
    """Dense ``(2N+2) x (2N+6)`` matrices before the phantom coefficients are eliminated.

    Columns follow ``(delta_{-1}, phi_{-1}, ..., delta_{N+1}, phi_{N+1})``.
    """
    n = state.n_cells
    pde_lhs, pde_rhs, con_lhs, con_rhs = _row_weights(params, table, state)
    A = np.zeros((2 * n + 2, 2 * n + 6))
    B = np.zeros_like(A)
    for m in range(n + 1):
        A[2 * m, 2 * m: 2 * m + 6] = pde_lhs[m]
        A[2 * m + 1, 2 * m: 2 * m + 6] = con_lhs[m]
        B[2 * m, 2 * m: 2 * m + 6] = pde_rhs[m]
        B[2 * m + 1, 2 * m: 2 * m + 6] = con_rhs[m]
    return A, B


def step(
    params: PhysicalParams,
    table: NodalTable,
    state: SolutionState,
    closure: BoundaryClosure | None = None,
) -> SolutionState:
    """Advance ``state`` by one time step."""
    closure = _closure_or_default(closure, params)
    A, rhs = build_system(params, table, state, closure)
    x = band_solve(A, rhs)
    t_new = state.t + params.dt
    delta, phi = closure.complete(x[0::2], x[1::2], t_new)
    return SolutionState(delta, phi, t_new)


def step_counts(params: PhysicalParams, t0: float, record_times, rtol: float = 1e-9) -> list[int]:
    counts = []
    prev = None
    for t in record_times:
        if prev is not None and not t > prev:
            raise ValueError(f"record times must be strictly increasing; {t} follows {prev}")
        ratio = (t - t0) / params.dt
        k = int(round(ratio))
        if k < 0 or abs(ratio - k) > rtol * max(1.0, abs(ratio)):
            raise ValueError(f"record time {t} is not a whole number of steps of {params.dt} after t={t0}")
        counts.append(k)
        prev = t
    return counts


def advance(
    params: PhysicalParams,
    table: NodalTable,
    state: SolutionState,
    record_times,
    closure: BoundaryClosure | None = None,
) -> list[tuple[float, SolutionState]]:
    """March from ``state`` and return a snapshot at every requested time.

    Times are validated up front as whole multiples of ``dt`` after
    ``state.t``. Snapshot times are ``state.t + k*dt`` with the integer ``k``.

    Raises
    ------
    SolverError
        With ``step_index`` set, if any step meets a singular system.
    """
    closure = _closure_or_default(closure, params)
    t0 = state.t
    counts = step_counts(params, t0, list(record_times))
    out = []
    k = 0
    current = state
    for target, t_rec in zip(counts, record_times):
        while k < target:
            try:
                current = step(params, table, current, closure)
            except SingularMatrixError as exc:
                raise SolverError(f"singular system at step {k + 1}: {exc}", step_index=k + 1) from exc
            k += 1
            current.t = t0 + k * params.dt
        logger.debug("reached t=%g after %d steps", current.t, k)
        out.append((float(t_rec), current))
    return out
