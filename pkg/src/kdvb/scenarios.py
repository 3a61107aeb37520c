"""The two test problems: a KdV-Burgers travelling wave and a splitting pulse."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .basis import BasisConfig, NodalTable, nodal_table
from .boundary import BoundaryClosure, exact_neumann_closure, well_posed_neumann_closure
from .discretization import Grid, SolutionState, fit_initial
from .linalg import SingularMatrixError
from .stepper import PhysicalParams, SolverError, advance

SCENARIOS = ("example1", "example2")


ClosureFactory = Callable[[NodalTable, PhysicalParams], BoundaryClosure]


def _default_closure(table: NodalTable, params: PhysicalParams) -> BoundaryClosure:
    return well_posed_neumann_closure(params.mu)


@dataclass(frozen=True)
class Scenario:
    """Everything needed to set up and march one experiment.

    ``closure`` builds the end treatment once the basis (and hence the nodal
    table) is known; it defaults to homogeneous Neumann conditions. With
    ``fit_with_closure`` the initial fit uses the closure's end relations
    instead of the default ``U_xx = V_x = 0`` rows.
    """

    name: str
    interval: tuple[float, float]
    initial: Callable
    initial_derivative: Callable
    params: PhysicalParams
    grid_cells: int
    record_times: tuple[float, ...]
    exact: Optional[Callable] = None
    threshold: float = 0.5
    closure: ClosureFactory = _default_closure
    fit_with_closure: bool = False
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.record_times:
            raise ValueError("a scenario needs at least one record time")

    @property
    def stop_time(self) -> float:
        return self.record_times[-1]

    @property
    def grid(self) -> Grid:
        return Grid(self.interval[0], self.interval[1], self.grid_cells)

    def make_closure(self, table: NodalTable) -> BoundaryClosure:
        return self.closure(table, self.params)


def _wave_constants(theta, mu):
    if mu == 0:
        raise ValueError("mu must be non-zero")
    amp = 6.0 * theta**2 / (25.0 * mu)
    return amp, theta / (10.0 * mu)


def exact_traveling_wave(x, t, theta: float, mu: float):
    """Travelling-wave solution of the KdV-Burgers equation with ``eps = 1``.

    ``u = -A [1 + tanh(xi) - sech(xi)^2 / 2] = -(A/2) (1 + tanh(xi))^2`` with
    ``A = 6 theta^2/(25 mu)`` and ``xi = theta/(10 mu) * (x + A t)``. The
    front moves left at speed ``A`` and ``u`` ranges over ``(-2A, 0)``.
    """
    amp, k = _wave_constants(theta, mu)
    xi = k * (np.asarray(x, dtype=float) + amp * t)
    return -0.5 * amp * (1.0 + np.tanh(xi)) ** 2


def exact_traveling_wave_dx(x, t, theta: float, mu: float):
    amp, k = _wave_constants(theta, mu)
    xi = k * (np.asarray(x, dtype=float) + amp * t)
    th = np.tanh(xi)
    return -amp * k * (1.0 + th) * (1.0 - th * th)


def exact_traveling_wave_dxx(x, t, theta: float, mu: float):
    amp, k = _wave_constants(theta, mu)
    xi = k * (np.asarray(x, dtype=float) + amp * t)
    th = np.tanh(xi)
    sech2 = 1.0 - th * th
    return -amp * k * k * sech2 * (sech2 - 2.0 * th * (1.0 + th))


def pulse_initial(x):
    """Broad even pulse ``(1 - tanh((|x| - 25)/5)) / 2``."""
    return 0.5 * (1.0 - np.tanh((np.abs(np.asarray(x, dtype=float)) - 25.0) / 5.0))


def pulse_initial_dx(x):
    # one-sided slopes at 0 are +-sech(-5)^2/10 ~ 1.8e-5; the even extension takes 0
    x = np.asarray(x, dtype=float)
    sech2 = 1.0 / np.cosh((np.abs(x) - 25.0) / 5.0) ** 2
    return -np.sign(x) * 0.1 * sech2


def _records(candidates, stop_time: float) -> tuple[float, ...]:
    if stop_time < 0:
        raise ValueError(f"stop_time must be non-negative, got {stop_time}")
    if stop_time == 0:
        return (0.0,)
    return tuple(float(t) for t in candidates if t < stop_time) + (float(stop_time),)


def make_example1(theta: float = 0.004, stop_time: float = 1.0, h: float = 0.5, dt: float = 0.001) -> Scenario:
    """Travelling wave on ``[-20, 20]`` with ``eps = 1`` and ``mu = 0.01``.

    The ends carry the exact solution's Neumann data (``u_x`` and ``u_xx``),
    since the wave's tails are not flat at ``x = +-20``. Use
    ``stop_time=10`` for the longer run.
    """
    mu = 0.01
    a, b = -20.0, 20.0
    grid = Grid.from_spacing(a, b, h)

    def closure(table, params):
        return exact_neumann_closure(
            table,
            lambda x, t: exact_traveling_wave_dx(x, t, theta, mu),
            lambda x, t: exact_traveling_wave_dxx(x, t, theta, mu),
            a, b, params.mu,
        )

    return Scenario(
        name="example1",
        interval=(a, b),
        initial=lambda x: exact_traveling_wave(x, 0.0, theta, mu),
        initial_derivative=lambda x: exact_traveling_wave_dx(x, 0.0, theta, mu),
        exact=lambda x, t: exact_traveling_wave(x, t, theta, mu),
        params=PhysicalParams(epsilon=1.0, theta=theta, mu=mu, dt=dt),
        grid_cells=grid.n_cells,
        record_times=_records((0.0,), stop_time),
        closure=closure,
        fit_with_closure=True,
    )


def make_example2(stop_time: float = 800.0, h: float = 0.4, dt: float = 0.05, theta: float = 0.0) -> Scenario:
    """Pulse splitting into a soliton train on ``[-50, 150]``.

    The default ``theta = 0`` is the pure KdV equation.
    """
    grid = Grid.from_spacing(-50.0, 150.0, h)
    return Scenario(
        name="example2",
        interval=(-50.0, 150.0),
        initial=pulse_initial,
        initial_derivative=pulse_initial_dx,
        params=PhysicalParams(epsilon=0.2, theta=theta, mu=0.1, dt=dt),
        grid_cells=grid.n_cells,
        record_times=_records((0.0, 100.0, 200.0, 400.0, 600.0, 800.0), stop_time),
        threshold=0.5,
    )


def make_scenario(name: str, **kwargs) -> Scenario:
    if name == "example1":
        return make_example1(**kwargs)
    if name == "example2":
        return make_example2(**kwargs)
    raise ValueError(f"unknown scenario {name!r}; expected one of {SCENARIOS}")


class Simulation(NamedTuple):
    grid: Grid
    basis: BasisConfig
    table: NodalTable
    snapshots: list[tuple[float, SolutionState]]


def simulate(scenario: Scenario, lam: float, record_times=None) -> Simulation:
    """Fit the initial data with extension parameter ``lam`` and march.

    Parameters
    ----------
    scenario : Scenario
    lam : float
        Extension parameter of the basis.
    record_times : sequence of float, optional
        Snapshot times; defaults to ``scenario.record_times``.

    Raises
    ------
    SolverError
        If the initial fit (``step_index = 0``) or a step meets a singular
        system.
    """
    grid = scenario.grid
    cfg = BasisConfig(lam=lam, h=grid.h)
    table = nodal_table(cfg)
    closure = scenario.make_closure(table)
    try:
        state = fit_initial(
            grid, cfg, scenario.initial, scenario.initial_derivative,
            closure=closure if scenario.fit_with_closure else None,
        )
    except SingularMatrixError as exc:
        raise SolverError(f"singular initial fit: {exc}", step_index=0) from exc
    times = scenario.record_times if record_times is None else tuple(record_times)
    snaps = advance(scenario.params, table, state, times, closure=closure)
    return Simulation(grid, cfg, table, snaps)
