"""End closures: how the phantom coefficients at indices -1 and N+1 are eliminated.

Every closure expresses a phantom coefficient as a linear combination of the
coefficients nearest that end plus an optional time-dependent source::

    c_{-1}  = w_0 c_0 + w_1 c_1 + ... + s(t)
    c_{N+1} = w_0 c_N + w_1 c_{N-1} + ... + s(t)

so the weights are always counted inward from the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import NodalTable

# zero third difference of the coefficients: c_{-1} - 3 c_0 + 3 c_1 - c_2 = 0
_EXTRAPOLATE = (3.0, -3.0, 1.0)


@dataclass(frozen=True)
class EndRelation:
    weights: tuple[float, ...]
    source: Optional[Callable[[float], float]] = None

    def value(self, inward: np.ndarray, t: float) -> float:
        w = np.asarray(self.weights)
        v = float(w @ inward[: w.size])
        return v + (self.source(t) if self.source is not None else 0.0)

    def offset(self, t: float) -> float:
        return 0.0 if self.source is None else float(self.source(t))


@dataclass(frozen=True)
class BoundaryClosure:
    left_delta: EndRelation
    left_phi: EndRelation
    right_delta: EndRelation
    right_phi: EndRelation
    name: str = "custom"

    @property
    def reach(self) -> int:
        return max(len(r.weights) for r in (self.left_delta, self.left_phi, self.right_delta, self.right_phi))

    def complete(self, delta: np.ndarray, phi: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Append the phantom coefficients to interior vectors ``c_0 .. c_N``."""
        d = np.concatenate(([self.left_delta.value(delta, t)], delta, [self.right_delta.value(delta[::-1], t)]))
        p = np.concatenate(([self.left_phi.value(phi, t)], phi, [self.right_phi.value(phi[::-1], t)]))
        return d, p


_MIRROR = EndRelation((0.0, 1.0))


def neumann_closure() -> BoundaryClosure:
    """All four homogeneous relations ``U_x = V_x = 0`` at both ends.

    This fixes ``u_x`` and ``u_xx`` at both ends, one condition more than a
    third-order equation admits; with inconsistent data it feeds the
    grid-scale mode that the centred derivative cannot see.
    """
    return BoundaryClosure(_MIRROR, _MIRROR, _MIRROR, _MIRROR, name="neumann")


def well_posed_neumann_closure(mu: float) -> BoundaryClosure:
    """Three homogeneous conditions: ``V_x = 0`` at the inflow end, ``U_x = V_x = 0`` at the other.

    For ``mu > 0`` linear dispersive waves travel left, so the left end takes
    one condition and the right end two. Keeping ``V_x = u_xx = 0`` (rather
    than ``U_x = 0``) at the single-condition end keeps the mass flux
    ``mu*u_xx`` through it at zero. The unconstrained phantom ``delta`` there is
    closed by zero third difference, which imposes nothing physical.
    """
    free = EndRelation(_EXTRAPOLATE)
    if mu > 0:
        return BoundaryClosure(free, _MIRROR, _MIRROR, _MIRROR, name="neumann3")
    return BoundaryClosure(_MIRROR, _MIRROR, free, _MIRROR, name="neumann3")


def _slope_relation(table: NodalTable, slope: Callable[[float], float], right: bool) -> EndRelation:
    # U'_0 = beta1 (c_{-1} - c_1);  U'_N = beta1 (c_{N-1} - c_{N+1})
    b1 = table.beta1
    if right:
        return EndRelation((0.0, 1.0), lambda t: -slope(t) / b1)
    return EndRelation((0.0, 1.0), lambda t: slope(t) / b1)


def _value_relation(table: NodalTable, value: Callable[[float], float]) -> EndRelation:
    # U_0 = a1 c_{-1} + a2 c_0 + a1 c_1, same shape at the right end
    a1, a2 = table.alpha1, table.alpha2
    return EndRelation((-a2 / a1, -1.0), lambda t: value(t) / a1)


def exact_neumann_closure(table: NodalTable, u_x: Callable, u_xx: Callable, a: float, b: float, mu: float) -> BoundaryClosure:
    """Inhomogeneous Neumann data taken from a known solution.

    Same condition count as :func:`well_posed_neumann_closure`:
    ``u_xx(x, t)`` supplies ``V_x`` at both ends and ``u_x(x, t)`` supplies
    ``U_x`` at the end that takes two conditions.
    """
    left_d = _slope_relation(table, lambda t: u_x(a, t), right=False)
    right_d = _slope_relation(table, lambda t: u_x(b, t), right=True)
    left_p = _slope_relation(table, lambda t: u_xx(a, t), right=False)
    right_p = _slope_relation(table, lambda t: u_xx(b, t), right=True)
    free = EndRelation(_EXTRAPOLATE)
    if mu > 0:
        left_d = free
    else:
        right_d = free
    return BoundaryClosure(left_d, left_p, right_d, right_p, name="exact-neumann")


def exact_dirichlet_closure(table: NodalTable, u: Callable, u_x: Callable, a: float, b: float) -> BoundaryClosure:
    """``U`` and ``V`` pinned to a known solution's values at both ends."""
    return BoundaryClosure(
        _value_relation(table, lambda t: u(a, t)),
        _value_relation(table, lambda t: u_x(a, t)),
        _value_relation(table, lambda t: u(b, t)),
        _value_relation(table, lambda t: u_x(b, t)),
        name="exact-dirichlet",
    )
