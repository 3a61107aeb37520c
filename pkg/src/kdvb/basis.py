"""Extended cubic B-spline basis on a uniform grid.

The basis function ``E_i`` is centred on knot ``x_i = origin + i*h`` and
supported on ``[x_{i-2}, x_{i+2}]``. Each of its four pieces is a quartic
polynomial in the local coordinate; the quartic terms are scaled by the
extension parameter ``lam`` and vanish for ``lam = 0``, which gives back the
classical cubic B-spline.

Knots are never stored: a uniform grid is fully described by its origin and
spacing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BasisConfig:
    """Extension parameter and grid spacing of the basis.

    Parameters
    ----------
    lam : float
        Extension parameter. Any finite value is accepted; ``lam = 0`` is the
        classical cubic B-spline.
    h : float
        Uniform knot spacing, strictly positive.
    """

    lam: float
    h: float

    def __post_init__(self):
        if not np.isfinite(self.lam):
            raise ValueError(f"lam must be finite, got {self.lam!r}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError(f"h must be positive and finite, got {self.h!r}")


@dataclass(frozen=True)
class NodalTable:
    """Weights of ``E_{i-1}, E_i, E_{i+1}`` at node ``x_i``.

    A function ``U = sum_j delta_j E_j`` satisfies at each node

    * ``U_i   = alpha1*delta_{i-1} + alpha2*delta_i + alpha1*delta_{i+1}``
    * ``U'_i  = beta1*delta_{i-1} - beta1*delta_{i+1}``
    * ``U''_i = gamma1*delta_{i-1} + gamma2*delta_i + gamma1*delta_{i+1}``
    """

    alpha1: float
    alpha2: float
    beta1: float
    gamma1: float
    gamma2: float


def nodal_table(cfg: BasisConfig) -> NodalTable:
    lam, h = cfg.lam, cfg.h
    if not h > 0:
        raise ValueError(f"h must be positive, got {h!r}")
    return NodalTable(
        alpha1=(4.0 - lam) / 24.0,
        alpha2=(8.0 + lam) / 12.0,
        beta1=-1.0 / (2.0 * h),
        gamma1=(2.0 + lam) / (2.0 * h * h),
        gamma2=-(4.0 + 2.0 * lam) / (2.0 * h * h),
    )


def _pieces(s, lam, order):
    """Value (order 0) or s-derivative of ``24*E`` in local coordinate ``s``.

    ``s = (x - x_{i-2})/h``. Pieces are half-open ``[k, k+1)`` except the last,
    which is closed at ``s = 4``.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)

    m1 = (s >= 0.0) & (s < 1.0)
    m2 = (s >= 1.0) & (s < 2.0)
    m3 = (s >= 2.0) & (s < 3.0)
    m4 = (s >= 3.0) & (s <= 4.0)

    # piece 1: 4(1-lam) p^3 + 3 lam p^4, p = s
    p = s[m1]
    # piece 2: (4-lam) + 12 q + 6(2+lam) q^2 - 12 q^3 - 3 lam q^4, q = s - 1
    q = s[m2] - 1.0
    # piece 3: (4-lam) - 12 r + 6(2+lam) r^2 + 12 r^3 - 3 lam r^4, r = s - 3
    r = s[m3] - 3.0
    # piece 4: 4(lam-1) w^3 + 3 lam w^4, w = s - 4
    w = s[m4] - 4.0

    if order == 0:
        out[m1] = 4.0 * (1.0 - lam) * p**3 + 3.0 * lam * p**4
        out[m2] = (4.0 - lam) + 12.0 * q + 6.0 * (2.0 + lam) * q**2 - 12.0 * q**3 - 3.0 * lam * q**4
        out[m3] = (4.0 - lam) - 12.0 * r + 6.0 * (2.0 + lam) * r**2 + 12.0 * r**3 - 3.0 * lam * r**4
        out[m4] = 4.0 * (lam - 1.0) * w**3 + 3.0 * lam * w**4
    elif order == 1:
        out[m1] = 12.0 * (1.0 - lam) * p**2 + 12.0 * lam * p**3
        out[m2] = 12.0 + 12.0 * (2.0 + lam) * q - 36.0 * q**2 - 12.0 * lam * q**3
        out[m3] = -12.0 + 12.0 * (2.0 + lam) * r + 36.0 * r**2 - 12.0 * lam * r**3
        out[m4] = 12.0 * (lam - 1.0) * w**2 + 12.0 * lam * w**3
    elif order == 2:
        out[m1] = 24.0 * (1.0 - lam) * p + 36.0 * lam * p**2
        out[m2] = 12.0 * (2.0 + lam) - 72.0 * q - 36.0 * lam * q**2
        out[m3] = 12.0 * (2.0 + lam) + 72.0 * r - 36.0 * lam * r**2
        out[m4] = 24.0 * (lam - 1.0) * w + 36.0 * lam * w**2
    else:
        raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
    return out


def _local(cfg, center_index, x, origin):
    return (np.asarray(x, dtype=float) - origin) / cfg.h - (center_index - 2)


def eval_basis(cfg: BasisConfig, center_index: int, x, origin: float = 0.0):
    """Evaluate ``E_i(x)`` for knots ``origin + k*h``.

    Accepts a scalar or an array for ``x``; the result has the same shape.
    Exactly zero outside ``[x_{i-2}, x_{i+2}]``.
    """
    s = _local(cfg, center_index, x, origin)
    val = _pieces(s, cfg.lam, 0) / 24.0
    return float(val) if val.ndim == 0 else val


def eval_basis_deriv(cfg: BasisConfig, center_index: int, x, order: int, origin: float = 0.0):
    """First or second derivative of ``E_i`` at ``x``.

    Raises
    ------
    ValueError
        If ``order`` is not 1 or 2. The family is only C2, so a third
        derivative is not defined at the knots.
    """
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order!r}")
    s = _local(cfg, center_index, x, origin)
    val = _pieces(s, cfg.lam, order) / (24.0 * cfg.h**order)
    return float(val) if val.ndim == 0 else val


def classical_cubic_bspline(t):
    """Classical centred cubic B-spline in units of the knot spacing."""
    t = np.abs(np.asarray(t, dtype=float))
    out = np.where(t < 1.0, 2.0 / 3.0 - t**2 + 0.5 * t**3, 0.0)
    return np.where((t >= 1.0) & (t < 2.0), (2.0 - t) ** 3 / 6.0, out)
