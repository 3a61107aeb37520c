"""Banded matrix storage and solves.

Matrices are kept in LAPACK general-band layout: for an ``n x n`` matrix with
``kl`` sub- and ``ku`` super-diagonals, entry ``(i, j)`` lives at
``ab[ku + i - j, j]``. Factorisation is delegated to LAPACK ``gbsv`` through
:func:`scipy.linalg.solve_banded` (LU with partial pivoting).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class SingularMatrixError(np.linalg.LinAlgError):
    """The banded system is singular to working precision."""


@dataclass
class BandedMatrix:
    n: int
    kl: int
    ku: int
    ab: np.ndarray

    def __post_init__(self):
        if not (0 <= self.kl < self.n and 0 <= self.ku < self.n):
            raise ValueError(f"bandwidths must satisfy 0 <= kl, ku < n; got kl={self.kl}, ku={self.ku}, n={self.n}")
        self.ab = np.asarray(self.ab, dtype=float)
        if self.ab.shape != (self.kl + self.ku + 1, self.n):
            raise ValueError(f"band storage has shape {self.ab.shape}, expected {(self.kl + self.ku + 1, self.n)}")

    @classmethod
    def zeros(cls, n: int, kl: int, ku: int) -> BandedMatrix:
        return cls(n, kl, ku, np.zeros((kl + ku + 1, n)))

    @classmethod
    def from_dense(cls, a, kl: int, ku: int) -> BandedMatrix:
        """Pack the band of ``a``; entries outside the band are dropped."""
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("matrix must be square")
        out = cls.zeros(n, kl, ku)
        for k in range(-kl, ku + 1):
            d = np.diagonal(a, offset=k)
            if k >= 0:
                out.ab[ku - k, k:] = d
            else:
                out.ab[ku - k, : n + k] = d
        return out

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for k in range(-self.kl, self.ku + 1):
            row = self.ab[self.ku - k]
            d = row[k:] if k >= 0 else row[: self.n + k]
            a += np.diag(d, k)
        return a

    def __setitem__(self, idx, value):
        i, j = idx
        if not -self.kl <= j - i <= self.ku:
            raise IndexError(f"({i}, {j}) lies outside the band")
        self.ab[self.ku + i - j, j] = value

    def __getitem__(self, idx):
        i, j = idx
        if not -self.kl <= j - i <= self.ku:
            return 0.0
        return self.ab[self.ku + i - j, j]


def band_matvec(m: BandedMatrix, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (m.n,):
        raise ValueError(f"vector of length {x.shape} does not match matrix dimension {m.n}")
    y = np.zeros(m.n)
    for k in range(-m.kl, m.ku + 1):
        row = m.ab[m.ku - k]
        if k >= 0:
            y[: m.n - k] += row[k:] * x[k:]
        else:
            y[-k:] += row[: m.n + k] * x[: m.n + k]
    return y


def band_solve(m: BandedMatrix, rhs) -> np.ndarray:
    """Solve ``m @ x = rhs`` by banded LU with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If a zero pivot is met, or the matrix, right side or solution holds
        non-finite values.
    ValueError
        If ``rhs`` has the wrong length.
    """
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (m.n,):
        raise ValueError(f"rhs of length {rhs.shape} does not match matrix dimension {m.n}")
    if not (np.all(np.isfinite(m.ab)) and np.all(np.isfinite(rhs))):
        raise SingularMatrixError("banded system has non-finite entries")
    try:
        x = scipy.linalg.solve_banded((m.kl, m.ku), m.ab, rhs, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrixError("banded solve produced non-finite values")
    return x
