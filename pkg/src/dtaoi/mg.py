"""
Discrete matrix-geometric (MG) distributions.

A random variable X ~ MG(c, A, b, d) has pmf ``d`` at 0 and ``c A^(l-1) b``
for l >= 1. Everything here works on small dense matrices (order <= ~20).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import DistributionError, IterationCapError

#: pmf values in (-NEG_TOL, 0) are floating-point noise and get clamped to 0
NEG_TOL = 1e-12
#: tolerance on d + c (I - A)^-1 b = 1
MASS_TOL = 1e-9


def _frozen(x, shape) -> np.ndarray:
    arr = np.array(x, dtype=float).reshape(shape)
    arr.setflags(write=False)
    return arr


def spectral_radius(A: np.ndarray) -> float:
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


@dataclass(frozen=True)
class MatGeom:
    """Immutable MG distribution; validated on construction."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    d: float

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        m = A.shape[0]
        if A.shape != (m, m):
            raise DistributionError(f"A must be square, got shape {A.shape}")
        object.__setattr__(self, "A", _frozen(A, (m, m)))
        object.__setattr__(self, "c", _frozen(self.c, (m,)))
        object.__setattr__(self, "b", _frozen(self.b, (m,)))
        object.__setattr__(self, "d", float(self.d))

        if not (-NEG_TOL <= self.d <= 1 + NEG_TOL):
            raise DistributionError(f"mass at zero d={self.d} outside [0, 1]")
        rho = spectral_radius(self.A)
        if rho >= 1.0:
            raise DistributionError(f"spectral radius of A is {rho:.6g} >= 1")
        total = self.total_mass()
        if abs(total - 1.0) > MASS_TOL:
            raise DistributionError(f"total mass {total!r} differs from 1")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @classmethod
    def geometric(cls, q: float) -> "MatGeom":
        """Geometric law on {1, 2, ...} with success probability q."""
        return cls(c=[q], A=[[1.0 - q]], b=[1.0], d=0.0)

    @classmethod
    def point_mass_zero(cls, m: int = 1) -> "MatGeom":
        return cls(c=np.zeros(m), A=np.zeros((m, m)), b=np.ones(m), d=1.0)

    def _resolvent(self, rhs: np.ndarray) -> np.ndarray:
        """Solve (I - A) x = rhs."""
        return np.linalg.solve(np.eye(self.m) - self.A, rhs)

    def total_mass(self) -> float:
        return self.d + float(self.c @ self._resolvent(self.b))

    def pmf_at(self, ell: int) -> float:
        if ell < 0:
            return 0.0
        if ell == 0:
            val = self.d
        else:
            val = float(self.c @ np.linalg.matrix_power(self.A, ell - 1) @ self.b)
        return _clamp(val, ell)

    def cdf_at(self, ell: int) -> float:
        """P(X <= ell) from the closed-form partial geometric sum."""
        if ell < 0:
            return 0.0
        Al = np.linalg.matrix_power(self.A, ell)
        partial = self._resolvent(self.b - Al @ self.b)
        return min(1.0, max(0.0, self.d + float(self.c @ partial)))

    def pgf_at(self, z: float) -> float:
        """E[z^X] = c (z^-1 I - A)^-1 b + d, evaluated as z c (I - zA)^-1 b + d."""
        M = np.eye(self.m) - z * self.A
        if np.linalg.cond(M) > 1e12:
            raise np.linalg.LinAlgError(f"resolvent singular at z={z}")
        return z * float(self.c @ np.linalg.solve(M, self.b)) + self.d

    def factorial_moment(self, i: int) -> float:
        """E[X (X-1) ... (X-i+1)] = i! c (I-A)^(-i-1) A^(i-1) b."""
        if i < 1:
            raise ValueError("factorial moment order must be >= 1")
        y = np.linalg.matrix_power(self.A, i - 1) @ self.b
        lu = np.eye(self.m) - self.A
        for _ in range(i + 1):
            y = np.linalg.solve(lu, y)
        return factorial(i) * float(self.c @ y)

    def mean(self) -> float:
        return self.factorial_moment(1)

    def var(self) -> float:
        m1 = self.factorial_moment(1)
        return self.factorial_moment(2) + m1 - m1 * m1

    def tail_at(self, ell: int) -> float:
        """P(X > ell), computed as c A^ell (I-A)^-1 b (no cancellation)."""
        if ell < 0:
            return 1.0
        u = self._resolvent(self.b)
        return max(0.0, float(self.c @ np.linalg.matrix_power(self.A, ell) @ u))

    def truncate_pmf(self, tail_eps: float, max_len: int = 10**6) -> np.ndarray:
        """pmf on 0..L with L the first index where P(X > L) < tail_eps."""
        if not 0.0 < tail_eps < 1.0:
            raise ValueError("tail_eps must lie in (0, 1)")
        u = self._resolvent(self.b)
        out = [_clamp(self.d, 0)]
        tail = max(0.0, float(self.c @ u))
        v = self.c.copy()
        ell = 0
        while tail >= tail_eps:
            ell += 1
            if ell > max_len:
                raise IterationCapError(
                    f"pmf tail still {tail:.3g} >= {tail_eps:.3g} after {max_len} terms"
                )
            out.append(_clamp(float(v @ self.b), ell))
            v = v @ self.A
            tail = max(0.0, float(v @ u))
        return np.array(out)


def _clamp(val: float, ell: int) -> float:
    if val < 0.0:
        if val < -NEG_TOL:
            raise DistributionError(f"negative pmf {val:.3e} at {ell}")
        return 0.0
    return val
