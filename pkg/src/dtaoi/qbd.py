"""
Infinite discrete-time QBD chains in canonical block-tridiagonal form.

Transition matrix layout (levels 0, 1, 2, ...)::

    B0  A0
    B1  A1  A0
        A2  A1  A0
            ...

A0 moves the level up, A2 moves it down, A1 keeps it. The stationary vector
is matrix-geometric, pi_k = pi0 R^k, where R is the minimal nonnegative
solution of R = A0 + R A1 + R^2 A2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ChainStructureError, SolverError, ZeroMassError
from .mg import MatGeom, spectral_radius

logger = logging.getLogger(__name__)

ROW_SUM_TOL = 1e-12
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10**5
#: sp(R) at or above 1 - UNSTABLE_MARGIN is treated as a non-recurrent chain
UNSTABLE_MARGIN = 1e-9
#: second-smallest singular value of (B0 + R B1 - I) below this -> ambiguous pi0
SIMPLE_EIG_TOL = 1e-8
ZERO_MASS_TOL = 1e-14

BLOCK_NAMES = ("B0", "B1", "A0", "A1", "A2")


def _ro(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class QbdChain:
    B0: np.ndarray
    B1: np.ndarray
    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray

    def __post_init__(self):
        for name in BLOCK_NAMES:
            object.__setattr__(self, name, _ro(np.atleast_2d(getattr(self, name))))

    @property
    def m(self) -> int:
        return self.A0.shape[0]


@dataclass(frozen=True)
class QbdSolution:
    R: np.ndarray
    pi0: np.ndarray
    residual_R: float
    residual_pi0: float
    iterations: int
    method: str = "logarithmic-reduction"
    spectral_radius: float = field(default=float("nan"))

    @property
    def m(self) -> int:
        return self.R.shape[0]

    def meta(self) -> dict:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "residual_R": self.residual_R,
            "residual_pi0": self.residual_pi0,
            "spectral_radius_R": self.spectral_radius,
        }


def validate_chain(chain: QbdChain, tol: float = ROW_SUM_TOL) -> QbdChain:
    """Check shapes, entry range and the three row-sum identities.

    Raises ChainStructureError naming the offending block combination and
    the (1-based) row.
    """
    m = chain.m
    for name in BLOCK_NAMES:
        blk = getattr(chain, name)
        if blk.shape != (m, m):
            raise ChainStructureError(f"{name} has shape {blk.shape}, expected {(m, m)}")
        if not np.all(np.isfinite(blk)):
            raise ChainStructureError(f"{name} has non-finite entries")
        bad = np.argwhere((blk < -tol) | (blk > 1 + tol))
        if bad.size:
            i, j = bad[0]
            raise ChainStructureError(
                f"{name}[{i + 1},{j + 1}] = {blk[i, j]!r} outside [0, 1]"
            )

    checks = (
        ("B0+A0", chain.B0 + chain.A0),
        ("B1+A1+A0", chain.B1 + chain.A1 + chain.A0),
        ("A2+A1+A0", chain.A2 + chain.A1 + chain.A0),
    )
    for label, blk in checks:
        sums = blk.sum(axis=1)
        dev = np.abs(sums - 1.0)
        if np.any(dev > tol):
            row = int(np.argmax(dev))
            raise ChainStructureError(
                f"row {row + 1} of {label} sums to {float(sums[row])!r}, expected 1"
            )
    return chain


def _rate_residual(R, A0, A1, A2) -> float:
    return float(np.max(np.abs(R - A0 - R @ A1 - R @ R @ A2)))


def _log_reduction(A0, A1, A2, tol, max_iter):
    """Latouche-Ramaswami logarithmic reduction for G, then R from G."""
    m = A0.shape[0]
    I = np.eye(m)
    HL = np.linalg.solve(I - A1, np.hstack([A0, A2]))
    H, L = HL[:, :m], HL[:, m:]  # up, down
    G = L.copy()
    T = H.copy()
    it = 0
    while it < max_iter:
        it += 1
        U = H @ L + L @ H
        HL = np.linalg.solve(I - U, np.hstack([H @ H, L @ L]))
        H, L = HL[:, :m], HL[:, m:]
        G = G + T @ L
        T = T @ H
        if np.max(np.abs(1.0 - G.sum(axis=1))) < tol or np.max(np.abs(T)) < tol:
            break
    R = A0 @ np.linalg.inv(I - A1 - A0 @ G)
    return R, it


def _fixed_point(A0, A1, A2, tol, max_iter, R0=None):
    """Natural iteration R <- A0 + R A1 + R^2 A2 (monotone from R = 0)."""
    R = np.zeros_like(A0) if R0 is None else R0.copy()
    for it in range(1, max_iter + 1):
        Rn = A0 + R @ A1 + R @ R @ A2
        step = float(np.max(np.abs(Rn - R)))
        R = Rn
        if step < tol * 1e-2 and _rate_residual(R, A0, A1, A2) <= tol:
            return R, it
    raise SolverError(f"fixed-point iteration for R did not converge in {max_iter} steps")


def fixed_point_iterates(chain: QbdChain, n: int) -> list[np.ndarray]:
    """First n natural-iteration iterates from R = 0 (used by tests)."""
    R = np.zeros_like(chain.A0)
    out = [R]
    for _ in range(n):
        R = chain.A0 + R @ chain.A1 + R @ R @ chain.A2
        out.append(R)
    return out


def _solve_rate(chain: QbdChain, tol: float, max_iter: int):
    A0, A1, A2 = chain.A0, chain.A1, chain.A2
    if not np.any(A0):
        return np.zeros_like(A0), 0, "trivial"

    method = "logarithmic-reduction"
    try:
        R, it = _log_reduction(A0, A1, A2, tol, max_iter)
        ok = np.all(np.isfinite(R))
    except np.linalg.LinAlgError:
        ok = False
    if ok:
        R = np.where(np.abs(R) < 1e-300, 0.0, R)
        res = _rate_residual(R, A0, A1, A2)
        if res > tol:
            # polish with a few natural-iteration sweeps
            R, extra = _fixed_point(A0, A1, A2, tol, max_iter, R0=np.maximum(R, 0.0))
            it += extra
            method = "logarithmic-reduction+fixed-point"
    else:
        logger.warning("logarithmic reduction failed; falling back to fixed point")
        R, it = _fixed_point(A0, A1, A2, tol, max_iter)
        method = "fixed-point"

    if np.min(R) < -1e-12:
        raise SolverError(f"rate matrix has negative entry {np.min(R):.3e}")
    R = np.maximum(R, 0.0)
    res = _rate_residual(R, A0, A1, A2)
    if res > tol:
        raise SolverError(f"rate matrix residual {res:.3e} exceeds tol {tol:.1e}")
    rho = spectral_radius(R)
    if rho >= 1.0 - UNSTABLE_MARGIN:
        raise SolverError(f"sp(R) = {rho!r}: chain is not positive recurrent")
    return R, it, method


def solve_rate_matrix(
    chain: QbdChain, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> np.ndarray:
    """Minimal nonnegative solution of R = A0 + R A1 + R^2 A2."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    R, _, _ = _solve_rate(chain, tol, max_iter)
    return R


def _boundary(chain: QbdChain, R: np.ndarray):
    m = chain.m
    I = np.eye(m)
    M = chain.B0 + R @ chain.B1
    D = M - I
    sv = np.linalg.svd(D, compute_uv=False)  # descending
    if m > 1 and sv[-2] <= SIMPLE_EIG_TOL:
        raise SolverError(
            "unit eigenvalue of B0 + R B1 is not simple; boundary vector is ambiguous"
        )
    norm_col = np.linalg.solve(I - R, np.ones(m))
    lhs = np.vstack([D.T, norm_col[None, :]])
    rhs = np.zeros(m + 1)
    rhs[-1] = 1.0
    pi0, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    if np.min(pi0) < -1e-12:
        raise SolverError(f"boundary vector has negative entry {np.min(pi0):.3e}")
    pi0 = np.maximum(pi0, 0.0)
    res = max(
        float(np.max(np.abs(pi0 @ M - pi0))),
        abs(float(pi0 @ norm_col) - 1.0),
    )
    return pi0, res


def solve_boundary(chain: QbdChain, R: np.ndarray) -> np.ndarray:
    """pi0 with pi0 = pi0 (B0 + R B1) and pi0 (I - R)^-1 1 = 1."""
    return _boundary(chain, np.asarray(R, dtype=float))[0]


def solve_qbd(
    chain: QbdChain, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> QbdSolution:
    validate_chain(chain)
    R, it, method = _solve_rate(chain, tol, max_iter)
    pi0, res_pi0 = _boundary(chain, R)
    return QbdSolution(
        R=_ro(R),
        pi0=_ro(pi0),
        residual_R=_rate_residual(R, chain.A0, chain.A1, chain.A2),
        residual_pi0=res_pi0,
        iterations=it,
        method=method,
        spectral_radius=spectral_radius(R),
    )


def level_distribution(sol: QbdSolution) -> MatGeom:
    ones = np.ones(sol.m)
    return MatGeom(c=sol.pi0 @ sol.R, A=sol.R, b=ones, d=float(sol.pi0 @ ones))


def phase_indicator(m: int, phase_set: Iterable[int]) -> np.ndarray:
    """0/1 column for a set of 1-based phase indices."""
    phases = sorted(set(phase_set))
    if not phases:
        raise ValueError("phase set is empty")
    if phases[0] < 1 or phases[-1] > m:
        raise ValueError(f"phase indices must lie in 1..{m}, got {phases}")
    h = np.zeros(m)
    h[np.array(phases) - 1] = 1.0
    return h


def restricted_mass(sol: QbdSolution, phase_set: Iterable[int]) -> float:
    """Stationary probability of being in one of the given phases."""
    h = phase_indicator(sol.m, phase_set)
    return float(sol.pi0 @ np.linalg.solve(np.eye(sol.m) - sol.R, h))


def restricted_level_distribution(sol: QbdSolution, phase_set: Iterable[int]) -> MatGeom:
    """Law of the stationary level conditioned on the phase lying in phase_set."""
    phase_set = list(phase_set)
    h = phase_indicator(sol.m, phase_set)
    mass = restricted_mass(sol, phase_set)
    if mass <= ZERO_MASS_TOL:
        raise ZeroMassError(f"phase set {sorted(set(phase_set))} has stationary mass {mass:.3e}")
    alpha = 1.0 / mass
    return MatGeom(c=alpha * (sol.pi0 @ sol.R), A=sol.R, b=h, d=alpha * float(sol.pi0 @ h))


def stationary_residual(sol: QbdSolution, chain: QbdChain, levels: int) -> float:
    """Max-abs violation of pi = pi P over levels 0..levels-1.

    Level vectors beyond ``levels`` are taken from the matrix-geometric form.
    """
    if levels < 2:
        raise ValueError("levels must be >= 2")
    R = np.asarray(sol.R)
    pis = [np.asarray(sol.pi0, dtype=float)]
    for _ in range(levels + 1):
        pis.append(pis[-1] @ R)
    worst = float(np.max(np.abs(pis[0] - pis[0] @ chain.B0 - pis[1] @ chain.B1)))
    prev = pis[0] @ chain.A0
    lvl1 = pis[1] - prev - pis[1] @ chain.A1 - pis[2] @ chain.A2
    worst = max(worst, float(np.max(np.abs(lvl1))))
    for k in range(2, levels):
        r = pis[k] - pis[k - 1] @ chain.A0 - pis[k] @ chain.A1 - pis[k + 1] @ chain.A2
        worst = max(worst, float(np.max(np.abs(r))))
    return worst
