"""Weighted two-source mean-AoI cost and exhaustive grid search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analyzer import analyze
from .traffic import Discipline, Scenario

UNCONSTRAINED_STEP = 0.01
CONSTRAINED_STEP = 0.001
#: relative cost gap below which two grid points count as tied
TIE_RTOL = 1e-12


class EmptyGridError(ValueError):
    pass


@dataclass(frozen=True)
class SearchSpec:
    q: float
    alpha: float = 1.0
    beta: Optional[float] = None
    discipline: Discipline = Discipline.NPB
    grid_step: Optional[float] = None
    p_min: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "discipline", Discipline.parse(self.discipline))
        if self.grid_step is None:
            step = UNCONSTRAINED_STEP if self.beta is None else CONSTRAINED_STEP
            object.__setattr__(self, "grid_step", step)
        if self.p_min is None:
            object.__setattr__(self, "p_min", self.grid_step)
        if not (0.0 < self.q <= 1.0):
            raise ValueError(f"q must lie in (0, 1], got {self.q}")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.grid_step <= 0:
            raise ValueError("grid_step must be positive")
        if self.p_min < self.grid_step - 1e-15 or self.p_min > 1.0:
            raise ValueError("p_min must satisfy grid_step <= p_min <= 1")
        if self.beta is not None:
            if self.beta > 2.0:
                raise ValueError("beta must be <= 2")
            if self.beta < 2 * self.p_min - 1e-12:
                raise EmptyGridError(
                    f"empty grid: beta={self.beta} < 2 * p_min={2 * self.p_min}"
                )

    @property
    def decimals(self) -> int:
        """Decimal places needed to print grid values exactly."""
        s = f"{self.grid_step:.10f}".rstrip("0")
        return max(2, len(s.split(".")[1]) if "." in s else 0)


def cost(p1: float, p2: float, q: float, alpha: float, discipline) -> float:
    """E[AoI of source 1] + alpha * E[AoI of source 2]."""
    if alpha > 0 and p2 <= 0:
        raise ValueError("cost undefined: source 2 never transmits (p2 = 0) but alpha > 0")
    sc = Scenario((p1, p2), q, discipline, 1)
    c = analyze(sc).mean_aoi
    if alpha > 0:
        c += alpha * analyze(sc.retag(2)).mean_aoi
    return c


def grid_values(step: float, p_min: float) -> np.ndarray:
    n = int(np.floor((1.0 - p_min) / step + 1e-9)) + 1
    return np.round(p_min + step * np.arange(n), 12)


@dataclass
class MeanAgeGrid:
    """Mean AoI of source 1 on a grid of (p1, p2); NaN outside the feasible set.

    Source 2's mean at (p1, p2) is source 1's mean at (p2, p1): the analysis
    of the second source is the analysis of the first with the sources
    renumbered, and the feasible set is symmetric.
    """

    values: np.ndarray
    mean1: np.ndarray
    q: float
    discipline: Discipline
    beta: Optional[float]
    step: float

    @property
    def mean2(self) -> np.ndarray:
        return self.mean1.T

    def feasible(self) -> np.ndarray:
        return ~np.isnan(self.mean1)


def evaluate_grid(
    q: float,
    discipline,
    step: float,
    p_min: Optional[float] = None,
    beta: Optional[float] = None,
    progress=None,
) -> MeanAgeGrid:
    discipline = Discipline.parse(discipline)
    vals = grid_values(step, step if p_min is None else p_min)
    n = len(vals)
    mean1 = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(n):
            if beta is not None and vals[i] + vals[j] > beta + 1e-12:
                continue
            mean1[i, j] = analyze(Scenario((vals[i], vals[j]), q, discipline, 1)).mean_aoi
        if progress is not None:
            progress(i + 1, n)
    return MeanAgeGrid(values=vals, mean1=mean1, q=q, discipline=discipline, beta=beta, step=step)


@dataclass(frozen=True)
class SearchResult:
    p1: float
    p2: float
    cost: float
    spec: SearchSpec
    table: np.ndarray = field(repr=False)  # rows (p1, p2, E1, E2, cost)

    def summary(self) -> str:
        d = self.spec.decimals
        return f"p1*={self.p1:.{d}f} p2*={self.p2:.{d}f} C*={self.cost:.1f}"


def argmin_cost(grid: MeanAgeGrid, alpha: float, spec: SearchSpec) -> SearchResult:
    """Deterministic scan: lowest cost, ties to larger p1 then larger p2."""
    mask = grid.feasible()
    if not mask.any():
        raise EmptyGridError("no feasible grid point")
    ii, jj = np.nonzero(mask)
    e1 = grid.mean1[ii, jj]
    e2 = grid.mean2[ii, jj]
    costs = e1 + alpha * e2
    best = None
    for k in range(len(costs)):
        c = costs[k]
        if best is None:
            best = k
            continue
        cb = costs[best]
        if c < cb * (1 - TIE_RTOL):
            best = k
        elif c <= cb * (1 + TIE_RTOL) and (ii[k], jj[k]) > (ii[best], jj[best]):
            best = k
    v = grid.values
    table = np.column_stack([v[ii], v[jj], e1, e2, costs])
    return SearchResult(p1=float(v[ii[best]]), p2=float(v[jj[best]]), cost=float(costs[best]),
                        spec=spec, table=table)


def grid_search(spec: SearchSpec, grid: Optional[MeanAgeGrid] = None) -> SearchResult:
    """Exhaustive search of the cost over {p_min, p_min + step, ..., 1}^2.

    A precomputed ``grid`` (same q, discipline, step, beta) can be passed to
    scan several alphas without re-solving.
    """
    if grid is None:
        grid = evaluate_grid(spec.q, spec.discipline, spec.grid_step, spec.p_min, spec.beta)
    return argmin_cost(grid, spec.alpha, spec)
