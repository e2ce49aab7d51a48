"""
Bernoulli multi-source arrivals and the per-slot selection probabilities.

At most one of the packets generated in a slot is picked, uniformly among
them. From the viewpoint of a tagged source this gives three outcomes:
nothing arrives (gamma0), the tagged source is picked (gamma1), or some
other source is picked (gamma2).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np


class Discipline(str, Enum):
    NPB = "npb"
    PB = "pb"
    NPSBR = "npsbr"

    @classmethod
    def parse(cls, value) -> "Discipline":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(d.value for d in cls)
            raise ValueError(f"unknown discipline {value!r} (expected one of {names})") from None


@dataclass(frozen=True)
class Scenario:
    """Arrival probabilities p (per slot), service probability q, discipline.

    ``tagged_source`` is 1-based, as in the tables and the CLI.
    """

    p: tuple[float, ...]
    q: float
    discipline: Discipline = Discipline.NPB
    tagged_source: int = 1

    def __post_init__(self):
        p = tuple(float(x) for x in np.atleast_1d(self.p))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "discipline", Discipline.parse(self.discipline))
        if len(p) < 1:
            raise ValueError("need at least one source")
        if any(not (0.0 <= x <= 1.0) for x in p):
            raise ValueError(f"arrival probabilities must lie in [0, 1], got {p}")
        if not (0.0 < self.q <= 1.0):
            raise ValueError(f"service probability q must lie in (0, 1], got {self.q}")
        if not (1 <= self.tagged_source <= len(p)):
            raise ValueError(
                f"tagged_source out of range: {self.tagged_source} not in 1..{len(p)}"
            )
        if p[self.tagged_source - 1] <= 0.0:
            raise ValueError("the tagged source must have a positive arrival probability")

    @property
    def n_sources(self) -> int:
        return len(self.p)

    @property
    def load(self) -> float:
        return sum(self.p) / self.q

    def retag(self, source: int) -> "Scenario":
        return Scenario(self.p, self.q, self.discipline, source)

    def tagged_first(self) -> tuple[float, ...]:
        """p reordered so that the tagged source comes first."""
        i = self.tagged_source - 1
        return (self.p[i],) + self.p[:i] + self.p[i + 1 :]


@dataclass(frozen=True)
class Gammas:
    gamma0: float
    gamma1: float
    gamma2: float

    @property
    def gamma01(self) -> float:
        return self.gamma0 + self.gamma1

    @property
    def gamma02(self) -> float:
        return self.gamma0 + self.gamma2

    @property
    def gamma12(self) -> float:
        return self.gamma1 + self.gamma2


def _others(p: Sequence[float], tagged: int) -> list[float]:
    if not 1 <= tagged <= len(p):
        raise ValueError(f"tagged_source out of range: {tagged} not in 1..{len(p)}")
    return [x for n, x in enumerate(p, start=1) if n != tagged]


def cross_traffic_coeffs(p: Sequence[float], tagged: int = 1) -> np.ndarray:
    """Coefficients tau_0..tau_{N-1} of prod_{n != tagged} (1 - p_n + p_n z)."""
    coeffs = np.array([1.0])
    for pn in _others(p, tagged):
        coeffs = np.convolve(coeffs, [1.0 - pn, pn])
    return coeffs


def selection_probabilities(p: Sequence[float], tagged: int = 1) -> Gammas:
    tau = cross_traffic_coeffs(p, tagged)
    p_tag = float(p[tagged - 1])
    gamma0 = float(np.prod([1.0 - x for x in p]))
    gamma1 = p_tag * float(np.sum(tau / np.arange(1, len(tau) + 1)))
    gamma2 = max(0.0, 1.0 - gamma0 - gamma1)
    return Gammas(gamma0, gamma1, gamma2)
