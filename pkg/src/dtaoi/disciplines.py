"""
QBD blocks for the three server disciplines.

Phase numbering is 1-based and fixed (downstream phase sets rely on it).

NPB / PB (m = 5):
    1  first tagged packet in service
    2  first tagged packet done, server idle
    3  first tagged packet done, another tagged packet in service
    4  first tagged packet done, a non-tagged packet in service
    5  second tagged packet done (PB: or first one preempted); level drains to 0

NPSBR (m = 10):
    1  first successful tagged packet in the waiting room
    2  ... in service, waiting room empty
    3  ... in service, tagged packet waiting
    4  ... in service, non-tagged packet waiting
    5  first tagged packet done, system empty
    6  second successful tagged packet in service
    7  non-tagged packet in service, waiting room empty
    8  non-tagged packet in service, tagged packet waiting
    9  non-tagged packet in service, non-tagged packet waiting
    10 second tagged packet done; level drains to 0
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError
from .qbd import QbdChain, validate_chain
from .traffic import Discipline, Gammas, selection_probabilities

# phase sets whose restricted level laws give AoI and PAoI - 1
AGE_PHASES = {
    Discipline.NPB: (2, 3, 4),
    Discipline.PB: (2, 3, 4),
    Discipline.NPSBR: (5, 6, 7, 8, 9),
}
PEAK_PHASES = {
    Discipline.NPB: (3,),
    Discipline.PB: (3,),
    Discipline.NPSBR: (6,),
}


def _drain_blocks(m: int):
    """A1 = 0, and A2 = B1 = e_m e_m^T: the last phase walks the level down."""
    A1 = np.zeros((m, m))
    A2 = np.zeros((m, m))
    A2[m - 1, m - 1] = 1.0
    return A1, A2, A2.copy()


def build_npb(g: Gammas, q: float) -> QbdChain:
    qb = 1.0 - q
    g0, g1, g2 = g.gamma0, g.gamma1, g.gamma2
    A0 = np.array([
        [qb, q * g0, q * g1, q * g2, 0.0],
        [0.0, g0, g1, g2, 0.0],
        [0.0, 0.0, qb, 0.0, q],
        [0.0, q * g0, q * g1, qb + q * g2, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0],
    ])
    A1, A2, B1 = _drain_blocks(5)
    B0 = np.zeros((5, 5))
    B0[4, 0] = 1.0
    return validate_chain(QbdChain(B0=B0, B1=B1, A0=A0, A1=A1, A2=A2))


def build_pb(g: Gammas, q: float) -> QbdChain:
    qb = 1.0 - q
    g0, g1, g2 = g.gamma0, g.gamma1, g.gamma2
    A0 = np.array([
        [qb * g0, q * g0, q * g1, q * g2, qb * g.gamma12],
        [0.0, g0, g1, g2, 0.0],
        [0.0, 0.0, qb * g.gamma01, qb * g2, q],
        [0.0, q * g0, g1, qb * g.gamma02 + q * g2, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0],
    ])
    A1, A2, B1 = _drain_blocks(5)
    B0 = np.zeros((5, 5))
    B0[4, 0] = 1.0
    return validate_chain(QbdChain(B0=B0, B1=B1, A0=A0, A1=A1, A2=A2))


@dataclass(frozen=True)
class NpsbrWaitParams:
    """Waiting-room law of successful tagged packets under NPSBR.

    P(wait = 0) = a and P(wait = l) = (1 - a) b (1 - b)^(l-1) for l >= 1.
    ``x`` is the stationary law of the number in system (0, 1 or 2) at the
    end of a slot, ``r`` the probability that a packet placed in the
    waiting room is eventually served, ``p_s`` the success probability of a
    tagged packet.
    """

    a: float
    b: float
    p_s: float
    x: tuple[float, float, float]
    r: float
    Q: np.ndarray

    def pmf(self, ell: int) -> float:
        if ell < 0:
            return 0.0
        if ell == 0:
            return self.a
        return (1.0 - self.a) * self.b * (1.0 - self.b) ** (ell - 1)


def occupancy_matrix(g: Gammas, q: float) -> np.ndarray:
    qb = 1.0 - q
    return np.array([
        [g.gamma0, 1.0 - g.gamma0, 0.0],
        [q * g.gamma0, q * g.gamma12 + qb * g.gamma0, qb * g.gamma12],
        [0.0, q, qb],
    ])


def npsbr_wait_params(g: Gammas, q: float, p_tagged: float) -> NpsbrWaitParams:
    if p_tagged <= 0.0 or q <= 0.0:
        raise ValueError("need p_tagged > 0 and q > 0")
    qb = 1.0 - q
    Q = occupancy_matrix(g, q)
    # x (Q - I) = 0 with one balance equation swapped for x 1 = 1
    lhs = (Q - np.eye(3)).T
    lhs[-1, :] = 1.0
    rhs = np.array([0.0, 0.0, 1.0])
    if abs(np.linalg.det(lhs)) < 1e-14:
        raise SolverError("occupancy chain has no unique stationary vector")
    x = np.linalg.solve(lhs, rhs)
    x = np.maximum(x, 0.0)
    x = x / x.sum()

    gamma = g.gamma1 / p_tagged
    g0 = g.gamma0
    r = g0 * q / (1.0 - g0 + g0 * q)
    to_server = gamma * (x[0] + q * (x[1] + x[2]))
    to_room = gamma * qb * (x[1] + x[2])
    p_s = to_server + r * to_room
    a = to_server / p_s if p_s > 0 else 1.0
    b = 1.0 - g0 * qb
    Q.setflags(write=False)
    return NpsbrWaitParams(a=min(1.0, a), b=b, p_s=p_s, x=tuple(float(v) for v in x), r=r, Q=Q)


def build_npsbr(g: Gammas, q: float, wait: NpsbrWaitParams) -> QbdChain:
    qb = 1.0 - q
    g0, g1, g2 = g.gamma0, g.gamma1, g.gamma2
    g01, g02 = g.gamma01, g.gamma02
    b = wait.b
    A0 = np.zeros((10, 10))
    A0[0, :2] = [1.0 - b, b]
    A0[1, 1:7] = [qb * g0, qb * g1, qb * g2, q * g0, q * g1, q * g2]
    A0[2, [2, 3, 5, 6]] = [qb * g01, qb * g2, q * g01, q * g2]
    A0[3, [2, 3, 5, 6]] = [qb * g1, qb * g02, q * g1, q * g02]
    A0[4, 4:7] = [g0, g1, g2]
    A0[5, [5, 9]] = [qb, q]
    A0[6, 4:9] = [q * g0, q * g1, qb * g0 + q * g2, qb * g1, qb * g2]
    A0[7, 5:9] = [q * g01, q * g2, qb * g01, qb * g2]
    A0[8, 5:9] = [q * g1, q * g02, qb * g1, qb * g02]
    A1, A2, B1 = _drain_blocks(10)
    B0 = np.zeros((10, 10))
    B0[9, 0] = 1.0 - wait.a
    B0[9, 1] = wait.a
    return validate_chain(QbdChain(B0=B0, B1=B1, A0=A0, A1=A1, A2=A2))


def build_chain(
    discipline: Discipline, p_tagged_first, q: float
) -> tuple[QbdChain, Gammas, NpsbrWaitParams | None]:
    """Chain for the source in position 1 of ``p_tagged_first``."""
    discipline = Discipline.parse(discipline)
    g = selection_probabilities(p_tagged_first, 1)
    if discipline is Discipline.NPB:
        return build_npb(g, q), g, None
    if discipline is Discipline.PB:
        return build_pb(g, q), g, None
    wait = npsbr_wait_params(g, q, float(p_tagged_first[0]))
    return build_npsbr(g, q, wait), g, wait
