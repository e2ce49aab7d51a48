"""
Slot-level simulation of the server.

Every slot k >= 1 runs the same three stages:

1. all ages are incremented;
2. if a packet is in service and its service is over, it is delivered: the
   pre-reset age of its source is a PAoI sample and the age drops to the
   packet's system time (k - arrival slot);
3. at most one of the slot's arrivals (picked uniformly) is admitted, per
   discipline: NPB only into an idle server, PB always (preempting), NPSBR
   into the waiting room, which is then moved into service if idle.

A packet that enters service in slot k can complete at the earliest in
slot k + 1. Ages start at 0 in slot 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ScheduleConflictError
from .traffic import Discipline, Scenario

DEFAULT_WARMUP = 10**4
_CHUNK = 1 << 16


class SlotServer:
    """Server state plus the per-slot stage pipeline.

    Packets are tuples (source, arrival_slot, service_time); service_time is
    only used by deterministic replays. Sources are 0-based internally.
    """

    def __init__(self, n_sources: int, discipline: Discipline):
        self.discipline = Discipline.parse(discipline)
        self.age = [0] * n_sources
        self.busy = None  # (src, arrival, service_time)
        self.start = -1  # slot the busy packet entered service
        self.room = None
        # (slot, src, paoi, new_age, wait) per delivery
        self.deliveries: list[tuple[int, int, int, int, int]] = []

    def step(self, k: int, arrival, service_over: bool) -> None:
        age = self.age
        for n in range(len(age)):
            age[n] += 1

        busy = self.busy
        if busy is not None and service_over:
            src, t, _ = busy
            self.deliveries.append((k, src, age[src], k - t, self.start - t))
            age[src] = k - t
            self.busy = busy = None

        disc = self.discipline
        if disc is Discipline.NPSBR:
            if arrival is not None:
                self.room = arrival
            if busy is None and self.room is not None:
                self.busy, self.start, self.room = self.room, k, None
        elif arrival is not None and (busy is None or disc is Discipline.PB):
            self.busy, self.start = arrival, k


@dataclass
class SimStats:
    """Empirical histograms; index ell holds the count of value ell."""

    aoi_hist: list[np.ndarray]
    paoi_hist: list[np.ndarray]
    wait_hist: list[np.ndarray]
    slots: int
    seed: int
    warmup: int
    meta: dict = field(default_factory=dict)

    @property
    def n_sources(self) -> int:
        return len(self.aoi_hist)

    @staticmethod
    def _pmf(h: np.ndarray) -> np.ndarray:
        tot = h.sum()
        return h / tot if tot else h.astype(float)

    def aoi_pmf(self, source: int) -> np.ndarray:
        return self._pmf(self.aoi_hist[source - 1])

    def paoi_pmf(self, source: int) -> np.ndarray:
        return self._pmf(self.paoi_hist[source - 1])

    def wait_pmf(self, source: int) -> np.ndarray:
        return self._pmf(self.wait_hist[source - 1])

    def aoi_cdf(self, source: int) -> np.ndarray:
        return np.cumsum(self.aoi_pmf(source))

    def paoi_cdf(self, source: int) -> np.ndarray:
        return np.cumsum(self.paoi_pmf(source))

    def merge(self, other: "SimStats") -> "SimStats":
        def add(xs, ys):
            out = []
            for x, y in zip(xs, ys):
                n = max(len(x), len(y))
                out.append(np.pad(x, (0, n - len(x))) + np.pad(y, (0, n - len(y))))
            return out

        return SimStats(
            aoi_hist=add(self.aoi_hist, other.aoi_hist),
            paoi_hist=add(self.paoi_hist, other.paoi_hist),
            wait_hist=add(self.wait_hist, other.wait_hist),
            slots=self.slots + other.slots,
            seed=self.seed,
            warmup=self.warmup,
            meta={**self.meta, "merged": True},
        )


def _streams(seed: int, n_sources: int):
    """One generator per source, one for tie-breaking, one for service."""
    children = np.random.SeedSequence(seed).spawn(n_sources + 2)
    gens = [np.random.Generator(np.random.PCG64(s)) for s in children]
    return gens[:n_sources], gens[n_sources], gens[n_sources + 1]


def _choose(arrived: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Uniform pick among each row's True entries; -1 for empty rows."""
    counts = arrived.sum(axis=1)
    rank = np.floor(u * counts).astype(np.int64)
    csum = np.cumsum(arrived, axis=1)
    pick = np.argmax(csum > rank[:, None], axis=1)
    return np.where(counts > 0, pick, -1)


def simulate(
    scenario: Scenario,
    horizon_slots: int,
    seed: int = 0,
    warmup_slots: int = DEFAULT_WARMUP,
) -> SimStats:
    """Run slots 1..horizon_slots; statistics cover slots > warmup_slots."""
    if horizon_slots <= warmup_slots or warmup_slots < 0:
        raise ValueError("need horizon_slots > warmup_slots >= 0")
    p = np.asarray(scenario.p, dtype=float)
    N = len(p)
    q = scenario.q
    src_rngs, tie_rng, svc_rng = _streams(seed, N)
    server = SlotServer(N, scenario.discipline)
    step = server.step
    age = server.age
    n_rec = horizon_slots - warmup_slots
    ages = np.empty((N, n_rec), dtype=np.int64)

    k = 0
    while k < horizon_slots:
        size = min(_CHUNK, horizon_slots - k)
        arrived = np.column_stack([g.random(size) < pn for g, pn in zip(src_rngs, p)])
        chosen = _choose(arrived, tie_rng.random(size)).tolist()
        done = (svc_rng.random(size) < q).tolist()
        for i in range(size):
            k += 1
            c = chosen[i]
            step(k, None if c < 0 else (c, k, 0), done[i])
            if k > warmup_slots:
                ages[:, k - warmup_slots - 1] = age

    aoi_hist = [np.bincount(ages[n]) for n in range(N)]
    paoi = [[] for _ in range(N)]
    wait = [[] for _ in range(N)]
    for slot, src, peak, _, w in server.deliveries:
        if slot > warmup_slots:
            paoi[src].append(peak)
            wait[src].append(w)
    return SimStats(
        aoi_hist=aoi_hist,
        paoi_hist=[np.bincount(np.array(x, dtype=np.int64), minlength=1) for x in paoi],
        wait_hist=[np.bincount(np.array(x, dtype=np.int64), minlength=1) for x in wait],
        slots=n_rec,
        seed=seed,
        warmup=warmup_slots,
        meta={"horizon": horizon_slots, "warmup": warmup_slots, "seed": seed,
              "p": list(scenario.p), "q": q, "discipline": scenario.discipline.value},
    )


@dataclass(frozen=True)
class Trace:
    """Replay output: ages[n][k] for k = 0..K and (slot, value) PAoI events."""

    ages: list[list[int]]
    peaks: list[list[tuple[int, int]]]


def replay_trace(
    arrivals: Mapping[int, Sequence[tuple[int, int]]] | Sequence[Sequence[tuple[int, int]]],
    tie_breaks: Mapping[int, int],
    discipline: Discipline,
    until: int = 20,
) -> Trace:
    """Deterministic replay of a schedule over slots 0..until.

    ``arrivals`` gives, per 1-based source, (slot, service_time) pairs;
    ``tie_breaks`` maps a slot with several arrivals to the admitted source.
    """
    if isinstance(arrivals, Mapping):
        n_sources = max(arrivals)
        per_src = [list(arrivals.get(n, ())) for n in range(1, n_sources + 1)]
    else:
        per_src = [list(a) for a in arrivals]
        n_sources = len(per_src)

    by_slot: dict[int, dict[int, int]] = {}
    for n, lst in enumerate(per_src, start=1):
        for slot, service in lst:
            if service < 1:
                raise ValueError(f"service times must be >= 1 (source {n}, slot {slot})")
            by_slot.setdefault(slot, {})[n] = service
    for slot, src in tie_breaks.items():
        if src not in by_slot.get(slot, {}):
            raise ScheduleConflictError(f"tie break at slot {slot} names source {src} "
                                        "which has no arrival there")

    server = SlotServer(n_sources, discipline)
    ages = [[0] for _ in range(n_sources)]
    for k in range(1, until + 1):
        here = by_slot.get(k, {})
        if len(here) > 1:
            if k not in tie_breaks:
                raise ScheduleConflictError(f"several arrivals at slot {k} and no tie break")
            src = tie_breaks[k]
        else:
            src = next(iter(here), None)
        pkt = None if src is None else (src - 1, k, here[src])
        busy = server.busy
        over = busy is not None and k - server.start >= busy[2]
        server.step(k, pkt, over)
        for n in range(n_sources):
            ages[n].append(server.age[n])

    peaks = [[] for _ in range(n_sources)]
    for slot, src, peak, _, _ in server.deliveries:
        peaks[src].append((slot, peak))
    return Trace(ages=ages, peaks=peaks)
