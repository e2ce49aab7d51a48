"""
Reference results and the routines that recompute them.

Reference data lives in ``dtaoi/data``:

* optimum_unconstrained.csv / optimum_constrained.csv: optimal (p1, p2) and
  minimum cost per (q, alpha, discipline);
* sample_trace.csv / sample_trace_peaks.csv: the two-source illustrative
  schedule, ages for k = 0..20 and the PAoI events.
"""

from __future__ import annotations

import csv
import io
from importlib import resources
from typing import Callable, Iterable, Optional

import numpy as np

from .analyzer import analyze
from .mg import MatGeom
from .optimizer import SearchSpec, argmin_cost, evaluate_grid
from .simulator import replay_trace, simulate
from .traffic import Discipline, Scenario

# illustrative schedule: (arrival slot, service time) per source
SAMPLE_ARRIVALS = {
    1: [(1, 5), (5, 2), (9, 7), (13, 3), (17, 1)],
    2: [(1, 4), (7, 4), (13, 2), (19, 5)],
}
SAMPLE_TIE_BREAKS = {1: 1, 13: 2}

FIGURE_Q = 0.1
FIGURE_LOADS = (0.5, 2.0)
COST_TOL = 0.05
KS_BUDGET = 0.01


def _read_csv(name: str) -> list[dict]:
    text = resources.files("dtaoi.data").joinpath(name).read_text()
    return list(csv.DictReader(io.StringIO(text)))


def reference_optima(constrained: bool) -> list[dict]:
    rows = _read_csv("optimum_constrained.csv" if constrained else "optimum_unconstrained.csv")
    out = []
    for r in rows:
        out.append({
            "q": float(r["q"]),
            "alpha": float(r["alpha"]),
            "beta": float(r["beta"]) if constrained else None,
            "discipline": Discipline.parse(r["discipline"]),
            "p1": float(r["p1"]),
            "p2": float(r["p2"]),
            "cost": float(r["cost"]),
        })
    return out


def reference_trace() -> dict[str, list[list[int]]]:
    """discipline -> [ages of source 1, ages of source 2] for k = 0..20."""
    rows = _read_csv("sample_trace.csv")
    out = {}
    for d in Discipline:
        out[d.value] = [[int(r[f"{d.value}_{n}"]) for r in rows] for n in (1, 2)]
    return out


def reference_peaks() -> dict[str, list[list[tuple[int, int]]]]:
    out = {d.value: [[], []] for d in Discipline}
    for r in _read_csv("sample_trace_peaks.csv"):
        out[r["discipline"]][int(r["source"]) - 1].append((int(r["k"]), int(r["peak"])))
    return out


def figure_scenario(load: float, discipline, tagged: int = 1) -> Scenario:
    """Three sources with rates in ratio 1:2:4 and total rate load * q."""
    p = FIGURE_Q * load
    return Scenario((p / 7, 2 * p / 7, 4 * p / 7), FIGURE_Q, discipline, tagged)


def ks_distance(emp_pmf: np.ndarray, law: MatGeom) -> float:
    """sup_l |F_emp(l) - F(l)| over the empirical support (and one past it)."""
    n = len(emp_pmf) + 1
    emp = np.append(np.cumsum(emp_pmf), 1.0)
    exact = np.empty(n)
    v = law.c.copy()
    acc = law.d
    exact[0] = acc
    for ell in range(1, n):
        acc += float(v @ law.b)
        v = v @ law.A
        exact[ell] = acc
    return float(np.max(np.abs(emp - exact)))


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    n = max(len(p), len(q))
    p = np.pad(np.asarray(p, float), (0, n - len(p)))
    q = np.pad(np.asarray(q, float), (0, n - len(q)))
    return 0.5 * float(np.sum(np.abs(p - q)))


def reproduce_optima(
    constrained: bool,
    qs: Optional[Iterable[float]] = None,
    disciplines: Optional[Iterable] = None,
    progress: Optional[Callable[[str], None]] = None,
) -> list[dict]:
    """Recompute the optimum table; one dict per reference row with verdicts."""
    ref = reference_optima(constrained)
    if qs is not None:
        qs = {float(x) for x in qs}
        ref = [r for r in ref if r["q"] in qs]
    if disciplines is not None:
        ds = {Discipline.parse(d) for d in disciplines}
        ref = [r for r in ref if r["discipline"] in ds]

    groups: dict[tuple, list[dict]] = {}
    for r in ref:
        groups.setdefault((r["q"], r["discipline"], r["beta"]), []).append(r)

    out = []
    for (q, disc, beta), rows in groups.items():
        if progress:
            progress(f"grid q={q} {disc.value} beta={beta}")
        spec0 = SearchSpec(q=q, discipline=disc, beta=beta)
        grid = evaluate_grid(q, disc, spec0.grid_step, spec0.p_min, beta)
        for r in rows:
            spec = SearchSpec(q=q, alpha=r["alpha"], beta=beta, discipline=disc)
            res = argmin_cost(grid, r["alpha"], spec)
            step = spec.grid_step
            ok_p = (abs(res.p1 - r["p1"]) <= step + 1e-9 and abs(res.p2 - r["p2"]) <= step + 1e-9)
            ok_c = abs(res.cost - r["cost"]) <= COST_TOL + 1e-9
            binds = beta is None or abs(res.p1 + res.p2 - beta) <= 1e-9
            out.append({**r, "p1_found": res.p1, "p2_found": res.p2, "cost_found": res.cost,
                        "ok": ok_p and ok_c and binds, "binds": binds, "step": step})
    return out


def check_sample_trace() -> dict[str, list[str]]:
    """Replay the illustrative schedule; list of mismatch messages per discipline."""
    ages_ref = reference_trace()
    peaks_ref = reference_peaks()
    report = {}
    for d in Discipline:
        tr = replay_trace(SAMPLE_ARRIVALS, SAMPLE_TIE_BREAKS, d, until=20)
        bad = []
        for n in (0, 1):
            for k, (got, want) in enumerate(zip(tr.ages[n], ages_ref[d.value][n])):
                if got != want:
                    bad.append(f"k={k} source {n + 1}: age {got}, reference {want}")
            if tr.peaks[n] != peaks_ref[d.value][n]:
                bad.append(f"source {n + 1} PAoI events {tr.peaks[n]}, reference {peaks_ref[d.value][n]}")
        report[d.value] = bad
    return report


def figure_validation(
    slots: int = 10**6,
    warmup: int = 10**4,
    seed: int = 2021,
    loads: Iterable[float] = FIGURE_LOADS,
    disciplines: Iterable = tuple(Discipline),
) -> list[dict]:
    """KS distance between analytic and simulated AoI/PAoI cdfs per source."""
    rows = []
    for load in loads:
        for d in disciplines:
            sc = figure_scenario(load, d)
            stats = simulate(sc, slots, seed=seed, warmup_slots=warmup)
            for n in range(1, sc.n_sources + 1):
                res = analyze(sc.retag(n))
                rows.append({
                    "load": load,
                    "discipline": Discipline.parse(d).value,
                    "source": n,
                    "ks_aoi": ks_distance(stats.aoi_pmf(n), res.aoi),
                    "ks_paoi": ks_distance(stats.paoi_pmf(n), res.paoi),
                    "n_peaks": int(stats.paoi_hist[n - 1].sum()),
                })
    return rows
