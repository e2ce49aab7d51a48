"""Run configuration files (YAML; JSON also parses)."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .qbd import DEFAULT_MAX_ITER, DEFAULT_TOL
from .simulator import DEFAULT_WARMUP
from .traffic import Discipline, Scenario


class ConfigError(ValueError):
    """Bad configuration; the message starts with the offending field path."""


@dataclass
class SolverConfig:
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER


@dataclass
class SimConfig:
    horizon: int = 10**6
    warmup: int = DEFAULT_WARMUP
    seed: int = 0


@dataclass
class SearchConfig:
    alpha: float = 1.0
    beta: Optional[float] = None
    grid_step: Optional[float] = None


@dataclass
class RunConfig:
    sources: list[float]
    q: float
    discipline: Discipline = Discipline.NPB
    tagged_source: int = 1
    solver: SolverConfig = field(default_factory=SolverConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    sha256: str = ""

    def scenario(self, source: Optional[int] = None) -> Scenario:
        tagged = self.tagged_source if source is None else source
        if not 1 <= tagged <= len(self.sources):
            raise ConfigError(
                f"tagged_source: tagged_source out of range ({tagged} not in 1..{len(self.sources)})"
            )
        try:
            return Scenario(tuple(self.sources), self.q, self.discipline, tagged)
        except ValueError as exc:
            raise ConfigError(f"scenario: {exc}") from None


def _num(raw: dict, key: str, path: str, kind=float, default=None, required=False):
    if key not in raw or raw[key] is None:
        if required:
            raise ConfigError(f"{path}{key}: missing required field")
        return default
    val = raw[key]
    if isinstance(val, bool):
        raise ConfigError(f"{path}{key}: expected a number, got {val!r}")
    try:
        # YAML 1.1 reads "1e-12" as a string
        out = kind(float(val)) if kind is int else kind(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}{key}: expected a number, got {val!r}") from None
    if kind is int and float(val) != out:
        raise ConfigError(f"{path}{key}: expected an integer, got {val!r}")
    return out


def _section(raw: dict, key: str) -> dict:
    sec = raw.get(key)
    if sec is None:
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{key}: expected a mapping")
    return sec


def parse_config(raw: Any) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>: expected a mapping at the top level")
    srcs = raw.get("sources")
    if not isinstance(srcs, list) or not srcs:
        raise ConfigError("sources: expected a non-empty list of arrival probabilities")
    sources = []
    for i, v in enumerate(srcs):
        try:
            x = float(v)
        except (TypeError, ValueError):
            raise ConfigError(f"sources[{i}]: expected a number, got {v!r}") from None
        if not 0.0 <= x <= 1.0:
            raise ConfigError(f"sources[{i}]: probability {x} outside [0, 1]")
        sources.append(x)
    q = _num(raw, "q", "", required=True)
    if not 0.0 < q <= 1.0:
        raise ConfigError(f"q: service probability {q} outside (0, 1]")
    try:
        disc = Discipline.parse(raw.get("discipline", "npb"))
    except ValueError as exc:
        raise ConfigError(f"discipline: {exc}") from None
    tagged = _num(raw, "tagged_source", "", kind=int, default=1)

    s = _section(raw, "solver")
    solver = SolverConfig(
        tol=_num(s, "tol", "solver.", default=DEFAULT_TOL),
        max_iter=_num(s, "max_iter", "solver.", kind=int, default=DEFAULT_MAX_ITER),
    )
    if solver.tol <= 0:
        raise ConfigError("solver.tol: must be positive")
    s = _section(raw, "sim")
    sim = SimConfig(
        horizon=_num(s, "horizon", "sim.", kind=int, default=10**6),
        warmup=_num(s, "warmup", "sim.", kind=int, default=DEFAULT_WARMUP),
        seed=_num(s, "seed", "sim.", kind=int, default=0),
    )
    s = _section(raw, "search")
    search = SearchConfig(
        alpha=_num(s, "alpha", "search.", default=1.0),
        beta=_num(s, "beta", "search.", default=None),
        grid_step=_num(s, "grid_step", "search.", default=None),
    )
    return RunConfig(sources=sources, q=q, discipline=disc, tagged_source=tagged,
                     solver=solver, sim=sim, search=search)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"<file>: cannot read {path}: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(data)
    except yaml.YAMLError as exc:
        raise ConfigError(f"<file>: not valid YAML/JSON: {exc}") from None
    cfg = parse_config(raw)
    cfg.sha256 = hashlib.sha256(data).hexdigest()
    return cfg
