"""
Command-line front end.

    dtaoi analyze CONFIG [--source K] [--tail-eps E] [--out PATH] [--format csv|json]
    dtaoi simulate CONFIG [--slots N] [--seed S] [--warmup W] [--source K] [--compare] [--out PATH]
    dtaoi optimize CONFIG [--alpha A] [--beta B] [--step S] [--table PATH]
    dtaoi reproduce [--only tables|figures|trace] [--q Q ...] [--slots N] [--out-dir DIR]

Exit codes: 0 ok, 1 reproduction mismatch, 2 config/usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analyzer import analyze, cdf_table
from .config import ConfigError, RunConfig, load_config
from .errors import DtaoiError
from .optimizer import EmptyGridError, SearchSpec, grid_search
from .reproduce import check_sample_trace, figure_validation, ks_distance, reproduce_optima, KS_BUDGET
from .simulator import simulate

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("dtaoi")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """17 significant digits; round-trips a double."""
    return format(float(x), ".17g")


def _header(cfg: RunConfig, extra: dict) -> dict:
    return {
        "tool": f"dtaoi {__version__}",
        "config_sha256": cfg.sha256,
        "solver_tol": cfg.solver.tol,
        "solver_max_iter": cfg.solver.max_iter,
        **extra,
    }


def _write(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def _csv(meta: dict, columns, rows, int_first: bool = True) -> str:
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(str(int(v)) if i == 0 and int_first else fmt(v)
                              for i, v in enumerate(row)))
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    sc = cfg.scenario(args.source)
    res = analyze(sc, tol=cfg.solver.tol, max_iter=cfg.solver.max_iter)
    table = cdf_table(res, args.tail_eps)
    meta = _header(cfg, {
        "discipline": sc.discipline.value,
        "q": sc.q,
        "sources": list(sc.p),
        "source": sc.tagged_source,
        "tail_eps": args.tail_eps,
        "mean_aoi": res.mean_aoi,
        "mean_paoi": res.mean_paoi,
        "var_aoi": res.var_aoi,
        "var_paoi": res.var_paoi,
        "solver": res.solver_meta,
    })
    cols = ["ell", "aoi_pmf", "aoi_cdf", "paoi_pmf", "paoi_cdf"]
    if args.format == "json":
        body = {"metadata": meta, "columns": cols,
                "rows": [[int(r[0])] + [float(v) for v in r[1:]] for r in table]}
        text = json.dumps(body, indent=1) + "\n"
    else:
        meta = {k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in meta.items()}
        text = _csv(meta, cols, table)
    _write(args.out, text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    slots = cfg.sim.horizon if args.slots is None else args.slots
    seed = cfg.sim.seed if args.seed is None else args.seed
    warmup = cfg.sim.warmup if args.warmup is None else args.warmup
    if slots <= 0:
        raise ConfigError("--slots: must be a positive number of slots")
    if warmup < 0 or warmup >= slots:
        raise ConfigError(f"sim.warmup: need 0 <= warmup < slots (warmup={warmup}, slots={slots})")
    sc = cfg.scenario(args.source)
    stats = simulate(sc, slots, seed=seed, warmup_slots=warmup)
    n = sc.tagged_source
    a, p = stats.aoi_pmf(n), stats.paoi_pmf(n)
    L = max(len(a), len(p))
    a, p = np.pad(a, (0, L - len(a))), np.pad(p, (0, L - len(p)))
    cols = ["ell", "aoi_pmf", "aoi_cdf", "paoi_pmf", "paoi_cdf"]
    data = [np.arange(L), a, np.cumsum(a), p, np.cumsum(p)]
    meta = _header(cfg, {"discipline": sc.discipline.value, "q": sc.q, "sources": list(sc.p),
                         "source": n, "slots": slots, "warmup": warmup, "seed": seed})
    if args.compare:
        res = analyze(sc, tol=cfg.solver.tol, max_iter=cfg.solver.max_iter)
        ks_a = ks_distance(stats.aoi_pmf(n), res.aoi)
        ks_p = ks_distance(stats.paoi_pmf(n), res.paoi)
        cols += ["aoi_cdf_exact", "paoi_cdf_exact"]
        data += [[res.aoi.cdf_at(l) for l in range(L)], [res.paoi.cdf_at(l) for l in range(L)]]
        meta.update(ks_aoi=ks_a, ks_paoi=ks_p)
        print(f"source {n}: max|F_emp - F_exact| AoI={ks_a:.4f} PAoI={ks_p:.4f}", file=sys.stderr)
    meta = {k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in meta.items()}
    _write(args.out, _csv(meta, cols, np.column_stack(data)))
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    alpha = cfg.search.alpha if args.alpha is None else args.alpha
    beta = cfg.search.beta if args.beta is None else args.beta
    step = cfg.search.grid_step if args.step is None else args.step
    try:
        spec = SearchSpec(q=cfg.q, alpha=alpha, beta=beta, discipline=cfg.discipline, grid_step=step)
    except ValueError as exc:
        raise ConfigError(f"search: {exc}") from None
    res = grid_search(spec)
    print(res.summary())
    if args.table:
        meta = _header(cfg, {"discipline": spec.discipline.value, "q": spec.q, "alpha": alpha,
                             "beta": beta, "grid_step": spec.grid_step,
                             "tie_break": "larger p1, then larger p2"})
        _write(args.table, _csv(meta, ["p1", "p2", "mean_aoi_1", "mean_aoi_2", "cost"],
                                res.table, int_first=False))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    parts = [args.only] if args.only else ["trace", "tables", "figures"]
    failures = 0

    if "trace" in parts:
        for disc, bad in check_sample_trace().items():
            print(f"[trace] {disc}: {'match' if not bad else f'{len(bad)} mismatches'}")
            for line in bad:
                print(f"    {line}")
            failures += bool(bad)

    if "tables" in parts:
        for constrained in (False, True):
            label = "constrained" if constrained else "unconstrained"
            rows = reproduce_optima(constrained, qs=args.q,
                                    progress=lambda s: print(f"[tables] {s}", file=sys.stderr))
            for r in rows:
                d = 3 if constrained else 2
                status = "ok" if r["ok"] else "MISMATCH"
                print(f"[{label}] q={r['q']} alpha={r['alpha']} {r['discipline'].value}: "
                      f"p1*={r['p1_found']:.{d}f} p2*={r['p2_found']:.{d}f} C*={r['cost_found']:.1f} "
                      f"(reference {r['p1']:.{d}f} {r['p2']:.{d}f} {r['cost']:.1f}) {status}")
                failures += not r["ok"]
            if out_dir:
                cols = ["q", "alpha", "beta", "discipline", "p1", "p2", "cost",
                        "p1_found", "p2_found", "cost_found", "ok"]
                lines = [",".join(cols)]
                for r in rows:
                    lines.append(",".join(str(r[c].value if c == "discipline" else r[c]) for c in cols))
                (out_dir / f"optimum_{label}.csv").write_text("\n".join(lines) + "\n")

    if "figures" in parts:
        rows = figure_validation(slots=args.slots, seed=args.seed)
        for r in rows:
            ok = r["ks_aoi"] <= KS_BUDGET and r["ks_paoi"] <= KS_BUDGET
            print(f"[figures] load={r['load']} {r['discipline']} source {r['source']}: "
                  f"KS AoI={r['ks_aoi']:.4f} PAoI={r['ks_paoi']:.4f} "
                  f"({r['n_peaks']} peaks) {'ok' if ok else 'OVER BUDGET'}")
            failures += not ok

    print(f"{failures} check(s) failed" if failures else "all checks passed")
    return EXIT_MISMATCH if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dtaoi", description=__doc__.split("\n\n")[0].strip())
    ap.add_argument("--version", action="version", version=f"dtaoi {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="exact AoI/PAoI pmf and cdf table")
    a.add_argument("config")
    a.add_argument("--source", type=int, help="1-based source index (default: tagged_source)")
    a.add_argument("--tail-eps", type=float, default=1e-6)
    a.add_argument("--out")
    a.add_argument("--format", choices=("csv", "json"), default="csv")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="slot-level simulation")
    s.add_argument("config")
    s.add_argument("--slots", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--warmup", type=int)
    s.add_argument("--source", type=int)
    s.add_argument("--compare", action="store_true", help="add exact cdf columns and KS distance")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    o = sub.add_parser("optimize", help="grid search of the two-source weighted cost")
    o.add_argument("config")
    o.add_argument("--alpha", type=float)
    o.add_argument("--beta", type=float)
    o.add_argument("--step", type=float)
    o.add_argument("--table", help="write the full evaluated grid here")
    o.set_defaults(func=cmd_optimize)

    r = sub.add_parser("reproduce", help="recompute the reference tables, cdf checks and trace")
    r.add_argument("--only", choices=("tables", "figures", "trace"))
    r.add_argument("--q", type=float, nargs="+", help="restrict tables to these q values")
    r.add_argument("--slots", type=int, default=10**6)
    r.add_argument("--seed", type=int, default=2021)
    r.add_argument("--out-dir")
    r.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, EmptyGridError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DtaoiError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
