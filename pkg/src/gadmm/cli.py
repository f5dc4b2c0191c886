"""Config-driven experiment runner.

Subcommands:

* ``run``     -- one algorithm on one dataset; writes a trace CSV and a
  summary JSON line.  Exit code 0 when the target error was reached, 2
  when the iteration budget ran out.
* ``cdf``     -- repeat a run over freshly sampled topologies and tabulate
  the total communication cost per trial.
* ``compare`` -- run several configs that share a task and data seed, and
  print an aligned summary table.

Configs are JSON; command-line flags override config keys.  The last line
printed to stdout is always a machine-readable JSON summary.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .baselines import run_admm_ps, run_gd
from .data import gen_synthetic, load_csv, partition_even
from .dynamic import Chain, RefreshPolicy, build_chain, run_dgadmm
from .engine import GadmmConfig, assign_groups, run_gadmm
from .metrics import TcPolicy, TraceWriter
from .topology import EnergyModel, center_worker, cost_matrix, random_placement

ALGORITHMS = ("gadmm", "dgadmm", "admm_ps", "gd")
TASKS = ("linear", "logistic")


class ConfigError(ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def _require(cfg, field, types, default=None, required=False):
    if field not in cfg:
        if required:
            raise ConfigError(field, "missing required field")
        return default
    value = cfg[field]
    if not isinstance(value, types):
        raise ConfigError(field, f"expected {types}, got {type(value).__name__}")
    return value


def parse_config(raw: dict) -> dict:
    """Validate a raw config dict into a normalized one."""
    algorithm = _require(raw, "algorithm", str, required=True)
    if algorithm not in ALGORITHMS:
        raise ConfigError("algorithm", f"must be one of {ALGORITHMS}")
    task = _require(raw, "task", str, required=True)
    if task not in TASKS:
        raise ConfigError("task", f"must be one of {TASKS}")
    n_workers = _require(raw, "n_workers", int, required=True)
    if n_workers < 2:
        raise ConfigError("n_workers", "must be >= 2")

    cfg = {
        "algorithm": algorithm,
        "task": task,
        "n_workers": n_workers,
        "rho": _require(raw, "rho", (int, float), default=1.0),
        "target_error": _require(raw, "target_error", (int, float), default=1e-4),
        "max_iters": _require(raw, "max_iters", int, default=5000),
        "inner_tol": _require(raw, "inner_tol", (int, float), default=1e-10),
        "seed": _require(raw, "seed", int, default=0),
        "area_side": _require(raw, "area_side", (int, float), default=10.0),
        "out": _require(raw, "out", str, default="trace.csv"),
    }
    if cfg["rho"] <= 0:
        raise ConfigError("rho", "must be positive")
    if cfg["max_iters"] < 1:
        raise ConfigError("max_iters", "must be >= 1")

    if algorithm == "dgadmm":
        cfg["tau"] = _require(raw, "tau", int, default=15)
        if cfg["tau"] < 1:
            raise ConfigError("tau", "must be >= 1")
        cfg["handover_duals"] = _require(raw, "handover_duals", bool, default=False)
        cfg["rebuild_cost_rounds"] = _require(raw, "rebuild_cost_rounds", int, default=4)
        cfg["moving"] = _require(raw, "moving", bool, default=False)
    elif "tau" in raw:
        raise ConfigError("tau", f"only valid for dgadmm, not {algorithm}")

    if algorithm == "gd":
        cfg["step_size"] = _require(raw, "step_size", (int, float), default=None)
        if cfg["step_size"] is not None and cfg["step_size"] <= 0:
            raise ConfigError("step_size", "must be positive")
    elif "step_size" in raw:
        raise ConfigError("step_size", f"only valid for gd, not {algorithm}")

    cm = raw.get("cost_model", "unit")
    if cm == "unit":
        cfg["cost_model"] = "unit"
    elif isinstance(cm, dict) and cm.get("kind") == "energy":
        cfg["cost_model"] = EnergyModel(
            bandwidth_hz=float(cm.get("bandwidth_hz", 2e6)),
            noise_density=float(cm.get("noise_density", 1e-6)),
            rate_bps=float(cm.get("rate_bps", 1e7)),
        )
    else:
        raise ConfigError("cost_model", "must be 'unit' or {kind: 'energy', ...}")

    ds = _require(raw, "dataset", dict, required=True)
    source = ds.get("source")
    if source == "synthetic":
        cfg["dataset"] = {
            "source": "synthetic",
            "m": int(ds.get("m", 1200)),
            "d": int(ds.get("d", 50)),
        }
        if cfg["dataset"]["m"] < n_workers:
            raise ConfigError("dataset.m", "need at least one sample per worker")
    elif source == "csv":
        path = ds.get("path")
        if not path:
            raise ConfigError("dataset.path", "missing path for csv source")
        if not os.path.exists(path):
            raise ConfigError("dataset.path", f"no such file: {path}")
        cfg["dataset"] = {
            "source": "csv",
            "path": path,
            "standardize": bool(ds.get("standardize", False)),
        }
    else:
        raise ConfigError("dataset.source", "must be 'synthetic' or 'csv'")
    return cfg


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("config", f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"invalid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return parse_config(raw)


def _make_shards(cfg):
    ds_cfg = cfg["dataset"]
    if ds_cfg["source"] == "synthetic":
        ds = gen_synthetic(cfg["task"], ds_cfg["m"], ds_cfg["d"], cfg["seed"])
    else:
        ds = load_csv(ds_cfg["path"], cfg["task"])
        if ds_cfg["standardize"]:
            ds = ds.standardized()
        if ds.n_samples < cfg["n_workers"]:
            raise ConfigError("n_workers", "more workers than samples in the file")
    return partition_even(ds, cfg["n_workers"])


def _make_topology(cfg, trial_seed=None):
    """Placement and cost matrix for one run (or one CDF trial)."""
    seed = cfg["seed"] if trial_seed is None else trial_seed
    placement = random_placement(cfg["n_workers"], cfg["area_side"], [seed, 2])
    cost = cost_matrix(placement, cfg["cost_model"])
    return placement, cost


def _initial_chain(cfg, cost) -> Chain:
    """Greedy chain on the link costs with the odd-id head split.

    Under unit costs every candidate ties, so the smallest-id rule yields
    the identity chain 1-2-...-N.
    """
    n = cfg["n_workers"]
    groups = assign_groups(n)
    heads = {w for w, g in zip(range(1, n + 1), groups) if g == "head"}
    tails = set(range(1, n + 1)) - heads
    return build_chain(cost, heads, tails)


def _execute(cfg, sink=None, trial_seed=None):
    """Dispatch one configured run; returns the run object and extras."""
    shards = _make_shards(cfg)
    placement, cost = _make_topology(cfg, trial_seed)
    engine_cfg = GadmmConfig(
        rho=float(cfg["rho"]),
        max_iters=cfg["max_iters"],
        target_error=float(cfg["target_error"]),
        inner_tol=float(cfg["inner_tol"]),
        seed=cfg["seed"] if trial_seed is None else trial_seed,
    )
    algorithm = cfg["algorithm"]
    if algorithm == "gadmm":
        chain = _initial_chain(cfg, cost)
        return run_gadmm(
            shards, engine_cfg, chain_order=list(chain.order), cost=cost, sink=sink
        )
    if algorithm == "dgadmm":
        policy = RefreshPolicy(
            tau=cfg["tau"],
            handover_duals=cfg["handover_duals"],
            rebuild_cost_rounds=cfg["rebuild_cost_rounds"],
        )
        chain = _initial_chain(cfg, cost)
        if cfg.get("moving"):
            n, area, model = cfg["n_workers"], cfg["area_side"], cfg["cost_model"]
            base_seed = engine_cfg.seed

            def cost_provider(epoch):
                if epoch == 0:
                    return cost
                moved = random_placement(n, area, [base_seed, 2, epoch])
                return cost_matrix(moved, model)

        else:
            cost_provider = cost
        return run_dgadmm(
            shards, engine_cfg, policy, cost_provider=cost_provider,
            chain=chain, sink=sink,
        )
    center = None if cfg["cost_model"] == "unit" else center_worker(placement)
    tc_policy = TcPolicy(mode="centralized")
    if algorithm == "admm_ps":
        return run_admm_ps(
            shards, engine_cfg, center=center, cost=cost, tc_policy=tc_policy,
            sink=sink,
        )
    return run_gd(
        shards, engine_cfg, step_size=cfg.get("step_size"), center=center,
        cost=cost, tc_policy=tc_policy, sink=sink,
    )


def _summary(cfg, run, wall_s):
    last = run.trace[-1]
    final_acv = last.acv
    final_err = last.objective_error
    return {
        "algorithm": cfg["algorithm"],
        "task": cfg["task"],
        "n_workers": cfg["n_workers"],
        "converged": run.converged,
        "iterations": run.iterations,
        "final_tc": run.total_tc,
        "final_acv": final_acv,
        "final_objective_error": final_err,
        "wall_s": wall_s,
    }


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = args.out or cfg["out"]
    t0 = time.perf_counter()
    with TraceWriter(out) as sink:
        run = _execute(cfg, sink=sink)
    summary = _summary(cfg, run, time.perf_counter() - t0)
    summary["trace"] = out
    if not args.quiet:
        print(
            f"{cfg['algorithm']} on {cfg['task']} (N={cfg['n_workers']}): "
            f"{'converged' if run.converged else 'hit max_iters'} after "
            f"{run.iterations} iterations, TC={run.total_tc:.6g}, "
            f"ACV={summary['final_acv']:.3g}, trace -> {out}"
        )
    print(json.dumps(summary))
    return 0 if run.converged else 2


def cmd_cdf(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    trials = args.trials
    if trials < 1:
        print("config error: trials: must be >= 1", file=sys.stderr)
        return 1
    out = args.out or "cdf.csv"
    master = np.random.default_rng(cfg["seed"])
    trial_seeds = [int(s) for s in master.integers(0, 2**31 - 1, size=trials)]
    rows = []
    t0 = time.perf_counter()
    for t, seed in enumerate(trial_seeds):
        run = _execute(cfg, trial_seed=seed)
        rows.append((t, seed, run.converged, run.iterations, run.total_tc))
    with open(out, "w") as fh:
        fh.write("trial,seed,converged,iterations,tc\n")
        for t, seed, conv, iters, tc in rows:
            fh.write(f"{t},{seed},{str(conv).lower()},{iters},{tc!r}\n")
    n_conv = sum(1 for r in rows if r[2])
    if not args.quiet:
        tcs = sorted(r[4] for r in rows if r[2])
        med = tcs[len(tcs) // 2] if tcs else float("nan")
        print(
            f"{cfg['algorithm']}: {n_conv}/{trials} trials converged, "
            f"median TC={med:.6g}, table -> {out}"
        )
    print(
        json.dumps(
            {
                "algorithm": cfg["algorithm"],
                "trials": trials,
                "converged_trials": n_conv,
                "table": out,
                "wall_s": time.perf_counter() - t0,
            }
        )
    )
    return 0


def cmd_compare(args) -> int:
    if len(args.configs) < 2:
        print("config error: configs: need at least two", file=sys.stderr)
        return 1
    cfgs = [load_config(p) for p in args.configs]
    tasks = {c["task"] for c in cfgs}
    if len(tasks) != 1:
        raise ConfigError("task", f"configs must share one task, got {sorted(tasks)}")
    seeds = {c["seed"] for c in cfgs}
    if args.seed is not None:
        for c in cfgs:
            c["seed"] = args.seed
    elif len(seeds) != 1:
        raise ConfigError("seed", "configs must share the data seed (or pass --seed)")
    results = []
    for c in cfgs:
        t0 = time.perf_counter()
        run = _execute(c)
        results.append(_summary(c, run, time.perf_counter() - t0))
    if not args.quiet:
        print(f"{'algorithm':<10} {'converged':<10} {'iterations':<11} {'tc':<14} {'final_error':<12}")
        for r in results:
            print(
                f"{r['algorithm']:<10} {str(r['converged']).lower():<10} "
                f"{r['iterations']:<11} {r['final_tc']:<14.6g} "
                f"{r['final_objective_error']:<12.3g}"
            )
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("algorithm,converged,iterations,tc,final_objective_error\n")
            for r in results:
                fh.write(
                    f"{r['algorithm']},{str(r['converged']).lower()},"
                    f"{r['iterations']},{r['final_tc']!r},"
                    f"{r['final_objective_error']!r}\n"
                )
    print(json.dumps({"compare": results}))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gadmm", description="Chain-ADMM experiment runner"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured experiment")
    p_run.add_argument("--config", required=True, help="JSON config path")
    p_run.add_argument("--out", default=None, help="trace CSV path")
    p_run.add_argument("--seed", type=int, default=None, help="override config seed")
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_cdf = sub.add_parser("cdf", help="TC distribution over random topologies")
    p_cdf.add_argument("--config", required=True)
    p_cdf.add_argument("--trials", type=int, default=100)
    p_cdf.add_argument("--out", default=None, help="per-trial table path")
    p_cdf.add_argument("--seed", type=int, default=None)
    p_cdf.add_argument("--quiet", action="store_true")
    p_cdf.set_defaults(func=cmd_cdf)

    p_cmp = sub.add_parser("compare", help="aligned summary of several configs")
    p_cmp.add_argument("--config", dest="configs", action="append", required=True,
                       help="repeatable; one JSON config per algorithm")
    p_cmp.add_argument("--out", default=None, help="summary CSV path")
    p_cmp.add_argument("--seed", type=int, default=None)
    p_cmp.add_argument("--quiet", action="store_true")
    p_cmp.set_defaults(func=cmd_compare)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
