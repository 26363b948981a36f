"""Command-line entry point.

One binary with four subcommands (rate-sweep, simulate, concentration, sat),
each driven by a JSON config file with flag overrides; flags win. Every run
writes its artifacts plus a manifest.json under --out.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__, kernels
from .analysis import optimal_static_decision, rate_curve_to_csv, rate_sweep
from .arms import ArmSpec, ConfigError, Pareto, PowerCoupledReward, ZeroReset, arm_from_dict
from .estimators import beta_from_kappa, coverage_reports_to_csv, rate_deviation_bound_check
from .policies import (
    DecisionGrid,
    FixedPolicy,
    LubyPolicy,
    StaticOraclePolicy,
    UcbRbPolicy,
    UcbRmPolicy,
    ucb_rc_grid,
)
from .sim import monte_carlo_regret, regret_report_to_csv
from .satlab import (
    MetaExperimentConfig,
    arm_from_samples,
    bundled_instances,
    collect_completion_samples,
    generate_random_3sat,
    parse_dimacs,
    preset_grid,
)

POLICY_NAMES = ("static", "ucb-rb", "ucb-rm", "ucb-rc", "luby", "fixed")


def _check_keys(d: dict, allowed: set[str], path: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"{path}.{key}: unknown key")


def _need(d: dict, key: str, path: str):
    if key not in d:
        raise ConfigError(f"{path}.{key}: missing required key")
    return d[key]


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config: file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from None


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out: str, command: str, config: dict, inputs: dict[str, str]) -> None:
    manifest = {
        "command": command,
        "config": config,
        "inputs": {p: _sha256(p) for p in inputs.values() if os.path.exists(p)},
        "versions": {
            "restartbandits": __version__,
            "numpy": np.__version__,
            "kernel_impl": kernels.IMPL,
        },
    }
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _arms_from_config(cfg: dict, path: str = "arms") -> list[ArmSpec]:
    raw = _need(cfg, "arms", "config")
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}: must be a non-empty list")
    arms = [arm_from_dict(a, path=f"{path}[{i}]") for i, a in enumerate(raw)]
    labels = [a.label for a in arms]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"{path}: duplicate arm labels")
    return arms


def _grid_from_config(raw, path: str) -> DecisionGrid:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}: must be a non-empty list of cutoffs")
    cutoffs = tuple(math.inf if c in ("inf", None) else float(c) for c in raw)
    try:
        return DecisionGrid(cutoffs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _policy_factory(arms: list[ArmSpec], cfg: dict, tau: float, path: str = "policy"):
    """Returns (factory, reference_grid) for one horizon."""
    name = _need(cfg, "name", path)
    if name not in POLICY_NAMES:
        raise ConfigError(f"{path}.name: unknown policy {name!r}")
    allowed = {
        "static": {"name", "grid"},
        "fixed": {"name", "arm", "cutoff"},
        "luby": {"name", "arm", "base"},
        "ucb-rb": {"name", "grid", "alpha", "kappa", "init_pulls", "use_union"},
        "ucb-rm": {"name", "grid", "alpha", "kappa", "init_pulls"},
        "ucb-rc": {"name", "t_min", "t_max", "q", "alpha", "kappa", "init_pulls"},
    }[name]
    _check_keys(cfg, allowed, path)
    alpha = float(cfg.get("alpha", 2.01))
    kappa = float(cfg.get("kappa", 1.01))
    init_pulls = int(cfg.get("init_pulls", 1))
    if name == "fixed":
        arm = int(_need(cfg, "arm", path))
        cutoff = _need(cfg, "cutoff", path)
        cutoff = math.inf if cutoff in ("inf", None) else float(cutoff)
        return (lambda: FixedPolicy(arm, cutoff)), DecisionGrid((cutoff,))
    if name == "luby":
        arm = int(_need(cfg, "arm", path))
        base = float(_need(cfg, "base", path))
        return (lambda: LubyPolicy(arm, base)), DecisionGrid((base,))
    if name == "ucb-rc":
        t_min = float(_need(cfg, "t_min", path))
        t_max = float(_need(cfg, "t_max", path))
        grid = ucb_rc_grid(t_min, t_max, tau, float(cfg.get("q", 2.0)))
        return (
            lambda: UcbRbPolicy(arms, grid, alpha, kappa, init_pulls)
        ), grid
    grid = _grid_from_config(_need(cfg, "grid", path), f"{path}.grid")
    if name == "static":
        return (lambda: StaticOraclePolicy(arms, grid.cutoffs)), grid
    if name == "ucb-rb":
        use_union = bool(cfg.get("use_union", True))
        return (
            lambda: UcbRbPolicy(arms, grid, alpha, kappa, init_pulls, use_union)
        ), grid
    return (lambda: UcbRmPolicy(arms, grid, alpha, kappa, init_pulls)), grid


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

_RATE_SWEEP_DEFAULTS = {
    "pareto": {"scale": 1.0, "shape": 1.2},
    "gammas": [-1.0, 0.0, 0.5, 1.0],
    "grid": {"start": 0.1, "stop": 31.6227766016838, "num": 60, "log": True},
}


def cmd_rate_sweep(args) -> int:
    cfg = {**_RATE_SWEEP_DEFAULTS, **_load_config(args.config)}
    _check_keys(cfg, {"pareto", "gammas", "grid", "omega"}, "config")
    par = cfg["pareto"]
    _check_keys(par, {"scale", "shape"}, "config.pareto")
    dist = Pareto(float(par.get("scale", 1.0)), float(par.get("shape", 1.2)))
    g = cfg["grid"]
    _check_keys(g, {"start", "stop", "num", "log"}, "config.grid")
    if g.get("log", True):
        grid = np.geomspace(float(g["start"]), float(g["stop"]), int(g["num"]))
    else:
        grid = np.linspace(float(g["start"]), float(g["stop"]), int(g["num"]))
    gammas = cfg["gammas"]
    gmax = max((abs(float(x)) for x in gammas), default=1.0)
    # default omega keeps the reward cap inactive over the sweep grid
    omega = float(cfg.get("omega", min(1.0, float(grid[-1]) ** -gmax)))
    os.makedirs(args.out, exist_ok=True)
    summary = [["gamma", "t_star", "rate_star"]]
    for gamma in gammas:
        gamma = float(gamma)
        arm = ArmSpec(dist, PowerCoupledReward(omega, gamma), ZeroReset(),
                      label=f"gamma={gamma:g}")
        curve = rate_sweep(arm, grid)
        fname = os.path.join(args.out, f"rate_sweep_gamma_{gamma:g}.csv")
        rate_curve_to_csv(curve, fname)
        i = curve.argmax_index
        summary.append([f"{gamma:g}", repr(float(curve.grid[i])), repr(float(curve.rates[i]))])
    with open(os.path.join(args.out, "rate_sweep_summary.csv"), "w") as fh:
        fh.write("\n".join(",".join(map(str, row)) for row in summary) + "\n")
    _write_manifest(args.out, "rate-sweep", cfg,
                    {"config": args.config} if args.config else {})
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(
        cfg,
        {"arms", "policy", "horizons", "replications", "seed", "reference_grid"},
        "config",
    )
    arms = _arms_from_config(cfg)
    policy_cfg = dict(_need(cfg, "policy", "config"))
    if args.policy:
        policy_cfg["name"] = args.policy
    horizons = [float(h) for h in _need(cfg, "horizons", "config")]
    if not horizons:
        raise ConfigError("config.horizons: must be non-empty")
    replications = int(cfg.get("replications", 100))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    os.makedirs(args.out, exist_ok=True)
    rows = []
    r_star_last = 0.0
    for h, tau in enumerate(horizons):
        factory, ref_grid = _policy_factory(arms, policy_cfg, tau)
        if "reference_grid" in cfg:
            ref_grid = _grid_from_config(cfg["reference_grid"], "config.reference_grid")
        r_star_last = optimal_static_decision(arms, ref_grid.cutoffs).rate
        report = monte_carlo_regret(
            arms, factory, [tau], replications, seed, r_star_last
        )
        rows.extend(report.rows)
    from .sim import RegretReport

    regret_report_to_csv(
        RegretReport(r_star=r_star_last, rows=tuple(rows)),
        os.path.join(args.out, "regret_report.csv"),
    )
    _write_manifest(args.out, "simulate", cfg,
                    {"config": args.config} if args.config else {})
    return 0


def cmd_concentration(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(
        cfg,
        {"arm", "t", "estimators", "ns", "deltas", "kappa", "replications", "seed"},
        "config",
    )
    arm = arm_from_dict(_need(cfg, "arm", "config"), path="config.arm")
    t = float(_need(cfg, "t", "config"))
    estimators = cfg.get("estimators", ["bernstein", "median"])
    ns = [int(n) for n in _need(cfg, "ns", "config")]
    deltas = [float(d) for d in cfg.get("deltas", [0.01])]
    beta = beta_from_kappa(float(cfg.get("kappa", 1.01)))
    replications = int(cfg.get("replications", 2000))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    os.makedirs(args.out, exist_ok=True)
    reports = []
    for kind in estimators:
        for n in ns:
            for delta in deltas:
                rng = np.random.default_rng(
                    np.random.SeedSequence(seed, spawn_key=(hash(kind) & 0xFFFF, n))
                )
                reports.append(
                    rate_deviation_bound_check(
                        arm, t, n, delta, beta, kind=kind,
                        replications=replications, rng=rng,
                    )
                )
    coverage_reports_to_csv(reports, os.path.join(args.out, "coverage.csv"))
    _write_manifest(args.out, "concentration", cfg,
                    {"config": args.config} if args.config else {})
    return 0


def cmd_sat(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(
        cfg,
        {"instances", "noise", "cap", "reps", "grid_i_max", "taus",
         "luby_bases", "fixed_cutoffs", "policies", "replications", "seed"},
        "config",
    )
    inst_cfg = cfg.get("instances", {"kind": "bundled"})
    kind = _need(inst_cfg, "kind", "config.instances")
    input_files = {}
    if kind == "bundled":
        _check_keys(inst_cfg, {"kind"}, "config.instances")
        formulas = bundled_instances()
    elif kind == "generate":
        _check_keys(inst_cfg, {"kind", "n_vars", "n_clauses", "count", "seed"},
                    "config.instances")
        count = int(inst_cfg.get("count", 10))
        base = int(inst_cfg.get("seed", 0))
        formulas = [
            generate_random_3sat(
                int(_need(inst_cfg, "n_vars", "config.instances")),
                int(_need(inst_cfg, "n_clauses", "config.instances")),
                base + i,
            )
            for i in range(count)
        ]
    elif kind == "files":
        _check_keys(inst_cfg, {"kind", "paths"}, "config.instances")
        formulas = []
        for p in _need(inst_cfg, "paths", "config.instances"):
            if not os.path.exists(p):
                raise ConfigError(f"config.instances.paths: missing file {p}")
            input_files[p] = p
            with open(p) as fh:
                formulas.append(parse_dimacs(fh.read()))
    else:
        raise ConfigError(f"config.instances.kind: unknown kind {kind!r}")

    noise = args.noise if args.noise is not None else float(cfg.get("noise", 0.5))
    cap = int(cfg.get("cap", 10**5))
    reps = int(cfg.get("reps", 20))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    samples = collect_completion_samples(formulas, noise, cap, reps, rng)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "samples.csv"), "w") as fh:
        fh.write("flips\n")
        fh.writelines(f"{int(x)}\n" for x in samples.flips)

    arm = arm_from_samples(samples)
    grid = preset_grid(samples, i_max=int(cfg.get("grid_i_max", 8)))
    scale = float(np.median(np.asarray(samples.flips)))
    taus = [float(t) for t in cfg.get("taus", [scale * 50, scale * 200, scale * 1000])]
    luby_bases = [float(b) for b in cfg.get("luby_bases",
                                            [grid.cutoffs[0], scale, grid.cutoffs[-1]])]
    fixed_cutoffs = [float(c) for c in cfg.get("fixed_cutoffs", grid.cutoffs)]
    policies = cfg.get("policies", ["ucb-rb", "luby", "fixed"])
    replications = int(cfg.get("replications", 20))
    r_star = optimal_static_decision([arm], grid.cutoffs).rate

    specs = []
    for name in policies:
        if name == "ucb-rb":
            specs.append(("ucb-rb", lambda: UcbRbPolicy([arm], grid)))
        elif name == "luby":
            for b in luby_bases:
                specs.append((f"luby[{b:g}]", lambda b=b: LubyPolicy(0, b)))
        elif name == "fixed":
            for c in fixed_cutoffs:
                specs.append((f"fixed[{c:g}]", lambda c=c: FixedPolicy(0, c)))
        else:
            raise ConfigError(f"config.policies: unknown policy {name!r}")

    from .sim import RegretReport, RegretRow

    rows = []
    for label, factory in specs:
        report = monte_carlo_regret([arm], factory, taus, replications,
                                    seed + 1, r_star)
        for r in report.rows:
            rows.append(RegretRow(r.tau, label, r.mean_reward, r.stderr,
                                  r.pseudo_regret, r.replications))
    regret_report_to_csv(
        RegretReport(r_star=r_star, rows=tuple(rows)),
        os.path.join(args.out, "sat_report.csv"),
    )
    _write_manifest(args.out, "sat", cfg, input_files)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="restartbandits",
        description="Time-constrained bandit experiments with controlled restarts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")

    p = sub.add_parser("rate-sweep", help="reward-rate curves over cutoff grids")
    common(p)
    p.set_defaults(func=cmd_rate_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo policy regret report")
    common(p)
    p.add_argument("--policy", choices=POLICY_NAMES, help="override config policy name")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("concentration", help="rate-deviation coverage harness")
    common(p)
    p.set_defaults(func=cmd_concentration)

    p = sub.add_parser("sat", help="WalkSAT restart meta-experiment")
    common(p)
    p.add_argument("--noise", type=float, default=None, help="WalkSAT noise override")
    p.set_defaults(func=cmd_sat)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
