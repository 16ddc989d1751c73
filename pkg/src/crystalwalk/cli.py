"""Command-line front end: configuration, subcommands, verify runner.

Weights cross the CLI boundary as exact comma-separated rationals
("1/2,1/2,-1/2"), never as floats; fundamental weights abbreviate to
``wK`` and minuscule-type sums to ``w1+w3+w4``.  All machine-readable
outputs carry metadata (package version, seed, budgets) so runs can be
replayed bit-identically.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__, counting, markov, montecarlo, verify
from .crystal import decompose_tensor_power, minuscule_crystal
from .errors import ConfigError, CrystalWalkError
from .rootsystem import (
    build_root_system,
    format_weight,
    minuscule_indices,
    parse_weight,
    spec_to_dict,
)
from .spectral import make_params

# -- configuration -------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Round-trippable run configuration; flags override file values."""

    cartan_type: str = "A"
    rank: int = 1
    delta: str = "w1"
    t: list = field(default_factory=lambda: [0.5])
    gauge: str = "sum1"
    seed: int = 42
    out: str | None = None
    fmt: str = "json"
    word_budget: int = 10_000_000
    vertex_budget: int = 200_000
    dp_horizon: int = 400
    kernel_window: int = 4
    mc_n: int = 100_000
    mc_horizon: int = 10_000

    def validate(self) -> "ExperimentConfig":
        if self.rank < 1:
            raise ConfigError(f"rank: must be >= 1, got {self.rank}")
        for name in ("word_budget", "vertex_budget", "dp_horizon", "kernel_window",
                     "mc_n", "mc_horizon"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be positive, got {getattr(self, name)}")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"fmt: must be 'json' or 'csv', got {self.fmt!r}")
        if any(float(v) <= 0 for v in self.t):
            raise ConfigError(f"t: entries must be positive, got {self.t}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
        return cls(**data).validate()


def load_config(path: str) -> ExperimentConfig:
    text = Path(path).read_bytes()
    if path.endswith(".toml"):
        try:
            import tomllib  # Python >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        data = tomllib.loads(text.decode())
    else:
        data = json.loads(text)
    return ExperimentConfig.from_dict(data)


def _resolve_delta(spec, delta_text: str):
    """'w1' -> fundamental, '1,0,0' -> explicit weight; errors name the table."""
    delta_text = delta_text.strip()
    if "+" in delta_text:
        raise ConfigError(
            "minuscule-type sums are only accepted by the minuscule-type "
            "commands; give a single wK here"
        )
    if delta_text.startswith("w"):
        k = int(delta_text[1:])
        return spec.fundamental(k)
    return parse_weight(delta_text)


def _require_minuscule(spec, delta):
    from .rootsystem import is_minuscule

    if not is_minuscule(spec, delta):
        allowed = ", ".join(f"w{k}" for k in minuscule_indices(spec))
        raise ConfigError(
            f"delta = {format_weight(delta)} is not minuscule for "
            f"{spec.cartan_type}{spec.rank}; the minuscule table allows: {allowed}"
        )


def _metadata(cfg: ExperimentConfig) -> dict:
    return {
        "version": __version__,
        "seed": cfg.seed,
        "budgets": {
            "word_budget": cfg.word_budget,
            "vertex_budget": cfg.vertex_budget,
            "dp_horizon": cfg.dp_horizon,
            "mc_n": cfg.mc_n,
            "mc_horizon": cfg.mc_horizon,
        },
    }


def _emit(payload: dict, cfg: ExperimentConfig) -> None:
    text = json.dumps(payload, indent=2, default=str)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {cfg.out}")
    else:
        print(text)


def _params_from_cfg(cfg: ExperimentConfig):
    spec = build_root_system(cfg.cartan_type, cfg.rank)
    delta = _resolve_delta(spec, cfg.delta)
    _require_minuscule(spec, delta)
    crystal = minuscule_crystal(spec, delta)
    t = [float(v) for v in cfg.t]
    if len(t) != spec.rank:
        raise ConfigError(f"t: expected {spec.rank} entries, got {len(t)}")
    return spec, crystal, make_params(spec, crystal, t, gauge=cfg.gauge)


# -- subcommand handlers --------------------------------------------------------


def cmd_roots(cfg: ExperimentConfig) -> int:
    spec = build_root_system(cfg.cartan_type, cfg.rank)
    payload = {"metadata": _metadata(cfg), **spec_to_dict(spec)}
    _emit(payload, cfg)
    return 0


def cmd_crystal_build(cfg: ExperimentConfig) -> int:
    spec = build_root_system(cfg.cartan_type, cfg.rank)
    delta = _resolve_delta(spec, cfg.delta)
    _require_minuscule(spec, delta)
    crystal = minuscule_crystal(spec, delta)
    edges = []
    for v in range(crystal.dim):
        for i0, tgt in enumerate(crystal.f_action[v]):
            if tgt is not None:
                edges.append({"from": v, "to": tgt, "i": i0 + 1})
    payload = {
        "metadata": _metadata(cfg),
        "delta": format_weight(delta),
        "vertices": [
            {"id": v, "weight": format_weight(w)} for v, w in enumerate(crystal.weights)
        ],
        "edges": edges,
    }
    _emit(payload, cfg)
    return 0


def cmd_crystal_decompose(cfg: ExperimentConfig, power: int) -> int:
    spec = build_root_system(cfg.cartan_type, cfg.rank)
    delta = _resolve_delta(spec, cfg.delta)
    _require_minuscule(spec, delta)
    crystal = minuscule_crystal(spec, delta)
    dec = decompose_tensor_power(crystal, power, cfg.word_budget)
    payload = {
        "metadata": _metadata(cfg),
        "power": power,
        "components": [
            {"highest_weight": format_weight(lam), "multiplicity": mult}
            for lam, mult in sorted(dec.items(), reverse=True)
        ],
    }
    _emit(payload, cfg)
    return 0


def cmd_spectral_solve(cfg: ExperimentConfig) -> int:
    spec, crystal, params = _params_from_cfg(cfg)
    payload = {
        "metadata": _metadata(cfg),
        "t": list(params.t),
        "gauge": cfg.gauge,
        "x": list(params.x),
        "s_delta": params.s_delta,
        "drift": list(params.drift),
        "letter_probs": {
            format_weight(w): p for w, p in zip(crystal.weights, params.letter_probs)
        },
    }
    if params.drift_in_chamber:
        payload["nabla"] = params.nabla()
    _emit(payload, cfg)
    return 0


def _spec_and_crystal(cfg: ExperimentConfig):
    spec = build_root_system(cfg.cartan_type, cfg.rank)
    delta = _resolve_delta(spec, cfg.delta)
    _require_minuscule(spec, delta)
    return spec, minuscule_crystal(spec, delta)


def cmd_count_paths(cfg: ExperimentConfig, mu_text: str, L: int) -> int:
    spec, crystal = _spec_and_crystal(cfg)
    mu = parse_weight(mu_text) if mu_text else spec.zero()
    table = counting.path_count_dp(spec, crystal, mu, min(L, table_keep(L)))
    rows = []
    for ell in range(min(L, counting.DEFAULT_KEEP_LIMIT) + 1):
        for lam, cnt in sorted(table.row(ell).items(), reverse=True):
            rows.append((ell, format_weight(lam), str(cnt)))
    if cfg.out:
        with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["ell", "lambda", "count"])
            writer.writerows(rows)
        print(f"wrote {cfg.out} ({len(rows)} rows)")
    else:
        for row in rows:
            print(*row, sep=",")
    return 0


def table_keep(L: int) -> int:
    return min(L, counting.DEFAULT_KEEP_LIMIT)


def cmd_count_mult(cfg: ExperimentConfig, lam_text: str, beta_text: str) -> int:
    spec, crystal = _spec_and_crystal(cfg)
    lam = parse_weight(lam_text)
    beta = parse_weight(beta_text)
    k = counting.weight_multiplicity(crystal, lam, beta)
    payload = {
        "metadata": _metadata(cfg),
        "lambda": format_weight(lam),
        "beta": format_weight(beta),
        "K": k,
    }
    _emit(payload, cfg)
    return 0


def cmd_kernel(cfg: ExperimentConfig, which: str, window: int) -> int:
    spec, crystal, params = _params_from_cfg(cfg)
    if which == "H":
        states = markov.dominant_window(params, window)
        kern = markov.kernel_H(params, states)
    elif which == "W":
        states = markov.reachable_window(spec, crystal, window, False)
        kern = markov.kernel_W(params, states)
    else:
        states = markov.reachable_window(spec, crystal, window, False)
        kern = markov.restrict_to_chamber(markov.kernel_W(params, states))
    payload = {
        "metadata": _metadata(cfg),
        "which": which,
        "kind": kern.kind,
        "states": [format_weight(s) for s in kern.states],
        "complete_rows": list(kern.complete),
        "triplets": kern.to_triplets(),
    }
    _emit(payload, cfg)
    return 0


def cmd_exit_prob(cfg: ExperimentConfig, lam_text: str, survival_L: int, with_mc: bool) -> int:
    spec, crystal, params = _params_from_cfg(cfg)
    lam = parse_weight(lam_text) if lam_text else spec.zero()
    formula = markov.exit_probability(params, lam)
    payload = {
        "metadata": _metadata(cfg),
        "lambda": format_weight(lam),
        "formula": formula,
    }
    if survival_L > 0:
        stride = max(survival_L // 10, 1)
        series = markov.survival_series(params, lam, survival_L, stride=stride)
        payload["survival_dp"] = {
            "L": survival_L,
            "stride": stride,
            "series": series,
        }
    if with_mc:
        mc = montecarlo.exit_probability_mc(
            params, lam, cfg.mc_horizon, cfg.mc_n, cfg.seed
        )
        payload["mc"] = {
            "estimate": mc.estimate,
            "sigma": mc.sigma,
            "n": mc.n_traj,
            "horizon": mc.horizon,
            **mc.metadata,
        }
    _emit(payload, cfg)
    return 0


def cmd_simulate(cfg: ExperimentConfig, steps: int, n: int) -> int:
    spec, crystal, params = _params_from_cfg(cfg)
    out = cfg.out or "trajectories.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trajectory", "step", "W", "H"])
        for idx in range(n):
            traj = montecarlo.sample_trajectory(
                params, steps, seed_for(cfg.seed, idx)
            )
            for k in range(steps + 1):
                writer.writerow(
                    [idx, k, format_weight(traj.W_path[k]), format_weight(traj.H_path[k])]
                )
    print(f"wrote {out} ({n} trajectories x {steps} steps; "
          f"rng: {montecarlo.RNG_METADATA['rng']})")
    return 0


def seed_for(master_seed: int, index: int) -> tuple[int, int]:
    """Deterministic per-trajectory stream key (mixed by SeedSequence)."""
    return (master_seed, index)


def cmd_asymptotics(cfg: ExperimentConfig, mu_text: str, ells: list[int]) -> int:
    spec, crystal, params = _params_from_cfg(cfg)
    mu = _resolve_delta(spec, mu_text) if mu_text.startswith("w") else parse_weight(mu_text)
    recs = markov.asymptotic_multiplicity_ratios(params, mu, ells)
    payload = {
        "metadata": _metadata(cfg),
        "mu": format_weight(mu),
        "points": [
            {**r, "target": format_weight(r["target"])} for r in recs
        ],
    }
    _emit(payload, cfg)
    return 0


def cmd_verify(cfg: ExperimentConfig, suites: list[str]) -> int:
    names = verify.ALL_SUITES if suites == ["all"] else suites
    spec = build_root_system(cfg.cartan_type, cfg.rank)
    delta = _resolve_delta(spec, cfg.delta)
    _require_minuscule(spec, delta)
    k = next(
        i for i in range(1, spec.rank + 1) if spec.fundamental(i) == delta
    )
    budgets = {
        "word_budget": cfg.word_budget,
        "survival_L": min(cfg.dp_horizon * 5, 2000),
        "mc_n": min(cfg.mc_n, 20_000),
        "mc_horizon": min(cfg.mc_horizon, 2000),
        "seed": cfg.seed,
    }
    results = verify.run_suites(
        names, ctype=cfg.cartan_type.upper(), rank=cfg.rank, k=k,
        t=[float(v) for v in cfg.t], budgets=budgets,
    )
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.name:<{width}}  {r.status:<7}  [{r.seconds:6.2f}s]  {r.detail}")
    failed = [r for r in results if r.failed]
    if failed:
        print(f"\n{len(failed)} suite(s) FAILED", file=sys.stderr)
        return 1
    return 0


# -- argument parsing -----------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON or TOML config file")
    p.add_argument("--type", dest="cartan_type", help="Cartan type A|B|C|D")
    p.add_argument("--rank", type=int)
    p.add_argument("--delta", help="fundamental shorthand wK or exact weight '1,0,0'")
    p.add_argument("--t", help="comma list of positive reals, one per simple root")
    p.add_argument("--gauge", choices=["sum1", "x1", "raw"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", dest="fmt", choices=["json", "csv"])
    p.add_argument("--word-budget", dest="word_budget", type=int)
    p.add_argument("--mc-n", dest="mc_n", type=int)
    p.add_argument("--mc-horizon", dest="mc_horizon", type=int)


def _merge_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    for f in fields(ExperimentConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            if f.name == "t" and isinstance(val, str):
                val = [float(v) for v in val.split(",")]
            setattr(cfg, f.name, val)
    return cfg.validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crystalwalk",
        description="Random walks in Weyl chambers via crystal combinatorics. "
        "CSV columns: count paths -> (ell, lambda, count); "
        "simulate -> (trajectory, step, W, H). Weights are exact rationals.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", help="dump root-system data as JSON")
    _add_common(p)

    p = sub.add_parser("crystal", help="build or decompose minuscule crystals")
    crystal_sub = p.add_subparsers(dest="crystal_command", required=True)
    pb = crystal_sub.add_parser("build", help="emit the crystal graph as JSON")
    _add_common(pb)
    pd = crystal_sub.add_parser("decompose", help="decompose a tensor power")
    _add_common(pd)
    pd.add_argument("--power", type=int, required=True)

    p = sub.add_parser("spectral", help="solve spectral parameters")
    spectral_sub = p.add_subparsers(dest="spectral_command", required=True)
    ps = spectral_sub.add_parser("solve", help="print x, s_delta, drift, probabilities")
    _add_common(ps)

    p = sub.add_parser("count", help="exact path counts and multiplicities")
    count_sub = p.add_subparsers(dest="count_command", required=True)
    pp = count_sub.add_parser("paths", help="dominant-path DP table as CSV")
    _add_common(pp)
    pp.add_argument("--mu", default="", help="starting dominant weight (default 0)")
    pp.add_argument("--L", type=int, default=20)
    pm = count_sub.add_parser("mult", help="weight multiplicity K_{lambda,beta}")
    _add_common(pm)
    pm.add_argument("--lambda", dest="lam", required=True)
    pm.add_argument("--beta", required=True)

    p = sub.add_parser("kernel", help="emit a transition kernel on a window")
    _add_common(p)
    p.add_argument("--which", choices=["W", "H", "WC"], default="H")
    p.add_argument("--window", type=int, default=4)

    p = sub.add_parser("exit-prob", help="closed form + survival DP (+ optional MC)")
    _add_common(p)
    p.add_argument("--lambda", dest="lam", default="", help="start weight (default 0)")
    p.add_argument("--survival-L", dest="survival_L", type=int, default=2000)
    p.add_argument("--with-mc", action="store_true")

    p = sub.add_parser("exit-prob-mc", help="Monte Carlo exit probability only")
    _add_common(p)
    p.add_argument("--lambda", dest="lam", default="")
    p.add_argument("--n", type=int, help="number of trajectories")
    p.add_argument("--horizon", type=int)

    p = sub.add_parser("simulate", help="sample coupled (W, H) trajectories to CSV")
    _add_common(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--n", type=int, default=1)

    p = sub.add_parser("asymptotics", help="outer-multiplicity ratio trend")
    _add_common(p)
    p.add_argument("--mu", required=True)
    p.add_argument("--ells", default="50,100,200,400")

    p = sub.add_parser("verify", help="run verification suites")
    _add_common(p)
    p.add_argument("suites", nargs="+", help=f"suite names or 'all'; one of {verify.ALL_SUITES}")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        if args.command == "roots":
            return cmd_roots(cfg)
        if args.command == "crystal":
            if args.crystal_command == "build":
                return cmd_crystal_build(cfg)
            return cmd_crystal_decompose(cfg, args.power)
        if args.command == "spectral":
            return cmd_spectral_solve(cfg)
        if args.command == "count":
            if args.count_command == "paths":
                return cmd_count_paths(cfg, args.mu, args.L)
            return cmd_count_mult(cfg, args.lam, args.beta)
        if args.command == "kernel":
            return cmd_kernel(cfg, args.which, args.window)
        if args.command == "exit-prob":
            return cmd_exit_prob(cfg, args.lam, args.survival_L, args.with_mc)
        if args.command == "exit-prob-mc":
            if args.n is not None:
                cfg.mc_n = args.n
            if args.horizon is not None:
                cfg.mc_horizon = args.horizon
            spec, crystal, params = _params_from_cfg(cfg)
            lam = parse_weight(args.lam) if args.lam else spec.zero()
            mc = montecarlo.exit_probability_mc(
                params, lam, cfg.mc_horizon, cfg.mc_n, cfg.seed
            )
            _emit(
                {
                    "metadata": _metadata(cfg),
                    "estimate": mc.estimate,
                    "sigma": mc.sigma,
                    "n": mc.n_traj,
                    "horizon": mc.horizon,
                },
                cfg,
            )
            return 0
        if args.command == "simulate":
            return cmd_simulate(cfg, args.steps, args.n)
        if args.command == "asymptotics":
            ells = [int(v) for v in args.ells.split(",")]
            return cmd_asymptotics(cfg, args.mu, ells)
        if args.command == "verify":
            return cmd_verify(cfg, args.suites)
        parser.error(f"unhandled command {args.command}")
    except (CrystalWalkError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
