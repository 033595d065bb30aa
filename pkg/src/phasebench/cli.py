"""Command line entry point: ``phasebench {generate,solve,sweep,verify,ising}``.

Exit codes: 0 success, 1 configuration or input error, 2 resource-limit refusal.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from .errors import ConfigError, DimacsError, LimitExceededError, PhaseBenchError
from .hamiltonian import expand_to_ising
from .sat import (
    RNG_ALGORITHM,
    clause_density,
    clauses_for_density,
    generate_random_ksat,
    load_dimacs,
    write_dimacs,
)
from .solvers import backbone_fraction, brute_force_maxsat, dpll_solve
from .sweep import SweepConfig, density_grid, instance_seed, run_sweep, write_results
from .verify import verify_oracles

EXIT_OK, EXIT_CONFIG, EXIT_LIMIT = 0, 1, 2


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()]


def cmd_generate(args):
    if (args.alpha is None) == (args.m is None):
        raise ConfigError("give exactly one of --alpha or --m")
    m = args.m if args.m is not None else clauses_for_density(args.alpha, args.n)
    out = Path(args.out) if args.out else None
    for i in range(args.count):
        seed = args.seed if args.count == 1 else instance_seed(args.seed, 0, i)
        f = generate_random_ksat(args.n, m, args.k, seed)
        text = write_dimacs(f, [f"random {args.k}-SAT, density {clause_density(f)}",
                                f"rng {RNG_ALGORITHM} seed {seed}"])
        if out is None:
            sys.stdout.write(text)
        elif args.count == 1 and out.suffix:
            out.write_text(text)
        else:
            out.mkdir(parents=True, exist_ok=True)
            (out / f"ksat_n{args.n}_m{m}_k{args.k}_{i:04d}.cnf").write_text(text)
    return EXIT_OK


def cmd_solve(args):
    f = load_dimacs(args.file, relaxed=args.relaxed)
    res = dpll_solve(f, args.max_decisions, args.pure_literals)
    report = {
        "n": f.n,
        "m": f.m,
        "density": float(clause_density(f)) if f.n else None,
        "status": res.status.value,
        "decisions": res.effort.decisions,
        "propagations": res.effort.propagations,
        "wall_time": res.effort.wall_time,
    }
    if res.witness is not None:
        report["witness"] = [i + 1 if b else -(i + 1) for i, b in enumerate(res.witness)]
    if args.maxsat:
        ms = brute_force_maxsat(f, keep_optima=False)
        report["min_unsat"] = ms.min_unsat
        report["optimal_count"] = ms.optimal_count
    if args.backbone:
        bb = backbone_fraction(f)
        report["backbone_fraction"] = bb.fixed_fraction
        report["backbone"] = [v + 1 if val else -(v + 1) for v, val in bb.fixed_variables]
    print(json.dumps(report, indent=1))
    return EXIT_OK


def _sweep_config(args) -> SweepConfig:
    data = {}
    if args.config:
        try:
            data = yaml.safe_load(Path(args.config).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a mapping")
        grid = data.pop("alpha", None)
        if grid is not None:
            data["densities"] = density_grid(grid["min"], grid["max"], grid["step"])
    overrides = {
        "experiment": args.experiment,
        "n": args.n,
        "k": args.k,
        "instances": args.instances,
        "seed": args.seed,
        "workers": args.threads,
        "restarts": args.restarts,
        "iterations": args.iterations,
        "optimizer": args.optimizer,
        "max_decisions": args.max_decisions,
    }
    data.update({key: val for key, val in overrides.items() if val is not None})
    if args.depths:
        data["depths"] = _ints(args.depths)
    if args.betas:
        data["betas"] = _floats(args.betas)
    if args.mcmc:
        data["mcmc"] = True
    if args.alpha_min is not None or args.alpha_max is not None:
        if args.alpha_min is None or args.alpha_max is None or args.alpha_step is None:
            raise ConfigError("--alpha-min, --alpha-max and --alpha-step go together")
        data["densities"] = density_grid(args.alpha_min, args.alpha_max, args.alpha_step)
    if "experiment" not in data or "n" not in data:
        raise ConfigError("a sweep needs an experiment and n (flags or config file)")
    return SweepConfig.from_dict(data)


def cmd_sweep(args):
    config = _sweep_config(args)
    result = run_sweep(config)
    if args.out:
        write_results(result, args.out, args.format)
    else:
        print(result.to_json())
    return EXIT_OK


def cmd_verify(args):
    report = verify_oracles(args.count, args.max_n, args.seed)
    print(report.summary())
    print("OK" if report.ok else f"FAILED ({len(report.failures)} mismatches)")
    return EXIT_OK if report.ok else EXIT_CONFIG


def cmd_ising(args):
    f = load_dimacs(args.file, relaxed=args.relaxed)
    table = expand_to_ising(f, args.convention).to_table()
    if args.out:
        Path(args.out).write_text(table)
    else:
        sys.stdout.write(table)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasebench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write random k-SAT instances as DIMACS")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--alpha", type=float)
    g.add_argument("--m", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", help="file (single instance) or directory; stdout if omitted")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="decide a DIMACS instance with DPLL")
    s.add_argument("file")
    s.add_argument("--relaxed", action="store_true", help="accept mixed clause widths")
    s.add_argument("--max-decisions", type=int)
    s.add_argument("--pure-literals", action="store_true")
    s.add_argument("--maxsat", action="store_true", help="also run the exhaustive MAX-SAT oracle")
    s.add_argument("--backbone", action="store_true")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="run a density sweep")
    w.add_argument("--config", help="YAML/JSON file with SweepConfig fields")
    w.add_argument("--experiment", choices=["decision", "gibbs", "qaoa"])
    w.add_argument("--n", type=int)
    w.add_argument("--k", type=int)
    w.add_argument("--alpha-min", type=float)
    w.add_argument("--alpha-max", type=float)
    w.add_argument("--alpha-step", type=float)
    w.add_argument("--instances", type=int)
    w.add_argument("--seed", type=int)
    w.add_argument("--depths", help="comma-separated QAOA depths")
    w.add_argument("--betas", help="comma-separated inverse temperatures")
    w.add_argument("--mcmc", action="store_true", help="add Metropolis estimates")
    w.add_argument("--restarts", type=int)
    w.add_argument("--iterations", type=int)
    w.add_argument("--optimizer", choices=["nelder-mead", "bfgs"])
    w.add_argument("--max-decisions", type=int)
    w.add_argument("--out")
    w.add_argument("--format", choices=["json", "csv"], default="json")
    w.add_argument("--threads", type=int, help="worker processes")
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="oracle-equivalence suite on small formulas")
    v.add_argument("--count", type=int, default=500)
    v.add_argument("--max-n", type=int, default=12)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("ising", help="export spin couplings of a DIMACS instance")
    i.add_argument("file")
    i.add_argument("--relaxed", action="store_true")
    i.add_argument("--convention", choices=["z=1-2x", "z=2x-1"], default="z=1-2x")
    i.add_argument("--out")
    i.set_defaults(func=cmd_ising)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LimitExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ConfigError, DimacsError, PhaseBenchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
