"""Density sweeps over seeded random k-SAT ensembles.

Three experiment families share one driver:

``decision``
    DPLL on every instance: satisfiable fraction and search effort.
``gibbs``
    Ground-state probability of the thermal distribution, per inverse
    temperature; exact enumeration when n allows, Metropolis otherwise or on
    request.
``qaoa``
    Optimised QAOA expectation and its gap to the exact optimum, per depth.

Every instance is generated from its own seed, derived from the master seed,
the grid-point index and the instance index, so any single instance can be
rebuilt in isolation with :func:`instance_formula`.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, LimitExceededError
from .gibbs import (
    MCMC_RNG,
    GibbsSpec,
    exact_ground_probability,
    metropolis_ground_probability,
)
from .hamiltonian import TABLE_LIMIT, build_hamiltonian
from .qaoa import MIXER, SIMULATOR_LIMIT, optimize_qaoa
from .sat import RNG_ALGORITHM, clauses_for_density, generate_random_ksat
from .solvers import BRANCHING_HEURISTIC, EXHAUSTIVE_LIMIT, Status, dpll_solve

EXPERIMENTS = ("decision", "gibbs", "qaoa")
SEED_DERIVATION = "blake2b(digest_size=8, little-endian) of b'{seed}/{point}/{instance}'"

CSV_COLUMNS = ("density", "realized_density", "metric", "value", "std_error",
               "depth_or_beta", "n", "k", "instances", "seed")


def density_grid(lo: float, hi: float, step: float) -> list:
    """Inclusive arithmetic grid, rounded to 10 decimals to absorb float drift."""
    if step <= 0:
        raise ConfigError("density step must be positive")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(max(count, 0))]


def instance_seed(master: int, point: int, instance: int) -> int:
    digest = hashlib.blake2b(f"{master}/{point}/{instance}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass
class SweepConfig:
    experiment: str
    n: int
    k: int = 3
    densities: list = field(default_factory=list)
    instances: int = 10
    seed: int = 0
    # decision
    max_decisions: int | None = None
    pure_literals: bool = False
    # gibbs
    betas: list = field(default_factory=lambda: [0.5, 1.0, 2.0, 4.0])
    mcmc: bool = False
    mcmc_sweeps: int = 200
    mcmc_burn_in: int | None = None  # sweeps; None means 10 * n
    mcmc_chains: int = 32
    # qaoa
    depths: list = field(default_factory=lambda: [1, 2, 3])
    restarts: int = 50
    iterations: int = 500
    optimizer: str = "nelder-mead"
    # execution; results do not depend on it
    workers: int = 1

    def __post_init__(self):
        self.densities = [float(a) for a in self.densities]
        self.betas = [float(b) for b in self.betas]
        self.depths = sorted(int(p) for p in self.depths)
        self.validate()

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.n < 1 or self.k < 1 or self.k > self.n:
            raise ConfigError(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        if self.instances < 1:
            raise ConfigError("instances per point must be >= 1")
        d = self.densities
        if any(a <= 0 for a in d) or any(b <= a for a, b in zip(d, d[1:])):
            raise ConfigError("density grid must be strictly increasing and positive")
        if any(b < 0 for b in self.betas):
            raise ConfigError("inverse temperatures must be nonnegative")
        if any(p < 0 for p in self.depths):
            raise ConfigError("QAOA depths must be nonnegative")
        if self.restarts < 1 or self.iterations < 1:
            raise ConfigError("optimizer budget must be at least one restart and iteration")
        if self.mcmc_sweeps < 1 or self.mcmc_chains < 1 or (self.mcmc_burn_in is not None and self.mcmc_burn_in < 0):
            raise ConfigError("invalid MCMC budget")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class PointResult:
    index: int
    density: float
    m: int
    realized_density: float
    records: list
    aggregates: dict

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SweepResult:
    config: SweepConfig
    points: list
    metadata: dict
    # timestamp and wall-clock timings; excluded from reproducibility comparisons
    volatile: dict = field(default_factory=dict)

    def to_dict(self, volatile: bool = True) -> dict:
        out = {
            "config": self.config.to_dict(),
            "metadata": self.metadata,
            "points": [p.to_dict() for p in self.points],
        }
        if volatile:
            out["volatile"] = self.volatile
        return out

    def to_json(self, volatile: bool = True) -> str:
        return json.dumps(self.to_dict(volatile), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict, check: bool = True) -> "SweepResult":
        config = SweepConfig.from_dict(data["config"])
        points = [PointResult(**p) for p in data["points"]]
        result = cls(config, points, data["metadata"], data.get("volatile", {}))
        if check:
            for p in points:
                again = _jsonable(AGGREGATORS[config.experiment](config, p.records))
                if again != p.aggregates:
                    raise ValueError(f"aggregates of point {p.index} do not match its records")
        return result

    def series(self, metric: str, key=None) -> tuple:
        """``(realized densities, values)`` of one aggregate, optionally per beta/depth."""
        if key is not None:
            key = float(key) if self.config.experiment == "gibbs" else int(key)
        xs, ys = [], []
        for p in self.points:
            val = p.aggregates.get(metric)
            if key is not None and val is not None:
                val = val.get(str(key))
            xs.append(p.realized_density)
            ys.append(np.nan if val is None else val)
        return np.array(xs, dtype=float), np.array(ys, dtype=float)

    def nominal(self) -> np.ndarray:
        return np.array([p.density for p in self.points])


# --------------------------------------------------------------------------
# instance workers (top level so they pickle for process pools)

def instance_formula(config: SweepConfig, point: int, instance: int):
    alpha = config.densities[point]
    m = clauses_for_density(alpha, config.n)
    seed = instance_seed(config.seed, point, instance)
    return generate_random_ksat(config.n, m, config.k, seed), seed


def _decision_task(config, point, instance):
    f, seed = instance_formula(config, point, instance)
    res = dpll_solve(f, config.max_decisions, config.pure_literals)
    rec = {
        "instance": instance,
        "seed": seed,
        "status": res.status.value,
        "decisions": res.effort.decisions,
        "propagations": res.effort.propagations,
    }
    return rec, res.effort.wall_time


def _gibbs_task(config, point, instance):
    f, seed = instance_formula(config, point, instance)
    exact = config.n <= EXHAUSTIVE_LIMIT
    h = build_hamiltonian(f, lazy=config.n > TABLE_LIMIT)
    rec = {"instance": instance, "seed": seed}
    if exact:
        table = h.diagonal
        e0 = int(table.min())
        rec["ground_energy"] = e0
        rec["ground_count"] = int((table == e0).sum())
        rec["p_gs"] = [exact_ground_probability(GibbsSpec(b, h)).value for b in config.betas]
    if config.mcmc or not exact:
        est = [
            metropolis_ground_probability(
                GibbsSpec(b, h), config.mcmc_sweeps, config.mcmc_burn_in,
                config.mcmc_chains, seed=[seed, i],
            )
            for i, b in enumerate(config.betas)
        ]
        rec["p_gs_mcmc"] = [e.value for e in est]
        rec["p_gs_mcmc_se"] = [e.std_error for e in est]
        rec["mcmc_lower_bound_reference"] = any(e.lower_bound_reference for e in est)
    return rec, None


def _qaoa_task(config, point, instance):
    f, seed = instance_formula(config, point, instance)
    h = build_hamiltonian(f)
    rec = {
        "instance": instance,
        "seed": seed,
        "min_unsat": h.ground_energy,
        "expectation": [],
        "error": [],
        "converged": [],
        "params": [],
    }
    prev = None
    for p in config.depths:
        out = optimize_qaoa(h, p, config.restarts, config.iterations,
                            seed=[seed, p], method=config.optimizer, warm_start=prev)
        prev = out.best_params
        rec["expectation"].append(out.best_expectation)
        rec["error"].append(out.error)
        rec["converged"].append(out.converged)
        rec["params"].append(out.best_params.to_dict())
    return rec, None


TASKS = {"decision": _decision_task, "gibbs": _gibbs_task, "qaoa": _qaoa_task}


# --------------------------------------------------------------------------
# aggregation; records arrive sorted by instance, so results are order-free

def _mean_se(values):
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return None, None
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(v.mean()), se


def _aggregate_decision(config, records):
    status = [r["status"] for r in records]
    n_sat = status.count(Status.SAT.value)
    n_unsat = status.count(Status.UNSAT.value)
    censored = len(status) - n_sat - n_unsat
    solved = [r for r in records if r["status"] != Status.TIMEOUT.value]
    decided = n_sat + n_unsat
    dec = [r["decisions"] for r in solved]
    mean_dec, se_dec = _mean_se(dec)
    mean_prop, se_prop = _mean_se([r["propagations"] for r in solved])
    return {
        "instances": len(records),
        "censored": censored,
        "sat_fraction": n_sat / decided if decided else None,
        "sat_fraction_lower": n_sat / len(records),
        "sat_fraction_upper": (n_sat + censored) / len(records),
        "mean_decisions": mean_dec,
        "se_decisions": se_dec,
        "median_decisions": float(np.median(dec)) if dec else None,
        "mean_propagations": mean_prop,
        "se_propagations": se_prop,
    }


def _aggregate_gibbs(config, records):
    out = {"instances": len(records)}
    if records and "p_gs" in records[0]:
        vals = np.array([r["p_gs"] for r in records], dtype=float)
        out["mean_p_gs"] = {str(b): float(vals[:, i].mean()) for i, b in enumerate(config.betas)}
        out["se_p_gs"] = {str(b): _mean_se(vals[:, i])[1] for i, b in enumerate(config.betas)}
        out["mean_ground_count"] = float(np.mean([r["ground_count"] for r in records]))
        out["mean_ground_energy"] = float(np.mean([r["ground_energy"] for r in records]))
    if records and "p_gs_mcmc" in records[0]:
        vals = np.array([r["p_gs_mcmc"] for r in records], dtype=float)
        ses = np.array([r["p_gs_mcmc_se"] for r in records], dtype=float)
        nrec = len(records)
        out["mean_p_gs_mcmc"] = {str(b): float(vals[:, i].mean()) for i, b in enumerate(config.betas)}
        # Monte Carlo error of the ensemble mean, instances held fixed
        out["mcmc_se"] = {
            str(b): float(math.sqrt(float((ses[:, i] ** 2).sum())) / nrec)
            for i, b in enumerate(config.betas)
        }
        out["mcmc_lower_bound_reference"] = sum(r["mcmc_lower_bound_reference"] for r in records)
    return out


def _aggregate_qaoa(config, records):
    out = {"instances": len(records)}
    if not records:
        return out
    errs = np.array([[np.nan if e is None else e for e in r["error"]] for r in records])
    exps = np.array([r["expectation"] for r in records], dtype=float)
    conv = np.array([r["converged"] for r in records], dtype=bool)
    out["mean_min_unsat"] = float(np.mean([r["min_unsat"] for r in records]))
    out["mean_error"] = {str(p): float(errs[:, i].mean()) for i, p in enumerate(config.depths)}
    out["se_error"] = {str(p): _mean_se(errs[:, i])[1] for i, p in enumerate(config.depths)}
    out["mean_expectation"] = {str(p): float(exps[:, i].mean()) for i, p in enumerate(config.depths)}
    out["budget_hits"] = {str(p): int((~conv[:, i]).sum()) for i, p in enumerate(config.depths)}
    return out


AGGREGATORS = {"decision": _aggregate_decision, "gibbs": _aggregate_gibbs,
               "qaoa": _aggregate_qaoa}


def _jsonable(obj):
    # normalise through JSON so fresh and reloaded results compare equal
    return json.loads(json.dumps(obj))


# --------------------------------------------------------------------------
# driver

def _call(args):
    experiment, config, point, instance = args
    return TASKS[experiment](config, point, instance)


def _metadata(config):
    meta = {
        "code_version": __version__,
        "rng": RNG_ALGORITHM,
        "seed_derivation": SEED_DERIVATION,
        "clause_count_rounding": "m = round(alpha * n), half to even",
        "duplicate_clauses": "allowed",
    }
    if config.experiment == "decision":
        meta["branching_heuristic"] = BRANCHING_HEURISTIC
        meta["pure_literals"] = config.pure_literals
        meta["censoring"] = "timeouts excluded from effort means and from sat_fraction"
    elif config.experiment == "gibbs":
        meta["gibbs_exact_limit"] = EXHAUSTIVE_LIMIT
        meta["mcmc_rng"] = MCMC_RNG
        meta["mcmc_move"] = "uniform single-variable flip; sweep = n proposals"
    else:
        meta["mixer"] = MIXER
        meta["optimizer"] = config.optimizer
        meta["angle_box"] = "gamma in [0, 2pi), beta in [0, pi)"
    return meta


def run_sweep(config: SweepConfig) -> SweepResult:
    config.validate()
    if config.experiment == "qaoa" and config.n > SIMULATOR_LIMIT:
        raise LimitExceededError("QAOA statevector", config.n, SIMULATOR_LIMIT)
    tasks = [
        (config.experiment, config, i, j)
        for i in range(len(config.densities))
        for j in range(config.instances)
    ]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            outputs = list(pool.map(_call, tasks, chunksize=max(1, len(tasks) // (8 * config.workers))))
    else:
        outputs = [_call(t) for t in tasks]

    points, timing = [], {}
    for i, alpha in enumerate(config.densities):
        chunk = outputs[i * config.instances:(i + 1) * config.instances]
        records = sorted((rec for rec, _ in chunk), key=lambda r: r["instance"])
        m = clauses_for_density(alpha, config.n)
        agg = _jsonable(AGGREGATORS[config.experiment](config, records))
        points.append(PointResult(i, alpha, m, m / config.n, _jsonable(records), agg))
        walls = [w for _, w in chunk if w is not None]
        if walls:
            timing[str(i)] = {
                "mean_wall_time": float(np.mean(walls)),
                "median_wall_time": float(np.median(walls)),
                "wall_time": walls,
            }
    volatile = {"timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(), "timing": timing}
    return SweepResult(config, points, _metadata(config), volatile)


def _expect(config, name):
    if config.experiment != name:
        raise ConfigError(f"expected a {name!r} config, got {config.experiment!r}")


def run_decision_sweep(config: SweepConfig) -> SweepResult:
    _expect(config, "decision")
    return run_sweep(config)


def run_gibbs_sweep(config: SweepConfig) -> SweepResult:
    _expect(config, "gibbs")
    return run_sweep(config)


def run_qaoa_sweep(config: SweepConfig) -> SweepResult:
    _expect(config, "qaoa")
    return run_sweep(config)


# --------------------------------------------------------------------------
# analysis helpers

def crossing_density(xs, ys, level: float = 0.5) -> float | None:
    """First downward crossing of ``level``, linearly interpolated."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    for i in range(len(xs) - 1):
        if ys[i] >= level > ys[i + 1]:
            t = (ys[i] - level) / (ys[i] - ys[i + 1])
            return float(xs[i] + t * (xs[i + 1] - xs[i]))
    return None


# --------------------------------------------------------------------------
# output

def _csv_rows(result: SweepResult):
    cfg = result.config
    base = {"n": cfg.n, "k": cfg.k, "seed": cfg.seed}
    for p in result.points:
        agg = p.aggregates
        common = dict(base, density=p.density, realized_density=p.realized_density,
                      instances=agg.get("instances", len(p.records)))

        def row(metric, value, se=None, key=""):
            return dict(common, metric=metric, value=value,
                        std_error="" if se is None else se, depth_or_beta=key)

        if cfg.experiment == "decision":
            yield row("sat_fraction", agg["sat_fraction"])
            yield row("sat_fraction_lower", agg["sat_fraction_lower"])
            yield row("sat_fraction_upper", agg["sat_fraction_upper"])
            yield row("censored", agg["censored"])
            yield row("mean_decisions", agg["mean_decisions"], agg["se_decisions"])
            yield row("median_decisions", agg["median_decisions"])
            yield row("mean_propagations", agg["mean_propagations"], agg["se_propagations"])
            t = result.volatile.get("timing", {}).get(str(p.index))
            if t:
                yield row("mean_wall_time", t["mean_wall_time"])
                yield row("median_wall_time", t["median_wall_time"])
        elif cfg.experiment == "gibbs":
            for b in cfg.betas:
                if "mean_p_gs" in agg:
                    yield row("p_gs", agg["mean_p_gs"][str(b)], agg["se_p_gs"][str(b)], b)
                if "mean_p_gs_mcmc" in agg:
                    yield row("p_gs_mcmc", agg["mean_p_gs_mcmc"][str(b)], agg["mcmc_se"][str(b)], b)
        else:
            yield row("mean_min_unsat", agg.get("mean_min_unsat"))
            for d in cfg.depths:
                yield row("qaoa_error", agg["mean_error"][str(d)], agg["se_error"][str(d)], d)
                yield row("qaoa_expectation", agg["mean_expectation"][str(d)], None, d)
                yield row("budget_hits", agg["budget_hits"][str(d)], None, d)


def write_results(result: SweepResult, path, format: str = "json") -> Path:
    path = Path(path)
    try:
        if format == "json":
            path.write_text(result.to_json() + "\n")
        elif format == "csv":
            with path.open("w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
                writer.writeheader()
                for r in _csv_rows(result):
                    writer.writerow({c: ("" if r[c] is None else r[c]) for c in CSV_COLUMNS})
        else:
            raise ConfigError(f"unknown output format {format!r}")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def read_results(path) -> SweepResult:
    return SweepResult.from_dict(json.loads(Path(path).read_text()))
