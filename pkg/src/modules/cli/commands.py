"""
CLI Commands
simulate, stats, sweep, verify, trajectories and build

Every handler takes the parsed argparse namespace and returns an exit code:
0 success, 1 usage or parse error, 2 not converged, 3 invariant-suite failure.
"""

import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from config import config_manager
from modules.core import (
    InsufficientSamplesError,
    MultipleCrossingsError,
    MuBelowFloorError,
    NoCrossingError,
    NonPositiveVarianceError,
    NotConvergedError,
    StepUnderflowError,
    TickboundError,
)
from modules.engine import ClockModel, IntegrationConfig, evolve_no_tick, top_level_population
from modules.models import (
    LadderParams,
    build_cascade_clock,
    build_exponential_clock,
    build_ladder_clock,
    build_rabi_clock,
    build_random_clock,
    load_document,
    save_model,
    save_oracle,
)
from modules.oracles import (
    AnalyticOracle,
    ErlangOracle,
    HeavisideOracle,
    erlang_survival,
    erlang_tick_pdf,
    heaviside_match,
    heaviside_survival,
    heaviside_tick_pdf,
    oracle_statistics,
)
from modules.stats import (
    ResetPolicy,
    TickStatistics,
    check_tradeoff,
    evolution_violations,
    find_crossing,
    moment_identity_gap,
    multi_tick_statistics,
    tick_statistics,
)
from modules.trajectories import estimate_statistics, first_tick_goodness_of_fit, sample_trajectories, write_tick_dump
from utils.formatting import dumps, write_csv, write_json

from .manifest import RunManifest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_SUITE_FAILED = 3

TIMESERIES_HEADER = ["t", "survival", "tick_pdf", "conditional_rate", "top_level_population"]
SWEEP_COLUMNS = ["N", "nu", "Gamma", "bound_ratio", "classical_ratio", "flag"]
ORACLE_GRID_POINTS = 1001
MOMENT_IDENTITY_TOL = 1e-6
AGREEMENT_SIGMAS = 4.0

LADDER_FIELDS = ("omega_c", "omega_h", "omega_l", "g", "gamma_c", "gamma_h", "beta_c", "beta_h", "gamma_tick")


def _arguments(args) -> Dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k != "handler"}


def _print(payload: Dict[str, Any]):
    sys.stdout.write(dumps(payload))
    sys.stdout.write("\n")
    sys.stdout.flush()


def integration_config(args, **extra) -> IntegrationConfig:
    """IntegrationConfig from settings files overridden by the CLI tolerance flags"""
    return IntegrationConfig.from_settings(
        abs_tol=getattr(args, "abs_tol", None),
        rel_tol=getattr(args, "rel_tol", None),
        survival_cutoff=getattr(args, "survival_cutoff", None),
        max_horizon=getattr(args, "max_horizon", None),
        workers=getattr(args, "workers", None),
        **extra,
    )


def ladder_params(args, **overrides) -> LadderParams:
    values = {name: getattr(args, name, None) for name in LADDER_FIELDS}
    values.update(overrides)
    return LadderParams.default().with_updates(**values)


def _load_model(path: str) -> Union[ClockModel, AnalyticOracle]:
    document = load_document(path)
    logger.info(f"Loaded {type(document).__name__} from {path}")
    return document


def _stats_payload(stats: TickStatistics) -> Dict[str, Any]:
    payload = {"success": True}
    payload.update(stats.to_dict())
    payload["tradeoff_satisfied"] = check_tradeoff(stats)["satisfied"]
    return payload


# simulate


def _oracle_series(oracle: AnalyticOracle) -> List[Tuple[float, ...]]:
    stats = oracle_statistics(oracle)
    end = stats.mu + 30.0 * math.sqrt(stats.sigma2)
    times = np.linspace(0.0, end, ORACLE_GRID_POINTS)
    if isinstance(oracle, ErlangOracle):
        survival, pdf = erlang_survival(oracle, times), erlang_tick_pdf(oracle, times)
    else:
        survival, pdf = heaviside_survival(oracle, times), heaviside_tick_pdf(oracle, times)
    rate = np.divide(pdf, survival, out=np.zeros_like(pdf), where=survival > 0)
    return list(zip(times, survival, pdf, rate, rate / oracle.gamma))


def cmd_simulate(args) -> int:
    """Time series of survival, tick PDF, conditional rate and top-level population"""
    manifest = RunManifest("simulate", _arguments(args), provenance={"model": args.model})
    document = _load_model(args.model)
    series_path = Path(f"{args.out}_timeseries.csv")
    manifest_path = Path(f"{args.out}_manifest.json")
    manifest.add_output("timeseries", series_path)

    if not isinstance(document, ClockModel):
        write_csv(series_path, TIMESERIES_HEADER, _oracle_series(document))
        manifest.write(manifest_path)
        return EXIT_OK

    config = integration_config(args)
    manifest.config = config.to_dict()
    evolution = evolve_no_tick(document, config)
    population = top_level_population(evolution, document.gamma)
    rows = zip(evolution.times, evolution.survival, evolution.tick_pdf, evolution.conditional_rate, population)
    write_csv(series_path, TIMESERIES_HEADER, rows)
    manifest.provenance["converged"] = evolution.converged
    manifest.write(manifest_path)
    logger.info(f"📈 Wrote {len(evolution.times)} rows to {series_path}")

    if not evolution.converged:
        logger.warning(f"Evolution did not converge ({evolution.status}); series is partial")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# stats


def cmd_stats(args) -> int:
    """Tick statistics as JSON on stdout"""
    manifest = RunManifest("stats", _arguments(args), provenance={"model": args.model})
    document = _load_model(args.model)

    try:
        if not isinstance(document, ClockModel):
            payload = _stats_payload(oracle_statistics(document))
        else:
            config = integration_config(args)
            manifest.config = config.to_dict()
            if args.n_ticks > 1:
                sequence = multi_tick_statistics(document, args.n_ticks, config, ResetPolicy(args.reset_policy))
                payload = {
                    "success": True,
                    "reset_policy": sequence.reset_policy.value,
                    "per_tick": [dict(tick_index=s.tick_index, **s.to_dict()) for s in sequence.per_tick],
                }
            else:
                payload = _stats_payload(tick_statistics(evolve_no_tick(document, config), document))
        code = EXIT_OK
    except NotConvergedError as e:
        logger.error(f"❌ {e}")
        payload = {"success": False, "converged": False, "message": str(e), "tick_index": e.tick_index, "horizon": e.horizon}
        code = EXIT_NOT_CONVERGED

    if args.out:
        manifest_path = Path(f"{args.out}_manifest.json")
        manifest.write(manifest_path)
    else:
        payload["manifest"] = manifest.to_dict()
    _print(payload)
    return code


# sweep


def _sweep_point(builder: str, value: Any, fixed: Dict[str, Any], config: IntegrationConfig) -> Dict[str, Any]:
    """One grid point; runs in a worker process for ladder sweeps"""
    try:
        if builder == "ladder":
            model = build_ladder_clock(LadderParams(d=int(value), **fixed))
            stats = tick_statistics(evolve_no_tick(model, config), model)
        elif builder == "erlang":
            stats = oracle_statistics(ErlangOracle(gamma=fixed["gamma"], m=int(value)))
        else:
            stats = oracle_statistics(HeavisideOracle(gamma=fixed["gamma"], t0=float(value)))
    except NotConvergedError as e:
        logger.warning(f"Sweep point {builder}={value} did not converge: {e}")
        return {"value": value, "flag": "not_converged"}
    return {
        "value": value,
        "N": stats.accuracy_N,
        "nu": stats.resolution_nu,
        "Gamma": stats.gamma,
        "bound_ratio": stats.bound_ratio,
        "classical_ratio": stats.classical_ratio,
        "flag": "point",
    }


def _reference_rows(point: Dict[str, Any]) -> List[List[Any]]:
    gamma, nu = point["Gamma"], point["nu"]
    rows = []
    for flag, accuracy in (("bound_curve", gamma * gamma / (nu * nu)), ("classical_curve", gamma / nu)):
        rows.append([point["value"], accuracy, nu, gamma, accuracy * nu * nu / (gamma * gamma), accuracy * nu / gamma, flag])
    return rows


def cmd_sweep(args) -> int:
    """Accuracy against resolution over a parameter grid, with both reference curves"""
    builder = args.builder
    if builder == "ladder":
        column, grid = "d", args.d_values or [2, 3, 4, 5, 6]
        params = ladder_params(args)
        fixed = {name: getattr(params, name) for name in LADDER_FIELDS}
    elif builder == "erlang":
        column, grid = "m", args.m_values or list(range(1, 65))
        fixed = {"gamma": args.gamma}
    else:
        column, grid = "t0", args.t0_values or [float(t) for t in range(11)]
        fixed = {"gamma": args.gamma}
    if not grid:
        logger.error("Sweep grid is empty")
        return EXIT_USAGE

    config = integration_config(args)
    manifest = RunManifest("sweep", _arguments(args), provenance={"builder": builder, "fixed": fixed, "grid": list(grid)})
    manifest.config = config.to_dict()

    if config.workers > 1 and builder == "ladder":
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            points = list(pool.map(_sweep_point, [builder] * len(grid), grid, [fixed] * len(grid), [config] * len(grid)))
    else:
        points = [_sweep_point(builder, value, fixed, config) for value in grid]

    rows = []
    for point in points:
        if point["flag"] == "not_converged":
            rows.append([point["value"], "", "", "", "", "", "not_converged"])
        else:
            rows.append([point["value"]] + [point[name] for name in SWEEP_COLUMNS])
    for point in points:
        if point["flag"] == "point":
            rows.extend(_reference_rows(point))

    out = Path(args.out)
    write_csv(out, [column] + SWEEP_COLUMNS, rows)
    manifest.add_output("sweep", out)
    manifest.write(out.with_name(f"{out.stem}_manifest.json"))
    n_failed = sum(1 for p in points if p["flag"] == "not_converged")
    logger.info(f"📊 Sweep over {len(grid)} {column} values written to {out} ({n_failed} not converged)")
    return EXIT_OK


# verify


def model_seed(seed: int, index: int) -> int:
    """Independent per-model seed, stable under any worker count"""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def verify_model(index: int, seed: int, config: IntegrationConfig) -> Dict[str, Any]:
    """Run every invariant check on one random clock"""
    record: Dict[str, Any] = {"index": index, "seed": seed, "failures": []}
    failures = record["failures"]
    try:
        model = build_random_clock(seed)
        record["dim"] = model.dim
        evolution = evolve_no_tick(model, config)
    except StepUnderflowError as e:
        failures.append("step_underflow")
        record["message"] = str(e)
        record["converged"] = False
        return record
    except TickboundError as e:
        failures.append("model_construction")
        record["message"] = str(e)
        record["converged"] = False
        return record

    record["converged"] = evolution.converged
    record["status"] = evolution.status
    failures.extend(evolution_violations(evolution))
    if not evolution.converged:
        return record

    try:
        stats = tick_statistics(evolution, model)
    except NonPositiveVarianceError:
        failures.append("variance_positive")
        return record
    record.update(N=stats.accuracy_N, nu=stats.resolution_nu, Gamma=stats.gamma, bound_ratio=stats.bound_ratio)
    failures.extend(stats.violations())

    if any(moment_identity_gap(evolution, k) > MOMENT_IDENTITY_TOL for k in (1, 2)):
        failures.append("moment_identity")
    try:
        heaviside_match(stats.mu, stats.gamma)
    except MuBelowFloorError:
        failures.append("mu_below_floor")
    try:
        record["t_star"] = find_crossing(evolution, model.gamma).t_star
    except (NoCrossingError, MultipleCrossingsError, MuBelowFloorError) as e:
        failures.append("crossing_uniqueness")
        record["message"] = str(e)
    return record


def cmd_verify(args) -> int:
    """Randomized invariant suite; exit 3 on any failure"""
    if args.n_models < 1:
        logger.error(f"--n-models must be at least 1, got {args.n_models}")
        return EXIT_USAGE

    settings = config_manager.get_ensemble_settings()
    min_fraction = float(settings.get("min_converged_fraction", 0.9))
    config = integration_config(args, flip_tick_anticommutator=bool(args.inject_bug))
    if args.inject_bug:
        logger.warning("⚠️ Injected bug: the tick anticommutator sign is flipped")

    seeds = [model_seed(args.seed, i) for i in range(args.n_models)]
    indices = list(range(args.n_models))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(verify_model, indices, seeds, [config] * len(seeds)))
    else:
        records = [verify_model(i, s, config) for i, s in zip(indices, seeds)]

    n_converged = sum(1 for r in records if r.get("converged"))
    failed = [r for r in records if r["failures"]]
    suite_failures = []
    if n_converged < min_fraction * len(records):
        suite_failures.append("convergence_fraction")

    success = not failed and not suite_failures
    report = {
        "success": success,
        "seed": args.seed,
        "n_models": args.n_models,
        "n_converged": n_converged,
        "inject_bug": bool(args.inject_bug),
        "suite_failures": suite_failures,
        "failures": failed,
    }
    manifest = RunManifest("verify", _arguments(args), provenance={"seeds": seeds})
    manifest.config = config.to_dict()
    if args.out:
        write_json(f"{args.out}_report.json", report)
        manifest.add_output("report", f"{args.out}_report.json")
        manifest.write(f"{args.out}_manifest.json")
    else:
        report["manifest"] = manifest.to_dict()
    _print(report)

    if success:
        logger.info(f"✅ All {args.n_models} models passed ({n_converged} converged)")
        return EXIT_OK
    logger.error(f"❌ {len(failed)} of {args.n_models} models failed, suite failures: {suite_failures}")
    return EXIT_SUITE_FAILED


# trajectories


def _agreement(deterministic: float, estimate: float, se: float) -> Dict[str, Any]:
    z = abs(estimate - deterministic) / se if se > 0 else math.inf
    return {
        "deterministic": deterministic,
        "estimate": estimate,
        "se": se,
        "z": z,
        "within_4se": bool(z < AGREEMENT_SIGMAS),
    }


def _comparison(model: ClockModel, batch, config: IntegrationConfig) -> Optional[Dict[str, Any]]:
    evolution = evolve_no_tick(model, config)
    if not evolution.converged:
        logger.warning("Deterministic run did not converge; skipping the comparison")
        return None
    try:
        sequence = multi_tick_statistics(model, batch.max_ticks, config)
        per_tick = list(sequence.per_tick)
    except NotConvergedError as e:
        logger.warning(f"Deterministic per-tick statistics stop at tick {e.tick_index}")
        per_tick = [tick_statistics(evolution, model)]

    ticks = []
    for stats in per_tick:
        record = batch.estimated.get(stats.tick_index)
        if record is None:
            continue
        ticks.append(
            {
                "tick_index": stats.tick_index,
                "mu": _agreement(stats.mu, record["mu_hat"], record["se_mu"]),
                "N": _agreement(stats.accuracy_N, record["N_hat"], record["se_N"]),
            }
        )
    return {"per_tick": ticks, "first_tick_fit": first_tick_goodness_of_fit(batch, evolution)}


def cmd_trajectories(args) -> int:
    """Monte Carlo tick times, estimates with standard errors and the engine comparison"""
    document = _load_model(args.model)
    if not isinstance(document, ClockModel):
        logger.error("Trajectories need a model document, not an analytic oracle")
        return EXIT_USAGE

    config = integration_config(args)
    manifest = RunManifest("trajectories", _arguments(args), provenance={"model": args.model})
    manifest.config = config.to_dict()

    batch = sample_trajectories(document, args.n_traj, max_ticks=args.max_ticks, seed=args.seed, config=config)
    dump_path = Path(f"{args.out}_ticks.csv")
    estimates_path = Path(f"{args.out}_estimates.json")
    write_tick_dump(batch, dump_path)
    manifest.add_output("ticks", dump_path)
    manifest.add_output("estimates", estimates_path)

    payload: Dict[str, Any] = {
        "success": True,
        "n_traj": batch.n_traj,
        "seed": batch.seed,
        "max_ticks": batch.max_ticks,
        "censored_count": batch.censored_count,
        "estimates": {str(k): v for k, v in batch.estimated.items()},
    }
    code = EXIT_OK
    try:
        estimate_statistics(batch, 1)
        payload["comparison"] = _comparison(document, batch, config)
    except InsufficientSamplesError as e:
        logger.error(f"❌ {e}")
        payload.update(success=False, message=str(e))
        code = EXIT_NOT_CONVERGED

    write_json(estimates_path, payload)
    manifest.write(f"{args.out}_manifest.json")
    return code


# build


def build_document(args) -> Union[ClockModel, AnalyticOracle]:
    builder = args.builder
    if builder == "exponential":
        return build_exponential_clock(args.gamma)
    if builder == "rabi":
        return build_rabi_clock(args.omega, args.gamma)
    if builder == "cascade":
        return build_cascade_clock(args.gamma, args.m)
    if builder == "ladder":
        return build_ladder_clock(ladder_params(args, d=args.d))
    if builder == "random":
        return build_random_clock(args.seed)
    if builder == "erlang":
        return ErlangOracle(gamma=args.gamma, m=args.m)
    return HeavisideOracle(gamma=args.gamma, t0=args.t0)


def cmd_build(args) -> int:
    """Write a model or oracle document"""
    document = build_document(args)
    out = Path(args.out)
    if isinstance(document, ClockModel):
        save_model(document, out)
    else:
        save_oracle(document, out)
    manifest = RunManifest("build", _arguments(args), provenance={"builder": args.builder})
    manifest.add_output("document", out)
    manifest.write(out.with_name(f"{out.stem}_manifest.json"))
    return EXIT_OK


def run_command(handler, args) -> int:
    """Call a handler and map library exceptions to exit codes"""
    try:
        return handler(args)
    except (NotConvergedError, StepUnderflowError, InsufficientSamplesError) as e:
        logger.error(f"❌ {e}")
        return EXIT_NOT_CONVERGED
    except (TickboundError, ValueError, OSError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_USAGE
