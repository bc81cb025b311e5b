"""
No-Tick Evolution
Integrates the tick-conditioned state and extracts survival, tick density and conditional rate

The integrator is scipy's Dormand-Prince 5(4) pair (RK45) stepped by hand. It advances the
trace-normalized state with the log-survival carried as one extra component, so tolerances stay
relative to the surviving mass however small it gets. Each accepted step keeps only the quartic
dense-output polynomials of log S, tr(V rho) and tr(rho) plus its share of the integral of rho;
full states are recomputed on demand from sparse checkpoints.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.integrate import RK45, solve_ivp

from modules.core import (
    DensityMatrix,
    NotConvergedError,
    StepUnderflowError,
    SurvivalUnderflowError,
    TimeOutOfRangeError,
    symmetrize,
    trace_functional,
    unvec,
    vec,
)

from .config import IntegrationConfig
from .model import ClockModel

logger = logging.getLogger(__name__)

# Survival above 1 + TRACE_GROWTH_LIMIT is impossible for a valid generator
TRACE_GROWTH_LIMIT = 1e-6
SURVIVAL_FLOOR = 1e-12

# Steps are capped at this many tick lifetimes 1/Gamma
MAX_STEP_FRACTION = 0.5
MAX_CHECKPOINTS = 1024

# 5-point Gauss-Legendre is exact up to degree 9; dense output is quartic per step.
# Its nodes on [0, 1] double as the fit points of the per-step polynomials.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)
_FIT_POINTS = 0.5 * (_GL_NODES + 1.0)
_FIT_INVERSE = np.linalg.inv(np.vander(_FIT_POINTS, 5, increasing=True)).T

# Rows of the per-step coefficient table
_LOG_SURVIVAL, _TICK_TRACE, _TRACE = 0, 1, 2


class NormalizedFlow:
    """Right-hand side for y = (vec(rho_n), log S)

    rho_n' = G rho_n - s rho_n and (log S)' = s with s = tr(G rho_n) / tr(rho_n),
    so S * rho_n solves the no-tick equation while tr(rho_n) stays at one.
    """

    def __init__(self, generator: np.ndarray, trace_weights: np.ndarray):
        self.generator = generator
        self.trace_weights = trace_weights

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        state = y[:-1]
        drift = self.generator @ state
        rate = float(np.real(self.trace_weights @ drift) / np.real(self.trace_weights @ state))
        out = np.empty_like(y)
        out[:-1] = drift - rate * state
        out[-1] = rate
        return out


def _horner(coefficients: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate rows of increasing-power coefficients (m, rows, 5) at x (m,)"""
    total = coefficients[..., -1]
    for power in range(coefficients.shape[-1] - 2, -1, -1):
        total = total * x[:, None] + coefficients[..., power]
    return total


@dataclass(frozen=True, eq=False)
class ConditionedEvolution:
    """Time grid of the no-tick observables with on-demand access to the state

    status is one of "converged", "max_horizon", "max_steps", "trace_growth".
    tail_rate is the average decay rate of survival over its last decade before the horizon.
    """

    times: np.ndarray
    survival: np.ndarray
    tick_pdf: np.ndarray
    conditional_rate: np.ndarray
    converged: bool
    horizon: float
    survival_at_horizon: float
    gamma: float
    tick_operator: np.ndarray
    step_times: np.ndarray
    status: str
    tail_rate: float
    dim: int
    coefficients: np.ndarray = field(repr=False)
    window_integral: np.ndarray = field(repr=False)
    final_state: np.ndarray = field(repr=False)
    checkpoint_times: np.ndarray = field(repr=False)
    checkpoint_states: Tuple[np.ndarray, ...] = field(repr=False)
    sample_states: Dict[float, np.ndarray] = field(repr=False)
    flow: NormalizedFlow = field(repr=False)
    tolerances: Dict[str, float] = field(repr=False)

    @property
    def n_steps(self) -> int:
        return len(self.step_times) - 1

    @property
    def unnormalized_states(self) -> List[DensityMatrix]:
        """States on the time grid, recomputed from the checkpoints"""
        return [DensityMatrix(self.state_at(float(t))) for t in self.times]

    def _check_time(self, t: float):
        if t < 0.0 or t > self.horizon * (1.0 + 1e-12):
            raise TimeOutOfRangeError(f"t={t!r} outside [0, {self.horizon!r}]")

    def _check_times(self, ts: np.ndarray):
        if ts.size and (ts.min() < 0.0 or ts.max() > self.horizon * (1.0 + 1e-12)):
            raise TimeOutOfRangeError("Sample times outside the integrated window")

    def _functionals(self, ts: np.ndarray) -> np.ndarray:
        """Rows log S, tr(V rho_n), tr(rho_n) at times inside the window"""
        ts = np.minimum(ts, self.horizon)
        widths = np.diff(self.step_times)
        index = np.clip(np.searchsorted(self.step_times, ts, side="right") - 1, 0, self.n_steps - 1)
        x = (ts - self.step_times[index]) / widths[index]
        return _horner(self.coefficients[index], x).T

    def _normalized(self, t: float) -> np.ndarray:
        """y = (vec(rho_n), log S) at t, integrated forward from the closest checkpoint"""
        index = int(np.searchsorted(self.checkpoint_times, t, side="right")) - 1
        start = float(self.checkpoint_times[index])
        y = self.checkpoint_states[index]
        if t == start:
            return y
        result = solve_ivp(self.flow, (start, t), y, method="RK45", **self.tolerances)
        if not result.success:
            raise StepUnderflowError(f"Re-integration to t={t!r} failed: {result.message}")
        return result.y[:, -1]

    def state_at(self, t: float) -> np.ndarray:
        """Unnormalized state rho0(t)"""
        self._check_time(t)
        t = min(t, self.horizon)
        if t in self.sample_states:
            return self.sample_states[t]
        y = self._normalized(t)
        return math.exp(float(np.real(y[-1]))) * symmetrize(unvec(y[:-1], self.dim))

    def survival_at(self, t: float) -> float:
        self._check_time(t)
        return float(self.survival_on(np.array([t]))[0])

    def tick_pdf_at(self, t: float) -> float:
        self._check_time(t)
        values = self._functionals(np.array([float(t)]))
        return max(float(np.exp(values[_LOG_SURVIVAL, 0]) * values[_TICK_TRACE, 0]), 0.0)

    def survival_on(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized survival on times inside [0, horizon]"""
        ts = np.asarray(ts, dtype=float)
        if ts.size == 0:
            return np.zeros(0)
        self._check_times(ts)
        values = self._functionals(ts)
        return np.exp(values[_LOG_SURVIVAL]) * values[_TRACE]

    def integrate(
        self,
        kind: str = "survival",
        power: int = 0,
        lower: float = 0.0,
        upper: Optional[float] = None,
    ) -> float:
        """Integral of t^power * S(t) or t^power * p_tick(t) over [lower, upper]

        Args:
            kind: "survival" or "tick_pdf"
            power: polynomial weight t^power
            lower, upper: integration window inside [0, horizon]
        """
        if kind not in ("survival", "tick_pdf"):
            raise ValueError(f"Unknown integrand {kind!r}")
        upper = self.horizon if upper is None else min(upper, self.horizon)
        lower = max(lower, 0.0)
        if upper <= lower:
            return 0.0

        inner = self.step_times[(self.step_times > lower) & (self.step_times < upper)]
        edges = np.concatenate(([lower], inner, [upper]))
        left, right = edges[:-1], edges[1:]
        half = 0.5 * (right - left)
        nodes = (half[:, None] * _GL_NODES[None, :] + 0.5 * (left + right)[:, None]).ravel()
        weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel() * nodes**power

        values = self._functionals(nodes)
        row = _TRACE if kind == "survival" else _TICK_TRACE
        return float((np.exp(values[_LOG_SURVIVAL]) * values[row]) @ weights)

    def integrated_state(self) -> np.ndarray:
        """Integral of rho0(t) over [0, inf), the tail past the horizon decaying at tail_rate

        Raises:
            NotConvergedError: the evolution did not reach the survival cutoff
        """
        if not self.converged:
            raise NotConvergedError("Integrated state needs a converged evolution", horizon=self.horizon)
        total = symmetrize(self.window_integral)
        if self.tail_rate > 0.0:
            total = total + self.final_state / self.tail_rate
        return total


def _tail_rate(step_times: np.ndarray, log_survival: np.ndarray, fallback: float, gamma: float) -> float:
    """Mean decay rate of survival over its last decade, or over the whole run if less decays"""
    last = len(step_times) - 1
    start = int(np.argmax(log_survival <= log_survival[-1] + math.log(10.0)))
    if start >= last:
        return min(max(fallback, 0.0), gamma)
    rate = (log_survival[start] - log_survival[-1]) / (step_times[-1] - step_times[start])
    return float(min(max(rate, 0.0), gamma))


class _Recorder:
    """Per-step bookkeeping for evolve_no_tick"""

    def __init__(self, dim: int, tick_weights: np.ndarray, trace_weights: np.ndarray, y0: np.ndarray):
        self.dim = dim
        self.tick_weights = tick_weights
        self.trace_weights = trace_weights
        self.step_times = [0.0]
        self.log_survival = [0.0]
        self.tick_trace = [float(np.real(tick_weights @ y0[:-1]))]
        self.coefficients: List[np.ndarray] = []
        self.integral = np.zeros(dim * dim, dtype=np.complex128)
        self.checkpoint_times = [0.0]
        self.checkpoint_states = [y0.copy()]
        self.stride = 1
        self.sample_states: Dict[float, np.ndarray] = {}

    def record(self, dense, t_new: float, y: np.ndarray, pending: List[float]):
        t_old = self.step_times[-1]
        width = t_new - t_old
        at_nodes = dense(t_old + width * _FIT_POINTS)
        states = at_nodes[:-1]
        log_s = np.real(at_nodes[-1])
        values = np.vstack((log_s, np.real(self.tick_weights @ states), np.real(self.trace_weights @ states)))
        self.coefficients.append(values @ _FIT_INVERSE)
        self.integral += states @ (0.5 * width * _GL_WEIGHTS * np.exp(log_s))

        while pending and pending[0] <= t_new:
            t = pending.pop(0)
            if t > t_old:
                sample = dense(t)
                self.sample_states[t] = math.exp(float(np.real(sample[-1]))) * symmetrize(unvec(sample[:-1], self.dim))

        self.step_times.append(t_new)
        self.log_survival.append(float(np.real(y[-1])))
        self.tick_trace.append(float(np.real(self.tick_weights @ y[:-1])))

        if (len(self.step_times) - 1) % self.stride == 0:
            self.checkpoint_times.append(t_new)
            self.checkpoint_states.append(y.copy())
            if len(self.checkpoint_times) > MAX_CHECKPOINTS:
                self.checkpoint_times = self.checkpoint_times[::2]
                self.checkpoint_states = self.checkpoint_states[::2]
                self.stride *= 2


def _renormalize(y: np.ndarray, dim: int):
    """Fold tr(rho_n) into log S and re-symmetrize rho_n, in place"""
    state = symmetrize(unvec(y[:-1], dim))
    trace = float(np.real(np.trace(state)))
    y[:-1] = vec(state / trace)
    y[-1] = np.real(y[-1]) + math.log(trace)


def _build_evolution(
    model: ClockModel,
    recorder: _Recorder,
    final_y: np.ndarray,
    sample_times: Sequence[float],
    flow: NormalizedFlow,
    tolerances: Dict[str, float],
    converged: bool,
    status: str,
) -> ConditionedEvolution:
    dim = model.dim
    step_times = np.asarray(recorder.step_times, dtype=float)
    log_survival = np.asarray(recorder.log_survival, dtype=float)
    horizon = float(step_times[-1])

    survival = np.exp(log_survival)
    rate = np.maximum(np.asarray(recorder.tick_trace, dtype=float), 0.0)
    coefficients = np.asarray(recorder.coefficients)

    on_grid = set(recorder.step_times)
    extra = np.array([t for t in sample_times if 0.0 <= t <= horizon and t not in on_grid], dtype=float)
    if len(extra) < len(sample_times):
        logger.debug(f"{len(sample_times) - len(extra)} requested sample times fall outside [0, {horizon:.6g}]")

    times = np.concatenate((step_times, extra))
    if len(extra):
        widths = np.diff(step_times)
        index = np.clip(np.searchsorted(step_times, extra, side="right") - 1, 0, len(widths) - 1)
        values = _horner(coefficients[index], (extra - step_times[index]) / widths[index]).T
        survival = np.concatenate((survival, np.exp(values[_LOG_SURVIVAL]) * values[_TRACE]))
        rate = np.concatenate((rate, np.maximum(values[_TICK_TRACE] / values[_TRACE], 0.0)))
    order = np.argsort(times, kind="stable")
    times, survival, rate = times[order], survival[order], rate[order]
    tick_pdf = rate * survival

    for array in (times, survival, tick_pdf, rate, step_times, coefficients):
        array.setflags(write=False)

    return ConditionedEvolution(
        times=times,
        survival=survival,
        tick_pdf=tick_pdf,
        conditional_rate=rate,
        converged=converged,
        horizon=horizon,
        survival_at_horizon=float(math.exp(log_survival[-1])),
        gamma=model.gamma,
        tick_operator=model.tick_operator.matrix,
        step_times=step_times,
        status=status,
        tail_rate=_tail_rate(step_times, log_survival, float(recorder.tick_trace[-1]), model.gamma),
        dim=dim,
        coefficients=coefficients,
        window_integral=unvec(recorder.integral, dim),
        final_state=math.exp(log_survival[-1]) * symmetrize(unvec(final_y[:-1], dim)),
        checkpoint_times=np.asarray(recorder.checkpoint_times, dtype=float),
        checkpoint_states=tuple(recorder.checkpoint_states),
        sample_states=recorder.sample_states,
        flow=flow,
        tolerances=tolerances,
    )


def evolve_no_tick(model: ClockModel, config: Optional[IntegrationConfig] = None) -> ConditionedEvolution:
    """Integrate the no-tick state from the model's initial state

    Runs until survival <= config.survival_cutoff (converged) or the horizon is reached.
    Non-convergence is reported through the flag, not raised.

    Raises:
        StepUnderflowError: the adaptive step collapsed
    """
    config = config or IntegrationConfig.from_settings()
    dim = model.dim
    tick_sign = -1.0 if config.flip_tick_anticommutator else 1.0
    horizon = config.horizon_for(model.gamma)
    trace_weights = trace_functional(np.eye(dim))
    tick_weights = trace_functional(model.tick_operator.matrix)
    flow = NormalizedFlow(model.generator(tick_sign), trace_weights)

    y0 = np.append(vec(model.initial_state.matrix).astype(np.complex128), 0.0)
    _renormalize(y0, dim)
    tolerances = {
        "rtol": config.rel_tol,
        "atol": config.abs_tol,
        "max_step": MAX_STEP_FRACTION / model.gamma if model.gamma > 0 else np.inf,
    }
    solver = RK45(flow, 0.0, y0, horizon, **tolerances)

    recorder = _Recorder(dim, tick_weights, trace_weights, y0)
    pending = [t for t in config.sample_times if 0.0 < t <= horizon]
    log_growth_limit = math.log1p(TRACE_GROWTH_LIMIT)
    log_cutoff = math.log(config.survival_cutoff)
    converged = False
    status = "max_horizon"

    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            raise StepUnderflowError(f"Integrator failed at t={solver.t!r}: {message}")

        dense = solver.dense_output()
        # Renormalize the accepted state in place; the dense output above is already frozen
        _renormalize(solver.y, dim)
        recorder.record(dense, float(solver.t), solver.y, pending)

        log_survival = float(np.real(solver.y[-1]))
        if log_survival > log_growth_limit or not math.isfinite(log_survival):
            logger.error(
                f"Survival grew to {math.exp(min(log_survival, 700.0))!r} at t={solver.t:.6g}; "
                f"generator is not trace non-increasing"
            )
            status = "trace_growth"
            break
        if log_survival <= log_cutoff:
            converged = True
            status = "converged"
            break
        if len(recorder.coefficients) >= config.max_steps:
            logger.warning(f"Stopping after {config.max_steps} steps at t={solver.t:.6g}")
            status = "max_steps"
            break

    evolution = _build_evolution(model, recorder, solver.y, config.sample_times, flow, tolerances, converged, status)
    log = logger.info if converged else logger.warning
    log(
        f"No-tick evolution of {model.name!r} ({status}): {evolution.n_steps} steps, "
        f"horizon {evolution.horizon:.6g}, survival {evolution.survival_at_horizon:.3e}"
    )
    return evolution


def normalized_state_at(evolution: ConditionedEvolution, t: float) -> DensityMatrix:
    """rho_no_tick(t) = rho0(t) / tr rho0(t)

    Raises:
        TimeOutOfRangeError: t outside [0, horizon]
        SurvivalUnderflowError: survival at t at or below 1e-12
    """
    rho = evolution.state_at(t)
    survival = float(np.real(np.trace(rho)))
    if survival <= SURVIVAL_FLOOR:
        raise SurvivalUnderflowError(f"Survival {survival:.3e} at t={t!r} is too small to condition on")

    # Integration error can leave eigenvalues at -tolerance; clip them
    eigenvalues, vectors = linalg.eigh(rho / survival)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    rho = (vectors * eigenvalues) @ vectors.conj().T
    return DensityMatrix(symmetrize(rho / np.real(np.trace(rho))))


def top_level_population(evolution: ConditionedEvolution, gamma: float) -> np.ndarray:
    """p(t) = tr(V rho_no_tick(t)) / Gamma on the evolution grid"""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return np.asarray(evolution.conditional_rate) / gamma


def matrix_exponential_states(model: ClockModel, times: Sequence[float]) -> np.ndarray:
    """Reference no-tick states exp(G t) vec(rho(0)) by scaling and squaring"""
    generator = model.generator()
    y0 = vec(model.initial_state.matrix)
    return np.array([unvec(linalg.expm(generator * t) @ y0, model.dim) for t in times])


def matrix_exponential_survival(model: ClockModel, times: Sequence[float]) -> np.ndarray:
    """Reference survival probabilities from the matrix exponential of the generator"""
    states = matrix_exponential_states(model, times)
    return np.real(np.trace(states, axis1=1, axis2=2))
