"""
Quantum-Jump Sampler
Monte Carlo unraveling of the clock into pure-state trajectories with recorded tick times

Between jumps a trajectory follows the non-Hermitian drift H_eff = H - (i/2) sum_k L_k^dagger L_k
over all channels. The next jump happens when the squared norm of the drifted state falls to
a uniform threshold. Coarse exact propagators bracket that instant, a dyadic ladder of
shorter propagators bisects to it, and the last bracket is closed by linear interpolation
of the squared norm, which leaves an error quadratic in its width.
"""

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import List, Optional

import numpy as np
from scipy import linalg

from modules.core import StepUnderflowError
from modules.engine import ClockModel, IntegrationConfig, all_jump_operators

from .batch import TrajectoryBatch
from .estimators import estimate_all

logger = logging.getLogger(__name__)

# Bisection depth; the final bracket coarse_step / 2^LADDER_DEPTH is interpolated
LADDER_DEPTH = 20
UNIFORM_BUFFER = 256


class _Propagators:
    """Drift propagators shared by every chunk of one batch"""

    def __init__(self, model: ClockModel, config: IntegrationConfig):
        self.channels = [np.asarray(op) for op in all_jump_operators(model)]
        self.n_notick = len(model.notick_lindblad_ops)
        rates = sum((op.conj().T @ op for op in self.channels), np.zeros((model.dim, model.dim), dtype=np.complex128))
        self.rate_norm = float(np.linalg.norm(rates, 2))
        self.dark = self.rate_norm == 0.0

        h_eff = np.asarray(model.hamiltonian) - 0.5j * rates
        scale = self.rate_norm if not self.dark else max(float(np.linalg.norm(model.hamiltonian, 2)), 1.0)
        self.coarse_step = config.sampler_coarse_step / scale
        # Row-vector convention: psi_next = psi @ U^T
        self.coarse = linalg.expm(-1j * h_eff * self.coarse_step).T
        self.ladder = [linalg.expm(-1j * h_eff * self.coarse_step / 2**m).T for m in range(1, LADDER_DEPTH + 1)]


class _UniformStreams:
    """Counter-based uniform streams, one per trajectory, read through a shared buffer"""

    def __init__(self, seed: int, indices: np.ndarray):
        self.generators = [np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, int(i), 0])) for i in indices]
        self.buffer = np.stack([g.random(UNIFORM_BUFFER) for g in self.generators])
        self.position = np.zeros(len(indices), dtype=np.int64)

    def draw(self, rows: np.ndarray) -> np.ndarray:
        exhausted = rows[self.position[rows] >= UNIFORM_BUFFER]
        for row in exhausted:
            self.buffer[row] = self.generators[row].random(UNIFORM_BUFFER)
            self.position[row] = 0
        values = self.buffer[rows, self.position[rows]]
        self.position[rows] += 1
        return values


def _norm2(rows: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", rows.real, rows.real) + np.einsum("ij,ij->i", rows.imag, rows.imag)


def _initial_kets(model: ClockModel, streams: _UniformStreams, n: int) -> np.ndarray:
    """Eigenstates of rho0 drawn with probability equal to their eigenvalue"""
    eigenvalues, vectors = linalg.eigh(model.initial_state.matrix)
    weights = np.clip(eigenvalues, 0.0, None)
    cumulative = np.cumsum(weights / weights.sum())
    if np.count_nonzero(weights > 1e-12) == 1:
        return np.tile(vectors[:, int(np.argmax(weights))], (n, 1))
    picks = np.searchsorted(cumulative, streams.draw(np.arange(n)), side="right")
    return vectors[:, np.minimum(picks, len(weights) - 1)].T.copy()


def _sample_chunk(
    model: ClockModel,
    propagators: _Propagators,
    indices: np.ndarray,
    seed: int,
    max_ticks: int,
    horizon: float,
) -> List[np.ndarray]:
    n = len(indices)
    streams = _UniformStreams(seed, indices)
    ticks: List[List[float]] = [[] for _ in range(n)]
    if propagators.dark:
        return [np.zeros(0) for _ in range(n)]

    phi = _initial_kets(model, streams, n).astype(np.complex128)
    jump_start = np.zeros(n)
    elapsed = np.zeros(n)
    threshold = streams.draw(np.arange(n))
    active = np.ones(n, dtype=bool)
    step = propagators.coarse_step

    while active.any():
        rows = np.flatnonzero(active)
        candidate = phi[rows] @ propagators.coarse
        norm2 = _norm2(candidate)

        advancing = norm2 > threshold[rows]
        moving = rows[advancing]
        phi[moving] = candidate[advancing]
        elapsed[moving] += step
        censored = moving[jump_start[moving] + elapsed[moving] > horizon]
        active[censored] = False

        jumping = rows[~advancing]
        if jumping.size:
            _jump(propagators, streams, phi, jump_start, elapsed, threshold, ticks, jumping, horizon, active, max_ticks)

    return [np.asarray(t, dtype=float) for t in ticks]


def _jump(propagators, streams, phi, jump_start, elapsed, threshold, ticks, rows, horizon, active, max_ticks):
    """Bisect to the jump instant of each row, then apply a channel drawn by weight"""
    state = phi[rows]
    tau = elapsed[rows].copy()
    step = propagators.coarse_step
    target = threshold[rows]
    for depth, propagator in enumerate(propagators.ladder, start=1):
        trial = state @ propagator
        keep = _norm2(trial) > target
        state[keep] = trial[keep]
        tau[keep] += step / 2**depth

    # The threshold sits between the bracket ends; interpolate inside the last interval
    after = state @ propagators.ladder[-1]
    before_norm, after_norm = _norm2(state), _norm2(after)
    gap = before_norm - after_norm
    fraction = np.divide(before_norm - target, gap, out=np.full(len(rows), 0.5), where=gap > 0.0)
    fraction = np.clip(fraction, 0.0, 1.0)
    state = state + fraction[:, None] * (after - state)
    jump_time = jump_start[rows] + tau + fraction * step / 2**LADDER_DEPTH

    past = jump_time > horizon
    active[rows[past]] = False
    rows, state, jump_time = rows[~past], state[~past], jump_time[~past]
    if not rows.size:
        return

    norms = np.linalg.norm(state, axis=1)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise StepUnderflowError("Drifted state vanished before its jump")
    state = state / norms[:, None]

    images = np.stack([state @ op.T for op in propagators.channels], axis=1)
    weights = np.sum(np.abs(images) ** 2, axis=2)
    cumulative = np.cumsum(weights, axis=1)
    if np.any(cumulative[:, -1] <= 0.0):
        raise StepUnderflowError("No jump channel is open at the sampled jump time")
    targets = streams.draw(rows) * cumulative[:, -1]
    channel = np.minimum((cumulative < targets[:, None]).sum(axis=1), len(propagators.channels) - 1)

    post = images[np.arange(len(rows)), channel]
    post = post / np.linalg.norm(post, axis=1)[:, None]
    phi[rows] = post
    jump_start[rows] = jump_time
    elapsed[rows] = 0.0
    threshold[rows] = streams.draw(rows)

    for row, k, t in zip(rows, channel, jump_time):
        if k >= propagators.n_notick:
            ticks[row].append(float(t))
            if len(ticks[row]) >= max_ticks:
                active[row] = False


def sample_trajectories(
    model: ClockModel,
    n_traj: int,
    max_ticks: int = 1,
    seed: int = 0,
    config: Optional[IntegrationConfig] = None,
) -> TrajectoryBatch:
    """Sample tick times of n_traj independent trajectories

    Deterministic in (seed, n_traj, config): trajectory i always reads its uniforms
    from the Philox stream keyed by seed at counter block i, and chunks are
    reassembled in index order whatever config.workers is.
    """
    if n_traj < 1 or max_ticks < 1:
        raise ValueError(f"Need n_traj >= 1 and max_ticks >= 1, got {n_traj}, {max_ticks}")
    config = config or IntegrationConfig.from_settings()
    horizon = config.horizon_for(model.gamma)
    propagators = _Propagators(model, config)
    if propagators.dark:
        logger.warning(f"Model {model.name!r} has no jump channel with nonzero rate; every trajectory is censored")

    chunk = config.sampler_chunk_size
    chunks = [np.arange(start, min(start + chunk, n_traj)) for start in range(0, n_traj, chunk)]

    run = partial(_sample_chunk, model, propagators, seed=seed, max_ticks=max_ticks, horizon=horizon)
    if config.workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(indices) for indices in chunks]

    tick_times = tuple(times for result in results for times in result)
    for times in tick_times:
        times.setflags(write=False)

    batch = TrajectoryBatch(
        seed=seed,
        n_traj=n_traj,
        max_ticks=max_ticks,
        horizon=horizon,
        tick_times=tick_times,
        min_samples=config.min_samples,
    )
    if batch.censored_count:
        logger.warning(f"{batch.censored_count} of {n_traj} trajectories censored at t={horizon:.6g}")

    batch = dataclasses.replace(batch, estimated=estimate_all(batch))
    logger.info(f"Sampled {n_traj} trajectories of {model.name!r} (seed {seed}, {max_ticks} tick(s))")
    return batch
