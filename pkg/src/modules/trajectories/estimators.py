"""
Sample Estimators
Plug-in tick statistics with standard errors, and a goodness-of-fit check against the engine
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy import stats

from modules.core import InsufficientSamplesError
from modules.engine import ConditionedEvolution

from .batch import TrajectoryBatch

logger = logging.getLogger(__name__)

GOF_CONFIDENCE = 0.999
MIN_EXPECTED_COUNT = 5.0


@dataclass(frozen=True)
class TickEstimate:
    """Sample statistics of one tick's waiting time; se_* are standard errors"""

    tick_index: int
    n_samples: int
    mu_hat: float
    sigma2_hat: float
    N_hat: float
    nu_hat: float
    se_mu: float
    se_sigma2: float
    se_N: float
    se_nu: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def estimate_from_waiting_times(waits: np.ndarray, tick_index: int = 1, min_samples: int = 100) -> TickEstimate:
    """Mean, unbiased variance and N = mu^2 / sigma^2 with delta-method errors

    Raises:
        InsufficientSamplesError: fewer than min_samples waiting times
    """
    waits = np.asarray(waits, dtype=float)
    n = waits.size
    if n < max(min_samples, 4):
        raise InsufficientSamplesError(f"Tick {tick_index}: {n} uncensored samples, need at least {min_samples}")

    mu = float(np.mean(waits))
    sigma2 = float(np.var(waits, ddof=1))
    centered = waits - mu
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))

    var_mu = sigma2 / n
    var_sigma2 = max((m4 - sigma2 * sigma2 * (n - 3) / (n - 1)) / n, 0.0)
    cov = m3 / n

    accuracy = mu * mu / sigma2
    d_mu = 2.0 * mu / sigma2
    d_sigma2 = -mu * mu / (sigma2 * sigma2)
    var_accuracy = d_mu * d_mu * var_mu + d_sigma2 * d_sigma2 * var_sigma2 + 2.0 * d_mu * d_sigma2 * cov

    return TickEstimate(
        tick_index=tick_index,
        n_samples=n,
        mu_hat=mu,
        sigma2_hat=sigma2,
        N_hat=accuracy,
        nu_hat=1.0 / mu,
        se_mu=math.sqrt(var_mu),
        se_sigma2=math.sqrt(var_sigma2),
        se_N=math.sqrt(max(var_accuracy, 0.0)),
        se_nu=math.sqrt(var_mu) / (mu * mu),
    )


def estimate_statistics(batch: TrajectoryBatch, tick_index: int = 1, min_samples: Optional[int] = None) -> TickEstimate:
    """Estimator record for waiting times before tick tick_index

    Raises:
        InsufficientSamplesError: fewer than min_samples (default batch.min_samples) uncensored samples
    """
    min_samples = batch.min_samples if min_samples is None else min_samples
    return estimate_from_waiting_times(batch.waiting_times(tick_index), tick_index=tick_index, min_samples=min_samples)


def estimate_all(batch: TrajectoryBatch) -> Dict[int, dict]:
    """Estimator records for every tick index with enough samples"""
    records = {}
    for tick_index in range(1, batch.max_ticks + 1):
        try:
            records[tick_index] = estimate_statistics(batch, tick_index).to_dict()
        except InsufficientSamplesError as e:
            logger.debug(f"Skipping estimate: {e}")
    return records


def first_tick_goodness_of_fit(batch: TrajectoryBatch, evolution: ConditionedEvolution, bins: int = 100) -> Dict[str, Any]:
    """Chi-square test of the first-tick histogram against the engine's survival

    Bins split [0, evolution.horizon] evenly, plus one overflow bin for later or missing
    ticks. Adjacent bins are merged until each expects at least 5 counts.
    """
    if bins < 1:
        raise ValueError(f"bins must be positive, got {bins}")
    edges = np.linspace(0.0, evolution.horizon, bins + 1)
    survival = evolution.survival_on(edges)
    expected = np.append(-np.diff(survival), survival[-1]) * batch.n_traj

    first = batch.first_tick_times()
    counts, _ = np.histogram(first[first <= evolution.horizon], bins=edges)
    observed = np.append(counts, batch.n_traj - counts.sum()).astype(float)

    merged_observed, merged_expected = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += max(e, 0.0)
        if acc_e >= MIN_EXPECTED_COUNT:
            merged_observed.append(acc_o)
            merged_expected.append(acc_e)
            acc_o = acc_e = 0.0
    if merged_expected:
        merged_observed[-1] += acc_o
        merged_expected[-1] += acc_e
    else:
        merged_observed, merged_expected = [acc_o], [acc_e]

    observed_arr = np.asarray(merged_observed)
    expected_arr = np.asarray(merged_expected)
    dof = max(len(expected_arr) - 1, 1)
    statistic = float(np.sum((observed_arr - expected_arr) ** 2 / np.maximum(expected_arr, 1e-300)))
    critical = float(stats.chi2.ppf(GOF_CONFIDENCE, dof))
    return {
        "statistic": statistic,
        "dof": dof,
        "critical_value": critical,
        "p_value": float(stats.chi2.sf(statistic, dof)),
        "passed": statistic < critical,
    }
