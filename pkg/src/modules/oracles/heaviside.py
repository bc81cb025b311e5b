"""
Heaviside Oracle
Populations that switch the tick channel on at t0 and saturate the trade-off
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import integrate

from modules.core import MuBelowFloorError
from modules.stats import TickStatistics

logger = logging.getLogger(__name__)

TimeLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class HeavisideOracle:
    """p(t) = Theta(t - t0) with elementary rate gamma"""

    gamma: float
    t0: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.t0 >= 0:
            raise ValueError(f"t0 must be non-negative, got {self.t0}")

    @property
    def mu(self) -> float:
        return self.t0 + 1.0 / self.gamma

    @property
    def sigma2(self) -> float:
        return 1.0 / (self.gamma * self.gamma)

    @property
    def family(self) -> str:
        return "exponential" if self.t0 == 0.0 else "heaviside"


def _check_times(t: TimeLike) -> np.ndarray:
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise ValueError("Times must be non-negative")
    return times


def heaviside_survival(oracle: HeavisideOracle, t: TimeLike) -> TimeLike:
    """1 up to t0, exp(-gamma (t - t0)) after"""
    times = _check_times(t)
    values = np.where(times <= oracle.t0, 1.0, np.exp(-oracle.gamma * np.maximum(times - oracle.t0, 0.0)))
    return float(values) if values.ndim == 0 else values


def heaviside_tick_pdf(oracle: HeavisideOracle, t: TimeLike) -> TimeLike:
    """0 before t0, gamma exp(-gamma (t - t0)) from t0 on"""
    times = _check_times(t)
    values = np.where(times < oracle.t0, 0.0, oracle.gamma * np.exp(-oracle.gamma * np.maximum(times - oracle.t0, 0.0)))
    return float(values) if values.ndim == 0 else values


def heaviside_statistics(oracle: HeavisideOracle) -> TickStatistics:
    """Closed form: N = (1 + gamma t0)^2, nu = 1 / (t0 + 1/gamma), bound_ratio exactly 1"""
    scaled = 1.0 + oracle.gamma * oracle.t0
    mu = oracle.mu
    return TickStatistics(
        mu=mu,
        sigma2=oracle.sigma2,
        accuracy_N=scaled * scaled,
        resolution_nu=oracle.gamma / scaled,
        gamma=oracle.gamma,
        bound_ratio=1.0,
        tail_bracket=(mu, mu),
    )


def exponential_statistics(gamma: float) -> TickStatistics:
    """Exponential decay at rate gamma, the Heaviside family at t0 = 0"""
    return heaviside_statistics(HeavisideOracle(gamma=gamma, t0=0.0))


def heaviside_match(mu: float, gamma: float) -> HeavisideOracle:
    """Heaviside oracle with the same mean tick time and rate

    Raises:
        MuBelowFloorError: mu < 1/gamma
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    t0 = mu - 1.0 / gamma
    if t0 < 0:
        raise MuBelowFloorError(f"mu={mu!r} is below the resolution floor 1/Gamma={1.0 / gamma!r}")
    return HeavisideOracle(gamma=gamma, t0=t0)


def heaviside_quadrature_moments(oracle: HeavisideOracle) -> Tuple[float, float]:
    """Mean and variance by adaptive quadrature of the tick PDF

    The variance integrates (t - mean)^2 directly rather than t_2 - t_1^2.
    """

    def pdf(t):
        return oracle.gamma * np.exp(-oracle.gamma * (t - oracle.t0))

    first, _ = integrate.quad(lambda t: t * pdf(t), oracle.t0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    variance, _ = integrate.quad(
        lambda t: (t - first) ** 2 * pdf(t), oracle.t0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200
    )
    return first, variance
