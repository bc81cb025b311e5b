"""
Erlang Oracle
One tick per m independent elementary events: the classical averaging line N = Gamma / nu
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import stats

from modules.stats import TickStatistics

TimeLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ErlangOracle:
    gamma: float
    m: int

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def family(self) -> str:
        return "erlang"

    def distribution(self):
        return stats.erlang(self.m, scale=1.0 / self.gamma)


def erlang_statistics(oracle: ErlangOracle) -> TickStatistics:
    """Closed form: mu = m/gamma, sigma2 = m/gamma^2, N = m, nu = gamma/m"""
    mu = oracle.m / oracle.gamma
    accuracy = float(oracle.m)
    resolution = oracle.gamma / oracle.m
    return TickStatistics(
        mu=mu,
        sigma2=oracle.m / (oracle.gamma * oracle.gamma),
        accuracy_N=accuracy,
        resolution_nu=resolution,
        gamma=oracle.gamma,
        bound_ratio=1.0 / oracle.m,
        tail_bracket=(mu, mu),
    )


def erlang_survival(oracle: ErlangOracle, t: TimeLike) -> TimeLike:
    values = oracle.distribution().sf(np.asarray(t, dtype=float))
    return float(values) if np.ndim(values) == 0 else values


def erlang_tick_pdf(oracle: ErlangOracle, t: TimeLike) -> TimeLike:
    values = oracle.distribution().pdf(np.asarray(t, dtype=float))
    return float(values) if np.ndim(values) == 0 else values
