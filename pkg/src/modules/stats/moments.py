"""
Tick-Time Moments
Raw moments of the first-tick time from a converged no-tick evolution
"""

import logging
import math
from typing import Tuple

import numpy as np

from modules.core import NotConvergedError, UnsupportedMomentError
from modules.engine import ConditionedEvolution

logger = logging.getLogger(__name__)

SUPPORTED_ORDERS = (1, 2, 3, 4)
ROUTES = ("survival", "pdf")

# Grid points at the end of the run used for the slow-tail rate
TAIL_WINDOW = 10


def _require_converged(evolution: ConditionedEvolution):
    if not evolution.converged:
        raise NotConvergedError(
            f"Evolution stopped at t={evolution.horizon:.6g} with survival {evolution.survival_at_horizon:.3e} "
            f"({evolution.status}); tick statistics are undefined",
            horizon=evolution.horizon,
        )


def _require_order(k: int):
    if k not in SUPPORTED_ORDERS:
        raise UnsupportedMomentError(f"Moment order {k!r} not supported, expected one of {SUPPORTED_ORDERS}")


def exponential_tail_moment(k: int, survival: float, horizon: float, rate: float) -> float:
    """k * integral of t^(k-1) S(t) over [horizon, inf) for S decaying at a constant rate

    Closed form: k S_H (k-1)! sum_{j<k} H^j rate^(j-k) / j!. Infinite when rate is 0.
    """
    if survival <= 0.0:
        return 0.0
    if rate <= 0.0:
        return math.inf
    total = sum(horizon**j * rate ** (j - k) / math.factorial(j) for j in range(k))
    return k * survival * math.factorial(k - 1) * total


def moment(evolution: ConditionedEvolution, k: int, route: str = "survival") -> float:
    """k-th raw moment of the tick time

    Args:
        evolution: converged no-tick evolution
        k: order in 1..4
        route: "survival" integrates k t^(k-1) P[t<=T], "pdf" integrates t^k p_tick(t)

    Returns:
        t_k including the exponential tail past the horizon at evolution.tail_rate

    Raises:
        NotConvergedError: evolution did not reach the survival cutoff
        UnsupportedMomentError: k outside 1..4
    """
    _require_converged(evolution)
    _require_order(k)
    if route not in ROUTES:
        raise ValueError(f"Unknown moment route {route!r}, expected one of {ROUTES}")

    horizon = evolution.horizon
    survival_h = evolution.survival_at_horizon
    tail = exponential_tail_moment(k, survival_h, horizon, evolution.tail_rate)

    if route == "survival":
        window = k * evolution.integrate("survival", power=k - 1)
        return window + tail

    # Integration by parts of the window leaves the boundary term H^k S_H
    window = evolution.integrate("tick_pdf", power=k)
    return window + horizon**k * survival_h + tail


def moment_identity_gap(evolution: ConditionedEvolution, k: int) -> float:
    """Relative gap between the survival-route and pdf-route moments"""
    by_survival = moment(evolution, k, route="survival")
    by_pdf = moment(evolution, k, route="pdf")
    scale = max(abs(by_survival), abs(by_pdf))
    return 0.0 if scale == 0.0 else abs(by_survival - by_pdf) / scale


def mean_tail_bracket(evolution: ConditionedEvolution) -> Tuple[float, float]:
    """Worst-case range of the mean from the unknown tail past the horizon

    Lower end: the remaining mass decays at the fastest possible rate Gamma.
    Upper end: it decays at the slowest conditional rate seen over the last grid points
    (or the tail rate if smaller), or never (inf) when that rate is zero.
    """
    _require_converged(evolution)
    window = evolution.integrate("survival")
    survival_h = evolution.survival_at_horizon
    slowest = min(float(np.min(evolution.conditional_rate[-TAIL_WINDOW:])), evolution.tail_rate)

    lower = window + exponential_tail_moment(1, survival_h, evolution.horizon, evolution.gamma)
    upper = window + exponential_tail_moment(1, survival_h, evolution.horizon, slowest)
    return lower, upper
