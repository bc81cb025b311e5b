"""
Heaviside Crossing
Locates where the clock's survival crosses the survival of the mean-matched Heaviside population
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List

import numpy as np
from scipy import optimize

from modules.core import MultipleCrossingsError, MuBelowFloorError, NoCrossingError
from modules.engine import ConditionedEvolution

from .moments import _require_converged, moment

logger = logging.getLogger(__name__)

EARLY_SURVIVAL_THRESHOLD = 1.0 - 1e-9
CROSSING_XTOL = 1e-10
DEFAULT_NOISE_FLOOR = 1e-8
# Dense-output samples inserted between consecutive grid points for the sign scan
SCAN_SUBDIVISIONS = 4


@dataclass(frozen=True)
class CrossingResult:
    """Crossing point t_star and the areas balanced around it

    deficit_area = integral of (P_Theta - P) before t_star,
    surplus_area = integral of (P - P_Theta) after it; equal means make them equal.
    """

    t_star: float
    t0: float
    early_interval_end: float
    deficit_area: float
    surplus_area: float
    n_sign_changes: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _heaviside_survival(t, t0: float, gamma: float):
    return np.where(np.asarray(t) <= t0, 1.0, np.exp(-gamma * (np.asarray(t) - t0)))


def _heaviside_integral(lower: float, upper: float, t0: float, gamma: float) -> float:
    """Integral of the Heaviside survival over [lower, upper], upper may be inf"""
    flat = max(0.0, min(upper, t0) - min(lower, t0))
    start = max(lower, t0)
    if upper <= start:
        return flat
    decay = math.exp(-gamma * (start - t0))
    if math.isfinite(upper):
        decay -= math.exp(-gamma * (upper - t0))
    return flat + decay / gamma


def _scan_times(evolution: ConditionedEvolution, start: float) -> np.ndarray:
    steps = evolution.step_times
    fractions = np.arange(SCAN_SUBDIVISIONS) / SCAN_SUBDIVISIONS
    dense = (steps[:-1, None] + np.diff(steps)[:, None] * fractions[None, :]).ravel()
    dense = np.append(dense, steps[-1])
    return dense[dense > start]


def _signs(difference: np.ndarray, noise_floor: float) -> np.ndarray:
    signs = np.zeros(difference.shape, dtype=int)
    signs[difference > noise_floor] = 1
    signs[difference < -noise_floor] = -1
    return signs


def _sign_changes(times: np.ndarray, signs: np.ndarray) -> List[tuple]:
    """Brackets (t_left, t_right) around every change between non-zero signs"""
    nonzero = np.flatnonzero(signs)
    brackets = []
    for left, right in zip(nonzero[:-1], nonzero[1:]):
        if signs[left] != signs[right]:
            brackets.append((float(times[left]), float(times[right])))
    return brackets


def early_interval_end(evolution: ConditionedEvolution) -> float:
    """Supremum of the initial interval on which survival stays at 1 (within 1e-9)"""
    below = np.flatnonzero(evolution.survival < EARLY_SURVIVAL_THRESHOLD)
    if below.size == 0:
        return evolution.horizon
    index = int(below[0])
    if index == 0:
        return 0.0
    left, right = float(evolution.times[index - 1]), float(evolution.times[index])
    return optimize.bisect(
        lambda t: evolution.survival_at(t) - EARLY_SURVIVAL_THRESHOLD,
        left,
        right,
        xtol=CROSSING_XTOL,
    )


def find_crossing(
    evolution: ConditionedEvolution,
    gamma: float,
    noise_floor: float = DEFAULT_NOISE_FLOOR,
) -> CrossingResult:
    """Unique t_star > t0 where P[t<=T] equals the matched Heaviside survival

    t0 = mu - 1/gamma. Differences within noise_floor are treated as zero.

    Raises:
        NotConvergedError: evolution did not converge
        MuBelowFloorError: mu < 1/gamma
        NoCrossingError: no sign change after t0 (the clock is Heaviside-matched, e.g. exponential)
        MultipleCrossingsError: more than one sign change after t0
    """
    _require_converged(evolution)
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")

    mu = moment(evolution, 1)
    t0 = mu - 1.0 / gamma
    if t0 < -1e-9 / gamma:
        raise MuBelowFloorError(f"mu={mu!r} below 1/Gamma={1.0 / gamma!r}")
    t0 = max(t0, 0.0)

    times = _scan_times(evolution, t0)
    difference = evolution.survival_on(times) - _heaviside_survival(times, t0, gamma)
    signs = _signs(difference, noise_floor)
    brackets = _sign_changes(times, signs)

    if len(brackets) > 1:
        raise MultipleCrossingsError(f"{len(brackets)} crossings after t0={t0:.6g}", crossings=brackets)

    if brackets:
        left, right = brackets[0]
        t_star = optimize.bisect(
            lambda t: evolution.survival_at(t) - float(_heaviside_survival(t, t0, gamma)),
            left,
            right,
            xtol=CROSSING_XTOL,
        )
    else:
        t_star = _tail_crossing(evolution, t0, gamma, signs, noise_floor)

    horizon = evolution.horizon
    clock_before = evolution.integrate("survival", upper=min(t_star, horizon))
    clock_after = evolution.integrate("survival", lower=min(t_star, horizon))
    if evolution.tail_rate > 0.0:
        tail_start = max(t_star, horizon)
        clock_after += evolution.survival_at_horizon * math.exp(-evolution.tail_rate * (tail_start - horizon)) / evolution.tail_rate

    result = CrossingResult(
        t_star=float(t_star),
        t0=float(t0),
        early_interval_end=float(early_interval_end(evolution)),
        deficit_area=_heaviside_integral(0.0, t_star, t0, gamma) - clock_before,
        surplus_area=clock_after - _heaviside_integral(t_star, math.inf, t0, gamma),
        n_sign_changes=len(brackets),
    )
    logger.debug(f"Crossing at t*={result.t_star:.6g} (t0={result.t0:.6g})")
    return result


def _tail_crossing(evolution: ConditionedEvolution, t0: float, gamma: float, signs: np.ndarray, noise_floor: float) -> float:
    """Crossing past the horizon, where survival follows the exponential tail

    The matched Heaviside survival decays at gamma, the tail at tail_rate <= gamma,
    so a clock still below it at the horizon overtakes it at a closed-form time.
    """
    nonzero = signs[signs != 0]
    horizon = evolution.horizon
    heaviside_h = float(_heaviside_survival(horizon, t0, gamma))
    rate = evolution.tail_rate
    survival_h = evolution.survival_at_horizon

    if nonzero.size and nonzero[-1] < 0 and survival_h > 0.0 and rate < gamma and heaviside_h - survival_h > noise_floor:
        return horizon + math.log(heaviside_h / survival_h) / (gamma - rate)
    raise NoCrossingError(f"Survival never crosses the matched Heaviside survival after t0={t0:.6g}", t0=t0)
