"""
Evolution Invariants
Grid checks every valid no-tick evolution satisfies
"""

from typing import List

import numpy as np

from modules.engine import ConditionedEvolution

SANDWICH_TOL = 1e-8
RATE_TOL = 1e-8


def sandwich_violations(evolution: ConditionedEvolution, tol: float = SANDWICH_TOL) -> List[int]:
    """Grid indices k where S[k] exp(-Gamma dt) <= S[k+1] <= S[k] fails by more than tol"""
    survival = np.asarray(evolution.survival)
    times = np.asarray(evolution.times)
    if survival.size < 2:
        return []
    floor = survival[:-1] * np.exp(-evolution.gamma * np.diff(times))
    upper_broken = survival[1:] > survival[:-1] + tol
    lower_broken = survival[1:] < floor - tol
    return [int(k) for k in np.flatnonzero(upper_broken | lower_broken)]


def evolution_violations(evolution: ConditionedEvolution, tol: float = RATE_TOL) -> List[str]:
    """Names of the grid invariants the evolution breaks"""
    found = []
    # Survival may never climb above its start, even by steps too small for the pairwise check
    if sandwich_violations(evolution) or np.max(evolution.survival) > evolution.survival[0] + SANDWICH_TOL:
        found.append("sandwich")
    if np.any(evolution.conditional_rate > evolution.gamma + tol):
        found.append("conditional_rate_bound")
    product = evolution.conditional_rate * evolution.survival
    scale = np.maximum(np.abs(evolution.tick_pdf), 1e-300)
    if np.any(np.abs(product - evolution.tick_pdf) > tol * scale + 1e-300):
        found.append("tick_pdf_identity")
    return found
