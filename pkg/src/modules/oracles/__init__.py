"""
Oracles Module
Closed-form reference families: exponential decay, Heaviside populations, Erlang averaging
"""

from typing import Union

from .erlang import ErlangOracle, erlang_statistics, erlang_survival, erlang_tick_pdf
from .heaviside import (
    HeavisideOracle,
    exponential_statistics,
    heaviside_match,
    heaviside_quadrature_moments,
    heaviside_statistics,
    heaviside_survival,
    heaviside_tick_pdf,
)

AnalyticOracle = Union[HeavisideOracle, ErlangOracle]


def oracle_statistics(oracle: AnalyticOracle):
    """Closed-form TickStatistics of any oracle"""
    if isinstance(oracle, ErlangOracle):
        return erlang_statistics(oracle)
    return heaviside_statistics(oracle)


__all__ = [
    "AnalyticOracle",
    "HeavisideOracle",
    "ErlangOracle",
    "heaviside_survival",
    "heaviside_tick_pdf",
    "heaviside_statistics",
    "heaviside_match",
    "heaviside_quadrature_moments",
    "exponential_statistics",
    "erlang_statistics",
    "erlang_survival",
    "erlang_tick_pdf",
    "oracle_statistics",
]
