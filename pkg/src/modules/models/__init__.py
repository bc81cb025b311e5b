"""
Models Module
Clock builders, the random ensemble and model documents
"""

from .builders import (
    LadderParams,
    bose_einstein_occupation,
    build_cascade_clock,
    build_exponential_clock,
    build_ladder_clock,
    build_rabi_clock,
)
from .document import (
    MODEL_SCHEMA,
    ORACLE_SCHEMA,
    load_document,
    parse_model,
    parse_oracle,
    save_model,
    save_oracle,
    serialize_model,
    serialize_oracle,
)
from .ensemble import build_random_clock, tick_reachable

__all__ = [
    "LadderParams",
    "bose_einstein_occupation",
    "build_exponential_clock",
    "build_rabi_clock",
    "build_cascade_clock",
    "build_ladder_clock",
    "build_random_clock",
    "tick_reachable",
    "MODEL_SCHEMA",
    "ORACLE_SCHEMA",
    "serialize_model",
    "parse_model",
    "serialize_oracle",
    "parse_oracle",
    "save_model",
    "save_oracle",
    "load_document",
]
