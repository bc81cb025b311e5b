"""
Utilities Package
Output formatting helpers
"""

from .formatting import SIGNIFICANT_DIGITS, dumps, format_float, format_value, write_csv, write_json

__all__ = [
    "SIGNIFICANT_DIGITS",
    "format_float",
    "format_value",
    "write_csv",
    "write_json",
    "dumps",
]
