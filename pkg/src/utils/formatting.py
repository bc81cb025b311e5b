"""
Output Formatting
Floats at 12 significant digits in CSV and JSON outputs
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

import numpy as np

SIGNIFICANT_DIGITS = 12


def format_float(value: float) -> str:
    """Shortest of fixed or scientific notation at 12 significant digits"""
    return format(float(value), f".{SIGNIFICANT_DIGITS}g")


def format_value(value: Any) -> Any:
    """Round floats (recursively) so json prints them at 12 significant digits

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, dict):
        return {str(k): format_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [format_value(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return float(format_float(value))
    return value


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]):
    """RFC-4180 CSV with floats at 12 significant digits"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])


def dumps(payload: Any) -> str:
    return json.dumps(format_value(payload), indent=2, allow_nan=False)


def write_json(path: Union[str, Path], payload: Any):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(payload))
        f.write("\n")
