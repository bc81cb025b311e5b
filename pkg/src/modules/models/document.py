"""
Model Documents
JSON files holding a clock model or an analytic oracle

Complex entries are [re, im] pairs, matrices row-major nested lists. Floats are written
with 17 significant digits, so reading a saved document back is bit-exact.
"""

import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from modules.core import TOL_HERM, MalformedDocumentError, NonHermitianError, SchemaVersionUnsupportedError
from modules.engine import ClockModel
from modules.oracles import AnalyticOracle, ErlangOracle, HeavisideOracle

logger = logging.getLogger(__name__)

MODEL_SCHEMA = "tickbound-model/1"
ORACLE_SCHEMA = "tickbound-oracle/1"
ORACLE_FAMILIES = ("erlang", "heaviside", "exponential")

Document = Dict[str, Any]

SIGNIFICANT_DIGITS = 17
# Floats travel through json.dumps as strings fenced by NUL, then lose the quotes
_FENCE = "\x00"
_FENCED = re.compile(r'"\\u0000([^"]*)\\u0000"')


def _encode_matrix(matrix: np.ndarray) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix, dtype=np.complex128)]


def _decode_matrix(entries: Any, where: str, dim: int) -> np.ndarray:
    if not isinstance(entries, list) or len(entries) != dim:
        raise MalformedDocumentError(f"{where}: expected {dim} rows")
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != dim:
            raise MalformedDocumentError(f"{where}[{i}]: expected {dim} entries")
        for j, pair in enumerate(row):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
            ):
                raise MalformedDocumentError(f"{where}[{i}][{j}]: expected a [re, im] pair of numbers, got {pair!r}")
            if not all(math.isfinite(x) for x in pair):
                raise MalformedDocumentError(f"{where}[{i}][{j}]: non-finite entry {pair!r}")
            matrix[i, j] = complex(pair[0], pair[1])
    return matrix


def _check_hermitian(matrix: np.ndarray, where: str):
    gap = np.abs(matrix - matrix.conj().T)
    if gap.max() > TOL_HERM:
        i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
        raise NonHermitianError(f"{where}[{i}][{j}] = {matrix[i, j]!r} does not match conj of [{j}][{i}] = {matrix[j, i]!r}")


def _json_safe(value: Any) -> Any:
    """Metadata with non-finite floats written as strings"""
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def serialize_model(model: ClockModel) -> Document:
    """Model document for a clock"""
    return {
        "schema_version": MODEL_SCHEMA,
        "name": model.name,
        "dim": model.dim,
        "hamiltonian": _encode_matrix(model.hamiltonian),
        "notick_lindblad_ops": [_encode_matrix(op) for op in model.notick_lindblad_ops],
        "tick_jumps": [_encode_matrix(op) for op in model.tick_jumps],
        "initial_state": _encode_matrix(model.initial_state.matrix),
        "metadata": _json_safe(model.metadata),
    }


def parse_model(doc: Document) -> ClockModel:
    """Clock model from a model document

    Raises:
        SchemaVersionUnsupportedError: unknown schema_version
        MalformedDocumentError: missing fields or badly shaped matrices
        NonHermitianError: Hamiltonian not Hermitian (names the entry)
        InvalidStateError: initial state without unit trace
    """
    if not isinstance(doc, dict):
        raise MalformedDocumentError("Model document must be a JSON object")
    version = doc.get("schema_version")
    if version != MODEL_SCHEMA:
        raise SchemaVersionUnsupportedError(f"Unsupported schema_version {version!r}, expected {MODEL_SCHEMA!r}")

    missing = [key for key in ("dim", "hamiltonian", "tick_jumps", "initial_state") if key not in doc]
    if missing:
        raise MalformedDocumentError(f"Model document is missing {missing}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MalformedDocumentError(f"dim must be a positive integer, got {dim!r}")

    hamiltonian = _decode_matrix(doc["hamiltonian"], "hamiltonian", dim)
    _check_hermitian(hamiltonian, "hamiltonian")
    notick = doc.get("notick_lindblad_ops", [])
    jumps = doc["tick_jumps"]
    if not isinstance(notick, list) or not isinstance(jumps, list):
        raise MalformedDocumentError("notick_lindblad_ops and tick_jumps must be lists of matrices")

    return ClockModel(
        hamiltonian=hamiltonian,
        notick_lindblad_ops=tuple(_decode_matrix(op, f"notick_lindblad_ops[{k}]", dim) for k, op in enumerate(notick)),
        tick_jumps=tuple(_decode_matrix(op, f"tick_jumps[{k}]", dim) for k, op in enumerate(jumps)),
        initial_state=_decode_matrix(doc["initial_state"], "initial_state", dim),
        name=str(doc.get("name", "clock")),
        metadata=doc.get("metadata") or {},
    )


def serialize_oracle(oracle: AnalyticOracle) -> Document:
    if isinstance(oracle, ErlangOracle):
        return {"schema_version": ORACLE_SCHEMA, "family": "erlang", "gamma": oracle.gamma, "m": oracle.m}
    return {"schema_version": ORACLE_SCHEMA, "family": oracle.family, "gamma": oracle.gamma, "t0": oracle.t0}


def parse_oracle(doc: Document) -> AnalyticOracle:
    """Oracle from an oracle document"""
    if doc.get("schema_version") != ORACLE_SCHEMA:
        raise SchemaVersionUnsupportedError(f"Unsupported schema_version {doc.get('schema_version')!r}")
    family = doc.get("family")
    if family not in ORACLE_FAMILIES:
        raise MalformedDocumentError(f"Unknown oracle family {family!r}, expected one of {ORACLE_FAMILIES}")
    try:
        gamma = float(doc["gamma"])
        if family == "erlang":
            return ErlangOracle(gamma=gamma, m=doc["m"])
        return HeavisideOracle(gamma=gamma, t0=float(doc.get("t0", 0.0)) if family == "heaviside" else 0.0)
    except KeyError as e:
        raise MalformedDocumentError(f"Oracle document is missing {e}") from e
    except (TypeError, ValueError) as e:
        raise MalformedDocumentError(f"Invalid oracle parameters: {e}") from e


def format_digits(value: float) -> str:
    """Float at 17 significant digits, keeping a decimal point so it reads back as a float"""
    text = format(float(value), f".{SIGNIFICANT_DIGITS}g")
    return text if any(c in text for c in ".en") else text + ".0"


def _fence_floats(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _fence_floats(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_fence_floats(v) for v in value]
    if isinstance(value, float) and math.isfinite(value):
        return f"{_FENCE}{format_digits(value)}{_FENCE}"
    return value


def dumps_document(doc: Document) -> str:
    """JSON text of a document with every finite float at 17 significant digits"""
    text = json.dumps(_fence_floats(doc), indent=2, allow_nan=False)
    return _FENCED.sub(r"\1", text)


def _write_json(doc: Document, path: Union[str, Path]):
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_document(doc))
        f.write("\n")


def save_model(model: ClockModel, path: Union[str, Path]):
    _write_json(serialize_model(model), path)
    logger.info(f"Saved model {model.name!r} (dim {model.dim}) to {path}")


def save_oracle(oracle: AnalyticOracle, path: Union[str, Path]):
    _write_json(serialize_oracle(oracle), path)
    logger.info(f"Saved {oracle.family} oracle to {path}")


def load_document(path: Union[str, Path]) -> Union[ClockModel, AnalyticOracle]:
    """Read a model or oracle document, dispatching on schema_version

    Raises:
        MalformedDocumentError: unreadable file or invalid JSON
        SchemaVersionUnsupportedError: unknown schema_version
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise MalformedDocumentError(f"Cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise MalformedDocumentError(f"{path} is not valid JSON: {e}") from e

    if not isinstance(doc, dict):
        raise MalformedDocumentError(f"{path} does not hold a JSON object")
    if doc.get("schema_version") == ORACLE_SCHEMA:
        return parse_oracle(doc)
    return parse_model(doc)
