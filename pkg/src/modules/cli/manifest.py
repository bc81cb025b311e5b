"""
Run Manifests
Provenance record written next to every command output
"""

import logging
import os
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Union

import psutil

from modules import __version__
from utils.formatting import write_json

logger = logging.getLogger(__name__)

TOOL_NAME = "tickbound"


def host_info() -> Dict[str, Any]:
    """Platform block; informational only, outputs never depend on it"""
    try:
        memory = psutil.virtual_memory()
        return {
            "system": platform.system(),
            "release": platform.release(),
            "machine": platform.machine(),
            "python_version": platform.python_version(),
            "cpu_count": psutil.cpu_count(),
            "cpu_count_logical": psutil.cpu_count(logical=True),
            "memory_total": memory.total,
            "pid": os.getpid(),
        }
    except Exception as e:
        logger.warning(f"Could not collect host information: {e}")
        return {"python_version": platform.python_version()}


class RunManifest:
    """What a command ran with; timestamp, wall_time_s and host vary between identical runs"""

    def __init__(self, command: str, arguments: Dict[str, Any], provenance: Optional[Dict[str, Any]] = None):
        self.command = command
        self.arguments = arguments
        self.provenance = provenance or {}
        self.config: Dict[str, Any] = {}
        self.seed: Optional[int] = arguments.get("seed")
        self.version = __version__
        self.outputs: Dict[str, str] = {}
        self._started = time.perf_counter()

    def add_output(self, role: str, path: Union[str, Path]):
        self.outputs[role] = str(path)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tool": TOOL_NAME,
            "version": self.version,
            "command": self.command,
            "argv": sys.argv[1:],
            "arguments": self.arguments,
            "provenance": self.provenance,
            "config": self.config,
            "seed": self.seed,
            "outputs": self.outputs,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "wall_time_s": time.perf_counter() - self._started,
            "host": host_info(),
        }

    def write(self, path: Union[str, Path]):
        write_json(path, self.to_dict())
        logger.debug(f"Manifest written to {path}")
