"""
CLI Module
Command handlers and run manifests behind src/main.py
"""

from .commands import (
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_SUITE_FAILED,
    EXIT_USAGE,
    cmd_build,
    cmd_simulate,
    cmd_stats,
    cmd_sweep,
    cmd_trajectories,
    cmd_verify,
    model_seed,
    run_command,
    verify_model,
)
from .manifest import RunManifest, host_info

__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_NOT_CONVERGED",
    "EXIT_SUITE_FAILED",
    "cmd_simulate",
    "cmd_stats",
    "cmd_sweep",
    "cmd_verify",
    "cmd_trajectories",
    "cmd_build",
    "model_seed",
    "run_command",
    "verify_model",
    "RunManifest",
    "host_info",
]
