"""
Integration Configuration
Tolerances, horizon policy and sampler settings shared by the engine and the trajectory sampler
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from config import ConfigManager, config_manager

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegrationConfig:
    """Settings for one evolution or trajectory batch

    max_horizon=None means horizon_factor / Gamma of the model being integrated.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    survival_cutoff: float = 1e-9
    max_horizon: Optional[float] = None
    horizon_factor: float = 1e4
    sample_times: Tuple[float, ...] = ()
    max_steps: int = 2_000_000
    flip_tick_anticommutator: bool = False
    sampler_coarse_step: float = 0.5
    sampler_chunk_size: int = 4096
    min_samples: int = 100
    workers: int = 1

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError(f"Tolerances must be positive (abs_tol={self.abs_tol}, rel_tol={self.rel_tol})")
        if not 0.0 < self.survival_cutoff < 1.0:
            raise ValueError(f"survival_cutoff must lie in (0, 1), got {self.survival_cutoff}")
        if self.max_horizon is not None and self.max_horizon <= 0:
            raise ValueError(f"max_horizon must be positive, got {self.max_horizon}")
        if self.horizon_factor <= 0:
            raise ValueError(f"horizon_factor must be positive, got {self.horizon_factor}")
        if self.max_steps < 1 or self.sampler_chunk_size < 1 or self.workers < 1 or self.min_samples < 2:
            raise ValueError("max_steps, sampler_chunk_size and workers must be >= 1, min_samples >= 2")
        if self.sampler_coarse_step <= 0:
            raise ValueError(f"sampler_coarse_step must be positive, got {self.sampler_coarse_step}")
        object.__setattr__(self, "sample_times", tuple(sorted(float(t) for t in self.sample_times)))

    @classmethod
    def from_settings(cls, manager: Optional[ConfigManager] = None, **overrides) -> "IntegrationConfig":
        """Build from shipped defaults, the settings files, then explicit overrides

        Overrides set to None are ignored so CLI flags can be passed through unchanged.
        """
        manager = manager or config_manager
        names = {f.name for f in dataclasses.fields(cls)}

        values: Dict[str, Any] = {}
        for settings in (manager.get_integration_settings(), manager.get_sampler_settings()):
            for key, value in settings.items():
                if key in names:
                    values[key] = value
                else:
                    logger.debug(f"Ignoring unknown setting: {key}")
        values.update({k: v for k, v in overrides.items() if v is not None})

        unknown = set(values) - names
        if unknown:
            raise ValueError(f"Unknown integration settings: {sorted(unknown)}")
        if "sample_times" in values:
            values["sample_times"] = tuple(values["sample_times"])
        return cls(**values)

    def horizon_for(self, gamma: float) -> float:
        """Absolute horizon for a model with tick rate gamma"""
        if self.max_horizon is not None:
            return float(self.max_horizon)
        if gamma <= 0:
            raise ValueError(f"Gamma must be positive to derive a horizon, got {gamma}")
        return self.horizon_factor / gamma

    def tightened(self, factor: float = 0.5) -> "IntegrationConfig":
        """Copy with both tolerances scaled by factor"""
        return dataclasses.replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["sample_times"] = list(self.sample_times)
        return data
