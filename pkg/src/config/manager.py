"""
Configuration Manager
Centralized settings for integrator, sampler and ensemble defaults
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class ConfigManager:
    """Centralized configuration management"""

    def __init__(self, config_root: Optional[str] = None):
        """Initialize configuration manager

        Args:
            config_root: Root directory for configuration files
        """
        if config_root is None:
            # Auto-detect config directory
            current_dir = Path(__file__).parent
            self.config_root = current_dir / "settings"
        else:
            self.config_root = Path(config_root)

    def load_config(self, config_name: str) -> Dict[str, Any]:
        """Load configuration from JSON file

        Args:
            config_name: Name of configuration (without .json extension)

        Returns:
            Configuration dictionary, empty if the file is missing or unreadable
        """
        config_path = self.config_root / f"{config_name}.json"

        try:
            if config_path.exists():
                with open(config_path, "r", encoding="utf-8") as f:
                    data = json.load(f)
                if not isinstance(data, dict):
                    logger.error(f"Config {config_name} is not a JSON object, ignoring it")
                    return {}
                return data
            else:
                logger.warning(f"Config file not found: {config_path}")
                return {}
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Error loading config {config_name}: {e}")
            return {}

    def get_integration_settings(self) -> Dict[str, Any]:
        """Get no-tick integrator defaults"""
        return self.load_config("integration")

    def get_sampler_settings(self) -> Dict[str, Any]:
        """Get trajectory sampler defaults"""
        return self.load_config("sampler")

    def get_ensemble_settings(self) -> Dict[str, Any]:
        """Get randomized ensemble and verify defaults"""
        return self.load_config("ensemble")


# Global config manager instance
config_manager = ConfigManager()
