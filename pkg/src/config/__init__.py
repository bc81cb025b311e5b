"""
Configuration Package
Settings and Configuration Management
"""

from .manager import ConfigManager, config_manager

__all__ = [
    "ConfigManager",
    "config_manager",
]
