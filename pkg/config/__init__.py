"""
Configuration for fillcheck
"""

from .settings_manager import EngineSettings, SettingsManager, get_settings_manager

__all__ = [
    'EngineSettings',
    'SettingsManager',
    'get_settings_manager',
]
