"""
Settings Manager for fillcheck
Loads engine settings from YAML or JSON; loading never writes files
"""
import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

logger = logging.getLogger(__name__)

SETTINGS_ENV_VAR = "FILLCHECK_SETTINGS"
DEFAULT_SETTINGS_FILE = Path(__file__).parent / "settings.yaml"

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
OUTPUT_FORMATS = ["table", "json"]


@dataclass
class EngineSettings:
    """Engine and CLI settings"""

    # Output
    log_level: str = "INFO"
    output_format: str = "table"  # table, json

    # Knot database
    database_path: Optional[str] = None  # CSV merged over the shipped seed table
    pretzel_max_m: int = 100
    torus_max_q: int = 15

    # Tables and property runs
    f_table_default: int = 5
    fuzz_examples: int = 100000

    def to_dict(self) -> Dict[str, Any]:
        """Convert settings to dictionary"""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EngineSettings':
        """Create settings from dictionary, ignoring unknown keys"""
        valid_fields = {f.name for f in fields(cls)}
        unknown = sorted(k for k in data if k not in valid_fields)
        if unknown:
            logger.warning(f"Ignoring unknown settings: {', '.join(unknown)}")
        return cls(**{k: v for k, v in data.items() if k in valid_fields})

    def validate(self) -> List[str]:
        """Validate settings and return list of errors"""
        errors = []

        if self.log_level not in LOG_LEVELS:
            errors.append("Invalid log level")

        if self.output_format not in OUTPUT_FORMATS:
            errors.append("Output format must be 'table' or 'json'")

        if not isinstance(self.pretzel_max_m, int) or self.pretzel_max_m < 0:
            errors.append("Pretzel limit cannot be negative")

        if not isinstance(self.torus_max_q, int) or self.torus_max_q < 3:
            errors.append("Torus listing bound must be at least 3")

        if not isinstance(self.f_table_default, int) or self.f_table_default < 0:
            errors.append("Default f table size cannot be negative")

        if not isinstance(self.fuzz_examples, int) or self.fuzz_examples < 1:
            errors.append("Fuzz example count must be at least 1")

        if self.database_path is not None and not isinstance(self.database_path, str):
            errors.append("Database path must be a string or null")

        return errors


def resolve_settings_file(explicit: Optional[Path] = None) -> Path:
    """--config, then $FILLCHECK_SETTINGS, then the shipped settings.yaml"""
    if explicit:
        return Path(explicit)
    from_env = os.environ.get(SETTINGS_ENV_VAR)
    if from_env:
        return Path(from_env)
    return DEFAULT_SETTINGS_FILE


def _read_file(path: Path) -> Dict[str, Any]:
    with open(path, 'r', encoding='utf-8') as f:
        if path.suffix.lower() == '.json':
            data = json.load(f)
        else:
            data = yaml.safe_load(f)
    return data or {}


class SettingsManager:
    """Manages engine settings"""

    def __init__(self, settings_file: Optional[Path] = None):
        self.settings_file = resolve_settings_file(settings_file)
        self.settings: EngineSettings = EngineSettings()

    def load_settings(self) -> EngineSettings:
        """Load settings from file; missing or invalid files give defaults"""
        if not self.settings_file.exists():
            logger.info(f"Settings file {self.settings_file} not found, using defaults")
            self.settings = EngineSettings()
            return self.settings

        try:
            data = _read_file(self.settings_file)
            if not isinstance(data, dict):
                raise ValueError("settings file must contain a mapping")
            self.settings = EngineSettings.from_dict(data)

            errors = self.settings.validate()
            if errors:
                logger.warning(f"Invalid settings found: {errors}")
                self.settings = EngineSettings()

            logger.debug(f"Settings loaded from {self.settings_file}")

        except (OSError, ValueError, TypeError, yaml.YAMLError) as e:
            logger.error(f"Failed to load settings: {e}")
            logger.info("Using default settings")
            self.settings = EngineSettings()

        return self.settings

    def save_settings(self, path: Optional[Path] = None):
        """Write settings as YAML to PATH, or back to the file they were loaded from"""
        self.export_settings(Path(path) if path else self.settings_file, format="yaml")

    def get_setting(self, key: str, default: Any = None) -> Any:
        """Get a specific setting value"""
        return getattr(self.settings, key, default)

    def update_setting(self, key: str, value: Any) -> bool:
        """Update a specific setting in memory"""
        if not hasattr(self.settings, key):
            logger.error(f"Unknown setting: {key}")
            return False

        old_value = getattr(self.settings, key)
        setattr(self.settings, key, value)

        errors = self.settings.validate()
        if errors:
            setattr(self.settings, key, old_value)
            logger.error(f"Invalid setting value: {errors}")
            return False

        logger.info(f"Updated setting {key}: {old_value} -> {value}")
        return True

    def export_settings(self, export_path: Path, format: str = "yaml"):
        """Export settings to file"""
        export_path = Path(export_path)
        export_path.parent.mkdir(parents=True, exist_ok=True)

        if format.lower() == "json":
            with open(export_path, 'w', encoding='utf-8') as f:
                json.dump(self.settings.to_dict(), f, indent=2)
        elif format.lower() == "yaml":
            with open(export_path, 'w', encoding='utf-8') as f:
                yaml.safe_dump(self.settings.to_dict(), f, default_flow_style=False, sort_keys=False)
        else:
            raise ValueError(f"Unsupported export format: {format}")

        logger.info(f"Settings exported to {export_path}")


# Global settings manager instance
_settings_manager: Optional[SettingsManager] = None


def get_settings_manager(settings_file: Optional[Path] = None) -> SettingsManager:
    """Get global settings manager instance; an explicit file replaces it"""
    global _settings_manager

    if _settings_manager is None or settings_file is not None:
        _settings_manager = SettingsManager(settings_file)
        _settings_manager.load_settings()

    return _settings_manager
