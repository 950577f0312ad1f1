"""Application settings."""

import json
import os
from pathlib import Path
from typing import Any

PROJECT_ROOT = Path(__file__).parent.parent.parent
CONFIG_ENV_VAR = "UAV_COVERAGE_CONFIG"


class SettingsLoader:
    """
    Singleton for loading and caching tooling settings.

    Only numerical and output knobs live here; physical parameters come from scenarios.
    """

    _instance = None
    _initialized = False

    DEFAULTS = {
        "log_dir": "logs",
        "log_file": "actions.log",
        "log_level": "INFO",
        "log_max_size_mb": 10,
        "log_backup_count": 5,
        "output_dir": "results",
        "quad_epsabs": 1e-14,
        "quad_epsrel": 1e-8,
        "quad_limit": 200,
        "quad_tail_tolerance": 1e-12,
        "mc_trials": 100_000,
        "mc_seed": 20240601,
        "mc_radius_m": 10_000.0,
        "mc_block_size": 50_000,
        "mc_max_expected_points": 1e7,
        "workers": 1,
        "tolerable_coverage": 0.55,
    }

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if SettingsLoader._initialized:
            return
        self._config = dict(self.DEFAULTS)
        self._load_config()
        SettingsLoader._initialized = True

    @property
    def config_path(self) -> Path:
        """Path of the optional JSON overlay."""
        override = os.getenv(CONFIG_ENV_VAR)
        if override:
            return Path(override)
        return PROJECT_ROOT / "config.json"

    def _load_config(self):
        """Load configuration from config.json if exists."""
        config_path = self.config_path
        if config_path.exists():
            try:
                with open(config_path, encoding="utf-8") as f:
                    user_config = json.load(f)
                    self._config.update(user_config)
            except (json.JSONDecodeError, OSError):
                pass

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by key."""
        return self._config.get(key, default if default is not None else self.DEFAULTS.get(key))

    def set(self, key: str, value: Any):
        """Override a value for the lifetime of the process."""
        self._config[key] = value

    def reload(self):
        """Reload configuration from file."""
        self._config = dict(self.DEFAULTS)
        self._load_config()

    @property
    def log_dir(self) -> Path:
        """Get log directory path."""
        return PROJECT_ROOT / self.get("log_dir")

    @property
    def output_dir(self) -> Path:
        """Default directory for CSV, manifest and plot artefacts."""
        path = Path(self.get("output_dir"))
        return path if path.is_absolute() else Path.cwd() / path

    @property
    def workers(self) -> int:
        return max(1, int(self.get("workers")))

    def quadrature(self):
        """Quadrature settings built from the quad_* keys."""
        from uav_coverage.core.coverage import QuadratureSettings

        return QuadratureSettings(
            epsabs=float(self.get("quad_epsabs")),
            epsrel=float(self.get("quad_epsrel")),
            limit=int(self.get("quad_limit")),
            tail_tolerance=float(self.get("quad_tail_tolerance")),
        )


settings = SettingsLoader()
