"""Configuration management.

TIER 1: May import from core only.

Settings come from ``refiner.jsonc`` (or ``refiner.json``) in the working
directory, or from the file named by ``REFINER_CONFIG``. Values missing from
the file fall back to DEFAULTS. JSONC comments and trailing commas are allowed.
"""

import os
from pathlib import Path
from typing import Any

from core.errors import ConfigError
from core.jsonc import loads

# Cache for loaded config (keyed by cwd)
_config_cache: dict[Path, dict] = {}

# Config file names (priority order)
CONFIG_FILES = ["refiner.jsonc", "refiner.json"]
CONFIG_ENV_VAR = "REFINER_CONFIG"

DEFAULTS: dict[str, Any] = {
    "kernel": {
        "fuel": 1_000_000,
        "impredicative_prop": True,
    },
    "refiner": {
        "beta_rule": False,
        "mono": False,
        "max_steps": 200_000,
        "index_propagation": True,
    },
    "coercions": {
        "warn_overlap": True,
    },
    "logging": {
        "level": "WARNING",
    },
}


def get_config_path() -> Path | None:
    """Find the config file.

    ``REFINER_CONFIG`` wins; otherwise refiner.jsonc, then refiner.json, in
    the current directory.

    Raises:
        ConfigError: If REFINER_CONFIG names a missing file.
    """
    if env_path := os.environ.get(CONFIG_ENV_VAR):
        path = Path(env_path)
        if not path.is_file():
            raise ConfigError(f"{CONFIG_ENV_VAR} points to missing file {path}")
        return path

    for filename in CONFIG_FILES:
        config_path = Path.cwd() / filename
        if config_path.exists():
            return config_path

    return None


def load_config() -> dict:
    """Load the user config merged over DEFAULTS.

    Returns:
        Configuration dictionary.

    Raises:
        ConfigError: On unreadable or malformed files.
    """
    cwd = Path.cwd()
    if cwd in _config_cache:
        return _config_cache[cwd]

    config_path = get_config_path()
    user: dict = {}
    if config_path is not None:
        try:
            user = loads(config_path.read_text(encoding="utf-8"), source=config_path.name)
        except UnicodeDecodeError as e:
            raise ConfigError(f"Cannot read {config_path.name}: encoding error - {e}") from e

    _config_cache[cwd] = _merge(DEFAULTS, user)
    return _config_cache[cwd]


def _merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def get(key: str, default: Any = None) -> Any:
    """Get config value by dot notation.

    Args:
        key: Dot-separated key path (e.g., "kernel.fuel").
        default: Default value if key not found.

    Example:
        get("refiner.beta_rule")  # False unless enabled in refiner.jsonc
    """
    value: Any = load_config()
    for part in key.split("."):
        if isinstance(value, dict) and part in value:
            value = value[part]
        else:
            return default
    return value


def clear_cache() -> None:
    """Clear config cache (for testing)."""
    _config_cache.clear()
