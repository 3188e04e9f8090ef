"""Tests for lib/config.py - Configuration loading and access."""

import json

import pytest

from core.errors import ConfigError
from lib.config import DEFAULTS, clear_cache, get, get_config_path, load_config
from refine.refiner import RefinerOptions


class TestGetConfigPath:
    """Tests for get_config_path()."""

    def test_no_file(self, tmp_path):
        """Should return None when no config file exists."""
        assert get_config_path() is None

    def test_prefers_jsonc_over_json(self, tmp_path):
        """Should prefer refiner.jsonc over refiner.json."""
        (tmp_path / "refiner.jsonc").write_text("{}")
        (tmp_path / "refiner.json").write_text("{}")

        assert get_config_path() == tmp_path / "refiner.jsonc"

    def test_falls_back_to_json(self, tmp_path):
        """Should find refiner.json when there is no refiner.jsonc."""
        (tmp_path / "refiner.json").write_text("{}")

        assert get_config_path() == tmp_path / "refiner.json"

    def test_env_var_wins(self, tmp_path, monkeypatch):
        """REFINER_CONFIG should override the working directory files."""
        other = tmp_path / "elsewhere.jsonc"
        other.write_text("{}")
        (tmp_path / "refiner.jsonc").write_text("{}")
        monkeypatch.setenv("REFINER_CONFIG", str(other))

        assert get_config_path() == other

    def test_env_var_missing_file(self, tmp_path, monkeypatch):
        """Should raise ConfigError when REFINER_CONFIG names no file."""
        monkeypatch.setenv("REFINER_CONFIG", str(tmp_path / "missing.jsonc"))

        with pytest.raises(ConfigError, match="missing file"):
            get_config_path()


class TestLoadConfig:
    """Tests for load_config()."""

    def test_defaults_without_file(self):
        """Should return DEFAULTS when no file exists."""
        assert load_config() == DEFAULTS

    def test_user_values_merge_over_defaults(self, tmp_path):
        """Should keep defaults for keys the file does not set."""
        (tmp_path / "refiner.json").write_text(json.dumps({"refiner": {"mono": True}}))

        result = load_config()

        assert result["refiner"]["mono"] is True
        assert result["refiner"]["max_steps"] == DEFAULTS["refiner"]["max_steps"]
        assert result["kernel"] == DEFAULTS["kernel"]

    def test_jsonc_comments_and_trailing_commas(self, tmp_path):
        """Should accept JSONC syntax."""
        (tmp_path / "refiner.jsonc").write_text(
            """{
    // bigger budget for long scripts
    "refiner": {"max_steps": 5000,},
}"""
        )

        assert get("refiner.max_steps") == 5000

    def test_caches_result(self, tmp_path):
        """Should cache config after first load."""
        path = tmp_path / "refiner.json"
        path.write_text(json.dumps({"kernel": {"fuel": 10}}))

        first = load_config()
        path.write_text(json.dumps({"kernel": {"fuel": 20}}))
        second = load_config()

        assert first["kernel"]["fuel"] == 10
        assert second["kernel"]["fuel"] == 10

        clear_cache()
        assert load_config()["kernel"]["fuel"] == 20

    def test_invalid_json(self, tmp_path):
        """Should raise ConfigError with the position of the error."""
        (tmp_path / "refiner.json").write_text("invalid json {")

        with pytest.raises(ConfigError, match="refiner.json:1:"):
            load_config()

    def test_defaults_are_not_mutated(self, tmp_path):
        """Merging should leave DEFAULTS untouched."""
        (tmp_path / "refiner.json").write_text(json.dumps({"logging": {"level": "DEBUG"}}))

        load_config()

        assert DEFAULTS["logging"]["level"] == "WARNING"


class TestGet:
    """Tests for get() - dot notation config access."""

    def test_nested_key(self):
        """Should read nested defaults with dot notation."""
        assert get("kernel.impredicative_prop") is True
        assert get("coercions.warn_overlap") is True

    def test_returns_default_if_missing(self):
        """Should return default for missing key."""
        assert get("nonexistent.key", "default_value") == "default_value"

    def test_returns_none_if_missing_no_default(self):
        """Should return None for missing key without default."""
        assert get("nonexistent") is None

    def test_returns_dict(self):
        """Should return dict for nested object."""
        assert get("refiner")["beta_rule"] is False

    def test_unknown_keys_are_kept(self, tmp_path):
        """Should expose keys that have no default."""
        (tmp_path / "refiner.json").write_text(json.dumps({"extra": ["a", "b"]}))

        assert get("extra") == ["a", "b"]


class TestRefinerOptions:
    """RefinerOptions.from_config reads the refiner.* keys."""

    def test_defaults(self):
        """Should match the dataclass defaults."""
        assert RefinerOptions.from_config() == RefinerOptions()

    def test_from_file(self, tmp_path):
        """Should pick up configured switches."""
        (tmp_path / "refiner.json").write_text(
            json.dumps({"refiner": {"beta_rule": True, "index_propagation": False}})
        )

        options = RefinerOptions.from_config()

        assert options.beta_rule is True
        assert options.index_propagation is False

    def test_overrides_win(self, tmp_path):
        """Explicit overrides should beat the file; None leaves it alone."""
        (tmp_path / "refiner.json").write_text(json.dumps({"refiner": {"max_steps": 10}}))

        assert RefinerOptions.from_config(max_steps=99).max_steps == 99
        assert RefinerOptions.from_config(max_steps=None).max_steps == 10
