"""Tests for core/jsonc.py - the configuration file reader."""

import json

import pytest

from core.errors import ConfigError
from core.jsonc import loads, parse_jsonc, strip_comments, strip_trailing_commas


class TestStripComments:
    """Tests for strip_comments()."""

    def test_line_and_block_comments(self):
        """Should remove both comment styles."""
        content = """{
    // budgets
    "kernel": {"fuel": 100}, /* per call */
    "refiner": {"max_steps": 50}
}"""
        assert json.loads(strip_comments(content)) == {
            "kernel": {"fuel": 100},
            "refiner": {"max_steps": 50},
        }

    def test_markers_inside_strings_survive(self):
        """Should keep // and /* inside strings."""
        content = '{"a": "https://x", "b": "/* kept */", "c": "q\\" // still"}'
        assert json.loads(strip_comments(content)) == {
            "a": "https://x",
            "b": "/* kept */",
            "c": 'q" // still',
        }

    def test_no_comments(self):
        """Should return unchanged content without comments."""
        content = '{"logging": {"level": "INFO"}}'
        assert strip_comments(content) == content

    def test_unclosed_block_comment(self):
        """Should drop everything after an unterminated /*."""
        assert strip_comments('{"a": 1} /* unclosed') == '{"a": 1} '


class TestTrailingCommas:
    """Tests for strip_trailing_commas()."""

    def test_object_and_array(self):
        """Should drop commas before closing brackets."""
        assert json.loads(strip_trailing_commas('{"a": [1, 2,], "b": 3,}')) == {
            "a": [1, 2],
            "b": 3,
        }

    def test_commas_in_strings_survive(self):
        """Should keep ',}' inside strings."""
        assert json.loads(strip_trailing_commas('{"a": ",}",}')) == {"a": ",}"}

    def test_comment_before_closing_brace(self):
        """Should handle a trailing comma followed by a comment."""
        assert json.loads(parse_jsonc('{"a": 1, // last\n}')) == {"a": 1}


class TestLoads:
    """Tests for loads()."""

    def test_empty_is_empty_object(self):
        """Should treat blank input as {}."""
        assert loads("  \n") == {}

    def test_malformed(self):
        """Should raise ConfigError with source and position."""
        with pytest.raises(ConfigError, match=r"refiner.jsonc:2:"):
            loads('{\n  "a": }', source="refiner.jsonc")

    def test_top_level_must_be_object(self):
        """Should reject arrays and scalars."""
        with pytest.raises(ConfigError, match="top level"):
            loads("[1, 2]")
