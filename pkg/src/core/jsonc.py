"""JSONC reader - JSON with comments and trailing commas.

TIER 0: May import from core and the Python stdlib only.

Used for the optional ``refiner.jsonc`` configuration file.
"""

import json
import re
from typing import Any

from core.errors import ConfigError

# Strings are matched first so that comment markers inside them survive.
_TOKEN = re.compile(
    r'(?P<string>"(?:\\.|[^"\\])*")'
    r"|(?P<line>//[^\n]*)"
    r"|(?P<block>/\*.*?(?:\*/|\Z))",
    re.DOTALL,
)
_TRAILING = re.compile(r'(?P<string>"(?:\\.|[^"\\])*")|(?P<comma>,(?=\s*[\]}]))', re.DOTALL)


def strip_comments(content: str) -> str:
    """Remove ``//`` and ``/* */`` comments outside of strings.

    An unterminated block comment runs to the end of the input.
    """
    return _TOKEN.sub(lambda m: m.group("string") or "", content)


def strip_trailing_commas(content: str) -> str:
    """Remove commas directly followed by ``]`` or ``}``."""
    return _TRAILING.sub(lambda m: m.group("string") or "", content)


def parse_jsonc(content: str) -> str:
    """Convert JSONC text to plain JSON text."""
    return strip_trailing_commas(strip_comments(content))


def loads(content: str, source: str = "<string>") -> dict[str, Any]:
    """Parse JSONC text into a dict.

    Raises:
        ConfigError: On malformed JSON or a non-object top level.
    """
    if not content.strip():
        return {}
    try:
        data = json.loads(parse_jsonc(content))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    return data
