"""Tests for the tier rules stated in every module docstring."""

import ast
import re
from pathlib import Path

import pytest

SRC = Path(__file__).parent.parent / "src"
LAYERS = {"core": 0, "lib": 1, "kernel": 2, "refine": 3, "cli": 4}
TIER = re.compile(r"TIER (\d)")


def modules() -> list[Path]:
    return sorted(p for layer in LAYERS for p in (SRC / layer).glob("*.py"))


def imported_layers(tree: ast.Module) -> set[str]:
    found = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            names = [alias.name for alias in node.names]
        elif isinstance(node, ast.ImportFrom) and node.module and node.level == 0:
            names = [node.module]
        else:
            continue
        found.update(n.split(".")[0] for n in names if n.split(".")[0] in LAYERS)
    return found


@pytest.mark.parametrize("path", modules(), ids=lambda p: f"{p.parent.name}/{p.name}")
class TestTiers:
    """Each module states its tier and imports only from lower or equal tiers."""

    def test_docstring_names_tier(self, path):
        doc = ast.get_docstring(ast.parse(path.read_text(encoding="utf-8"))) or ""
        match = TIER.search(doc)
        assert match, f"{path} has no TIER line"
        assert int(match.group(1)) == LAYERS[path.parent.name]

    def test_imports_respect_tier(self, path):
        tree = ast.parse(path.read_text(encoding="utf-8"))
        tier = LAYERS[path.parent.name]
        upward = {layer for layer in imported_layers(tree) if LAYERS[layer] > tier}
        assert not upward, f"{path} imports from higher tiers: {sorted(upward)}"
