"""Access to the graph files shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from agraph.agf import parse_agf
from agraph.graph import AttackGraph

FIXTURES = ("blueover", "reflection", "figure2")


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"no bundled graph {name!r}; available: {', '.join(FIXTURES)}")
    return Path(str(resources.files("agraph") / "data" / f"{name}.agf"))


def load_fixture(name: str) -> AttackGraph:
    """Parse one of the bundled graphs: ``blueover``, ``reflection`` or ``figure2``."""
    return parse_agf(fixture_path(name).read_text(encoding="utf-8"))
