"""Named instances shipped with the package."""

from __future__ import annotations

import json
from importlib import resources

from .model import Instance, RandomPriority, load_instance

NAMES = ("thm1", "thm2", "lemma3", "two_agent", "lef_hundred", "rsd_inefficiency")


def fixture_text(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    return resources.files(__package__).joinpath("fixtures", f"{name}.json").read_text()


def load_fixture(name: str) -> tuple[Instance, RandomPriority]:
    return load_instance(json.loads(fixture_text(name)))
