"""Built-in example configurations shipped as package resources."""

from __future__ import annotations

from shockpatch.settings import example_config_path, load_run_config
from shockpatch.typing.config import RunConfig

EXAMPLE_NUMBERS = (1, 2, 3)


def load_example(number: int) -> RunConfig:
    """Load one built-in example.

    Args:
        number (int): 1, 2 or 3.

    Raises:
        ValueError: for an unknown example number.

    Returns:
        RunConfig: The example configuration.
    """
    if number not in EXAMPLE_NUMBERS:
        raise ValueError(f"unknown example {number}; choose one of {EXAMPLE_NUMBERS}")
    return load_run_config(example_config_path(number))


def builtin_examples() -> list[RunConfig]:
    """The three built-in examples, in order."""
    return [load_example(number) for number in EXAMPLE_NUMBERS]
