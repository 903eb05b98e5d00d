from __future__ import annotations

from typing import Any


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def next_power_of_two_above(value: int) -> int:
    """Smallest power of two strictly greater than ``value`` (value ≥ 0)."""
    if value < 0:
        raise ValueError(f"Expected a non-negative value, got {value}")
    return 1 << value.bit_length()


def is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


def flatten_mapping(data: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    """Flatten nested mappings into dotted keys: {"rt": {"ee": 22}} -> {"rt.ee": 22}."""
    flat: dict[str, Any] = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_mapping(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def split_list_value(value: Any) -> list[Any]:
    """Sweep axis values: "100,101" or [100, 101] -> list."""
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return [value]
