"""
Utility helper functions.

Small numeric and parsing helpers shared across the codebase.
"""

import hashlib
from typing import Sequence

import numpy as np


def round_half_up(values: np.ndarray) -> np.ndarray:
    """
    Round to the nearest integer, ties away from minus infinity.

    Args:
        values: Array of reals

    Returns:
        Array of rounded reals (same shape)
    """
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


def scale_to_bytes(
    values: np.ndarray, vmin: float, vmax: float
) -> np.ndarray:
    """
    Linearly map [vmin, vmax] onto 0..255 with half-up rounding.

    A degenerate range (vmax <= vmin) maps everything to 0.

    Args:
        values: Array of reals
        vmin: Value mapped to 0
        vmax: Value mapped to 255

    Returns:
        uint8 array of the same shape
    """
    if vmax <= vmin:
        return np.zeros(np.shape(values), dtype=np.uint8)
    scaled = (np.asarray(values, dtype=np.float64) - vmin) * (255.0 / (vmax - vmin))
    return np.clip(round_half_up(scaled), 0, 255).astype(np.uint8)


def parse_number_list(text: str, count: int | None = None) -> list[float]:
    """
    Parse a comma-separated list of numbers.

    Args:
        text: Text such as "0,0,64,64"
        count: Required number of entries, if any

    Returns:
        List of floats

    Raises:
        ValueError: If an entry is not numeric or the count is wrong
    """
    parts = [part.strip() for part in text.split(",") if part.strip()]
    numbers = [float(part) for part in parts]
    if count is not None and len(numbers) != count:
        raise ValueError(f"expected {count} comma-separated numbers, got {len(numbers)}")
    return numbers


def sha256_hex(data: bytes) -> str:
    """Hex SHA-256 digest of a byte string."""
    return hashlib.sha256(data).hexdigest()


def unique_names(names: Sequence[str]) -> bool:
    """Check that a sequence of names has no duplicates."""
    return len(set(names)) == len(names)
