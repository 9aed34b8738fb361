"""
Utility functions for artifact files and unit handling.

This module provides the writers every scenario goes through (CSV, JSON,
checksums) and the conversions between the f = ω/2π values configs are
written in and the angular units the library computes in.
"""

import csv
import hashlib
import math
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

import numpy as np
import orjson

# orjson options shared by every JSON artifact
JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY

# Significant digits for CSV numbers
CSV_DIGITS = 12


def sha256_file(file_path: Union[str, Path]) -> str:
    """
    Calculate the SHA256 checksum of an artifact.

    Args:
        file_path: Path to the file to checksum

    Returns:
        SHA256 checksum string in the format "sha256:hexdigest"

    How it works:
        The file is read in 8KB chunks and fed to a single hasher, so large
        trajectory dumps never have to sit in memory at once.

    Example:
        checksum = sha256_file("output/grover-ideal/grover.json")
        # Returns: "sha256:9f2c..."
    """
    sha256_hash = hashlib.sha256()
    with open(file_path, "rb") as f:
        for byte_block in iter(lambda: f.read(8192), b""):
            sha256_hash.update(byte_block)
    return f"sha256:{sha256_hash.hexdigest()}"


# -------------------------------------------------------
# UNITS
# -------------------------------------------------------

def mhz_to_angular(f_mhz: float) -> float:
    """f in MHz → ω = 2πf in rad/µs."""
    return 2.0 * math.pi * f_mhz


def ghz_to_angular(f_ghz: float) -> float:
    """f in GHz → ω = 2π·1000·f in rad/µs."""
    return 2.0 * math.pi * 1000.0 * f_ghz


def angular_to_mhz(omega: float) -> float:
    return omega / (2.0 * math.pi)


# -------------------------------------------------------
# WRITERS
# -------------------------------------------------------

def format_value(value: Any) -> str:
    """
    Render one CSV cell.

    Floats get 12 significant digits; complex values are not accepted here
    (export magnitudes or real/imaginary columns instead).
    """
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{CSV_DIGITS}g")
    return str(value)


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """
    Write a header row plus data rows with LF line endings.

    Example:
        write_csv(out / "sweep.csv", ["b", "h", "oracle", "fidelity"], rows)
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def _default(obj):
    if isinstance(obj, complex) or isinstance(obj, np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray) and np.iscomplexobj(obj):
        return np.stack([obj.real, obj.imag], axis=-1).tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(data: Any) -> bytes:
    """Sorted, indented JSON with a trailing newline; complex numbers become [re, im]."""
    return orjson.dumps(data, default=_default, option=JSON_OPTIONS) + b"\n"


def write_json(path: Union[str, Path], data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(data))
    return path
