"""
Parameter Validation Utilities
Checks and parses command-line input before any computation starts
"""

import datetime
import functools
import math
import re
import sys
from typing import Dict, List, Optional, Tuple

import numpy as np

from errors import ParameterError, QFTError

EXIT_OK = 0
EXIT_SELFTEST_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ERROR = 3


class ConfigValidator:
    """
    Validates run parameters.
    Every check returns (is_valid, error_message) and never raises.
    """

    # Parameter constraints
    Q_MIN = 1.0
    Q_MAX = 2.0
    MAX_GRID_POINTS = 100_000
    ALLOWED_FORMATS = ["csv", "json"]
    ALLOWED_DENSITIES = ["hilhorst", "qgaussian", "tabulated"]
    DENSITY_KEYS = {
        "hilhorst": {"a", "b", "q"},
        "qgaussian": {"q", "width"},
        "tabulated": {"path", "q"},
    }
    REQUIRED_KEYS = {
        "hilhorst": {"a", "b", "q"},
        "qgaussian": {"q", "width"},
        "tabulated": {"path"},
    }

    @staticmethod
    def validate_deformation(value: float, name: str = "q") -> Tuple[bool, Optional[str]]:
        """
        Validate a deformation index against the admissible range [1, 2).

        Args:
            value: Index to check
            name: Parameter name used in the message

        Returns:
            Tuple of (is_valid, error_message)
        """
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            return False, f"{name} must be a finite number"

        if not (ConfigValidator.Q_MIN <= value < ConfigValidator.Q_MAX):
            return False, f"{name}={value} outside admissible range [1,2)"

        return True, None

    @staticmethod
    def validate_positive(value: float, name: str) -> Tuple[bool, Optional[str]]:
        if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
            return False, f"{name} must be a positive finite number, got {value}"
        return True, None

    @staticmethod
    def validate_k_grid(k_min: float, k_max: float, n: int) -> Tuple[bool, Optional[str]]:
        """
        Validate a uniform k-grid specification.

        Returns:
            Tuple of (is_valid, error_message)
        """
        if not (math.isfinite(k_min) and math.isfinite(k_max)):
            return False, "k-grid bounds must be finite"

        if not k_min < k_max:
            return False, f"k-grid needs k_min < k_max, got {k_min} >= {k_max}"

        if n < 2:
            return False, f"k-grid needs at least 2 points, got {n}"

        if n > ConfigValidator.MAX_GRID_POINTS:
            return False, f"k-grid too large (maximum: {ConfigValidator.MAX_GRID_POINTS} points)"

        return True, None

    @staticmethod
    def validate_output_format(fmt: str) -> Tuple[bool, Optional[str]]:
        if fmt not in ConfigValidator.ALLOWED_FORMATS:
            return False, f"Output format must be one of: {ConfigValidator.ALLOWED_FORMATS}"
        return True, None

    @staticmethod
    def validate_density(name: str, params: Dict[str, str]) -> Tuple[bool, Optional[str]]:
        """
        Validate a parsed density specification against the built-in catalog.

        Args:
            name: Density name
            params: Raw key=value pairs

        Returns:
            Tuple of (is_valid, error_message)
        """
        if name not in ConfigValidator.ALLOWED_DENSITIES:
            return False, f"Density must be one of: {ConfigValidator.ALLOWED_DENSITIES}"

        unknown = set(params) - ConfigValidator.DENSITY_KEYS[name]
        if unknown:
            return False, f"unknown {name} parameters: {sorted(unknown)}"

        missing = ConfigValidator.REQUIRED_KEYS[name] - set(params)
        if missing:
            return False, f"missing {name} parameters: {sorted(missing)}"

        return True, None


def parse_density_string(text: str) -> Tuple[str, Dict[str, str]]:
    """
    Split `name:key=val,key=val` into the name and a dict of raw values.

    Raises:
        ParameterError: malformed text or an invalid density
    """
    match = re.fullmatch(r"\s*([a-z]+)\s*(?::(.*))?", text)
    if not match:
        raise ParameterError(f"density spec must look like name:key=val,..., got {text!r}")
    name, body = match.group(1), match.group(2) or ""
    params: Dict[str, str] = {}
    for item in filter(None, (part.strip() for part in body.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ParameterError(f"density parameter {item!r} is not key=val")
        params[key.strip()] = value.strip()
    valid, message = ConfigValidator.validate_density(name, params)
    if not valid:
        raise ParameterError(message)
    return name, params


def parse_float(text: str, name: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a number, got {text!r}")
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {text!r}")
    return value


def parse_float_list(text: str, name: str) -> List[float]:
    """Parse `1,1.5,2` into floats."""
    items = [part.strip() for part in text.split(",") if part.strip()]
    return [parse_float(item, name) for item in items]


def parse_k_grid(text: str) -> np.ndarray:
    """
    Parse `k_min:k_max:n` into n uniformly spaced values.

    Raises:
        ParameterError: malformed or invalid grid
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ParameterError(f"k-grid must be k_min:k_max:n, got {text!r}")
    k_min = parse_float(parts[0], "k_min")
    k_max = parse_float(parts[1], "k_max")
    try:
        n = int(parts[2])
    except ValueError:
        raise ParameterError(f"k-grid point count must be an integer, got {parts[2]!r}")
    valid, message = ConfigValidator.validate_k_grid(k_min, k_max, n)
    if not valid:
        raise ParameterError(message)
    return np.linspace(k_min, k_max, n)


def parse_complex(text: str, name: str = "k") -> complex:
    """Parse a Python-style complex literal such as `2j` or `1+1j`."""
    try:
        value = complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ParameterError(f"{name} must be a complex number like 1+2j, got {text!r}")
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ParameterError(f"{name} must be finite, got {text!r}")
    return value


def require(check: Tuple[bool, Optional[str]]) -> None:
    """Raise ParameterError for a failed (is_valid, error_message) check."""
    valid, message = check
    if not valid:
        raise ParameterError(message)


def exit_code_guard(func):
    """
    Decorator turning toolkit exceptions into CLI exit codes.
    Parameter problems exit 2, numeric failures (including stray ArithmeticError) exit 3.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)

        except KeyboardInterrupt:
            print("\n[!] Operation cancelled by user", file=sys.stderr)
            raise
        except ParameterError as e:
            print(f"[!] Configuration error: {e}", file=sys.stderr)
            log_event("CONFIG_ERROR", type(e).__name__)
            return EXIT_CONFIG_ERROR
        except QFTError as e:
            print(f"[!] Numeric failure: {e}", file=sys.stderr)
            log_event("NUMERIC_ERROR", type(e).__name__)
            return EXIT_NUMERIC_ERROR
        except ArithmeticError as e:
            # overflow or division by zero that escaped the toolkit checks
            print(f"[!] Numeric failure: {type(e).__name__}: {e}", file=sys.stderr)
            log_event("NUMERIC_ERROR", type(e).__name__)
            return EXIT_NUMERIC_ERROR

    return wrapper


# Run event logging
def log_event(event_type: str, details: str):
    """
    Log a run event with a timestamp on stderr.
    Never written into output files.

    Args:
        event_type: Type of event
        details: Event details
    """
    timestamp = datetime.datetime.now().isoformat()
    print(f"[LOG] {timestamp} - {event_type}: {details}", file=sys.stderr)


if __name__ == "__main__":
    print("Parameter Validator - Self Test")
    print("=" * 70)

    validator = ConfigValidator()

    print("\n1. Testing deformation validation:")
    for q in [1.0, 1.5, 1.999, 2.0, 2.5]:
        valid, msg = validator.validate_deformation(q)
        status = "✓" if valid else "✗"
        print(f"   {status} q={q}: {msg if msg else 'Valid'}")

    print("\n2. Testing k-grid validation:")
    for spec in [(-5, 5, 21), (5, -5, 21), (0, 1, 1)]:
        valid, msg = validator.validate_k_grid(*spec)
        status = "✓" if valid else "✗"
        print(f"   {status} {spec}: {msg if msg else 'Valid'}")

    print("\n3. Testing density parsing:")
    for text in ["hilhorst:a=1,b=2,q=1.5", "qgaussian:q=1.3,width=1", "gauss:s=1"]:
        try:
            print(f"   ✓ {text}: {parse_density_string(text)}")
        except ParameterError as e:
            print(f"   ✗ {text}: {e}")

    print("\n" + "=" * 70)
    print("Parameter validation tests complete!")
