"""
Gauss Hypergeometric Function

2F1(a, b; c; z) for complex parameters and complex argument. The argument is
mapped to the expansion with the smallest convergence ratio: the direct
series, the Pfaff transformation z -> z/(z-1), or the connection formulas
around z = 1 and z = infinity. Integer gaps in the connection formulas are
reported, not regularised.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import loggamma

from errors import ConvergenceError, DegenerateParameterError

SERIES_RADIUS = 0.5
TERM_TOLERANCE = 1e-16
MAX_TERMS = 100_000
POLE_TOLERANCE = 1e-12
INTEGER_GAP_TOLERANCE = 1e-8
# Fallback ratio accepted when the best expansion is degenerate.
ACCEPTABLE_FALLBACK_RATIO = 0.95


def _is_nonpositive_integer(x: complex, tol: float = POLE_TOLERANCE) -> bool:
    return abs(x.imag) <= tol and x.real <= tol and abs(x.real - round(x.real)) <= tol


def _is_near_integer(x: complex, tol: float = INTEGER_GAP_TOLERANCE) -> bool:
    return abs(x.imag) <= tol and abs(x.real - round(x.real)) <= tol


@dataclass(frozen=True)
class Hyp2F1Params:
    """
    Parameters (a, b; c) of 2F1.

    Args:
        a: First upper parameter
        b: Second upper parameter
        c: Lower parameter, not a non-positive integer
    """
    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"2F1 parameter {name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if _is_nonpositive_integer(self.c):
            raise DegenerateParameterError(
                f"c={self.c} is a non-positive integer", (self.a, self.b, self.c)
            )


def _series(a: complex, b: complex, c: complex, z: complex) -> complex:
    """Direct power series; stops after two consecutive negligible terms."""
    total = 1 + 0j
    term = 1 + 0j
    quiet = 0
    for n in range(MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if term == 0:
            return total
        if abs(term) <= TERM_TOLERANCE * abs(total):
            quiet += 1
            if quiet == 2:
                return total
        else:
            quiet = 0
    raise ConvergenceError(
        f"2F1 series for (a={a}, b={b}, c={c}) at z={z} did not converge in {MAX_TERMS} terms"
    )


def _gamma_ratio_log(numer: Sequence[complex], denom: Sequence[complex]) -> Optional[complex]:
    """
    log of prod Gamma(numer) / prod Gamma(denom).

    Returns None when a denominator argument is a pole (the ratio is zero).
    """
    if any(_is_nonpositive_integer(complex(d)) for d in denom):
        return None
    bad = [n for n in numer if _is_nonpositive_integer(complex(n))]
    if bad:
        raise DegenerateParameterError(f"Gamma pole at {bad[0]} in a connection coefficient")
    num = np.sum(loggamma(np.asarray(numer, dtype=complex)))
    den = np.sum(loggamma(np.asarray(denom, dtype=complex)))
    return complex(num - den)


def _connection_term(log_coeff: Optional[complex], log_power: complex, a, b, c, w) -> complex:
    if log_coeff is None:
        return 0j
    return cmath.exp(log_coeff + log_power) * _series(a, b, c, w)


def _pfaff(a: complex, b: complex, c: complex, z: complex) -> complex:
    w = z / (z - 1)
    log_one_minus_z = cmath.log(1 - z)
    # Either upper parameter can be moved; keep the smaller ones in the series.
    if max(abs(a), abs(c - b)) <= max(abs(b), abs(c - a)):
        return cmath.exp(-a * log_one_minus_z) * _series(a, c - b, c, w)
    return cmath.exp(-b * log_one_minus_z) * _series(c - a, b, c, w)


def _inverse(a: complex, b: complex, c: complex, z: complex) -> complex:
    """Connection formula around z = infinity (DLMF 15.8.2)."""
    w = 1 / z
    log_minus_z = cmath.log(-z)
    first = _connection_term(
        _gamma_ratio_log([c, b - a], [b, c - a]), -a * log_minus_z, a, a - c + 1, a - b + 1, w
    )
    second = _connection_term(
        _gamma_ratio_log([c, a - b], [a, c - b]), -b * log_minus_z, b, b - c + 1, b - a + 1, w
    )
    return first + second


def _reflect(a: complex, b: complex, c: complex, z: complex) -> complex:
    """Connection formula around z = 1 (DLMF 15.8.4)."""
    w = 1 - z
    first = _connection_term(
        _gamma_ratio_log([c, c - a - b], [c - a, c - b]), 0j, a, b, a + b - c + 1, w
    )
    second = _connection_term(
        _gamma_ratio_log([c, a + b - c], [a, b]), (c - a - b) * cmath.log(w),
        c - a, c - b, c - a - b + 1, w,
    )
    return first + second


_EXPANSIONS = {
    "series": _series,
    "pfaff": _pfaff,
    "inverse": _inverse,
    "reflect": _reflect,
}


def _degenerate(name: str, a: complex, b: complex, c: complex) -> bool:
    if name == "inverse":
        return _is_near_integer(a - b)
    if name == "reflect":
        return _is_near_integer(c - a - b)
    return False


def select_expansion(p: Hyp2F1Params, z: complex) -> str:
    """
    Name of the expansion gauss_2f1 will use at z.

    Raises:
        DegenerateParameterError: the only fast expansion has an integer gap
        ConvergenceError: no expansion converges at z
    """
    a, b, c = p.a, p.b, p.c
    z = complex(z)
    if abs(z) <= SERIES_RADIUS:
        return "series"
    candidates = [(abs(z), "series"), (1 / abs(z), "inverse")]
    if z != 1:
        candidates.append((abs(1 - z), "reflect"))
    if z.real < 0.5:
        candidates.append((abs(z / (z - 1)), "pfaff"))
    candidates.sort(key=lambda item: item[0])

    skipped = None
    for ratio, name in candidates:
        if ratio >= 1.0:
            break
        if _degenerate(name, a, b, c):
            skipped = skipped or name
            continue
        if skipped is not None and ratio > ACCEPTABLE_FALLBACK_RATIO:
            break
        return name
    if skipped is not None:
        gap = "a-b" if skipped == "inverse" else "c-a-b"
        raise DegenerateParameterError(
            f"2F1(a={a}, b={b}; c={c}; z={z}) needs the {skipped} connection formula "
            f"but {gap} is within {INTEGER_GAP_TOLERANCE} of an integer",
            (a, b, c),
        )
    raise ConvergenceError(f"no convergent 2F1 expansion for z={z}")


def gauss_2f1(p: Hyp2F1Params, z: complex) -> complex:
    """
    Evaluate 2F1(a, b; c; z).

    Args:
        p: Parameters (a, b; c)
        z: Complex argument

    Returns:
        Principal value of 2F1 (cut along [1, inf))

    Raises:
        DegenerateParameterError: integer parameter gap on the chosen path
        ConvergenceError: series cap reached or z on the unit circle with no
            fast expansion available
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"2F1 argument must be finite, got {z}")
    a, b, c = p.a, p.b, p.c
    if z == 0:
        return 1 + 0j
    if z == 1:
        if (c - a - b).real > 0:
            log_value = _gamma_ratio_log([c, c - a - b], [c - a, c - b])
            return 0j if log_value is None else cmath.exp(log_value)
        raise ConvergenceError(f"2F1 diverges at z=1 when Re(c-a-b) <= 0 (a={a}, b={b}, c={c})")
    return _EXPANSIONS[select_expansion(p, z)](a, b, c, z)


def hyp2f1(a: complex, b: complex, c: complex, z: complex) -> complex:
    """Shorthand for gauss_2f1(Hyp2F1Params(a, b, c), z)."""
    return gauss_2f1(Hyp2F1Params(a, b, c), z)


if __name__ == "__main__":
    print("Gauss Hypergeometric 2F1 - Self Test")
    print("=" * 70)
    print(f"  2F1(1,1;2;0.5)   = {hyp2f1(1, 1, 2, 0.5)}  (2 ln 2 = {2 * math.log(2)})")
    print(f"  2F1(1,1;2;-2)    = {hyp2f1(1, 1, 2, -2)}  (ln 3 / 2 = {math.log(3) / 2})")
    z = 0.3 + 0.1j
    print(f"  2F1(.7,1.3;1.3;z) = {hyp2f1(0.7, 1.3, 1.3, z)}  ((1-z)^-.7 = {(1 - z) ** -0.7})")
