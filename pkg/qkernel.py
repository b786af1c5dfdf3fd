"""
q-Deformed Exponential Kernel

The q-exponential e_q(z) = [1 + (1-q) z]^(1/(1-q)), the Heaviside step and the
integrand of the complex q-Fourier transform. Complex powers always use the
principal branch; the cut of the bracket sits on the closed negative real axis.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from errors import AdmissibilityError, BranchCutError

Q_MIN = 1.0
Q_MAX = 2.0

# Below this modulus the bracket logarithm goes through log1p.
_SMALL_BRACKET = 0.5


@dataclass(frozen=True)
class DeformationParameter:
    """
    Deformation index q (or q') restricted to the admissible range [1, 2).

    Args:
        value: The index itself
    """
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or not (Q_MIN <= v < Q_MAX):
            raise AdmissibilityError(
                f"deformation parameter {self.value!r} outside admissible range [1,2)"
            )
        object.__setattr__(self, "value", v)

    def __float__(self) -> float:
        return self.value

    @property
    def is_classical(self) -> bool:
        return self.value == Q_MIN


QLike = Union[float, DeformationParameter]


def q_value(q: QLike) -> float:
    """Validate q against [1, 2) and return it as a float."""
    if isinstance(q, DeformationParameter):
        return q.value
    return DeformationParameter(q).value


def heaviside(x: float) -> float:
    """Unit step with H(0) = 1."""
    return 1.0 if x >= 0 else 0.0


def admissibility_window(q: float) -> float:
    """The factor H(q-1) - H(q-2): 1 on [1, 2), 0 elsewhere."""
    return heaviside(q - Q_MIN) - heaviside(q - Q_MAX)


def _bracket_log(w: np.ndarray) -> np.ndarray:
    """Principal log(1 + w), accurate when |w| is small."""
    re = w.real
    im = w.imag
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        small = 0.5 * np.log1p(2.0 * re + (re * re + im * im))
        large = np.log(np.hypot(1.0 + re, im))
    modulus = np.where(np.abs(w) < _SMALL_BRACKET, small, large)
    return modulus + 1j * np.arctan2(im, 1.0 + re)


def q_exp_array(z, q: float) -> np.ndarray:
    """
    Vectorised q-exponential.

    Args:
        z: Complex array (or anything numpy turns into one)
        q: Deformation index, already validated

    Returns:
        Complex array of [1 + (1-q) z]^(1/(1-q))

    Raises:
        BranchCutError: if any bracket lies on the closed negative real axis
    """
    z = np.asarray(z, dtype=complex)
    if q == Q_MIN:
        return np.exp(z)
    d = 1.0 - q
    w = d * z
    on_cut = (w.imag == 0.0) & (1.0 + w.real <= 0.0)
    if np.any(on_cut):
        bad = complex(np.atleast_1d(z)[np.atleast_1d(on_cut)][0])
        raise BranchCutError(
            f"1+(1-q)z = {1.0 + d * bad} is on the negative real axis (z={bad}, q={q})"
        )
    return np.exp(_bracket_log(w) / d)


def q_exp(z: complex, q: QLike) -> complex:
    """
    Principal-branch q-exponential of a single complex number.

    q == 1 is the ordinary exponential. For q in (1, 2) the bracket
    1 + (1-q) z must avoid the closed negative real axis.

    Args:
        z: Complex argument
        q: Deformation index in [1, 2)

    Returns:
        e_q(z) as a Python complex
    """
    qv = q_value(q)
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"q_exp argument must be finite, got {z}")
    return complex(q_exp_array(np.array([z]), qv)[0])


def kernel_values(x: np.ndarray, k: complex, fx: np.ndarray, qp: float) -> np.ndarray:
    """
    Vectorised transform integrand fx * e_qp(i k x fx^(qp-1)).

    Points with fx == 0 contribute exactly 0 and never reach the power.
    """
    x = np.asarray(x, dtype=float)
    fx = np.asarray(fx, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    live = fx > 0.0
    if not np.any(live):
        return out
    xs = x[live]
    fs = fx[live]
    if qp == Q_MIN:
        phase = 1j * k * xs
    else:
        phase = 1j * k * xs * np.power(fs, qp - 1.0)
    out[live] = fs * q_exp_array(phase, qp)
    return out


def qft_integrand(x: float, k: complex, fx: float, qp: QLike) -> complex:
    """
    Integrand of the complex q-Fourier transform at one point.

    Args:
        x: Position
        k: Complex wave number
        fx: Density value at x (must be >= 0)
        qp: Transform index q' in [1, 2)

    Returns:
        fx * e_qp(i k x fx^(qp-1)), or 0 when fx == 0
    """
    qpv = q_value(qp)
    if fx < 0:
        raise ValueError(f"density value must be non-negative, got {fx}")
    if fx == 0:
        return 0j
    return complex(kernel_values(np.array([x]), complex(k), np.array([fx]), qpv)[0])


if __name__ == "__main__":
    print("q-Exponential Kernel - Self Test")
    print("=" * 70)
    print(f"  e_1.5(0)          = {q_exp(0, 1.5)}")
    print(f"  e_(2-1e-12)(0.5)  = {q_exp(0.5, 2 - 1e-12)}")
    print(f"  e_(1+1e-8)(1)     = {q_exp(1, 1 + 1e-8)}  (e = {math.e})")
    print(f"  integrand(1.5, 1) = {qft_integrand(1.5, 1, 8 / 9, 1.5)}")
