"""
Inverse q-Fourier Transform

Real-axis inversion at q' = 1 + epsilon: the transform is sampled once on a
uniform k-grid over [-k_max, k_max] and every evaluation point reuses those
samples in a composite Simpson sum of F(k) e^(-ikx) / (2 pi).
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson

from densities import DensitySpec, density_eval
from errors import ParameterError, TruncationWarning
from quad import QuadratureConfig
from transform import transform_grid

WINDOWS = ("none", "lanczos")
IMAGINARY_RESIDUE_RATIO = 1e-3
IMAGINARY_RESIDUE_FLOOR = 1e-8
# |F| at +-k_max above this fraction of max |F| means F has not decayed.
DECAY_RATIO = 0.1
JUMP_NEIGHBOURHOOD = 0.01


@dataclass(frozen=True)
class InverseConfig:
    """
    Settings of the regularised inversion.

    Args:
        epsilon: Regularisation q' = 1 + epsilon, 0 < epsilon < 1
        k_max: Truncation of the k-integral
        n_k: Number of uniform panels on [-k_max, k_max]
        x_points: Evaluation points
        window: "none" for plain truncation, "lanczos" for a sinc(k/k_max) taper
    """
    epsilon: float = 1e-6
    k_max: float = 200.0
    n_k: int = 8192
    x_points: Tuple[float, ...] = field(default_factory=tuple)
    window: str = "none"

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ParameterError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not (math.isfinite(self.k_max) and self.k_max > 0):
            raise ParameterError(f"k_max must be positive, got {self.k_max}")
        if int(self.n_k) != self.n_k or self.n_k < 16:
            raise ParameterError(f"n_k must be an integer >= 16, got {self.n_k}")
        if self.window not in WINDOWS:
            raise ParameterError(f"window must be one of {WINDOWS}, got {self.window!r}")
        object.__setattr__(self, "n_k", int(self.n_k))
        object.__setattr__(self, "x_points", tuple(float(x) for x in self.x_points))

    @property
    def qp(self) -> float:
        return 1.0 + self.epsilon

    def k_grid(self) -> np.ndarray:
        return np.linspace(-self.k_max, self.k_max, self.n_k + 1)

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "k_max": self.k_max,
            "n_k": self.n_k,
            "x_points": list(self.x_points),
            "window": self.window,
        }


@dataclass(frozen=True)
class InversionValue:
    value: float
    imaginary_residue: float


def sample_transform(F: Callable[[float], complex], cfg: InverseConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate F on the uniform k-grid of cfg."""
    k = cfg.k_grid()
    return k, np.array([complex(F(float(kj))) for kj in k])


def _taper(k: np.ndarray, cfg: InverseConfig) -> np.ndarray:
    if cfg.window == "lanczos":
        return np.sinc(k / cfg.k_max)
    return np.ones_like(k)


def invert_samples(k: np.ndarray, samples: np.ndarray, x_points: Sequence[float],
                   cfg: InverseConfig) -> List[InversionValue]:
    """
    (1/2pi) * integral of F(k) e^(-ikx) dk from precomputed samples.

    Warns with TruncationWarning when F has not decayed at the grid ends or
    when the imaginary residue exceeds 1e-3 of the value.
    """
    peak = float(np.max(np.abs(samples))) if samples.size else 0.0
    edge = max(abs(samples[0]), abs(samples[-1]))
    if peak > 0 and edge > DECAY_RATIO * peak:
        warnings.warn(
            f"|F(+-k_max)| = {edge:.3g} is {edge / peak:.2f} of max |F|: F does not decay "
            f"over [-{cfg.k_max}, {cfg.k_max}] and the result is truncation-dominated",
            TruncationWarning,
            stacklevel=2,
        )
    weighted = samples * _taper(k, cfg)
    out = []
    for x in x_points:
        integral = simpson(weighted * np.exp(-1j * k * x), x=k) / (2.0 * math.pi)
        value, residue = float(integral.real), float(integral.imag)
        if abs(residue) > max(IMAGINARY_RESIDUE_RATIO * abs(value), IMAGINARY_RESIDUE_FLOOR):
            warnings.warn(
                f"imaginary residue {residue:.3g} at x={x} exceeds {IMAGINARY_RESIDUE_RATIO} "
                f"of the value {value:.3g}; increase k_max or check the symmetry of F",
                TruncationWarning,
                stacklevel=2,
            )
        out.append(InversionValue(value, residue))
    return out


def inverse_qft(F: Callable[[float], complex], cfg: InverseConfig, x: float) -> float:
    """
    Truncated inverse transform at one point.

    Args:
        F: Transform at q' = 1 + epsilon as a function of real k
        cfg: Inversion settings
        x: Evaluation point

    Returns:
        Real part of (1/2pi) * integral over [-k_max, k_max] of F(k) e^(-ikx)
    """
    k, samples = sample_transform(F, cfg)
    return invert_samples(k, samples, [x], cfg)[0].value


@dataclass(frozen=True)
class RecoveryRow:
    x: float
    f_true: float
    f_recovered: float
    abs_err: float
    flagged: bool
    imaginary_residue: float = 0.0

    def as_record(self) -> dict:
        return {
            "x": self.x,
            "f_true": self.f_true,
            "f_recovered": self.f_recovered,
            "abs_err": self.abs_err,
            "flagged": self.flagged,
        }


@dataclass(frozen=True)
class RecoveryReport:
    rows: Tuple[RecoveryRow, ...]
    l1_error: float
    max_imaginary_residue: float


def jump_adjacent(d: DensitySpec, x: float) -> bool:
    """True when x lies within 1% of the support width of a jump of d."""
    jumps = d.jump_points()
    if not jumps:
        return False
    lo, hi = d.support
    width = hi - lo if math.isfinite(hi - lo) else 1.0
    return any(abs(x - j) <= JUMP_NEIGHBOURHOOD * width for j in jumps)


def roundtrip(d: DensitySpec, cfg: InverseConfig, qcfg: QuadratureConfig,
              workers: Optional[int] = None, verbose: bool = False) -> RecoveryReport:
    """
    Transform d at q' = 1 + epsilon on the k-grid and invert at cfg.x_points.

    Points next to a jump of d are flagged and left out of the L1 error.
    """
    k = cfg.k_grid()
    if verbose:
        print(f"[*] Sampling F(k, q'={cfg.qp}) at {k.size} points on [-{cfg.k_max}, {cfg.k_max}]")
    samples = np.array([s.value for s in transform_grid(d, k, cfg.qp, qcfg, workers)])
    values = invert_samples(k, samples, cfg.x_points, cfg)

    rows = []
    for x, inv in zip(cfg.x_points, values):
        f_true = density_eval(d, x)
        rows.append(RecoveryRow(x, f_true, inv.value, abs(inv.value - f_true),
                                jump_adjacent(d, x), inv.imaginary_residue))
    l1 = math.fsum(r.abs_err for r in rows if not r.flagged)
    residue = max((abs(r.imaginary_residue) for r in rows), default=0.0)
    if verbose:
        print(f"[✓] Recovered {len(rows)} points, L1 error {l1:.3e}")
    return RecoveryReport(tuple(rows), l1, residue)
