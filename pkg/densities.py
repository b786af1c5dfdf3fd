"""
Density Catalog

Admissible densities for the q-Fourier transform: the Hilhorst power-law
family (lambda/x)^beta on [a, b], a numerically normalised q-Gaussian and
linearly interpolated tables. Each density declares its support and its
breakpoints so that quadrature never has to discover a jump on its own.
"""

import csv
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from errors import ParameterError, UnachievableTargetError
from qkernel import DeformationParameter, QLike, kernel_values, q_exp_array, q_value
from quad import (
    IntegralResult,
    QuadratureConfig,
    combine_results,
    integrate_finite,
    integrate_semi_infinite,
)

_BRACKET_DOUBLINGS = 64
_GEOMETRIC_CUT_RATIO = 8.0
_MAX_GEOMETRIC_CUTS = 256
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


def _hilhorst_exponent(q: float) -> float:
    return (q - 2.0) / (q - 1.0)


def _log_scale(q: float) -> float:
    return math.log((q - 1.0) / (2.0 - q))


def _log_one_minus_power(ratio_log: float, exponent: float) -> float:
    """log(1 - r^exponent) for log r = ratio_log > 0 and exponent < 0."""
    return math.log(-math.expm1(exponent * ratio_log))


def _check_hilhorst_args(a: float, b: Optional[float], q: QLike) -> float:
    qv = q_value(q)
    if qv == 1.0:
        raise ParameterError("Hilhorst family needs 1 < q < 2 (beta = 1/(q-1) diverges at q = 1)")
    if not (math.isfinite(a) and a > 0):
        raise ParameterError(f"support start a must be positive and finite, got {a}")
    if b is not None and not (math.isfinite(b) and b > a):
        raise ParameterError(f"support end b must exceed a={a}, got {b}")
    return qv


def hilhorst_lambda(a: float, b: float, q: QLike) -> float:
    """
    Scale lambda that normalises (lambda/x)^beta on [a, b].

    The bracket a^e - b^e is handled as a^e (1 - (b/a)^e) in log space, so a
    small a with q near 1 does not overflow a^e.

    Args:
        a: Support start, 0 < a
        b: Support end, a < b
        q: Index in (1, 2)

    Returns:
        [((q-1)/(2-q)) (a^e - b^e)]^(1-q) with e = (q-2)/(q-1)
    """
    qv = _check_hilhorst_args(a, b, q)
    e = _hilhorst_exponent(qv)
    ratio_log = math.log(b / a)
    if not ratio_log > 0.0:
        return math.inf
    log_bracket = _log_scale(qv) + e * math.log(a) + _log_one_minus_power(ratio_log, e)
    return math.exp((1.0 - qv) * log_bracket)


def hilhorst_lambda_limit(a: float, q: QLike) -> float:
    """Infimum of hilhorst_lambda(a, b, q) over b, reached as b -> infinity."""
    qv = _check_hilhorst_args(a, None, q)
    e = _hilhorst_exponent(qv)
    return math.exp((1.0 - qv) * (_log_scale(qv) + e * math.log(a)))


def solve_b_for_lambda(a: float, lambda_target: float, q: QLike) -> float:
    """
    Support end b at which the Hilhorst family with start a has the given lambda.

    lambda decreases strictly in b, so the root in u = log(b/a) is bracketed
    by doubling the upper end and then polished with Brent's method.

    Raises:
        UnachievableTargetError: lambda_target is not above the b -> infinity limit
    """
    qv = _check_hilhorst_args(a, None, q)
    if not (math.isfinite(lambda_target) and lambda_target > 0):
        raise ParameterError(f"lambda must be positive and finite, got {lambda_target}")
    infimum = hilhorst_lambda_limit(a, qv)
    e = _hilhorst_exponent(qv)
    # lambda^(1/(1-q)) = scale a^e (1 - (b/a)^e); gap is the required 1 - (b/a)^e
    log_gap = math.log(lambda_target) / (1.0 - qv) - _log_scale(qv) - e * math.log(a)
    gap = math.exp(min(log_gap, 0.0))
    if not (lambda_target > infimum and log_gap < 0.0 and gap < 1.0):
        raise UnachievableTargetError(
            f"lambda={lambda_target!r} is not achievable for a={a!r}, q={qv!r}: "
            f"lambda must exceed the b->inf infimum {infimum!r}",
            infimum=infimum,
        )

    def excess(u: float) -> float:
        return -math.expm1(e * u) - gap

    hi = math.log(2.0)
    for _ in range(_BRACKET_DOUBLINGS):
        if excess(hi) > 0:
            break
        hi *= 2.0
    if not (excess(hi) > 0 and math.log(a) + hi < _LOG_FLOAT_MAX):
        raise UnachievableTargetError(
            f"no finite b reaches lambda={lambda_target!r} for a={a!r}", infimum=infimum
        )
    u = brentq(excess, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return a * math.exp(u)


@dataclass(frozen=True)
class HilhorstFamily:
    """
    Power-law density (lambda/x)^beta on [a, b] with beta = 1/(q-1).

    Args:
        a: Support start
        b: Support end
        q: Index in (1, 2)
    """
    a: float
    b: float
    q: DeformationParameter
    lam: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.q, DeformationParameter):
            object.__setattr__(self, "q", DeformationParameter(self.q))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "lam", hilhorst_lambda(self.a, self.b, self.q))
        object.__setattr__(self, "beta", 1.0 / (self.q.value - 1.0))

    def normalization_closed(self) -> float:
        """Antiderivative value lambda^beta (a^(1-beta) - b^(1-beta)) / (beta - 1), in log space."""
        a, b, beta = self.a, self.b, self.beta
        log_value = (
            beta * math.log(self.lam)
            + (1.0 - beta) * math.log(a)
            + _log_one_minus_power(math.log(b / a), 1.0 - beta)
            - math.log(beta - 1.0)
        )
        return math.exp(log_value)


class DensitySpec(ABC):
    """A non-negative density with a declared support."""

    @property
    @abstractmethod
    def support(self) -> Tuple[float, float]:
        """Closed support interval; ends may be infinite."""

    @property
    def q(self):
        """Own deformation index, or None when the density has none."""
        return None

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Density values at an array of points."""

    def breakpoints(self) -> Tuple[float, ...]:
        """Finite points where the density is not smooth (segment edges)."""
        return tuple(v for v in self.support if math.isfinite(v))

    def jump_points(self) -> Tuple[float, ...]:
        """Points where the density jumps."""
        return ()

    @abstractmethod
    def describe(self) -> dict:
        """Plain-data description for configuration echo."""


@dataclass(frozen=True)
class HilhorstDensity(DensitySpec):
    family: HilhorstFamily

    @property
    def support(self) -> Tuple[float, float]:
        return (self.family.a, self.family.b)

    @property
    def q(self) -> float:
        return self.family.q.value

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        fam = self.family
        inside = (x >= fam.a) & (x <= fam.b)
        out = np.zeros(x.shape)
        out[inside] = np.power(fam.lam / x[inside], fam.beta)
        return out

    def breakpoints(self) -> Tuple[float, ...]:
        """Support ends, plus geometric cuts when b/a is wide so every decade gets a panel."""
        a, b = self.family.a, self.family.b
        span = math.log(b / a)
        if span <= math.log(_GEOMETRIC_CUT_RATIO):
            return (a, b)
        n = min(_MAX_GEOMETRIC_CUTS, math.ceil(span / math.log(2.0)))
        inner = tuple(a * math.exp(span * j / n) for j in range(1, n))
        return (a,) + inner + (b,)

    def jump_points(self) -> Tuple[float, ...]:
        return (self.family.a, self.family.b)

    def describe(self) -> dict:
        fam = self.family
        return {"name": "hilhorst", "a": fam.a, "b": fam.b, "q": fam.q.value,
                "lambda": fam.lam, "beta": fam.beta}


@dataclass(frozen=True)
class QGaussianDensity(DensitySpec):
    """
    N * e_q(-x^2 / width^2) on the whole line, N fixed by one quadrature.

    Args:
        q_index: Index in [1, 2)
        width: Positive scale
        cfg: Tolerances for the normalising quadrature
    """
    q_index: float
    width: float
    cfg: QuadratureConfig = field(default_factory=QuadratureConfig, compare=False)
    norm: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q_index", q_value(self.q_index))
        if not (math.isfinite(self.width) and self.width > 0):
            raise ParameterError(f"q-Gaussian width must be positive, got {self.width}")
        object.__setattr__(self, "norm", 1.0)

        def shape(x):
            return self._shape(x)

        half = integrate_semi_infinite(shape, 0.0, True, self.cfg).require_converged(
            "q-Gaussian normalization"
        )
        object.__setattr__(self, "norm", 1.0 / (2.0 * half.value.real))

    def _shape(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return q_exp_array(-(x / self.width) ** 2, self.q_index).real

    @property
    def support(self) -> Tuple[float, float]:
        return (-math.inf, math.inf)

    @property
    def q(self) -> float:
        return self.q_index

    def evaluate(self, x) -> np.ndarray:
        return self.norm * self._shape(x)

    def breakpoints(self) -> Tuple[float, ...]:
        return (0.0,)

    def describe(self) -> dict:
        return {"name": "qgaussian", "q": self.q_index, "width": self.width, "norm": self.norm}


@dataclass(frozen=True, eq=False)
class TabulatedDensity(DensitySpec):
    """
    Linear interpolation through (x, f) pairs, zero outside the grid.

    Args:
        xs: Strictly increasing abscissae (at least two)
        fs: Non-negative values
        q_index: Optional index carried for the diagonal transform
        source: Where the table came from (echoed only)
    """
    xs: np.ndarray
    fs: np.ndarray
    q_index: float = None
    source: str = ""

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float)
        fs = np.array(self.fs, dtype=float)
        if xs.ndim != 1 or xs.shape != fs.shape or xs.size < 2:
            raise ParameterError("tabulated density needs matching x and f columns with >= 2 rows")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(fs))):
            raise ParameterError("tabulated density values must be finite")
        if np.any(np.diff(xs) <= 0):
            raise ParameterError("tabulated x values must be strictly increasing")
        if np.any(fs < 0):
            raise ParameterError("tabulated f values must be non-negative")
        xs.setflags(write=False)
        fs.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "fs", fs)
        if self.q_index is not None:
            object.__setattr__(self, "q_index", q_value(self.q_index))

    @property
    def support(self) -> Tuple[float, float]:
        return (float(self.xs[0]), float(self.xs[-1]))

    @property
    def q(self):
        return self.q_index

    def evaluate(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.xs, self.fs, left=0.0, right=0.0)

    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.xs)

    def jump_points(self) -> Tuple[float, ...]:
        ends = []
        if self.fs[0] > 0:
            ends.append(float(self.xs[0]))
        if self.fs[-1] > 0:
            ends.append(float(self.xs[-1]))
        return tuple(ends)

    def scaled(self, factor: float) -> "TabulatedDensity":
        return TabulatedDensity(self.xs, self.fs * factor, self.q_index, self.source)

    def describe(self) -> dict:
        return {"name": "tabulated", "path": self.source, "rows": int(self.xs.size),
                "q": self.q_index}


def load_tabulated(path: str, q_index: float = None) -> TabulatedDensity:
    """
    Read a density table from a CSV file with header `x,f`.

    Raises:
        ParameterError: missing file, wrong header or invalid values
    """
    try:
        with open(path, newline="") as handle:
            reader = csv.DictReader(row for row in handle if not row.startswith("#"))
            if reader.fieldnames != ["x", "f"]:
                raise ParameterError(f"{path}: expected header 'x,f', got {reader.fieldnames}")
            xs, fs = [], []
            for line_no, row in enumerate(reader, start=2):
                try:
                    xs.append(float(row["x"]))
                    fs.append(float(row["f"]))
                except (TypeError, ValueError):
                    raise ParameterError(f"{path}:{line_no}: not a number pair: {row}")
    except OSError as exc:
        raise ParameterError(f"cannot read tabulated density {path}: {exc}")
    return TabulatedDensity(np.array(xs), np.array(fs), q_index, source=str(path))


def density_eval(d: DensitySpec, x: float) -> float:
    """Density value at a single finite point."""
    return float(d.evaluate(np.array([float(x)]))[0])


def integrate_over_support(
    d: DensitySpec,
    f: Callable[[np.ndarray], np.ndarray],
    cfg: QuadratureConfig,
    lo: float = -math.inf,
    hi: float = math.inf,
) -> IntegralResult:
    """
    Integrate f over the part of the support of d inside [lo, hi].

    The range is cut at every breakpoint of d; finite pieces go to
    integrate_finite, infinite ends to integrate_semi_infinite. Pieces are
    summed left to right.
    """
    s_lo = max(lo, d.support[0])
    s_hi = min(hi, d.support[1])
    if not s_lo < s_hi:
        return IntegralResult(0j, 0.0, 0, True)
    cuts = {p for p in d.breakpoints() if s_lo < p < s_hi}
    cuts.update(v for v in (s_lo, s_hi) if math.isfinite(v))
    if not cuts:
        cuts.add(0.0)
    edges = sorted(cuts)

    pieces: List[IntegralResult] = []
    if s_lo == -math.inf:
        pieces.append(integrate_semi_infinite(f, edges[0], False, cfg))
    for left, right in zip(edges, edges[1:]):
        pieces.append(integrate_finite(f, left, right, cfg))
    if s_hi == math.inf:
        pieces.append(integrate_semi_infinite(f, edges[-1], True, cfg))
    return combine_results(pieces)


def verify_normalization(d: DensitySpec, cfg: QuadratureConfig) -> float:
    """Numerical integral of d over its support."""
    result = integrate_over_support(d, d.evaluate, cfg).require_converged("normalization")
    return result.value.real


def check_admissible(d: DensitySpec, qp: QLike, cfg: QuadratureConfig = None,
                     probe_points: int = 257) -> Tuple[bool, List[str]]:
    """
    Machine check that d belongs to the transform domain for index qp.

    Checks q' in [1, 2), non-negativity on a probe grid over the support and
    finiteness of the kernel integrals over both half-lines at k = +i and
    k = -i.

    Returns:
        Tuple of (is_admissible, list of problems)
    """
    cfg = cfg or QuadratureConfig()
    problems = []
    try:
        qpv = q_value(qp)
    except ParameterError as exc:
        return False, [str(exc)]

    lo, hi = d.support
    probe_lo = lo if math.isfinite(lo) else -50.0
    probe_hi = hi if math.isfinite(hi) else 50.0
    grid = np.linspace(probe_lo, probe_hi, probe_points)
    values = d.evaluate(grid)
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        problems.append("density is negative or not finite on the probe grid")

    for k, lower, upper in ((1j, 0.0, math.inf), (-1j, -math.inf, 0.0)):
        try:
            r = integrate_over_support(
                d, lambda x, k=k: kernel_values(x, k, d.evaluate(x), qpv), cfg, lower, upper
            )
            if not (r.converged and math.isfinite(abs(r.value))):
                problems.append(f"kernel integral at k={k} did not converge")
        except ArithmeticError as exc:
            problems.append(f"kernel integral at k={k} failed: {exc}")
    return not problems, problems


if __name__ == "__main__":
    print("Density Catalog - Self Test")
    print("=" * 70)
    fam = HilhorstFamily(1.0, 2.0, DeformationParameter(1.5))
    d = HilhorstDensity(fam)
    print(f"  lambda(1, 2, 1.5)  = {fam.lam}  (sqrt 2 = {math.sqrt(2)})")
    print(f"  f(1.5)             = {density_eval(d, 1.5)}  (8/9 = {8 / 9})")
    print(f"  integral           = {verify_normalization(d, QuadratureConfig())}")
    print(f"  b for a=1.5, sqrt2 = {solve_b_for_lambda(1.5, math.sqrt(2), 1.5)}")
