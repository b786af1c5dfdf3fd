"""
Adaptive Quadrature

Globally adaptive Gauss-Kronrod (G7/K15) integration of complex-valued,
vectorised integrands on finite intervals, and panel doubling for rays.
Integrands take a numpy array of abscissae and return an array of values.
"""

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List

import numpy as np

from errors import ConvergenceError, InvalidIntervalError, ParameterError

Integrand = Callable[[np.ndarray], np.ndarray]

# Kronrod abscissae on [0, 1) in decreasing order; the Gauss points are the odd entries.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# 15 nodes on (-1, 1) in increasing order with matching weights
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 13]] = _WG[0]
GAUSS_WEIGHTS[[3, 11]] = _WG[1]
GAUSS_WEIGHTS[[5, 9]] = _WG[2]
GAUSS_WEIGHTS[7] = _WG[3]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny
_EMPTY_PANEL_LIMIT = 64


@dataclass(frozen=True)
class QuadratureConfig:
    """
    Tolerances for the adaptive integrator.

    Args:
        rel_tol: Relative tolerance on |value|
        abs_tol: Absolute tolerance
        max_subdivisions: Bisection budget per finite interval, and panel
            budget for a ray
        tail_cutoff: A ray stops once a panel adds less than this fraction
            of the running total
    """
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    tail_cutoff: float = 1e-14

    def __post_init__(self):
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise ParameterError(f"rel_tol must be positive, got {self.rel_tol}")
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise ParameterError(f"abs_tol must be positive, got {self.abs_tol}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ParameterError(
                f"max_subdivisions must be an integer >= 1, got {self.max_subdivisions}"
            )
        if not (self.tail_cutoff > 0 and math.isfinite(self.tail_cutoff)):
            raise ParameterError(f"tail_cutoff must be positive, got {self.tail_cutoff}")

    def tolerance(self, value: complex) -> float:
        """
        Target error for a result of the given size.

        Either bound suffices: the target is max(abs_tol, rel_tol |value|),
        the QUADPACK convention, so tiny results are judged on abs_tol alone.
        """
        return max(self.abs_tol, self.rel_tol * abs(value))

    def as_dict(self) -> dict:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_subdivisions": self.max_subdivisions,
            "tail_cutoff": self.tail_cutoff,
        }


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    abs_err_estimate: float
    subdivisions_used: int
    converged: bool

    def require_converged(self, what: str = "integral") -> "IntegralResult":
        """Return self, or raise ConvergenceError if the tolerance was missed."""
        if not self.converged:
            raise ConvergenceError(
                f"{what} did not converge after {self.subdivisions_used} subdivisions "
                f"(value={self.value}, error estimate={self.abs_err_estimate:.3e})"
            )
        return self


def _fsum_complex(values: Iterable[complex]) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _gk15(values: np.ndarray, half: float):
    """Kronrod value and QUADPACK error estimate from 15 node values."""
    resk = np.dot(KRONROD_WEIGHTS, values)
    resg = np.dot(GAUSS_WEIGHTS, values)
    mean = 0.5 * resk
    resabs = half * float(np.dot(KRONROD_WEIGHTS, np.abs(values)))
    resasc = half * float(np.dot(KRONROD_WEIGHTS, np.abs(values - mean)))
    err = half * abs(resk - resg)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _TINY / (50.0 * _EPS):
        err = max(50.0 * _EPS * resabs, err)
    return complex(resk * half), float(err)


def _evaluate(f: Integrand, intervals) -> List[tuple]:
    """Apply the 15-point pair to several intervals with one integrand call."""
    centres = np.array([0.5 * (lo + hi) for lo, hi in intervals])
    halves = np.array([0.5 * (hi - lo) for lo, hi in intervals])
    x = (centres[:, None] + halves[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x), dtype=complex).reshape(len(intervals), NODES.size)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx.ravel())][0]
        raise ConvergenceError(f"integrand is not finite at x={bad!r}")
    return [_gk15(fx[i], halves[i]) for i in range(len(intervals))]


def integrate_finite(f: Integrand, a: float, b: float, cfg: QuadratureConfig) -> IntegralResult:
    """
    Integrate f over [a, b] by adaptive bisection of the worst interval.

    The 15 evaluation points of each interval are interior, so a jump at an
    endpoint is never sampled.

    Args:
        f: Vectorised integrand
        a: Left end
        b: Right end (a < b, both finite)
        cfg: Tolerances

    Returns:
        IntegralResult; converged is False when the budget ran out first
    """
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise InvalidIntervalError(f"need finite a < b, got [{a}, {b}]")

    (value, err), = _evaluate(f, [(a, b)])
    # heap entries: (-error, left, right, value)
    heap = [(-err, a, b, value)]
    total, total_err = value, err
    subdivisions = 0
    converged = total_err <= cfg.tolerance(total)
    while not converged and subdivisions < cfg.max_subdivisions:
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, (neg_err, lo, hi, v))
            break
        (v1, e1), (v2, e2) = _evaluate(f, [(lo, mid), (mid, hi)])
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        subdivisions += 1
        if subdivisions % 64 == 0:
            total_err = math.fsum(-entry[0] for entry in heap)
        converged = total_err <= cfg.tolerance(total)

    ordered = sorted(heap, key=lambda entry: entry[1])
    value = _fsum_complex(entry[3] for entry in ordered)
    err = math.fsum(-entry[0] for entry in ordered)
    return IntegralResult(value, err, subdivisions, err <= cfg.tolerance(value))


def combine_results(results: List[IntegralResult]) -> IntegralResult:
    """Sum results in the order given."""
    if not results:
        return IntegralResult(0j, 0.0, 0, True)
    return IntegralResult(
        _fsum_complex(r.value for r in results),
        math.fsum(r.abs_err_estimate for r in results),
        sum(r.subdivisions_used for r in results),
        all(r.converged for r in results),
    )


def integrate_semi_infinite(
    f: Integrand, a: float, toward_plus_infinity: bool, cfg: QuadratureConfig
) -> IntegralResult:
    """
    Integrate f over [a, inf) or (-inf, a] with panels of doubling width.

    Panels are [a, a+1], [a+1, a+3], [a+3, a+7], ... (mirrored for the left
    ray). Integration stops once a panel adds less than cfg.tail_cutoff of the
    running total. The tail beyond it is estimated as a geometric series: with
    r the ratio of the last two panel magnitudes, last / (1 - r) is added to
    the error estimate (just the last panel when r >= 1). Doubling panels over a
    power-law tail x^-p have r = 2^(1-p), so slow tails are not under-reported.

    Args:
        f: Vectorised integrand, absolutely integrable on the ray
        a: Finite start of the ray
        toward_plus_infinity: Direction of the ray
        cfg: Tolerances

    Returns:
        IntegralResult with the panels summed left to right
    """
    if not math.isfinite(a):
        raise InvalidIntervalError(f"ray start must be finite, got {a}")
    sign = 1.0 if toward_plus_infinity else -1.0
    panels: List[IntegralResult] = []
    edges: List[float] = []
    running = 0j
    width = 1.0
    edge = a
    empty = 0
    converged = False
    tail = 0.0
    previous = 0.0
    for _ in range(cfg.max_subdivisions):
        far = edge + sign * width
        if not math.isfinite(far):
            break
        lo, hi = (edge, far) if toward_plus_infinity else (far, edge)
        panel = integrate_finite(f, lo, hi, cfg)
        panels.append(panel)
        edges.append(lo)
        running += panel.value
        previous, tail = tail, abs(panel.value)
        if running == 0 and tail == 0:
            empty += 1
            if empty >= _EMPTY_PANEL_LIMIT:
                converged = True
                break
        elif tail <= cfg.tail_cutoff * abs(running):
            converged = True
            break
        edge = far
        width *= 2.0

    ordered = [p for _, p in sorted(zip(edges, panels), key=lambda pair: pair[0])]
    combined = combine_results(ordered)
    ratio = tail / previous if previous > 0 else 1.0
    truncation = tail / (1.0 - ratio) if ratio < 1.0 else tail
    return IntegralResult(
        combined.value,
        combined.abs_err_estimate + truncation,
        combined.subdivisions_used + len(panels),
        converged and combined.converged,
    )


if __name__ == "__main__":
    cfg = QuadratureConfig()
    print("Adaptive Quadrature - Self Test")
    print("=" * 70)
    print(f"  int_0^1 x^2          = {integrate_finite(lambda x: x**2, 0.0, 1.0, cfg).value}")
    print(f"  int_0^pi e^(ix)      = {integrate_finite(lambda x: np.exp(1j * x), 0.0, math.pi, cfg).value}")
    print(f"  int_0^inf e^(-x)     = {integrate_semi_infinite(lambda x: np.exp(-x), 0.0, True, cfg).value}")
