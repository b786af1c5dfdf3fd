"""
Forward q-Fourier Transforms

Numerical transforms of a density (complex k with the half-plane split, the
real axis, the diagonal q' = q) and the closed forms for the Hilhorst family:
the diagonal value that depends on lambda and q alone, and the two-regime
hypergeometric expression for general q'.
"""

import cmath
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Sequence

from densities import DensitySpec, HilhorstDensity, HilhorstFamily, integrate_over_support
from errors import ParameterError, RegimeBoundaryError
from hyp2f1 import Hyp2F1Params, gauss_2f1
from qkernel import QLike, admissibility_window, heaviside, kernel_values, q_exp, q_value
from quad import QuadratureConfig

WORKERS_ENV = "QFT_WORKERS"
REGIME_BOUNDARY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TransformSample:
    k: complex
    value: complex
    abs_err_estimate: float

    def as_record(self) -> dict:
        return {
            "k_re": self.k.real,
            "k_im": self.k.imag,
            "F_re": self.value.real,
            "F_im": self.value.imag,
            "abs_err": self.abs_err_estimate,
        }


def _kernel(d: DensitySpec, k: complex, qp: float):
    def integrand(x):
        return kernel_values(x, k, d.evaluate(x), qp)
    return integrand


def qft_real(d: DensitySpec, k: float, qp: QLike, cfg: QuadratureConfig) -> TransformSample:
    """
    Real-axis transform: integral of f(x) e_qp(i k x f^(qp-1)) over the support.

    Args:
        d: Density
        k: Real wave number
        qp: Transform index q'; outside [1, 2) the result is 0
        cfg: Quadrature tolerances

    Returns:
        TransformSample at k

    Raises:
        ConvergenceError: the quadrature missed its tolerance
    """
    k = complex(k)
    if k.imag != 0:
        raise ParameterError(f"qft_real needs a real k, got {k}")
    qp = float(qp)
    if admissibility_window(qp) == 0.0:
        return TransformSample(k, 0j, 0.0)
    result = integrate_over_support(d, _kernel(d, k.real, qp), cfg)
    result.require_converged(f"transform at k={k.real}, q'={qp}")
    return TransformSample(k, result.value, result.abs_err_estimate)


def qft_complex(d: DensitySpec, k: complex, qp: QLike, cfg: QuadratureConfig) -> TransformSample:
    """
    Complex-k transform with the half-plane split.

    Im(k) > 0 integrates over [0, inf), Im(k) < 0 takes minus the integral
    over (-inf, 0], and real k is the boundary value given by qft_real.
    """
    k = complex(k)
    qp = float(qp)
    if admissibility_window(qp) == 0.0:
        return TransformSample(k, 0j, 0.0)
    if k.imag == 0:
        return qft_real(d, k.real, qp, cfg)
    if k.imag > 0:
        result = integrate_over_support(d, _kernel(d, k, qp), cfg, lo=0.0)
        value = result.value
    else:
        result = integrate_over_support(d, _kernel(d, k, qp), cfg, hi=0.0)
        value = -result.value
    result.require_converged(f"transform at k={k}, q'={qp}")
    return TransformSample(k, value, result.abs_err_estimate)


def ft_diagonal(d: DensitySpec, k: complex, cfg: QuadratureConfig,
                q: Optional[QLike] = None) -> TransformSample:
    """Transform on the diagonal q' = q, using the density's own q unless given."""
    q = d.q if q is None else q
    if q is None:
        raise ParameterError(f"{d.describe()['name']} density carries no q; pass q explicitly")
    qv = q_value(q)
    k = complex(k)
    if k.imag == 0:
        return qft_real(d, k.real, qv, cfg)
    return qft_complex(d, k, qv, cfg)


def _sample(d: DensitySpec, k: complex, qp: float, cfg: QuadratureConfig) -> TransformSample:
    return qft_complex(d, k, qp, cfg)


def default_workers() -> int:
    """Worker count from QFT_WORKERS (1 when unset)."""
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ParameterError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    if workers < 1:
        raise ParameterError(f"{WORKERS_ENV} must be >= 1, got {workers}")
    return workers


def transform_grid(d: DensitySpec, k_values: Sequence[complex], qp: QLike,
                   cfg: QuadratureConfig, workers: Optional[int] = None) -> List[TransformSample]:
    """
    Evaluate the transform at every k, results in input order.

    Args:
        d: Density
        k_values: Wave numbers (real or complex)
        qp: Transform index q'
        cfg: Quadrature tolerances
        workers: Process count; defaults to QFT_WORKERS

    Returns:
        One TransformSample per k, ordered like k_values
    """
    workers = default_workers() if workers is None else workers
    job = partial(_sample, d, qp=float(qp), cfg=cfg)
    ks = [complex(k) for k in k_values]
    if workers <= 1 or len(ks) < 2:
        return [job(k) for k in ks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, ks, chunksize=max(1, len(ks) // (4 * workers))))


def qprime_scan(d: DensitySpec, k: complex, qp_values: Sequence[float],
                cfg: QuadratureConfig) -> List[tuple]:
    """
    Transform at one k for several q'.

    Returns:
        List of (qp, TransformSample) in input order
    """
    return [(float(qp), qft_complex(d, k, qp, cfg)) for qp in qp_values]


def hilhorst_uts_closed(lam: float, q: float, k: complex) -> complex:
    """
    Diagonal transform of any Hilhorst member: [1 + (1-q) i k lam]^(1/(1-q)).

    Depends on lambda and q only. Zero for Im(k) < 0 and for q outside
    [1, 2); real k is the boundary value from the upper half-plane.
    """
    q = float(q)
    k = complex(k)
    if admissibility_window(q) == 0.0 or heaviside(k.imag) == 0.0:
        return 0j
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    return q_exp(1j * k * lam, q)


def _principal_power(base: complex, exponent: float) -> complex:
    return cmath.exp(exponent * cmath.log(base))


def hilhorst_full_closed(fam: HilhorstFamily, k: complex, qp: float,
                         printed_bracket: bool = False,
                         printed_prefactor: bool = False) -> complex:
    """
    Hypergeometric closed form of the Hilhorst transform at general q'.

    For q' below the regime boundary 1 + 1/beta (which equals q) the series
    runs in the reciprocal argument 1/(s i k lam^gamma x^(1-gamma)); above it
    the argument is s i k lam^gamma x^(1-gamma), where s = q'-1 and
    gamma = beta s.

    Args:
        fam: Hilhorst member
        k: Wave number with Im(k) >= 0 (Im(k) < 0 gives 0)
        qp: Transform index q'
        printed_bracket: Close the first regime with H(q-1-1/beta) instead of
            H(q'-1-1/beta); the two brackets then no longer cover (1, q)
        printed_prefactor: Use [(1-q') i k lam^beta]^(1/(q'-1)) in the first
            regime instead of [(1-q') i k lam^gamma]^(1/(q'-1))

    Returns:
        The transform value

    Raises:
        RegimeBoundaryError: q' equals 1 + 1/beta
        DegenerateParameterError: a 2F1 evaluation needs a regularised limit
    """
    qp = float(qp)
    k = complex(k)
    if admissibility_window(qp) == 0.0 or heaviside(k.imag) == 0.0:
        return 0j
    if qp == 1.0:
        raise ParameterError("the hypergeometric closed form needs 1 < q' < 2")

    a, b, lam, beta = fam.a, fam.b, fam.lam, fam.beta
    q = fam.q.value
    if k == 0:
        return complex(fam.normalization_closed())
    # 1 + 1/beta is q itself
    boundary = q
    if abs(qp - boundary) <= REGIME_BOUNDARY_TOLERANCE:
        raise RegimeBoundaryError(
            f"q'={qp} is on the regime boundary 1+1/beta={boundary} of the closed form"
        )

    s = qp - 1.0
    gamma = beta * s
    first = heaviside(qp - 1.0) - heaviside((q if printed_bracket else qp) - boundary)
    second = heaviside(qp - boundary) - heaviside(qp - 2.0)
    total = 0j

    if first:
        lam_pow = lam ** beta if printed_prefactor else lam ** gamma
        params = Hyp2F1Params(
            1.0 / s,
            (2.0 - qp) / (s * (1.0 - gamma)),
            (1.0 - gamma * s) / (s * (1.0 - gamma)),
        )
        prefactor = s * lam ** beta / (
            (2.0 - qp) * _principal_power((1.0 - qp) * 1j * k * lam_pow, 1.0 / s)
        )
        power = (qp - 2.0) / s

        def end(x):
            z = 1.0 / (s * 1j * k * lam ** gamma * x ** (1.0 - gamma))
            return x ** power * gauss_2f1(params, z)

        total += first * prefactor * (end(a) - end(b))

    if second:
        params = Hyp2F1Params(
            1.0 / s,
            (beta - 1.0) / (gamma - 1.0),
            (beta * qp - 2.0) / (gamma - 1.0),
        )
        prefactor = lam ** beta / (beta - 1.0)

        def end(x):
            z = s * 1j * k * lam ** gamma * x ** (1.0 - gamma)
            return x ** (1.0 - beta) * gauss_2f1(params, z)

        total += second * prefactor * (end(a) - end(b))

    return total


def closed_vs_quadrature(fam: HilhorstFamily, k: complex, qp: float,
                         cfg: QuadratureConfig, **closed_options) -> dict:
    """Closed form and direct quadrature side by side, with their relative gap."""
    closed = hilhorst_full_closed(fam, k, qp, **closed_options)
    numeric = qft_complex(HilhorstDensity(fam), k, qp, cfg)
    scale = max(abs(numeric.value), 1e-300)
    return {
        "k": complex(k),
        "qp": float(qp),
        "closed": closed,
        "quadrature": numeric.value,
        "abs_err": numeric.abs_err_estimate,
        "relative_gap": abs(closed - numeric.value) / scale,
    }


if __name__ == "__main__":
    from qkernel import DeformationParameter

    fam = HilhorstFamily(1.0, 2.0, DeformationParameter(1.5))
    cfg = QuadratureConfig()
    print("q-Fourier Transform - Self Test")
    print("=" * 70)
    print(f"  closed diagonal k=1 : {hilhorst_uts_closed(math.sqrt(2), 1.5, 1)}")
    print(f"  numeric diagonal    : {ft_diagonal(HilhorstDensity(fam), 1, cfg).value}")
    for qp in (1.3, 1.7):
        row = closed_vs_quadrature(fam, 2j, qp, cfg)
        print(f"  q'={qp}, k=2i: closed {row['closed']:.10f}  quad {row['quadrature']:.10f}")
