"""
Acceptance Suite

Named checks with analytic or independent oracles, run by `cli.py selftest`.
A check that certifies a tolerance through quadrature fails outright when the
configured quadrature tolerance is looser than the tolerance it certifies.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad as scipy_quad

from densities import HilhorstDensity, HilhorstFamily, verify_normalization
from equivalence import build_class, lambda_probe, verify_collapse, verify_separation
from errors import ParameterError
from hyp2f1 import hyp2f1
from inverse import InverseConfig, roundtrip
from qkernel import DeformationParameter
from quad import QuadratureConfig
from transform import closed_vs_quadrature, ft_diagonal, hilhorst_uts_closed, qft_real

SEED = 20240611
REFERENCE_Q = 1.5


@dataclass(frozen=True)
class Check:
    name: str
    description: str
    run: Callable[[QuadratureConfig], Tuple[bool, str]]
    slow: bool = False


def _reference_family(a: float = 1.0, b: float = 2.0) -> HilhorstFamily:
    return HilhorstFamily(a, b, DeformationParameter(REFERENCE_Q))


def _too_loose(qcfg: QuadratureConfig, target: float) -> Optional[Tuple[bool, str]]:
    if qcfg.rel_tol > target:
        return False, f"quadrature rel_tol {qcfg.rel_tol:g} cannot certify {target:g}"
    return None


def check_normalization(qcfg: QuadratureConfig) -> Tuple[bool, str]:
    target = 1e-9
    loose = _too_loose(qcfg, target)
    if loose:
        return loose
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        a = rng.uniform(0.1, 5.0)
        b = a * rng.uniform(1.1, 50.0)
        q = rng.uniform(1.05, 1.9)
        d = HilhorstDensity(HilhorstFamily(a, b, DeformationParameter(q)))
        worst = max(worst, abs(verify_normalization(d, qcfg) - 1.0))
    return worst <= target, f"max |integral - 1| = {worst:.2e} over 20 families"


def check_diagonal_closed_form(qcfg: QuadratureConfig) -> Tuple[bool, str]:
    target = 1e-6
    loose = _too_loose(qcfg, target)
    if loose:
        return loose
    fam = _reference_family()
    d = HilhorstDensity(fam)
    worst = max(
        abs(ft_diagonal(d, k, qcfg).value - hilhorst_uts_closed(fam.lam, REFERENCE_Q, k))
        for k in np.linspace(-5.0, 5.0, 21)
    )
    spot = hilhorst_uts_closed(fam.lam, REFERENCE_Q, 1.0)
    ok = worst <= target and abs(spot - 1 / (0.5 - math.sqrt(2) * 1j)) <= 1e-12
    return ok, f"max |F_T - closed| = {worst:.2e}; F(1) = {spot:.5f}"


def check_equivalence_collapse(qcfg: QuadratureConfig) -> Tuple[bool, str]:
    target = 1e-6
    loose = _too_loose(qcfg, target)
    if loose:
        return loose
    probe = build_class(REFERENCE_Q, math.sqrt(2), [1.0, 1.5])
    report = verify_collapse(probe, np.linspace(-5.0, 5.0, 21), qcfg)
    ok = report.max_pairwise_deviation <= target and report.collapse_ok
    bs = ", ".join(f"{m.b:.12g}" for m in probe.members)
    return ok, f"b = [{bs}], max deviation {report.max_pairwise_deviation:.2e}"


def check_full_closed_form(qcfg: QuadratureConfig) -> Tuple[bool, str]:
    target = 1e-6
    loose = _too_loose(qcfg, target)
    if loose:
        return loose
    fam = _reference_family()
    worst = 0.0
    worst_printed = 0.0
    for qp in (1.3, 1.7):
        for k in (0.5j, 2j, 1 + 1j):
            row = closed_vs_quadrature(fam, k, qp, qcfg)
            worst = max(worst, row["relative_gap"])
            printed = closed_vs_quadrature(fam, k, qp, qcfg, printed_bracket=True)
            worst_printed = max(worst_printed, printed["relative_gap"])
    return worst <= target, (
        f"max relative gap {worst:.2e} (printed bracket: {worst_printed:.2e})"
    )


def check_class_separation(qcfg: QuadratureConfig) -> Tuple[bool, str]:
    first = lambda_probe(REFERENCE_Q, math.sqrt(2))
    second = lambda_probe(REFERENCE_Q, 2.0)
    report = verify_separation(first, second, np.linspace(0.1, 5.0, 50))
    ok = report.separation_ok and report.max_difference >= 0.1
    return ok, f"max |dF| = {report.max_difference:.4f} at k = {report.witness_k:.3f}"


def classical_transform(f: Callable[[float], float], a: float, b: float, k: float) -> complex:
    """Ordinary Fourier integral over [a, b] by QUADPACK's oscillatory rules."""
    re, _ = scipy_quad(f, a, b, weight="cos", wvar=k, epsabs=1e-14, epsrel=1e-13)
    im, _ = scipy_quad(f, a, b, weight="sin", wvar=k, epsabs=1e-14, epsrel=1e-13)
    return complex(re, im)


def check_classical_limit(qcfg: QuadratureConfig) -> Tuple[bool, str]:
    target = 1e-6
    loose = _too_loose(qcfg, target)
    if loose:
        return loose
    fam = _reference_family()
    d = HilhorstDensity(fam)
    worst = 0.0
    for k in (0.5, 1.0, 3.0):
        value = qft_real(d, k, 1.0 + 1e-8, qcfg).value
        oracle = classical_transform(lambda x: 2.0 / x ** 2, 1.0, 2.0, k)
        worst = max(worst, abs(value - oracle) / max(abs(oracle), 1.0))
    return worst <= target, f"max gap {worst:.2e} at q' = 1 + 1e-8"


def check_inverse_recovery(qcfg: QuadratureConfig) -> Tuple[bool, str]:
    target = 5e-3
    loose = _too_loose(qcfg, target)
    if loose:
        return loose
    d = HilhorstDensity(_reference_family())
    points = (1.25, 1.5, 1.75)
    l1 = []
    for k_max in (50.0, 100.0, 200.0, 400.0):
        cfg = InverseConfig(k_max=k_max, n_k=int(10 * k_max), x_points=points)
        l1.append(roundtrip(d, cfg, qcfg).l1_error)
    monotone = all(later <= 1.1 * earlier for earlier, later in zip(l1, l1[1:]))
    tapered = roundtrip(d, InverseConfig(k_max=400.0, n_k=4000, x_points=points,
                                         window="lanczos"), qcfg)
    pointwise = max(row.abs_err for row in tapered.rows)
    ok = monotone and pointwise <= target and tapered.max_imaginary_residue <= 1e-4
    trail = ", ".join(f"{v:.2e}" for v in l1)
    return ok, f"L1 [{trail}]; tapered max error {pointwise:.2e}"


def check_hypergeometric(qcfg: QuadratureConfig) -> Tuple[bool, str]:
    log_gap = abs(hyp2f1(1, 1, 2, 0.5) - 2 * math.log(2)) / (2 * math.log(2))
    z = 0.3 + 0.1j
    binomial = (1 - z) ** -0.7
    binomial_gap = abs(hyp2f1(0.7, 1.3, 1.3, z) - binomial) / abs(binomial)

    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(100):
        a, b = rng.uniform(0.1, 3.0, size=2)
        c = rng.uniform(1.5, 4.0)
        z = cmath.rect(rng.uniform(0.05, 0.9), rng.uniform(math.pi / 2, 3 * math.pi / 2))
        worst = max(worst, contiguous_residual(a, b, c, z))
    ok = log_gap <= 1e-8 and binomial_gap <= 1e-8 and worst <= 1e-8
    return ok, f"identities {max(log_gap, binomial_gap):.1e}, contiguous {worst:.1e}"


def contiguous_residual(a: float, b: float, c: float, z: complex) -> float:
    """Scaled residual of Gauss's relation between F(c-1), F(c) and F(c+1)."""
    terms = (
        c * (c - 1) * (z - 1) * hyp2f1(a, b, c - 1, z),
        c * (c - 1 - (2 * c - a - b - 1) * z) * hyp2f1(a, b, c, z),
        (c - a) * (c - b) * z * hyp2f1(a, b, c + 1, z),
    )
    return abs(sum(terms)) / sum(abs(t) for t in terms)


CHECKS: List[Check] = [
    Check("normalization", "Hilhorst densities integrate to 1", check_normalization),
    Check("diagonal_closed_form", "numeric F_T matches the lambda-only closed form",
          check_diagonal_closed_form),
    Check("equivalence_collapse", "members (1,2) and (1.5,6) share F_T",
          check_equivalence_collapse),
    Check("full_closed_form", "hypergeometric closed form matches quadrature",
          check_full_closed_form),
    Check("class_separation", "lambda = sqrt2 and lambda = 2 classes differ",
          check_class_separation),
    Check("classical_limit", "q' -> 1 gives the ordinary Fourier integral",
          check_classical_limit),
    Check("inverse_recovery", "round trip recovers the density", check_inverse_recovery,
          slow=True),
    Check("hypergeometric", "2F1 identities and contiguous relation", check_hypergeometric),
]


def select_checks(only: Optional[Sequence[str]] = None, quick: bool = False) -> List[Check]:
    """Checks to run, in suite order."""
    known = {check.name for check in CHECKS}
    unknown = sorted(set(only or ()) - known)
    if unknown:
        raise ParameterError(f"unknown checks {unknown}; use --list to see the names")
    chosen = [c for c in CHECKS if not only or c.name in only]
    if quick:
        chosen = [c for c in chosen if not c.slow]
    return chosen


def run_selftest(qcfg: QuadratureConfig, only: Optional[Sequence[str]] = None,
                 quick: bool = False, verbose: bool = True) -> bool:
    """
    Run the selected checks and print a pass/fail table.

    Returns:
        True when every selected check passed
    """
    chosen = select_checks(only, quick)
    results = []
    for check in chosen:
        if verbose:
            print(f"[*] {check.name}: {check.description}")
        try:
            passed, detail = check.run(qcfg)
        except ArithmeticError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        results.append((check.name, passed, detail))

    if verbose:
        print("\n" + "=" * 70)
        print("{:<24} {:<6} {}".format("Check", "Result", "Detail"))
        print("-" * 70)
        for name, passed, detail in results:
            print("{:<24} {:<6} {}".format(name, "PASS" if passed else "FAIL", detail))
        print("=" * 70)
        total = sum(1 for _, passed, _ in results if passed)
        mark = "✓" if total == len(results) else "!"
        print(f"[{mark}] {total}/{len(results)} checks passed")
    return all(passed for _, passed, _ in results)
