"""
Equivalence Classes of Densities

Finite probes of the classes of Hilhorst densities that share lambda and q.
Within a class the diagonal transform collapses to one function of k; across
classes with different lambda the closed form tells them apart.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from densities import HilhorstDensity, HilhorstFamily, solve_b_for_lambda
from errors import ClassConstructionError, ParameterError, QFTError
from qkernel import DeformationParameter, QLike, q_value
from quad import QuadratureConfig
from transform import hilhorst_uts_closed, transform_grid

MEMBERSHIP_RTOL = 1e-12
SAME_CLASS_RTOL = 1e-6
COLLAPSE_BUDGET_FACTOR = 10.0
SEPARATION_FLOOR_FACTOR = 0.5


@dataclass(frozen=True)
class EquivalenceClassProbe:
    """
    Hilhorst members sharing lambda and q.

    Args:
        q: Common index
        lam: Common lambda
        members: At least one HilhorstFamily with that lambda and q
    """
    q: DeformationParameter
    lam: float
    members: Tuple[HilhorstFamily, ...]

    def __post_init__(self):
        if not isinstance(self.q, DeformationParameter):
            object.__setattr__(self, "q", DeformationParameter(self.q))
        members = tuple(self.members)
        if not members:
            raise ParameterError("an equivalence class probe needs at least one member")
        for m in members:
            if m.q.value != self.q.value:
                raise ParameterError(f"member ({m.a}, {m.b}) has q={m.q.value}, probe q={self.q.value}")
            if not math.isclose(m.lam, self.lam, rel_tol=MEMBERSHIP_RTOL):
                raise ParameterError(
                    f"member ({m.a}, {m.b}) has lambda={m.lam!r}, probe lambda={self.lam!r}"
                )
        object.__setattr__(self, "members", members)

    def describe(self) -> dict:
        return {
            "q": self.q.value,
            "lambda": self.lam,
            "members": [{"a": m.a, "b": m.b, "lambda": m.lam} for m in self.members],
        }


def build_class(q: QLike, lam: float, a_values: Sequence[float]) -> EquivalenceClassProbe:
    """
    Members (a, b) with b solved so that every member has the given lambda.

    Raises:
        ParameterError: a_values is empty
        ClassConstructionError: some a admits no b; lists every offending a
    """
    qv = q_value(q)
    if not a_values:
        raise ParameterError("at least one member required (a_values is empty)")
    members, failures = [], []
    for a in a_values:
        try:
            b = solve_b_for_lambda(float(a), lam, qv)
        except QFTError as exc:
            failures.append((float(a), str(exc)))
            continue
        members.append(HilhorstFamily(float(a), b, DeformationParameter(qv)))
    if failures:
        raise ClassConstructionError(failures)
    return EquivalenceClassProbe(DeformationParameter(qv), float(lam), tuple(members))


@dataclass(frozen=True)
class CollapseRow:
    k: float
    values: Tuple[complex, ...]
    closed: complex
    max_pairwise_deviation: float
    max_closed_deviation: float
    error_budget: float

    def as_record(self) -> dict:
        return {
            "k": self.k,
            "values": [[v.real, v.imag] for v in self.values],
            "closed": [self.closed.real, self.closed.imag],
            "max_pairwise_deviation": self.max_pairwise_deviation,
            "max_closed_deviation": self.max_closed_deviation,
            "error_budget": self.error_budget,
        }


@dataclass(frozen=True)
class CollapseReport:
    rows: Tuple[CollapseRow, ...]
    max_pairwise_deviation: float
    max_closed_deviation: float
    collapse_ok: bool


def verify_collapse(p: EquivalenceClassProbe, k_grid: Sequence[float],
                    qcfg: QuadratureConfig, workers: Optional[int] = None) -> CollapseReport:
    """
    Diagonal transform of every member on a real k-grid.

    A k passes when every pairwise gap and every gap to the closed form is
    within ten times the summed quadrature error estimates at that k.

    Raises:
        ParameterError: fewer than two members
    """
    if len(p.members) < 2:
        raise ParameterError("collapse needs at least two members")
    ks = [float(k) for k in k_grid]
    per_member = [
        transform_grid(HilhorstDensity(m), ks, p.q.value, qcfg, workers) for m in p.members
    ]

    rows = []
    ok = True
    for j, k in enumerate(ks):
        samples = [column[j] for column in per_member]
        values = tuple(s.value for s in samples)
        closed = hilhorst_uts_closed(p.lam, p.q.value, k)
        budget = COLLAPSE_BUDGET_FACTOR * math.fsum(s.abs_err_estimate for s in samples)
        pairwise = max(abs(u - v) for i, u in enumerate(values) for v in values[i + 1:])
        to_closed = max(abs(v - closed) for v in values)
        ok = ok and pairwise <= budget and to_closed <= budget
        rows.append(CollapseRow(k, values, closed, pairwise, to_closed, budget))

    return CollapseReport(
        tuple(rows),
        max(r.max_pairwise_deviation for r in rows),
        max(r.max_closed_deviation for r in rows),
        ok,
    )


@dataclass(frozen=True)
class SeparationReport:
    max_difference: float
    witness_k: float
    floor: float
    grid_sufficient: bool
    separation_ok: bool

    def as_dict(self) -> dict:
        return {
            "max_difference": self.max_difference,
            "witness_k": self.witness_k,
            "floor": self.floor,
            "grid_sufficient": self.grid_sufficient,
            "separation_ok": self.separation_ok,
        }


def separation_floor(lam1: float, lam2: float, q: float, k_grid: Sequence[float]) -> float:
    """
    Half the largest first-order difference |k| |dlam| |1 + (1-q) i k lam_max|^(q/(1-q)).

    |dF/dlam| = |k| |1 + (1-q) i k lam|^(q/(1-q)) is smallest at the larger
    lambda for real k.
    """
    gap = abs(lam1 - lam2)
    lam_max = max(lam1, lam2)
    exponent = q / (1.0 - q)
    linear = [abs(k) * gap * abs(1 + (1 - q) * 1j * k * lam_max) ** exponent for k in k_grid]
    return SEPARATION_FLOOR_FACTOR * max(linear, default=0.0)


def verify_separation(p1: EquivalenceClassProbe, p2: EquivalenceClassProbe,
                      k_grid: Sequence[float]) -> SeparationReport:
    """
    Largest closed-form difference between two classes on a real k-grid.

    Raises:
        ParameterError: different q, or lambdas within 1e-6 relative
    """
    if p1.q.value != p2.q.value:
        raise ParameterError(
            f"classes at q={p1.q.value} and q={p2.q.value} are not comparable on one diagonal"
        )
    if abs(p1.lam - p2.lam) <= SAME_CLASS_RTOL * p1.lam:
        raise ParameterError(f"lambda={p1.lam!r} and lambda={p2.lam!r} describe the same class")
    q = p1.q.value
    ks = [float(k) for k in k_grid]
    if not ks:
        raise ParameterError("separation needs a non-empty k-grid")

    diffs = [abs(hilhorst_uts_closed(p1.lam, q, k) - hilhorst_uts_closed(p2.lam, q, k)) for k in ks]
    best = max(range(len(ks)), key=lambda j: diffs[j])
    floor = separation_floor(p1.lam, p2.lam, q, ks)
    sufficient = any(k != 0 for k in ks)
    ok = sufficient and diffs[best] > 0 and diffs[best] >= floor
    return SeparationReport(diffs[best], ks[best], floor, sufficient, ok)


def lambda_probe(q: QLike, lam: float) -> EquivalenceClassProbe:
    """Single-member probe for a class given only by (lambda, q)."""
    return build_class(q, lam, [_default_start(q_value(q), lam)])


def _default_start(q: float, lam: float) -> float:
    """An a for which lambda is achievable: half the a whose infimum equals lambda."""
    # infimum(a) = [((q-1)/(2-q)) a^e]^(1-q) = C a^(2-q), increasing in a
    scale = ((q - 1.0) / (2.0 - q)) ** (1.0 - q)
    return 0.5 * (lam / scale) ** (1.0 / (2.0 - q))
