import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densities import HilhorstFamily, hilhorst_lambda_limit
from equivalence import (
    EquivalenceClassProbe,
    build_class,
    lambda_probe,
    separation_floor,
    verify_collapse,
    verify_separation,
)
from errors import ClassConstructionError, ParameterError, UnachievableTargetError
from qkernel import DeformationParameter

SQRT2 = math.sqrt(2.0)
REFERENCE_VALUE = 1 / (0.5 - SQRT2 * 1j)


class TestBuildClass:
    def test_reference_members(self):
        probe = build_class(1.5, SQRT2, [1.0, 1.5])
        assert [(m.a, m.b) for m in probe.members] == [
            (1.0, pytest.approx(2.0, rel=1e-12)),
            (1.5, pytest.approx(6.0, rel=1e-12)),
        ]
        assert probe.q == DeformationParameter(1.5)

    def test_single_member(self):
        probe = build_class(1.5, SQRT2, [1.2])
        assert len(probe.members) == 1
        # 1/1.2 - 1/b = 1/2
        assert probe.members[0].b == pytest.approx(3.0, rel=1e-12)

    def test_empty(self):
        with pytest.raises(ParameterError, match="at least one member"):
            build_class(1.5, SQRT2, [])

    def test_lists_every_failure(self):
        with pytest.raises(ClassConstructionError) as info:
            build_class(1.5, 1.2, [1.0, 2.0, 3.0])
        assert [a for a, _ in info.value.failures] == [2.0, 3.0]
        assert isinstance(info.value, UnachievableTargetError)
        assert "a=2.0" in str(info.value)

    def test_inadmissible_q(self):
        with pytest.raises(ParameterError):
            build_class(2.0, SQRT2, [1.0])

    @settings(max_examples=50, deadline=None)
    @given(q=st.floats(min_value=1.2, max_value=1.8),
           fractions=st.lists(st.floats(min_value=0.4, max_value=0.95), min_size=1, max_size=4))
    def test_members_share_lambda(self, q, fractions):
        lam = 2.0
        # a grows with the infimum; stay below the a whose infimum is lam
        a_star = lam ** (1 / (2 - q)) * ((q - 1) / (2 - q)) ** ((q - 1) / (2 - q))
        probe = build_class(q, lam, [f * a_star for f in fractions])
        for m in probe.members:
            assert hilhorst_lambda_limit(m.a, q) < lam
            assert m.lam == pytest.approx(lam, rel=1e-10)


class TestProbe:
    def test_rejects_foreign_member(self):
        fam = HilhorstFamily(1.0, 3.0, DeformationParameter(1.5))
        with pytest.raises(ParameterError):
            EquivalenceClassProbe(DeformationParameter(1.5), SQRT2, (fam,))

    def test_rejects_other_q(self):
        fam = HilhorstFamily(1.0, 2.0, DeformationParameter(1.4))
        with pytest.raises(ParameterError):
            EquivalenceClassProbe(DeformationParameter(1.5), fam.lam, (fam,))

    def test_rejects_empty(self):
        with pytest.raises(ParameterError):
            EquivalenceClassProbe(DeformationParameter(1.5), SQRT2, ())

    def test_describe(self):
        described = build_class(1.5, SQRT2, [1.0]).describe()
        assert described["q"] == 1.5
        assert described["members"][0]["a"] == 1.0


class TestCollapse:
    def test_reference_class(self, qcfg):
        probe = build_class(1.5, SQRT2, [1.0, 1.5, 1.2])
        report = verify_collapse(probe, np.linspace(-5.0, 5.0, 21), qcfg, workers=1)
        assert report.collapse_ok
        assert report.max_pairwise_deviation <= 1e-9
        assert report.max_closed_deviation <= 1e-9
        assert len(report.rows) == 21
        assert all(row.max_pairwise_deviation <= row.error_budget for row in report.rows)

    def test_normalization_at_origin(self, qcfg):
        probe = build_class(1.5, SQRT2, [1.0, 1.5])
        (row,) = verify_collapse(probe, [0.0], qcfg, workers=1).rows
        assert all(v == pytest.approx(1.0, abs=1e-12) for v in row.values)
        assert row.closed == 1

    def test_closed_form_at_one(self, qcfg):
        probe = build_class(1.5, SQRT2, [1.0, 1.5])
        (row,) = verify_collapse(probe, [1.0], qcfg, workers=1).rows
        for value in row.values:
            assert value == pytest.approx(REFERENCE_VALUE, abs=1e-9)
        assert row.as_record()["closed"] == [pytest.approx(REFERENCE_VALUE.real),
                                             pytest.approx(REFERENCE_VALUE.imag)]

    def test_needs_two_members(self, qcfg):
        with pytest.raises(ParameterError):
            verify_collapse(build_class(1.5, SQRT2, [1.0]), [1.0], qcfg)


class TestSeparation:
    def test_reference_classes(self):
        first = build_class(1.5, SQRT2, [1.0])
        second = lambda_probe(1.5, 2.0)
        report = verify_separation(first, second, np.linspace(0.1, 5.0, 50))
        assert report.separation_ok and report.grid_sufficient
        assert report.max_difference >= 0.1
        assert report.max_difference >= report.floor > 0

    def test_single_wave_number(self):
        first = lambda_probe(1.5, SQRT2)
        second = lambda_probe(1.5, 2.0)
        assert verify_separation(first, second, [1.0]).max_difference > 0.1

    def test_origin_only_grid(self):
        report = verify_separation(lambda_probe(1.5, SQRT2), lambda_probe(1.5, 2.0), [0.0])
        assert report.max_difference == 0
        assert not report.grid_sufficient
        assert not report.separation_ok
        assert report.as_dict()["grid_sufficient"] is False

    def test_same_class_rejected(self):
        with pytest.raises(ParameterError):
            verify_separation(lambda_probe(1.5, SQRT2), build_class(1.5, SQRT2, [1.0]), [1.0])

    def test_different_q_rejected(self):
        with pytest.raises(ParameterError):
            verify_separation(lambda_probe(1.5, SQRT2), lambda_probe(1.4, 2.0), [1.0])

    def test_floor_scales_with_gap(self):
        ks = np.linspace(0.1, 5.0, 50)
        narrow = separation_floor(SQRT2, 1.5, 1.5, ks)
        wide = separation_floor(SQRT2, 2.0, 1.5, ks)
        assert 0 < narrow < wide
        assert separation_floor(SQRT2, 2.0, 1.5, [0.0]) == 0

    @settings(max_examples=100, deadline=None)
    @given(q=st.floats(min_value=1.1, max_value=1.9),
           lam=st.floats(min_value=0.1, max_value=10.0),
           gap=st.floats(min_value=1e-3, max_value=1.0))
    def test_distinct_lambdas_differ_somewhere_on_the_grid(self, q, lam, gap):
        ks = np.linspace(0.1, 5.0, 50)
        report = verify_separation(lambda_probe(q, lam), lambda_probe(q, lam * (1 + gap)), ks)
        assert report.max_difference >= 1e-4
        assert 0.1 <= report.witness_k <= 5.0

    def test_lambda_probe(self):
        probe = lambda_probe(1.3, 3.0)
        assert len(probe.members) == 1
        assert probe.members[0].lam == pytest.approx(3.0, rel=1e-12)
