"""Candidate rule family, normalization sums, and the defect scan."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bornlab.quantum import ModulusVector, haar_state, moduli
from bornlab.rules import (
    Affine,
    Born,
    DomainError,
    Power,
    Renormalized,
    defect_scan,
    evaluate,
    normalization_sum,
    parse_rule,
    rule_probabilities,
)

SYMMETRIC_QUBIT = ModulusVector(np.array([1.0, 1.0]) / np.sqrt(2))


class TestRuleFamily:
    def test_born_equals_power_two_equals_affine(self):
        born, power, affine = Born(), Power(2.0), Affine(1.0, 0.0)
        for a in np.linspace(0.0, 1.0, 100):
            assert abs(evaluate(born, a) - evaluate(power, a)) <= 1e-15
            assert abs(evaluate(born, a) - evaluate(affine, a)) <= 1e-15

    def test_endpoints_finite_for_all_kinds(self):
        for rule in (Born(), Power(0.5), Power(4.0), Affine(-3.0, 2.0)):
            assert np.isfinite(evaluate(rule, 0.0))
            assert np.isfinite(evaluate(rule, 1.0))

    def test_power_requires_positive_exponent(self):
        with pytest.raises(ValueError):
            Power(0.0)

    def test_boundary_values_of_the_quadratic_rule(self):
        assert evaluate(Born(), 1.0) == 1.0
        assert evaluate(Born(), 0.0) == 0.0

    def test_affine_example(self):
        assert abs(evaluate(Affine(-1.0, 1.0), 0.6) - 0.64) <= 1e-15

    def test_domain_error(self):
        with pytest.raises(DomainError):
            evaluate(Born(), 1.1)
        with pytest.raises(DomainError):
            evaluate(Born(), -0.1)
        # tiny slack is tolerated
        assert evaluate(Born(), 1.0 + 1e-13) == 1.0

    def test_renormalized_not_scalar_evaluable(self):
        with pytest.raises(TypeError):
            evaluate(Renormalized(Power(1.0)), 0.5)


class TestParsing:
    @pytest.mark.parametrize(
        "name, kind",
        [
            ("born", Born),
            ("power:3", Power),
            ("affine:2:0.5", Affine),
            ("renorm:power:4", Renormalized),
            ("renorm:born", Renormalized),
        ],
    )
    def test_known_names(self, name, kind):
        assert isinstance(parse_rule(name), kind)

    def test_name_round_trip(self):
        for name in ("born", "power:3.0", "affine:2.0:0.5", "renorm:power:4.0"):
            assert parse_rule(name).name == name

    @pytest.mark.parametrize("bad", ["nope", "power:", "power:zero", "affine:1", ""])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            parse_rule(bad)


class TestNormalizationSum:
    def test_born_is_the_orthant_identity(self):
        for seed in range(20):
            point = moduli(haar_state(4, np.random.default_rng(seed)).amplitudes)
            assert abs(normalization_sum(Born(), point) - 1.0) <= 1e-12

    def test_linear_rule_at_symmetric_point(self):
        assert abs(normalization_sum(Power(1.0), SYMMETRIC_QUBIT) - np.sqrt(2)) <= 1e-12

    def test_quartic_rule_at_symmetric_point(self):
        assert abs(normalization_sum(Power(4.0), SYMMETRIC_QUBIT) - 0.5) <= 1e-12

    def test_renormalized_sums_to_one_by_construction(self):
        assert normalization_sum(Renormalized(Power(3.0)), SYMMETRIC_QUBIT) == 1.0

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10_000), p=st.floats(0.5, 5.0))
    def test_renormalized_probabilities_sum_to_one(self, seed, p):
        point = moduli(haar_state(3, np.random.default_rng(seed)).amplitudes)
        values = rule_probabilities(Renormalized(Power(p)), point)
        assert abs(np.sum(values) - 1.0) <= 1e-12


class TestDefectScan:
    def test_born_never_defects(self):
        report = defect_scan(Born(), 3, 1000, seed=1)
        assert report.max_defect <= 1e-12

    def test_linear_rule_approaches_supremum(self):
        # the defect sup at d=2 is sqrt(2) - 1, attained at the symmetric
        # state; 1000 Haar draws get within 0.004 of it
        report = defect_scan(Power(1.0), 2, 1000, seed=2)
        assert report.max_defect >= 0.41
        assert report.max_defect <= np.sqrt(2) - 1 + 1e-12

    def test_affine_defect_is_constant(self):
        # sum (scale a^2 + offset) - 1 = scale + d*offset - 1 for every state
        report = defect_scan(Affine(1.0, 0.1), 3, 200, seed=3)
        expected = abs(1.0 + 3 * 0.1 - 1.0)
        assert np.max(np.abs(report.defects - expected)) <= 1e-12

    @settings(max_examples=20, deadline=None)
    @given(
        scale=st.floats(-2.0, 2.0),
        offset=st.floats(-1.0, 1.0),
        d=st.integers(2, 6),
        seed=st.integers(0, 1000),
    )
    def test_affine_defect_formula(self, scale, offset, d, seed):
        report = defect_scan(Affine(scale, offset), d, 50, seed=seed)
        expected = abs(scale + d * offset - 1.0)
        assert np.max(np.abs(report.defects - expected)) <= 1e-12

    @pytest.mark.parametrize("p", [1.0, 3.0, 4.0])
    def test_non_quadratic_power_found_within_100_trials(self, p):
        report = defect_scan(Power(p), 2, 100, seed=4)
        assert report.max_defect >= 0.05

    def test_witness_is_recorded(self):
        report = defect_scan(Power(1.0), 2, 500, seed=5)
        witness_sum = normalization_sum(Power(1.0), report.argmax_state)
        assert abs(abs(witness_sum - 1.0) - report.max_defect) <= 1e-15

    def test_renormalized_always_passes_this_falsifier(self):
        report = defect_scan(Renormalized(Power(4.0)), 3, 200, seed=6)
        assert report.max_defect == 0.0

    def test_deterministic_and_thread_invariant(self):
        a = defect_scan(Power(1.5), 3, 400, seed=7, threads=1)
        b = defect_scan(Power(1.5), 3, 400, seed=7, threads=8)
        np.testing.assert_array_equal(a.defects, b.defects)
        assert a.max_defect == b.max_defect
        np.testing.assert_array_equal(a.argmax_state.moduli, b.argmax_state.moduli)

    def test_max_dominates_mean(self):
        report = defect_scan(Power(3.0), 4, 300, seed=8)
        assert report.max_defect >= report.mean_defect >= 0.0

    def test_requires_at_least_one_trial(self):
        with pytest.raises(ValueError):
            defect_scan(Born(), 2, 0, seed=0)
