import math

import numpy as np
import pytest
from mpmath import mp

from gibbslab.bounds import (
    BOUND_REPORT_HEADER,
    BoundReport,
    binary_kl_bound,
    distribution_dependent_rhs,
    gap_bound_inverted,
    gap_bound_relaxed,
    generic_bound_rhs,
    high_temperature_bound,
    kl_moment_log_bound,
    minimizer_mass_bound,
    shift_radius,
    stratified_subgaussian_bound,
    subexponential_bound,
)
from gibbslab.model import LossProfile, table_space

mp.dps = 50


def mp_float(expr) -> float:
    return float(expr)


class TestGenericRhs:
    def test_all_zero(self):
        assert generic_bound_rhs(0.0, 0.0, 1.0) == 0.0

    def test_arithmetic(self):
        expected = mp_float(mp.log(2) + mp.log(2 * mp.sqrt(100)) + mp.log(20))
        got = generic_bound_rhs(math.log(2.0), kl_moment_log_bound(100), 0.05)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_linear_in_complexity(self):
        base = generic_bound_rhs(1.0, 0.5, 0.1)
        assert generic_bound_rhs(1.0 + 2.5, 0.5, 0.1) == pytest.approx(base + 2.5, abs=1e-12)

    def test_delta_range(self):
        with pytest.raises(ValueError):
            generic_bound_rhs(0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            generic_bound_rhs(0.0, 0.0, 1.5)


class TestBinaryKlBound:
    def test_reference_value(self):
        expected = mp_float((mp.log(2) + mp.log(400)) / 100)
        assert binary_kl_bound(math.log(2.0), 100, 0.05) == pytest.approx(expected, abs=1e-12)

    def test_large_n(self):
        expected = mp_float(mp.log(2000) / 10**6)
        assert binary_kl_bound(0.0, 10**6, 1.0) == pytest.approx(expected, abs=1e-15)

    def test_monotone_decreasing_in_n(self):
        values = [binary_kl_bound(0.3, n, 0.05) for n in (8, 16, 64, 256, 4096)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_monotone_in_complexity_and_delta(self):
        assert binary_kl_bound(1.0, 50, 0.05) < binary_kl_bound(2.0, 50, 0.05)
        assert binary_kl_bound(1.0, 50, 0.1) < binary_kl_bound(1.0, 50, 0.05)

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            binary_kl_bound(0.0, 7, 0.05)


class TestGapBounds:
    def test_zero_empirical_gives_twice_budget(self):
        budget = binary_kl_bound(math.log(2.0), 100, 0.05)
        assert gap_bound_relaxed(0.0, math.log(2.0), 100, 0.05) == pytest.approx(
            2 * budget, abs=1e-15
        )

    def test_reference_value(self):
        budget = mp.mpf(repr(binary_kl_bound(math.log(2.0), 100, 0.05)))
        expected = mp_float(mp.sqrt(2 * mp.mpf("0.1") * budget) + 2 * budget)
        got = gap_bound_relaxed(0.1, math.log(2.0), 100, 0.05)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_inverted_variant_is_tighter(self):
        rng = np.random.Generator(np.random.PCG64(3))
        for _ in range(1000):
            empirical = float(rng.random())
            lam = float(rng.uniform(0.0, 5.0))
            n = int(rng.integers(8, 1000))
            delta = float(rng.uniform(0.01, 0.5))
            assert gap_bound_inverted(empirical, lam, n, delta) <= (
                gap_bound_relaxed(empirical, lam, n, delta) + 1e-12
            )

    def test_empirical_range_checked(self):
        with pytest.raises(ValueError):
            gap_bound_relaxed(1.2, 0.0, 100, 0.05)
        with pytest.raises(ValueError):
            gap_bound_inverted(-0.1, 0.0, 100, 0.05)


class TestHighTemperatureBound:
    def test_reference_value(self):
        expected = mp_float((50 + mp.log(400)) / 100)
        assert high_temperature_bound(50.0, 100, 0.05) == pytest.approx(expected, abs=1e-12)

    def test_beta_zero_matches_kl_bound_at_zero(self):
        assert high_temperature_bound(0.0, 64, 0.1) == binary_kl_bound(0.0, 64, 0.1)

    def test_dominates_kl_bound_below_beta(self):
        rng = np.random.Generator(np.random.PCG64(5))
        for _ in range(200):
            beta = float(rng.uniform(0.0, 100.0))
            lam = float(rng.uniform(0.0, beta))
            n = int(rng.integers(8, 500))
            delta = float(rng.uniform(0.01, 0.9))
            assert high_temperature_bound(beta, n, delta) >= binary_kl_bound(lam, n, delta)

    def test_guards(self):
        with pytest.raises(ValueError):
            high_temperature_bound(-1.0, 100, 0.05)
        with pytest.raises(ValueError):
            high_temperature_bound(1.0, 4, 0.05)


class TestMinimizerMassBound:
    def test_full_mass(self):
        assert minimizer_mass_bound(1.0) == 0.0

    def test_k_of_100(self):
        assert minimizer_mass_bound(0.04) == pytest.approx(math.log(25.0), abs=1e-12)

    def test_log_identity(self):
        assert minimizer_mass_bound(math.exp(-100.0)) == pytest.approx(100.0, abs=1e-9)

    def test_zero_mass_rejected(self):
        with pytest.raises(ValueError):
            minimizer_mass_bound(0.0)


class TestStratifiedSubgaussian:
    def test_reference_value(self):
        expected = mp_float(2 * mp.sqrt((3 + mp.log(120) / 2) / 100))
        assert stratified_subgaussian_bound(3.0, 1.0, 100, 0.05) == pytest.approx(
            expected, abs=1e-12
        )

    def test_clamp_below_one(self):
        # complexities at or below 1 (including negative) share the clamped value
        reference = stratified_subgaussian_bound(1.0, 1.0, 100, 0.05)
        assert stratified_subgaussian_bound(0.5, 1.0, 100, 0.05) == reference
        assert stratified_subgaussian_bound(-2.0, 1.0, 100, 0.05) == reference

    def test_homogeneous_in_sigma(self):
        base = stratified_subgaussian_bound(3.0, 1.0, 100, 0.05)
        assert stratified_subgaussian_bound(3.0, 2.5, 100, 0.05) == pytest.approx(
            2.5 * base, abs=1e-12
        )

    def test_guards(self):
        with pytest.raises(ValueError):
            stratified_subgaussian_bound(1.0, 0.0, 100, 0.05)
        with pytest.raises(ValueError):
            stratified_subgaussian_bound(1.0, 1.0, 0, 0.05)


class TestSubexponentialBound:
    def test_trivial_arithmetic(self):
        assert subexponential_bound(0.0, 1.0, 100, 1.0) == pytest.approx(0.1, abs=1e-15)

    def test_reference_value(self):
        expected = mp_float((mp.log(2) + 2 + mp.log(20)) / 20)
        got = subexponential_bound(math.log(2.0), 2.0, 400, 0.05)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_precondition(self):
        with pytest.raises(ValueError):
            subexponential_bound(0.0, 11.0, 100, 0.5)  # sqrt(100) < 11
        subexponential_bound(0.0, 10.0, 100, 0.5)  # boundary is allowed

    def test_constant_parameters(self):
        loose = subexponential_bound(1.0, 1.0, 100, 0.1, c1=3.0)
        tight = subexponential_bound(1.0, 1.0, 100, 0.1, c1=1.0)
        assert loose > tight
        with pytest.raises(ValueError):
            subexponential_bound(1.0, 6.0, 100, 0.1, c2=2.0)


class TestShiftRadius:
    def test_reference_value(self):
        expected = mp_float(mp.sqrt(mp.log((1 + mp.mpf(100) ** 3) / mp.mpf("0.05")) / 200))
        assert shift_radius(100, 0.05, 1) == pytest.approx(expected, abs=1e-12)

    def test_n_one(self):
        expected = mp_float(mp.sqrt(mp.log(4) / 2))
        assert shift_radius(1, 0.5, 1) == pytest.approx(expected, abs=1e-15)

    def test_increasing_in_p(self):
        values = [shift_radius(100, 0.05, p) for p in (1, 2, 3, 5)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_overflow_safe(self):
        # n**(2p+1) = 1e405 exceeds the float range; the log form must not
        n, p, delta = 10**9, 22, 0.1
        expected = mp_float(mp.sqrt(mp.log((1 + mp.mpf(n) ** (2 * p + 1)) / mp.mpf("0.1")) / (2 * n)))
        assert math.isfinite(shift_radius(n, delta, p))
        assert shift_radius(n, delta, p) == pytest.approx(expected, rel=1e-12)

    def test_guards(self):
        with pytest.raises(ValueError):
            shift_radius(0, 0.05, 1)
        with pytest.raises(ValueError):
            shift_radius(100, 1.0, 1)
        with pytest.raises(ValueError):
            shift_radius(100, 0.05, 0)


class TestDistributionDependentRhs:
    def test_full_mass_degenerate_case(self):
        # every hypothesis has true loss 0: a single candidate shift
        space = table_space([[0.0], [0.0]], [0.5, 0.5])
        profile = LossProfile([0.1, 0.1], [0.0, 0.0])
        n, delta, p, beta, log_moment = 100, 0.05, 1, 2.0, 0.3
        s = shift_radius(n, delta, p)
        slack = s / n
        expected = beta * (0.0 - 0.1 + s) + math.log(1.0 / (1.0 - slack)) + log_moment + math.log(2.0 / delta)
        got = distribution_dependent_rhs(space, profile, 0.1, beta, n, delta, p, log_moment)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_two_level_enumeration(self):
        # levels 0.5 (mass 0.6) and 0.8 (mass 1.0); own empirical loss far below
        space = table_space(np.zeros((5, 1)), [0.3, 0.3, 0.2, 0.1, 0.1])
        profile = LossProfile(np.full(5, 0.1), [0.5, 0.5, 0.8, 0.8, 0.8])
        n, delta, p, beta, log_moment = 100, 0.05, 1, 10.0, 0.0
        s = shift_radius(n, delta, p)
        slack = s / n
        candidates = [
            beta * (0.5 - 0.1 + s) - math.log(0.6 - slack),
            beta * (0.8 - 0.1 + s) - math.log(1.0 - slack),
        ]
        expected = min(candidates) + log_moment + math.log(2.0 / delta)
        got = distribution_dependent_rhs(space, profile, 0.1, beta, n, delta, p, log_moment)
        assert got == pytest.approx(expected, abs=1e-12)
        # the admissible shift starts at (min level - own + s): the bound pays
        # roughly beta times that offset
        assert got >= beta * (0.5 - 0.1)

    def test_vacuous_sentinel(self):
        # at n = 1 with tiny delta the slack exceeds the whole prior mass
        space = table_space([[0.0]], [1.0])
        profile = LossProfile([0.0], [0.5])
        got = distribution_dependent_rhs(space, profile, 0.0, 1.0, 1, 1e-40, 1, 0.0)
        assert got == math.inf


class TestBoundReport:
    def test_csv_row_shape(self):
        report = BoundReport(5, 10.0, 50, 0.05, 0.5, 1.5, 0.25, False)
        assert BOUND_REPORT_HEADER == "trial_seed,beta,n,delta,lambda,rhs,realized,violated"
        assert report.csv_row() == "5,10.0,50,0.05,0.5,1.5,0.25,false"

    def test_violated_row(self):
        report = BoundReport(7, 2.0, 64, 0.1, 0.0, 0.2, 0.3, True)
        assert report.csv_row().endswith(",true")

    def test_inconsistent_flag_rejected(self):
        with pytest.raises(ValueError):
            BoundReport(1, 1.0, 50, 0.05, 0.0, 1.0, 0.5, True)
