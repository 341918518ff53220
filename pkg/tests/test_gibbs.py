import math

import numpy as np
import pytest

from gibbslab.bounds import minimizer_mass_bound
from gibbslab.gibbs import (
    complexity,
    complexity_bruteforce,
    ipm_l1,
    log_partition,
    metropolis_occupancy,
    metropolis_sample,
    posterior,
    sample_hypotheses,
    sample_hypothesis,
    zero_temperature_posterior,
)
from gibbslab.model import (
    loss_profile,
    minimizer_summary,
    random_loss_table,
    sample_dataset,
    step_cdf,
    table_space,
)


@pytest.fixture
def two_level():
    """Fair two-hypothesis space with empirical losses pinned at 0 and 1."""
    space = table_space([[0.0], [1.0]], [0.5, 0.5])
    return space, np.array([0.0, 1.0])


def random_instance(rng, max_h=16, max_x=8, max_n=32):
    domain, space = random_loss_table(
        int(rng.integers(2, max_h + 1)), int(rng.integers(2, max_x + 1)), int(rng.integers(0, 2**32))
    )
    data = sample_dataset(domain, int(rng.integers(1, max_n + 1)), int(rng.integers(0, 2**32)))
    return space, loss_profile(space, domain, data)


class TestLogPartition:
    def test_zero_temperature_is_exact_zero(self, two_level):
        space, losses = two_level
        assert log_partition(space, losses, 0.0) == 0.0

    def test_two_level_value(self, two_level):
        space, losses = two_level
        expected = math.log(0.5 + 0.5 * math.exp(-1.0))
        assert log_partition(space, losses, 1.0) == pytest.approx(expected, abs=1e-12)

    def test_constant_losses(self):
        space = table_space([[0.4], [0.4], [0.4]], [0.2, 0.3, 0.5])
        assert log_partition(space, np.full(3, 0.4), 7.0) == pytest.approx(-2.8, abs=1e-12)

    def test_misaligned_losses_rejected(self, two_level):
        space, _ = two_level
        with pytest.raises(ValueError):
            log_partition(space, np.zeros(3), 1.0)

    def test_negative_beta_rejected(self, two_level):
        space, losses = two_level
        with pytest.raises(ValueError):
            log_partition(space, losses, -0.5)


class TestPosterior:
    def test_zero_temperature_returns_prior(self, two_level):
        space, losses = two_level
        assert np.array_equal(posterior(space, losses, 0.0).weights, space.prior)

    def test_logistic_weights(self, two_level):
        space, losses = two_level
        w = posterior(space, losses, 1.0).weights
        assert w[0] == pytest.approx(1.0 / (1.0 + math.exp(-1.0)), abs=1e-12)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)

    def test_large_beta_concentrates_on_minimizer(self, two_level):
        space, losses = two_level
        w = posterior(space, losses, 1e6).weights
        assert w[0] >= 1.0 - 1e-9

    def test_extreme_beta_no_overflow(self):
        space = table_space([[0.0], [0.5], [1.0]], [1 / 3] * 3)
        w = posterior(space, np.array([0.0, 0.5, 1.0]), 1e9).weights
        assert np.all(np.isfinite(w)) and w[0] == pytest.approx(1.0, abs=1e-12)

    def test_loss_shift_invariance(self):
        rng = np.random.Generator(np.random.PCG64(17))
        for _ in range(20):
            space, profile = random_instance(rng)
            beta = float(10.0 ** rng.uniform(-1, 2))
            base = posterior(space, profile.empirical, beta).weights
            shifted = posterior(space, profile.empirical + 5.3, beta).weights
            assert np.max(np.abs(base - shifted)) <= 1e-10

    def test_zero_temperature_posterior_limits(self):
        space = table_space([[0.2], [0.2], [0.9]], [0.25, 0.25, 0.5])
        post = zero_temperature_posterior(space, np.array([0.2, 0.2, 0.9]))
        assert np.allclose(post.weights, [0.5, 0.5, 0.0])
        assert post.log_partition == -math.inf  # minimum loss is positive
        post0 = zero_temperature_posterior(space, np.array([0.0, 0.2, 0.9]))
        assert post0.log_partition == pytest.approx(math.log(0.25), abs=1e-12)


class TestSampling:
    def test_point_mass(self):
        space = table_space([[0.0], [1.0]], [0.5, 0.5])
        post = posterior(space, np.array([0.0, 1.0]), 1e9)
        assert all(sample_hypothesis(post, seed) == 0 for seed in range(20))

    def test_frequencies_match_weights(self, two_level):
        space, losses = two_level
        post = posterior(space, losses, 1.0)
        draws = sample_hypotheses(post, 100_000, seed=4)
        freq = float(np.mean(draws == 0))
        # binomial 4-sigma band around 0.731
        assert abs(freq - post.weights[0]) < 0.006

    def test_deterministic_per_seed(self, two_level):
        space, losses = two_level
        post = posterior(space, losses, 1.0)
        a = sample_hypotheses(post, 100, seed=11)
        b = sample_hypotheses(post, 100, seed=11)
        assert np.array_equal(a, b)

    def test_zero_weight_never_sampled(self):
        space = table_space([[0.0], [1.0], [0.5]], [0.5, 0.5, 0.0])
        post = posterior(space, np.array([0.0, 1.0, 0.5]), 0.3)
        draws = sample_hypotheses(post, 10_000, seed=2)
        assert not np.any(draws == 2)


class TestComplexity:
    def test_two_level_closed_forms(self, two_level):
        # candidates enumerated by hand: h0 sees {0: ln 2, 1: beta}, h1 {-1: ln2 - 1, 0: 0}
        space, losses = two_level
        low = complexity(space, losses, 0, 1.0)
        assert low.value == pytest.approx(math.log(2.0), abs=1e-12)
        assert low.argmin_shift == 0.0
        high = complexity(space, losses, 1, 1.0)
        assert high.value == pytest.approx(math.log(2.0) - 1.0, abs=1e-12)
        assert high.argmin_shift == -1.0

    def test_single_hypothesis_is_zero(self):
        space = table_space([[0.6]], [1.0])
        for beta in (0.0, 1.0, 1e6):
            assert complexity(space, np.array([0.6]), 0, beta).value == pytest.approx(0.0, abs=1e-12)

    def test_beta_zero_collapses(self, two_level):
        space, losses = two_level
        assert complexity(space, losses, 1, 0.0).value == pytest.approx(0.0, abs=1e-12)

    def test_bounded_by_beta(self):
        rng = np.random.Generator(np.random.PCG64(23))
        for _ in range(50):
            space, profile = random_instance(rng)
            beta = float(10.0 ** rng.uniform(-1, 3))
            h = int(rng.integers(0, len(space)))
            assert complexity(space, profile.empirical, h, beta).value <= beta + 1e-12

    def test_bounded_by_minimizer_mass(self):
        rng = np.random.Generator(np.random.PCG64(29))
        for _ in range(50):
            space, profile = random_instance(rng)
            cap = minimizer_mass_bound(minimizer_summary(space, profile).prior_mass_empirical_min)
            beta = float(10.0 ** rng.uniform(-1, 3))
            h = int(rng.integers(0, len(space)))
            assert complexity(space, profile.empirical, h, beta).value <= cap + 1e-12

    def test_non_increasing_in_own_loss(self):
        rng = np.random.Generator(np.random.PCG64(31))
        for _ in range(20):
            space, profile = random_instance(rng)
            beta = float(10.0 ** rng.uniform(-1, 2))
            values = [
                (profile.empirical[h], complexity(space, profile.empirical, h, beta).value)
                for h in range(len(space))
            ]
            values.sort()
            for (la, va), (lb, vb) in zip(values, values[1:]):
                if lb > la + 1e-12:
                    assert vb <= va + 1e-12

    def test_partition_lower_bound_at_jumps(self):
        # ln Z >= -beta*(own + r) + ln cdf(own + r) at every jump point
        rng = np.random.Generator(np.random.PCG64(37))
        for _ in range(20):
            space, profile = random_instance(rng)
            beta = float(10.0 ** rng.uniform(-1, 2))
            log_z = log_partition(space, profile.empirical, beta)
            cdf = step_cdf(profile.empirical, space.prior)
            for level, mass in zip(cdf.levels, cdf.cumulative):
                assert log_z >= -beta * level + math.log(mass) - 1e-10

    def test_zero_temperature_attainment(self):
        # constructed levels 0 and 0.5: exact attainment from beta = cap/gap on
        space = table_space([[0.0], [0.5], [0.5]], [0.25, 0.5, 0.25])
        losses = np.array([0.0, 0.5, 0.5])
        cap = math.log(1.0 / 0.25)
        threshold = cap / 0.5
        for beta in (threshold, threshold + 1.0, 1e5):
            assert complexity(space, losses, 0, beta).value == pytest.approx(cap, abs=1e-12)
        # strictly below threshold the other level wins
        assert complexity(space, losses, 0, threshold - 0.1).value < cap

    def test_bruteforce_dominates_and_stays_close(self):
        rng = np.random.Generator(np.random.PCG64(41))
        step = 1e-3
        for _ in range(20):
            space, profile = random_instance(rng, max_h=8)
            beta = float(10.0 ** rng.uniform(-1, 2))
            h = int(rng.integers(0, len(space)))
            exact = complexity(space, profile.empirical, h, beta).value
            grid = complexity_bruteforce(space, profile.empirical, h, beta, step)
            assert exact - 1e-10 <= grid <= exact + beta * step + 1e-10

    def test_infinite_beta_rejected(self, two_level):
        space, losses = two_level
        with pytest.raises(ValueError):
            complexity(space, losses, 0, math.inf)

    def test_bad_index_rejected(self, two_level):
        space, losses = two_level
        with pytest.raises(IndexError):
            complexity(space, losses, 2, 1.0)


class TestMetropolis:
    def test_zero_temperature_matches_prior(self, two_level):
        space, losses = two_level
        occupancy = metropolis_occupancy(space, losses, 0.0, 50_000, seed=3, burn_in=100)
        assert np.max(np.abs(occupancy - space.prior)) < 0.01

    def test_occupancy_converges_to_posterior(self, two_level):
        space, losses = two_level
        occupancy = metropolis_occupancy(space, losses, 1.0, 100_000, seed=7, burn_in=1000)
        exact = posterior(space, losses, 1.0).weights
        assert np.max(np.abs(occupancy - exact)) < 0.01

    def test_ipm_decreases_with_chain_length(self, two_level):
        space, losses = two_level
        exact = posterior(space, losses, 1.0).weights
        medians = []
        for length in (500, 5000, 50_000):
            distances = [
                ipm_l1(
                    metropolis_occupancy(space, losses, 1.0, length, seed=s, burn_in=length // 10),
                    exact,
                )
                for s in range(20)
            ]
            medians.append(float(np.median(distances)))
        assert medians[0] > medians[1] > medians[2]

    def test_deterministic(self, two_level):
        space, losses = two_level
        a = metropolis_sample(space, losses, 2.0, 500, seed=19)
        b = metropolis_sample(space, losses, 2.0, 500, seed=19)
        assert a == b


class TestIpmL1:
    def test_identical_distributions(self):
        assert ipm_l1([0.5, 0.5], [0.5, 0.5]) == 0.0

    def test_disjoint_supports(self):
        assert ipm_l1([1.0, 0.0], [0.0, 1.0]) == 2.0

    def test_two_level_distance(self):
        w = 1.0 / (1.0 + math.exp(-1.0))
        assert ipm_l1([w, 1.0 - w], [0.5, 0.5]) == pytest.approx(2 * (w - 0.5), abs=1e-12)

    def test_rejects_non_distributions(self):
        with pytest.raises(ValueError):
            ipm_l1([0.7, 0.7], [0.5, 0.5])
        with pytest.raises(ValueError):
            ipm_l1([1.0], [0.5, 0.5])
