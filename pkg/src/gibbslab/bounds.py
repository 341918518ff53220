"""Right-hand sides of the high-probability generalization bounds.

Every evaluator takes an analytic exponential-moment bound from the caller
where one is needed; nothing here estimates moments from samples, since
that would invalidate the probability accounting of the bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import binary_kl_inverse_upper
from .model import FiniteHypothesisSpace, LossProfile, step_cdf

__all__ = [
    "BoundReport",
    "BOUND_REPORT_HEADER",
    "generic_bound_rhs",
    "binary_kl_bound",
    "gap_bound_relaxed",
    "gap_bound_inverted",
    "high_temperature_bound",
    "minimizer_mass_bound",
    "stratified_subgaussian_bound",
    "subexponential_bound",
    "shift_radius",
    "distribution_dependent_rhs",
    "kl_moment_log_bound",
]


def _check_delta(delta: float) -> float:
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return float(delta)


def _check_sample_size(n: int, minimum: int = 1) -> int:
    if n < minimum:
        raise ValueError(f"requires n >= {minimum}, got {n}")
    return int(n)


def _log_confidence(n: int, delta: float) -> float:
    # ln(2 sqrt(n) / delta), stable for huge n
    return math.log(2.0) + 0.5 * math.log(n) - math.log(delta)


def kl_moment_log_bound(n: int) -> float:
    """ln(2 sqrt(n)): the moment bound for n * binary_kl of a [0,1] mean, n >= 8."""
    _check_sample_size(n, 8)
    return math.log(2.0) + 0.5 * math.log(n)


def generic_bound_rhs(complexity: float, log_moment: float, delta: float) -> float:
    """complexity + log_moment + ln(1/delta), the generic bound shape."""
    _check_delta(delta)
    return complexity + log_moment - math.log(delta)


def binary_kl_bound(complexity: float, n: int, delta: float) -> float:
    """(complexity + ln(2 sqrt(n)/delta)) / n, for losses in [0,1] and n >= 8.

    Bounds the Bernoulli relative entropy between empirical and true loss
    of a posterior draw; the caller asserts the loss range.
    """
    _check_delta(delta)
    _check_sample_size(n, 8)
    return (complexity + _log_confidence(n, delta)) / n


def gap_bound_relaxed(empirical: float, complexity: float, n: int, delta: float) -> float:
    """sqrt(2*empirical*B) + 2*B with B = binary_kl_bound(...); closed form, unclamped."""
    if not 0.0 <= empirical <= 1.0:
        raise ValueError(f"empirical loss must lie in [0, 1], got {empirical}")
    budget = binary_kl_bound(complexity, n, delta)
    return math.sqrt(2.0 * empirical * budget) + 2.0 * budget


def gap_bound_inverted(empirical: float, complexity: float, n: int, delta: float) -> float:
    """Tighter gap bound via the exact numeric inverse of the relative entropy."""
    if not 0.0 <= empirical <= 1.0:
        raise ValueError(f"empirical loss must lie in [0, 1], got {empirical}")
    if empirical == 1.0:
        return 0.0  # the true loss cannot exceed 1
    budget = binary_kl_bound(complexity, n, delta)
    return binary_kl_inverse_upper(empirical, budget) - empirical


def high_temperature_bound(beta: float, n: int, delta: float) -> float:
    """(beta + ln(2 sqrt(n)/delta)) / n: the data-independent worst case.

    Dominates binary_kl_bound whenever the complexity is at most beta,
    which always holds for losses in [0, 1].
    """
    if beta < 0.0:
        raise ValueError("beta must be non-negative")
    _check_delta(delta)
    _check_sample_size(n, 8)
    return (beta + _log_confidence(n, delta)) / n


def minimizer_mass_bound(prior_mass_min: float) -> float:
    """ln(1/prior mass of the empirical-minimizer set).

    Caps the complexity at every inverse temperature, and is its exact
    limit as the temperature goes to zero.  Zero mass is rejected so the
    caller can skip the (vacuous) bound instead of comparing against inf.
    """
    if not 0.0 < prior_mass_min <= 1.0:
        raise ValueError(f"minimizer mass must lie in (0, 1], got {prior_mass_min}")
    return -math.log(prior_mass_min)


def stratified_subgaussian_bound(complexity: float, sigma: float, n: int, delta: float) -> float:
    """Two-sided gap bound for sigma-sub-Gaussian losses.

    2*sigma*sqrt((max(complexity,1) + ln(2*max(complexity,1)/delta)/2) / n).
    The clamp inside the logarithm guards the values in (-inf, 1) where the
    raw expression would be undefined (negative complexities do occur).
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    _check_delta(delta)
    _check_sample_size(n, 1)
    clamped = max(complexity, 1.0)
    return 2.0 * sigma * math.sqrt((clamped + math.log(2.0 * clamped / delta) / 2.0) / n)


def subexponential_bound(
    complexity: float,
    psi1_sup: float,
    n: int,
    delta: float,
    c1: float = 1.0,
    c2: float = 1.0,
) -> float:
    """(complexity + c1*psi1_sup + ln(1/delta)) / sqrt(n) for sub-exponential losses.

    psi1_sup is the supremum of the sub-exponential norms over hypotheses.
    The absolute constants c1, c2 are existence-only in the underlying
    statement, so they are explicit parameters defaulting to 1; the
    precondition sqrt(n) >= c2 * psi1_sup is enforced.
    """
    if psi1_sup <= 0.0 or c1 <= 0.0 or c2 <= 0.0:
        raise ValueError("psi1_sup, c1 and c2 must be positive")
    _check_delta(delta)
    root_n = math.sqrt(_check_sample_size(n, 1))
    if root_n < c2 * psi1_sup:
        raise ValueError(f"precondition sqrt(n) >= c2 * psi1_sup violated: {root_n} < {c2 * psi1_sup}")
    return (complexity + c1 * psi1_sup - math.log(delta)) / root_n


def shift_radius(n: int, delta: float, p: int) -> float:
    """sqrt(ln((1 + n**(2p+1)) / delta) / (2n)).

    The horizontal slack at which the empirical loss CDF tracks the true
    one with probability 1 - delta, while the vertical slack shrinks by an
    extra factor n**-p.  Evaluated as (2p+1)ln(n) + ln1p(n**-(2p+1)) so
    n**(2p+1) may exceed the float range.
    """
    _check_sample_size(n, 1)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if p < 1:
        raise ValueError("p must be a positive integer")
    k = 2 * p + 1
    log_numerator = k * math.log(n) + math.log1p(float(n) ** -k)
    return math.sqrt((log_numerator - math.log(delta)) / (2.0 * n))


def distribution_dependent_rhs(
    space: FiniteHypothesisSpace,
    profile: LossProfile,
    h_empirical: float,
    beta: float,
    n: int,
    delta: float,
    p: int,
    log_moment: float,
) -> float:
    """Bound RHS phrased in the population loss CDF instead of the empirical one.

    Minimizes beta*r + ln 1/(true_cdf(own + r - s) - n**-p * s) over the
    admissible shifts, then adds log_moment + ln(2/delta).  The candidate
    shifts sit at the jump points of the true-loss CDF (the objective is
    piecewise linear increasing between them).  Returns +inf when no shift
    leaves the corrected mass positive, recording vacuity as data rather
    than raising.
    """
    if beta < 0.0:
        raise ValueError("beta must be non-negative")
    _check_delta(delta)
    s = shift_radius(n, delta, p)
    slack = s * float(n) ** -p
    cdf = step_cdf(profile.true, space.prior)
    corrected = cdf.cumulative - slack
    admissible = corrected > 0.0
    if not admissible.any():
        return math.inf
    shifts = cdf.levels[admissible] - h_empirical + s
    objective = beta * shifts - np.log(corrected[admissible])
    return float(objective.min()) + log_moment + math.log(2.0 / delta)


BOUND_REPORT_HEADER = "trial_seed,beta,n,delta,lambda,rhs,realized,violated"


@dataclass(frozen=True)
class BoundReport:
    """One Monte Carlo trial of a bound: complexity, RHS, realized value, flag."""

    trial_seed: int
    beta: float
    n: int
    delta: float
    complexity: float
    rhs: float
    realized: float
    violated: bool

    def __post_init__(self):
        if self.violated != (self.realized > self.rhs):
            raise ValueError("violated flag inconsistent with realized > rhs")

    def csv_row(self) -> str:
        """Fixed-order row under BOUND_REPORT_HEADER; shortest round-trip floats."""
        return ",".join(
            (
                str(self.trial_seed),
                repr(float(self.beta)),
                str(self.n),
                repr(float(self.delta)),
                repr(float(self.complexity)),
                repr(float(self.rhs)),
                repr(float(self.realized)),
                "true" if self.violated else "false",
            )
        )
