"""Scalar information-theoretic primitives.

Bernoulli relative entropy, its numeric and closed-form inverses, and a
max-shifted log-sum-exp.  Everything here is a pure function of scalars or
small vectors and safe to call from parallel trials.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "binary_kl",
    "binary_kl_inverse_upper",
    "binary_kl_inverse_relaxed",
    "log_sum_exp",
]

# binary_kl(p, .) diverges at 1, so inversion saturates just below it.
SATURATION = 1.0 - 1e-15


def binary_kl(p: float, q: float) -> float:
    """Relative entropy of Bernoulli(p) with respect to Bernoulli(q), in nats.

    Uses the convention 0*ln(0) = 0, so p = 0 and p = 1 are valid.  The
    result is non-negative and zero exactly when p = q.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in the open interval (0, 1), got {q}")
    value = 0.0
    if p > 0.0:
        value += p * math.log(p / q)
    if p < 1.0:
        value += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    # rounding can produce ~-1e-17 at p == q; the divergence is non-negative
    return max(value, 0.0)


def binary_kl_inverse_upper(p: float, budget: float) -> float:
    """Largest q in [p, 1) with binary_kl(p, q) <= budget.

    Bisection on the monotone map q -> binary_kl(p, q).  The bracket is
    narrowed well past the 1e-12 contract (to float resolution), so for any
    attainable budget the returned q solves binary_kl(p, q) = budget to
    ~1e-10 or better.  Budgets beyond binary_kl(p, SATURATION) return the
    saturation point: the divergence blows up at q -> 1 and the bound is
    vacuous there.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    if budget < 0.0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    if budget == 0.0:
        return p
    hi = SATURATION
    if binary_kl(p, hi) <= budget:
        return hi
    lo = p
    # invariant: binary_kl(p, lo) <= budget < binary_kl(p, hi); lo = p is
    # never evaluated (divergence there is 0 by definition)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if binary_kl(p, mid) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


def binary_kl_inverse_relaxed(p: float, budget: float) -> float:
    """Closed-form upper bound p + sqrt(2*p*budget) + 2*budget on the exact inverse.

    Not clamped to 1; callers that need a probability clamp themselves.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if budget < 0.0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    return p + math.sqrt(2.0 * p * budget) + 2.0 * budget


def log_sum_exp(log_weights, values) -> float:
    """ln sum_i exp(log_weights[i] + values[i]) computed with a max shift.

    log_weights may contain -inf (zero-weight atoms drop out).  Accurate to
    a few ulp of the shifted sum; invariant under adding a constant to all
    values and subtracting it from the result.
    """
    log_weights = np.asarray(log_weights, dtype=float)
    values = np.asarray(values, dtype=float)
    if log_weights.ndim != 1 or log_weights.shape != values.shape:
        raise ValueError("log_weights and values must be 1-d vectors of equal length")
    if log_weights.size == 0:
        raise ValueError("log_sum_exp of an empty vector")
    total = log_weights + values
    peak = float(np.max(total))
    if not math.isfinite(peak):
        # all terms -inf (sum is 0), or a +inf/nan term dominates
        return peak
    return peak + math.log(float(np.sum(np.exp(total - peak))))
