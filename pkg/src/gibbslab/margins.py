"""Binary linear classification: scores, losses, soft margins, hypothesis grids.

The soft margin of a hypothesis at error fraction r is the best worst-case
score achievable after discarding at most an r-fraction of the points.  Its
positivity characterizes the empirical-loss level set exactly, which ties
the loss CDF machinery to classical margin geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import FiniteDataDomain, FiniteHypothesisSpace

__all__ = [
    "LabeledPoint",
    "LinearHypothesis",
    "MarginResult",
    "score",
    "zero_one_loss",
    "hinge_loss",
    "margin_value",
    "max_margin",
    "level_set_equality_check",
    "build_linear_grid",
    "labeled_domain",
    "write_labeled_csv",
    "read_labeled_csv",
]

UNIT_NORM_TOL = 1e-10
# fractional point counts within this of an integer are that integer
COUNT_TOL = 1e-9


@dataclass(frozen=True)
class LabeledPoint:
    """An input vector with a binary label in {-1, +1}."""

    z: tuple
    y: int

    def __post_init__(self):
        z = tuple(float(v) for v in self.z)
        if not all(math.isfinite(v) for v in z):
            raise ValueError("coordinates must be finite")
        if self.y not in (-1, 1):
            raise ValueError(f"label must be -1 or +1, got {self.y}")
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class LinearHypothesis:
    """Oriented hyperplane: unit direction and scalar offset."""

    direction: tuple
    bias: float

    def __post_init__(self):
        u = tuple(float(v) for v in self.direction)
        norm = math.sqrt(sum(v * v for v in u))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"direction must be a unit vector, norm {norm!r}")
        object.__setattr__(self, "direction", u)
        object.__setattr__(self, "bias", float(self.bias))


def score(h: LinearHypothesis, z: Sequence[float]) -> float:
    """Signed distance surrogate <direction, z> - bias."""
    if len(z) != len(h.direction):
        raise ValueError(f"dimension mismatch: point has {len(z)}, hypothesis {len(h.direction)}")
    return float(sum(u * v for u, v in zip(h.direction, z))) - h.bias


def zero_one_loss(h: LinearHypothesis, point: LabeledPoint) -> float:
    """0 when score * label is strictly positive, 1 otherwise (ties are errors)."""
    return 0.0 if score(h, point.z) * point.y > 0.0 else 1.0


def hinge_loss(h: LinearHypothesis, point: LabeledPoint, margin_scale: float) -> float:
    """max(0, 1 - score*label/margin_scale); zero from margin_scale upward."""
    if margin_scale <= 0.0:
        raise ValueError("margin_scale must be positive")
    return max(0.0, 1.0 - score(h, point.z) * point.y / margin_scale)


@dataclass(frozen=True)
class MarginResult:
    """Soft margin value with the retained index set that attains it."""

    error_fraction: float
    value: float
    selected: tuple


def _retained_count(n: int, error_fraction: float) -> int:
    if not 0.0 <= error_fraction <= 1.0:
        raise ValueError(f"error fraction must lie in [0, 1], got {error_fraction}")
    allowed = min(math.floor(error_fraction * n + COUNT_TOL), n)
    # at error fraction 1 the raw count is 0; keep one point so the
    # min over the retained set stays defined
    return max(n - allowed, 1)


def margin_value(
    h: LinearHypothesis, data: Sequence[LabeledPoint], error_fraction: float
) -> MarginResult:
    """Best min of score*label over index sets keeping at least a (1-r) fraction.

    Keeping the k largest values maximizes the min over all sets of size at
    least k (any other set swaps in a smaller value), so the optimum is the
    k-th largest value with k = ceil((1-r) n).  Ties go to earlier indices.
    """
    if len(data) == 0:
        raise ValueError("margin of an empty dataset")
    values = np.asarray([score(h, point.z) * point.y for point in data])
    keep = _retained_count(values.size, error_fraction)
    order = np.argsort(-values, kind="stable")[:keep]
    return MarginResult(
        float(error_fraction),
        float(values[order[-1]]),
        tuple(sorted(int(i) for i in order)),
    )


def max_margin(
    grid: FiniteHypothesisSpace, data: Sequence[LabeledPoint], error_fraction: float
) -> float:
    """Largest soft margin over the hypothesis grid (grid proxy for the supremum)."""
    if len(grid) == 0:
        raise ValueError("empty hypothesis grid")
    return max(margin_value(h, data, error_fraction).value for h in grid.hypotheses)


def level_set_equality_check(
    grid: FiniteHypothesisSpace, data: Sequence[LabeledPoint], error_fraction: float
) -> bool:
    """Exact set equality of the loss level set and the positive-margin level set.

    For every grid hypothesis, compares "at most floor(r n) errors under
    the 0-1 loss" with "margin positive and at most the grid maximum".  The
    error budget follows the same retained-count convention as
    margin_value, so the comparison is meaningful at error fraction 1 too.
    """
    n = len(data)
    if n == 0:
        raise ValueError("empty dataset")
    allowed = n - _retained_count(n, error_fraction)
    best = max_margin(grid, data, error_fraction)
    for h in grid.hypotheses:
        errors = sum(int(zero_one_loss(h, point)) for point in data)
        in_level_set = errors <= allowed
        value = margin_value(h, data, error_fraction).value
        in_margin_set = 0.0 < value <= best
        if in_level_set != in_margin_set:
            return False
    return True


def _circle_directions(steps: int) -> list[tuple]:
    angles = 2.0 * math.pi * np.arange(steps) / steps
    return [(math.cos(a), math.sin(a)) for a in angles]


def _fibonacci_sphere(steps: int) -> list[tuple]:
    golden = math.pi * (3.0 - math.sqrt(5.0))
    out = []
    for i in range(steps):
        y = 1.0 - 2.0 * (i + 0.5) / steps
        radius = math.sqrt(max(1.0 - y * y, 0.0))
        theta = golden * i
        v = np.asarray((radius * math.cos(theta), y, radius * math.sin(theta)))
        v = v / np.linalg.norm(v)
        out.append(tuple(v))
    return out


def build_linear_grid(
    dim: int,
    angular_steps: int,
    bias_steps: int,
    bias_range: float,
    prior_kind: str = "uniform",
    bias_sigma: float = 1.0,
    loss_kind: str = "zero_one",
    hinge_margin: float = 1.0,
) -> FiniteHypothesisSpace:
    """Product grid of unit directions and biases as a hypothesis space.

    Directions are equiangular for dim 2 and a Fibonacci sphere for dim 3.
    The prior is uniform over atoms or proportional to a Gaussian density
    in the bias (an everywhere-positive prior either way, so a fine enough
    grid puts mass on any open margin set).  The grid itself never depends
    on data.
    """
    if dim not in (2, 3):
        raise ValueError(f"only dimensions 2 and 3 are supported, got {dim}")
    if angular_steps < 4:
        raise ValueError("angular_steps must be at least 4")
    if bias_steps < 1 or bias_range < 0.0:
        raise ValueError("bias_steps must be >= 1 and bias_range non-negative")
    directions = _circle_directions(angular_steps) if dim == 2 else _fibonacci_sphere(angular_steps)
    biases = [0.0] if bias_steps == 1 else list(np.linspace(-bias_range, bias_range, bias_steps))
    hypotheses = [LinearHypothesis(u, b) for u in directions for b in biases]

    if prior_kind == "uniform":
        prior = np.full(len(hypotheses), 1.0 / len(hypotheses))
    elif prior_kind == "gaussian-projected":
        if bias_sigma <= 0.0:
            raise ValueError("bias_sigma must be positive")
        raw = np.asarray([math.exp(-h.bias**2 / (2.0 * bias_sigma**2)) for h in hypotheses])
        prior = raw / raw.sum()
    else:
        raise ValueError(f"unknown prior kind {prior_kind!r}")

    if loss_kind == "zero_one":
        loss = zero_one_loss
    elif loss_kind == "hinge":
        loss = lambda h, point: hinge_loss(h, point, hinge_margin)
    else:
        raise ValueError(f"unknown loss kind {loss_kind!r}")
    return FiniteHypothesisSpace(tuple(hypotheses), prior, loss)


def labeled_domain(points: Iterable[LabeledPoint], probs=None) -> FiniteDataDomain:
    """Wrap labeled points as a finite domain, uniform unless probs given."""
    pts = tuple(points)
    if probs is None:
        probs = np.full(len(pts), 1.0 / len(pts))
    return FiniteDataDomain(pts, probs)


def write_labeled_csv(path, points: Iterable[LabeledPoint]) -> None:
    """Columns z_1..z_d,y; floats as shortest round-trip decimals."""
    pts = tuple(points)
    if not pts:
        raise ValueError("nothing to write")
    dim = len(pts[0].z)
    lines = [",".join([f"z_{i + 1}" for i in range(dim)] + ["y"])]
    for point in pts:
        if len(point.z) != dim:
            raise ValueError("points have inconsistent dimensions")
        lines.append(",".join([repr(v) for v in point.z] + [str(point.y)]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_labeled_csv(path) -> tuple[LabeledPoint, ...]:
    with open(path, encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    header = lines[0].split(",")
    if header[-1] != "y" or not all(c == f"z_{i + 1}" for i, c in enumerate(header[:-1])):
        raise ValueError(f"unexpected header {lines[0]!r}")
    dim = len(header) - 1
    out = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != dim + 1:
            raise ValueError(f"row has {len(cells)} cells, expected {dim + 1}")
        out.append(LabeledPoint(tuple(float(c) for c in cells[:-1]), int(cells[-1])))
    return tuple(out)
