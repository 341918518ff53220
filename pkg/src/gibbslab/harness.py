"""Seeded Monte Carlo drivers that verify the high-probability statements.

Every experiment is a pure function of its config (master seed included):
re-running writes byte-identical CSV and JSON outputs.  Per-trial seeds are
derived by a splittable hash of the master seed and the trial coordinates,
so trials share no generator state and their order is immaterial.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import (
    BOUND_REPORT_HEADER,
    BoundReport,
    binary_kl_bound,
    high_temperature_bound,
    minimizer_mass_bound,
    shift_radius,
    stratified_subgaussian_bound,
)
from .gibbs import (
    complexity,
    posterior,
    sample_hypothesis,
    zero_temperature_posterior,
)
from .measures import binary_kl
from .model import (
    build_space,
    loss_matrix,
    loss_profile,
    minimizer_summary,
    sample_dataset,
    step_cdf,
)
from .monotone import density_family, normalize_density

__all__ = [
    "ExperimentConfig",
    "ViolationSummary",
    "ZeroTempRow",
    "ZeroTempResult",
    "PhaseRow",
    "PhaseResult",
    "ConcentrationRow",
    "ConcentrationResult",
    "RandomLabelRow",
    "RandomLabelResult",
    "ExperimentResult",
    "derive_seed_pair",
    "wilson_upper_99",
    "run_violation_experiment",
    "run_zero_temp_sweep",
    "run_phase_diagram",
    "run_concentration_experiment",
    "run_random_label_experiment",
    "run_experiment",
    "EXPERIMENT_NAMES",
]

EXPERIMENT_NAMES = ("violation", "zero_temp", "phase", "concentration", "random_label")
BOUND_KINDS = ("kl", "high_temp", "stratify", "beyond_gibbs")

# one-sided 99% normal quantile for the Wilson upper confidence bound
Z_99 = 2.3263478740408408


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment run; JSON-serializable."""

    experiment: str
    space_spec: dict
    n: int
    beta_grid: tuple
    delta: float
    trials: int
    master_seed: int
    p: int = 1
    output_path: str | None = None
    bound_kind: str = "kl"
    sigma: float = 0.5
    density: dict | None = None
    n_grid: tuple | None = None
    r0: float | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_NAMES:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.p < 1:
            raise ValueError("p must be a positive integer")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")
        beta_grid = tuple(float(b) for b in self.beta_grid)
        if not beta_grid:
            raise ValueError("beta_grid must be nonempty")
        object.__setattr__(self, "beta_grid", beta_grid)
        if self.n_grid is not None:
            object.__setattr__(self, "n_grid", tuple(int(v) for v in self.n_grid))
        if self.bound_kind not in BOUND_KINDS:
            raise ValueError(f"unknown bound kind {self.bound_kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls(**json.loads(text))

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def derive_seed_pair(master_seed: int, *path: int) -> tuple[int, int]:
    """Two independent 64-bit seeds hashed from (master_seed, *path)."""
    state = np.random.SeedSequence([master_seed, *path]).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def wilson_upper_99(violations: int, trials: int) -> float:
    """One-sided 99% Wilson upper confidence bound on a binomial rate."""
    if trials < 1 or not 0 <= violations <= trials:
        raise ValueError("need 0 <= violations <= trials with trials >= 1")
    rate = violations / trials
    z2 = Z_99**2
    center = rate + z2 / (2 * trials)
    half = Z_99 * math.sqrt(rate * (1.0 - rate) / trials + z2 / (4 * trials**2))
    return min((center + half) / (1.0 + z2 / trials), 1.0)


@dataclass(frozen=True)
class ViolationSummary:
    """Aggregate of bound-violation trials with a conservative rate estimate."""

    trials: int
    violations: int
    rate: float
    wilson_upper_99: float
    rows: tuple = ()


def _summarize(flags, rows=()) -> ViolationSummary:
    trials = len(flags)
    violations = int(sum(flags))
    return ViolationSummary(
        trials, violations, violations / trials, wilson_upper_99(violations, trials), tuple(rows)
    )


def _realized_binary_kl(p: float, q: float) -> float:
    # degenerate true losses: the divergence limit is 0 on the diagonal,
    # +inf off it (off-diagonal has probability zero under the data law)
    if 0.0 < q < 1.0:
        return binary_kl(min(max(p, 0.0), 1.0), q)
    return 0.0 if p == q else math.inf


def _prepared_space(config: ExperimentConfig):
    domain, space = build_space(config.space_spec)
    matrix = loss_matrix(space, domain)
    return domain, space, matrix


def run_violation_experiment(config: ExperimentConfig, bound_kind: str | None = None) -> ViolationSummary:
    """Draw (dataset, hypothesis) pairs and test the realized statistic per trial.

    For each inverse temperature in the grid and each trial: sample a
    dataset, form the posterior, draw one hypothesis, evaluate the bound
    RHS and the realized statistic, and flag a violation when the realized
    value exceeds the RHS.  The fraction of flagged trials estimates the
    violation probability, which the bounds promise is at most delta.
    """
    kind = bound_kind if bound_kind is not None else config.bound_kind
    if kind not in BOUND_KINDS:
        raise ValueError(f"unknown bound kind {kind!r}")
    domain, space, matrix = _prepared_space(config)
    if kind in ("kl", "high_temp", "beyond_gibbs") and float(matrix.max()) > 1.0 + 1e-12:
        raise ValueError(f"bound kind {kind!r} assumes losses in [0, 1]; generator exceeds 1")
    true_losses = matrix @ domain.probs
    configured_family = None
    if kind == "beyond_gibbs" and config.density is not None:
        configured_family = density_family(
            config.density["name"], **config.density.get("params", {})
        )

    n, delta = config.n, config.delta
    rows = []
    for beta_index, beta in enumerate(config.beta_grid):
        if kind == "beyond_gibbs":
            # without an explicit density the run degenerates to Gibbs at beta
            family = configured_family or density_family("exponential", beta=beta)
        for trial in range(config.trials):
            data_seed, draw_seed = derive_seed_pair(config.master_seed, beta_index, trial)
            data = sample_dataset(domain, n, data_seed)
            counts = np.bincount(data.item_indices, minlength=len(domain))
            empirical = matrix @ counts / n
            if kind == "beyond_gibbs":
                post = normalize_density(space, empirical, family, family.gamma)
                rate = family.gamma
            else:
                post = posterior(space, empirical, beta)
                rate = beta
            h = sample_hypothesis(post, draw_seed)
            lam = complexity(space, empirical, h, rate).value
            if kind == "stratify":
                realized = abs(true_losses[h] - empirical[h])
                rhs = stratified_subgaussian_bound(lam, config.sigma, n, delta)
            else:
                realized = _realized_binary_kl(float(empirical[h]), float(true_losses[h]))
                if kind == "high_temp":
                    rhs = high_temperature_bound(beta, n, delta)
                else:
                    rhs = binary_kl_bound(lam, n, delta)
            rows.append(
                BoundReport(
                    trial_seed=data_seed,
                    beta=rate,
                    n=n,
                    delta=delta,
                    complexity=lam,
                    rhs=rhs,
                    realized=float(realized),
                    violated=bool(realized > rhs),
                )
            )
    return _summarize([r.violated for r in rows], rows)


@dataclass(frozen=True)
class ZeroTempRow:
    beta: float
    lambda_drawn: float
    lambda_min: float
    limit: float


@dataclass(frozen=True)
class ZeroTempResult:
    rows: tuple
    limit: float
    level_gap: float
    passed: bool


def run_zero_temp_sweep(config: ExperimentConfig) -> ZeroTempResult:
    """Track the complexity of posterior draws and of a minimizer across betas.

    The minimizer's complexity is capped by ln(1/minimizer mass) at every
    beta, grows towards it, and attains it exactly once beta reaches
    cap / (smallest spacing of achieved loss levels).
    """
    domain, space, matrix = _prepared_space(config)
    data_seed, _ = derive_seed_pair(config.master_seed, 0)
    data = sample_dataset(domain, config.n, data_seed)
    profile = loss_profile(space, domain, data, matrix=matrix)
    summary = minimizer_summary(space, profile)
    limit = minimizer_mass_bound(summary.prior_mass_empirical_min)
    cdf = step_cdf(profile.empirical, space.prior)
    level_gap = float(np.diff(cdf.levels).min()) if cdf.levels.size > 1 else math.inf

    support = np.flatnonzero(space.prior > 0.0)
    minimizer = int(support[np.argmin(profile.empirical[support])])
    rows = []
    for beta_index, beta in enumerate(config.beta_grid):
        _, draw_seed = derive_seed_pair(config.master_seed, beta_index)
        post = posterior(space, profile.empirical, beta)
        drawn = sample_hypothesis(post, draw_seed)
        rows.append(
            ZeroTempRow(
                beta,
                complexity(space, profile.empirical, drawn, beta).value,
                complexity(space, profile.empirical, minimizer, beta).value,
                limit,
            )
        )

    capped = all(r.lambda_min <= limit + 1e-12 for r in rows)
    ordered = sorted(rows, key=lambda r: r.beta)
    monotone = all(a.lambda_min <= b.lambda_min + 1e-12 for a, b in zip(ordered, ordered[1:]))
    attained = True
    threshold = limit / level_gap if math.isfinite(level_gap) else 0.0
    if ordered and ordered[-1].beta >= threshold:
        attained = abs(ordered[-1].lambda_min - limit) <= 1e-9
    return ZeroTempResult(tuple(rows), limit, level_gap, capped and monotone and attained)


@dataclass(frozen=True)
class PhaseRow:
    beta: float
    diagonal: float
    kl: float
    plateau: float


@dataclass(frozen=True)
class PhaseResult:
    rows: tuple
    passed: bool


def run_phase_diagram(config: ExperimentConfig) -> PhaseResult:
    """Bound values per beta: data-independent diagonal vs data-dependent plateau.

    Columns per beta: the worst-case bound (linear in beta), the
    relative-entropy bound at a drawn empirical minimizer, and the plateau
    level ln(1/minimizer mass)/n.  Rows must satisfy
    kl <= min(diagonal, plateau) + ln(2 sqrt(n)/delta)/n.
    """
    domain, space, matrix = _prepared_space(config)
    data_seed, draw_seed = derive_seed_pair(config.master_seed, 0)
    data = sample_dataset(domain, config.n, data_seed)
    profile = loss_profile(space, domain, data, matrix=matrix)
    summary = minimizer_summary(space, profile)
    plateau = minimizer_mass_bound(summary.prior_mass_empirical_min) / config.n
    h_star = sample_hypothesis(zero_temperature_posterior(space, profile.empirical), draw_seed)

    n, delta = config.n, config.delta
    slack = binary_kl_bound(0.0, n, delta)  # ln(2 sqrt(n)/delta)/n
    rows = []
    for beta in config.beta_grid:
        lam = complexity(space, profile.empirical, h_star, beta).value
        rows.append(
            PhaseRow(beta, high_temperature_bound(beta, n, delta), binary_kl_bound(lam, n, delta), plateau)
        )
    passed = all(r.kl <= min(r.diagonal, r.plateau) + slack + 1e-12 for r in rows)
    return PhaseResult(tuple(rows), passed)


@dataclass(frozen=True)
class ConcentrationRow:
    trial_seed: int
    n: int
    delta: float
    p: int
    shift: float
    violated_part_i: bool
    violated_part_ii: bool


@dataclass(frozen=True)
class ConcentrationResult:
    part_i: ViolationSummary
    part_ii: ViolationSummary
    rows: tuple
    passed: bool


def run_concentration_experiment(config: ExperimentConfig) -> ConcentrationResult:
    """Check that the empirical loss CDF tracks the true one at the shift radius.

    Part (i): empirical_cdf(r + s) >= true_cdf(r) - n**-p * s for all r;
    part (ii) is the mirror image.  Both sides are step functions of r, so
    checking at the jump points of the step side is exhaustive.  Each part
    fails with probability at most delta per dataset.
    """
    domain, space, matrix = _prepared_space(config)
    true_losses = matrix @ domain.probs
    true_steps = step_cdf(true_losses, space.prior)
    n, delta, p = config.n, config.delta, config.p
    s = shift_radius(n, delta, p)
    slack = s * float(n) ** -p

    rows = []
    for trial in range(config.trials):
        data_seed, _ = derive_seed_pair(config.master_seed, trial)
        data = sample_dataset(domain, n, data_seed)
        counts = np.bincount(data.item_indices, minlength=len(domain))
        empirical = matrix @ counts / n
        emp_steps = step_cdf(empirical, space.prior)
        bad_i = bool(
            np.any(emp_steps.at(true_steps.levels + s) < true_steps.cumulative - slack - 1e-12)
        )
        bad_ii = bool(
            np.any(true_steps.at(emp_steps.levels + s) < emp_steps.cumulative - slack - 1e-12)
        )
        rows.append(ConcentrationRow(data_seed, n, delta, p, s, bad_i, bad_ii))

    part_i = _summarize([r.violated_part_i for r in rows])
    part_ii = _summarize([r.violated_part_ii for r in rows])
    passed = part_i.wilson_upper_99 <= delta and part_ii.wilson_upper_99 <= delta
    return ConcentrationResult(part_i, part_ii, tuple(rows), passed)


@dataclass(frozen=True)
class RandomLabelRow:
    n: int
    r0: float
    median_phi_hat: float
    bound: float
    vacuous: bool
    exceed_rate: float


@dataclass(frozen=True)
class RandomLabelResult:
    rows: tuple
    passed: bool


def run_random_label_experiment(config: ExperimentConfig) -> RandomLabelResult:
    """Median prior mass below a fixed loss level, as the sample size grows.

    For noise labels the true-loss CDF vanishes below its minimum, so the
    prior volume of hypotheses with small empirical loss must shrink with
    n: at confidence delta it is at most n**-p * s(n, delta, p) whenever
    r0 + s stays below the true minimum.  Rows where the shift radius
    swallows that gap are flagged vacuous and carry no claim; `passed`
    covers the confidence claim on the non-vacuous rows (medians are
    reported as data).
    """
    if config.space_spec.get("name") != "permuted_label_task":
        raise ValueError("random_label experiment requires the permuted_label_task generator")
    if config.n_grid is None or config.r0 is None:
        raise ValueError("random_label experiment requires n_grid and r0")
    domain, space, matrix = _prepared_space(config)
    true_losses = matrix @ domain.probs
    min_true = float(step_cdf(true_losses, space.prior).levels[0])
    r0, delta, p = float(config.r0), config.delta, config.p

    rows = []
    passed = True
    for n_index, n in enumerate(config.n_grid):
        s = shift_radius(n, delta, p)
        bound = s * float(n) ** -p
        vacuous = r0 + s >= min_true - 1e-12
        phis = []
        for trial in range(config.trials):
            data_seed, _ = derive_seed_pair(config.master_seed, n_index, trial)
            data = sample_dataset(domain, n, data_seed)
            counts = np.bincount(data.item_indices, minlength=len(domain))
            empirical = matrix @ counts / n
            phis.append(float(space.prior[empirical <= r0].sum()))
        exceed = sum(1 for v in phis if v > bound)
        rows.append(
            RandomLabelRow(n, r0, float(np.median(phis)), bound, vacuous, exceed / config.trials)
        )
        if not vacuous:
            passed = passed and wilson_upper_99(exceed, config.trials) <= delta
    return RandomLabelResult(tuple(rows), passed)


# ---------------------------------------------------------------------------
# uniform runner with CSV/JSON reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentResult:
    """What a run leaves behind: verdict, CSV rows, JSON-ready summary."""

    passed: bool
    csv_text: str
    summary: dict


def _csv(header: str, rows) -> str:
    return "\n".join([header, *rows]) + "\n"


def _float(x: float) -> str:
    return repr(float(x))


def _flag(x: bool) -> str:
    return "true" if x else "false"


def _violation_result(config: ExperimentConfig) -> ExperimentResult:
    outcome = run_violation_experiment(config)
    per_beta = []
    for beta_index, beta in enumerate(config.beta_grid):
        chunk = outcome.rows[beta_index * config.trials : (beta_index + 1) * config.trials]
        flags = [r.violated for r in chunk]
        part = _summarize(flags)
        per_beta.append(
            {
                "beta": beta,
                "violations": part.violations,
                "rate": part.rate,
                "wilson_upper_99": part.wilson_upper_99,
            }
        )
    passed = outcome.wilson_upper_99 <= config.delta
    aggregates = {
        "trials": outcome.trials,
        "violations": outcome.violations,
        "rate": outcome.rate,
        "wilson_upper_99": outcome.wilson_upper_99,
        "per_beta": per_beta,
        "bound_kind": config.bound_kind,
    }
    csv_text = _csv(BOUND_REPORT_HEADER, (r.csv_row() for r in outcome.rows))
    return ExperimentResult(passed, csv_text, aggregates)


def _zero_temp_result(config: ExperimentConfig) -> ExperimentResult:
    outcome = run_zero_temp_sweep(config)
    rows = (
        ",".join((_float(r.beta), _float(r.lambda_drawn), _float(r.lambda_min), _float(r.limit)))
        for r in outcome.rows
    )
    aggregates = {"limit": outcome.limit, "level_gap": outcome.level_gap}
    return ExperimentResult(
        outcome.passed, _csv("beta,lambda_drawn,lambda_min,limit", rows), aggregates
    )


def _phase_result(config: ExperimentConfig) -> ExperimentResult:
    outcome = run_phase_diagram(config)
    rows = (
        ",".join((_float(r.beta), _float(r.diagonal), _float(r.kl), _float(r.plateau)))
        for r in outcome.rows
    )
    aggregates = {"plateau": outcome.rows[0].plateau if outcome.rows else None}
    return ExperimentResult(outcome.passed, _csv("beta,diagonal,kl,plateau", rows), aggregates)


def _concentration_result(config: ExperimentConfig) -> ExperimentResult:
    outcome = run_concentration_experiment(config)
    rows = (
        ",".join(
            (
                str(r.trial_seed),
                str(r.n),
                _float(r.delta),
                str(r.p),
                _float(r.shift),
                _flag(r.violated_part_i),
                _flag(r.violated_part_ii),
            )
        )
        for r in outcome.rows
    )
    aggregates = {
        "part_i": dataclasses.asdict(outcome.part_i),
        "part_ii": dataclasses.asdict(outcome.part_ii),
    }
    header = "trial_seed,n,delta,p,shift,violated_part_i,violated_part_ii"
    return ExperimentResult(outcome.passed, _csv(header, rows), aggregates)


def _random_label_result(config: ExperimentConfig) -> ExperimentResult:
    outcome = run_random_label_experiment(config)
    rows = (
        ",".join(
            (
                str(r.n),
                _float(r.r0),
                _float(r.median_phi_hat),
                _float(r.bound),
                _flag(r.vacuous),
                _float(r.exceed_rate),
            )
        )
        for r in outcome.rows
    )
    aggregates = {"rows": [dataclasses.asdict(r) for r in outcome.rows]}
    header = "n,r0,median_phi_hat,bound,vacuous,exceed_rate"
    return ExperimentResult(outcome.passed, _csv(header, rows), aggregates)


_RUNNERS = {
    "violation": _violation_result,
    "zero_temp": _zero_temp_result,
    "phase": _phase_result,
    "concentration": _concentration_result,
    "random_label": _random_label_result,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Dispatch on config.experiment; write CSV + JSON when output_path is set."""
    partial = _RUNNERS[config.experiment](config)
    summary = {"config": config.to_dict(), "aggregates": partial.summary, "passed": partial.passed}
    result = ExperimentResult(partial.passed, partial.csv_text, summary)
    if config.output_path:
        write_result(result, config.output_path)
    return result


def write_result(result: ExperimentResult, output_path) -> None:
    """CSV at output_path, JSON summary alongside with a .json suffix."""
    path = Path(output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(result.csv_text, encoding="utf-8")
    json_path = path.with_suffix(".json")
    json_path.write_text(
        json.dumps(result.summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
