"""gibbslab: exact generalization-bound quantities for the Gibbs algorithm
on finite hypothesis spaces, with seeded Monte Carlo verification harnesses.
"""

from .bounds import (
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
from .gibbs import (
    ComplexityValue,
    GibbsPosterior,
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
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    ViolationSummary,
    run_concentration_experiment,
    run_experiment,
    run_phase_diagram,
    run_random_label_experiment,
    run_violation_experiment,
    run_zero_temp_sweep,
    wilson_upper_99,
)
from .margins import (
    LabeledPoint,
    LinearHypothesis,
    MarginResult,
    build_linear_grid,
    hinge_loss,
    labeled_domain,
    level_set_equality_check,
    margin_value,
    max_margin,
    read_labeled_csv,
    score,
    write_labeled_csv,
    zero_one_loss,
)
from .measures import (
    binary_kl,
    binary_kl_inverse_relaxed,
    binary_kl_inverse_upper,
    log_sum_exp,
)
from .model import (
    DataSet,
    FiniteDataDomain,
    FiniteHypothesisSpace,
    LossProfile,
    MinimizerSummary,
    build_space,
    empirical_cdf,
    empirical_loss,
    k_minimizer_space,
    load_space,
    loss_matrix,
    loss_profile,
    minimizer_summary,
    permuted_label_task,
    random_loss_table,
    sample_dataset,
    save_space,
    space_from_document,
    space_to_document,
    table_space,
    true_cdf,
    true_loss,
)
from .monotone import (
    DensityConditionError,
    DensityFamily,
    MonotoneDensityPosterior,
    capped_exponential_density,
    density_family,
    exponential_density,
    ipm_corrected_rhs,
    monotone_bound_rhs,
    normalize_density,
    polynomial_density,
)

__version__ = "0.1.0"
