mod bounds;
mod coeffs;
mod constants;
mod eulerian;
mod expansion;

pub use bounds::{check_lower_bound, check_lower_bound_from, comparison_limit, LowerBoundReport};
pub use coeffs::{asym_coeff, asym_coeffs};
pub use constants::{
    c_of_n, default_depth, epsilon, epsilon_bound_check, epsilon_bound_threshold, epsilon_upper_bound_ln, exact_log_g,
    goebel_constant, goebel_constant_at, goebel_log_constant, goebel_log_constant_at, log_g, log_sum_tail_log2,
    seed_index, somos_constant, somos_sequence, EpsilonBoundRow,
};
pub use eulerian::{eulerian_polynomial, EulerianPolynomial};
pub use expansion::{
    c_of_n_series, check_c_of_n_monotone, convergence_report, correction_polynomial, error_term_residuals,
    expansion_eval, AsymptoticExpansion, ConvergenceReport, ExpansionValue, ResidualRow, ValueRecord,
};
