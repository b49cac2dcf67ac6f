//! Reference cases, error norms, convergence and long-time studies, and the
//! operator property suite.

pub mod cases;
pub mod checks;
pub mod errors;
pub mod longtime;
pub mod study;

pub use cases::{
    case_by_name, constant_case, equilibrium_case, exact_case, relaxation_case, ExactSolution, InitialData,
    TestCase, CASE_NAMES, EXACT_ALPHA,
};
pub use checks::{run_property_suite, CheckItem, CheckReport};
pub use errors::{error_gradient, error_u, norm_primal_dual_gap, ErrorAccumulator};
pub use longtime::{fit_exponential, longtime_study, ExpFit, LongTimeResult, SATURATION};
pub use study::{convergence_study, orders, run_level, ConvergenceRow, ConvergenceTable, StudyConfig, CSV_HEADER};
