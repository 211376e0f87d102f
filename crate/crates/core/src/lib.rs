//! Collocation solvers for differential-equation boundary-value problems.
//!
//! Three methods share the numerical kernels in this crate:
//!
//! * **Functional interpolation** ([`tfc`]): a constrained expression
//!   satisfies the initial/boundary data identically for any embedded free
//!   function; a Chebyshev expansion of the free function turns the
//!   equation into an unconstrained least-squares (or Newton) problem.
//! * **Kernel collocation** ([`svm`]): a least-squares support vector
//!   machine whose equality constraints collocate the equation; the KKT
//!   stationarity system is solved in dual form through the RBF kernel.
//! * **Constrained kernel collocation** ([`csvm`]): the kernel model used
//!   as the free function of a constrained expression, so constraints hold
//!   exactly while residuals stay regularized.
//!
//! [`problems`] provides four benchmark problems with exact solutions, and
//! each solver returns an [`report::ErrorReport`] comparing against them.

pub mod chebyshev;
pub mod csvm;
pub mod error;
pub mod grid;
pub mod heun;
pub mod kernel;
pub mod linalg;
pub mod metrics;
pub mod newton;
pub mod problems;
pub mod report;
pub mod simplex;
pub mod special;
pub mod svm;
pub mod tfc;

pub use error::{Error, Result};
pub use grid::{make_collocation_grid, CollocationGrid};
pub use kernel::KernelConfig;
pub use metrics::{error_metrics, ErrorMetrics};
pub use problems::{analytic_solution, problem_by_id, problem_catalog, BenchmarkProblem, Point, ProblemId};
pub use report::{ErrorReport, Hyperparameters, Method};
