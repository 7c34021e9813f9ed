//! Regularization paths for MCP-, SCAD- and lasso-penalized linear and
//! logistic regression fitted by cyclic coordinate descent.
//!
//! The crate is organized bottom-up:
//!
//! - [`penalties`]: penalty functions and closed-form coordinatewise minimizers
//! - [`design`]: data container, standardization and back-transformation
//! - [`cd_linear`] / [`cd_logistic`]: single-λ solvers
//! - [`path`]: λ grids and warm-started pathwise fitting
//! - [`convexity`]: local convexity diagnostics along a path
//! - [`selection`]: information criteria, cross-validation, γ guidance
//! - [`lla`]: local linear approximation baseline solver
//! - [`simgen`] and [`bench`]: seeded simulation designs and timing harness

pub mod bench;
pub mod cd_linear;
pub mod cd_logistic;
pub mod convexity;
pub mod design;
pub mod error;
pub mod lla;
pub mod path;
pub mod penalties;
pub mod selection;
pub mod simgen;

pub use cd_linear::{fit_linear, FitConfig, FitResult, FitStatus};
pub use cd_logistic::{fit_logistic, ScaleMode};
pub use bench::{time_paths, BenchConfig, TimingTable};
pub use convexity::{diagnose_path, min_eigenvalue, ConvexityPoint, ConvexityReport};
pub use design::{standardize, CoefficientVector, Dataset, Family, Scale, StandardizedDesign};
pub use error::{Error, Result};
pub use lla::{lla_fit, lla_fit_path, LlaConfig};
pub use path::{
    fit_path, fit_path_design, grid_for, lambda_max, make_grid, LambdaGrid, PathOptions, PathPoint,
    PathResult,
    Solver,
};
pub use penalties::{soft_threshold, Penalty, PenaltyFamily};
pub use selection::{
    cross_validate, gamma_guidance, information_criteria, BinomialLoss, CvOptions, GammaAdvice,
    SelectionReport,
};
pub use simgen::{generate, generate_replicates, DesignKind, Signal, SimSpec, Simulated};
