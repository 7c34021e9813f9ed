//! λ grids and warm-started pathwise fitting.
//!
//! Fits start at `λ_max`, where every penalized coefficient is zero, and move
//! down a log-spaced grid using each solution as the next starting value.

use serde::{Deserialize, Serialize};

use crate::cd_linear::{fit_linear, FitConfig, FitResult, FitStatus};
use crate::cd_logistic::{check_fixed_scale_feasible, fit_logistic, irls_refresh, null_intercept, ScaleMode};
use crate::design::{standardize, CoefficientVector, Dataset, Family, Scale, StandardizedDesign};
use crate::error::{Error, Result};
use crate::lla::{lla_fit, LlaConfig};
use crate::penalties::{Penalty, PenaltyFamily};

pub const DEFAULT_NLAMBDA: usize = 100;
/// Relative inflation of the computed λ_max so the first fit is exactly null
/// under floating point.
pub const LAMBDA_MAX_INFLATION: f64 = 1e-9;

/// Default `λ_min / λ_max`: 0.001 when `n > p`, 0.05 otherwise.
pub fn default_lambda_min_ratio(n: usize, p: usize) -> f64 {
    if n > p {
        0.001
    } else {
        0.05
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Cd,
    Lla,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Cd => "cd",
            Solver::Lla => "lla",
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cd" => Ok(Solver::Cd),
            "lla" => Ok(Solver::Lla),
            other => Err(Error::InvalidArgument(format!("unknown solver `{other}`"))),
        }
    }
}

/// Strictly decreasing, log-equispaced λ values starting at `lambda_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub values: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_min_ratio: f64,
    pub count: usize,
}

impl LambdaGrid {
    /// Wraps a caller-supplied decreasing sequence (used to share one grid
    /// across cross-validation folds).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty lambda grid".into()));
        }
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "lambda values must be positive and finite".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument(
                "lambda values must be strictly decreasing".into(),
            ));
        }
        let lambda_max = values[0];
        let lambda_min_ratio = values[values.len() - 1] / lambda_max;
        Ok(LambdaGrid {
            count: values.len(),
            values,
            lambda_max,
            lambda_min_ratio,
        })
    }
}

pub fn make_grid(lambda_max: f64, lambda_min_ratio: f64, count: usize) -> Result<LambdaGrid> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::Degenerate(format!(
            "lambda_max = {lambda_max}: the response is orthogonal to every covariate"
        )));
    }
    if !(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda_min_ratio must lie in (0, 1), got {lambda_min_ratio}"
        )));
    }
    if count < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 lambda values, got {count}"
        )));
    }
    let (hi, lo) = (lambda_max.ln(), (lambda_max * lambda_min_ratio).ln());
    let last = count - 1;
    let values = (0..count)
        .map(|k| match k {
            0 => lambda_max,
            k if k == last => lambda_max * lambda_min_ratio,
            k => (hi + (lo - hi) * k as f64 / last as f64).exp(),
        })
        .collect();
    Ok(LambdaGrid {
        values,
        lambda_max,
        lambda_min_ratio,
        count,
    })
}

/// Smallest λ at which every penalized coefficient is zero.
///
/// Gaussian: `max_j |n⁻¹ x_j'y|`. Binomial: `max_j |z_j|` with `z_j` taken from
/// the quadratic approximation at the intercept-only model.
pub fn lambda_max(design: &StandardizedDesign) -> Result<f64> {
    let n = design.n() as f64;
    let off = design.penalized_offset();
    let score = match design.family() {
        Family::Gaussian => design.y().to_vec(),
        Family::Binomial => {
            let mut beta = vec![0.0; design.p() + 1];
            beta[0] = null_intercept(design);
            let st = irls_refresh(&beta, design)?;
            st.w.iter().zip(&st.r).map(|(w, r)| w * r).collect()
        }
    };
    Ok((0..design.p())
        .map(|j| {
            design
                .column(j + off)
                .iter()
                .zip(&score)
                .map(|(x, s)| x * s)
                .sum::<f64>()
                .abs()
                / n
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathOptions {
    pub penalty: PenaltyFamily,
    /// Shape parameter; ignored for the lasso.
    pub gamma: f64,
    pub mode: ScaleMode,
    pub solver: Solver,
    pub nlambda: usize,
    /// `None` picks [`default_lambda_min_ratio`].
    pub lambda_min_ratio: Option<f64>,
    /// Explicit grid; overrides `nlambda` and `lambda_min_ratio`.
    pub lambdas: Option<Vec<f64>>,
    pub config: FitConfig,
    pub lla: LlaConfig,
    /// Standardized starting value for the first grid point. Defaults to
    /// zero slopes (and the null-model intercept for logistic fits).
    pub init: Option<CoefficientVector>,
}

impl PathOptions {
    pub fn new(penalty: PenaltyFamily) -> Self {
        PathOptions {
            penalty,
            gamma: penalty.default_gamma(),
            mode: ScaleMode::Adaptive,
            solver: Solver::Cd,
            nlambda: DEFAULT_NLAMBDA,
            lambda_min_ratio: None,
            lambdas: None,
            config: FitConfig::default(),
            lla: LlaConfig::default(),
            init: None,
        }
    }

    pub fn gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn mode(mut self, mode: ScaleMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    pub fn nlambda(mut self, nlambda: usize) -> Self {
        self.nlambda = nlambda;
        self
    }

    pub fn lambda_min_ratio(mut self, ratio: f64) -> Self {
        self.lambda_min_ratio = Some(ratio);
        self
    }

    pub fn lambdas(mut self, lambdas: Vec<f64>) -> Self {
        self.lambdas = Some(lambdas);
        self
    }

    pub fn config(mut self, config: FitConfig) -> Self {
        self.config = config;
        self
    }

    pub fn init(mut self, init: CoefficientVector) -> Self {
        self.init = Some(init);
        self
    }

    pub(crate) fn penalty_at(&self, lambda: f64) -> Result<Penalty> {
        Penalty::new(self.penalty, lambda, self.gamma)
    }
}

/// Fit at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub lambda: f64,
    /// Original-scale coefficients with intercept.
    pub coefs: CoefficientVector,
    pub standardized: CoefficientVector,
    pub iterations: usize,
    pub objective: f64,
    pub status: FitStatus,
    pub min_denominator: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    /// Requested grid; `points` may be shorter if the path was truncated.
    pub grid: LambdaGrid,
    pub points: Vec<PathPoint>,
    pub penalty: PenaltyFamily,
    pub gamma: f64,
    pub family: Family,
    pub mode: ScaleMode,
    pub solver: Solver,
    /// Reason the path stopped before the end of the grid.
    pub truncated: Option<String>,
}

impl PathResult {
    pub fn lambdas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    pub fn any_converged(&self) -> bool {
        self.points.iter().any(|p| p.status.converged())
    }
}

/// Standardizes `data` and fits the whole path.
pub fn fit_path(data: &Dataset, opts: &PathOptions) -> Result<PathResult> {
    let design = standardize(data)?;
    fit_path_design(&design, opts)
}

/// Grid for a standardized design: the explicit grid if given, otherwise
/// from the (slightly inflated) λ_max.
pub fn grid_for(design: &StandardizedDesign, opts: &PathOptions) -> Result<LambdaGrid> {
    if let Some(values) = &opts.lambdas {
        return LambdaGrid::from_values(values.clone());
    }
    let lmax = lambda_max(design)?;
    let ratio = opts
        .lambda_min_ratio
        .unwrap_or_else(|| default_lambda_min_ratio(design.n(), design.p()));
    make_grid(lmax * (1.0 + LAMBDA_MAX_INFLATION), ratio, opts.nlambda)
}

pub fn fit_path_design(design: &StandardizedDesign, opts: &PathOptions) -> Result<PathResult> {
    opts.config.validate()?;
    // validates gamma for the family
    opts.penalty_at(0.0)?;
    let family = design.family();
    if family == Family::Binomial {
        if opts.solver == Solver::Lla {
            return Err(Error::InvalidArgument(
                "the LLA solver is implemented for linear models only".into(),
            ));
        }
        if opts.mode == ScaleMode::Fixed {
            check_fixed_scale_feasible(opts.penalty, opts.gamma)?;
        }
    }
    let grid = grid_for(design, opts)?;
    let p = design.p();
    let mut current = match &opts.init {
        Some(init) => {
            if init.betas.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: init.betas.len(),
                });
            }
            init.clone()
        }
        None => {
            let mut c = CoefficientVector::zeros(p, Scale::Standardized);
            if family == Family::Binomial {
                c.intercept = null_intercept(design);
            }
            c
        }
    };

    let mut points = Vec::with_capacity(grid.count);
    let mut truncated = None;
    for &lambda in &grid.values {
        let penalty = opts.penalty_at(lambda)?;
        let fit: FitResult = match (family, opts.solver) {
            (Family::Gaussian, Solver::Cd) => fit_linear(design, &penalty, &current, &opts.config)?,
            (Family::Gaussian, Solver::Lla) => lla_fit(design, &penalty, &current, &opts.lla)?,
            (Family::Binomial, _) => {
                fit_logistic(design, &penalty, opts.mode, &current, &opts.config)?
            }
        };
        if fit.status == FitStatus::Saturated {
            truncated = Some(format!("fitted probabilities saturated at lambda = {lambda}"));
            break;
        }
        let active = fit.coefs.betas.iter().filter(|b| **b != 0.0).count();
        current = fit.coefs.clone();
        points.push(PathPoint {
            lambda,
            coefs: design.unstandardize(&fit.coefs)?,
            standardized: fit.coefs,
            iterations: fit.iterations,
            objective: fit.objective,
            status: fit.status,
            min_denominator: fit.min_denominator,
        });
        if family == Family::Binomial && active + 1 >= design.n() {
            truncated = Some(format!(
                "model saturated: {} parameters for {} observations at lambda = {lambda}",
                active + 1,
                design.n()
            ));
            break;
        }
    }
    Ok(PathResult {
        grid,
        points,
        penalty: opts.penalty,
        gamma: opts.gamma,
        family,
        mode: opts.mode,
        solver: opts.solver,
        truncated,
    })
}
