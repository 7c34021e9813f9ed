//! Cyclic coordinate descent for penalized least squares at a single (λ, γ).
//!
//! Minimizes `Q(β) = (2n)⁻¹‖y − Xβ‖² + Σ_j p(|β_j|)` on a standardized
//! design, keeping the residual vector `r = y − Xβ` up to date so that each
//! coordinate update costs O(n).

use serde::{Deserialize, Serialize};

use crate::design::{CoefficientVector, Family, Scale, StandardizedDesign};
use crate::error::{Error, Result};
use crate::penalties::Penalty;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Convergence settings shared by the solvers.
///
/// Convergence is declared when the largest absolute change in any
/// standardized coefficient over a full cycle drops below `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Converged,
    MaxIterations,
    /// Fitted probabilities saturated; see `cd_logistic`.
    Saturated,
    /// The penalized objective increased between outer iterations.
    ObjectiveIncrease,
}

impl FitStatus {
    pub fn converged(self) -> bool {
        self == FitStatus::Converged
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Standardized-scale coefficients.
    pub coefs: CoefficientVector,
    /// Full cycles performed (outer iterations for logistic fits).
    pub iterations: usize,
    pub objective: f64,
    pub status: FitStatus,
    /// Objective after each cycle, starting with the initial value.
    pub trace: Vec<f64>,
    /// Smallest denominator used by an active update branch; positive when
    /// every coordinatewise subproblem was strictly convex.
    pub min_denominator: f64,
}

impl FitResult {
    pub fn converged(&self) -> bool {
        self.status.converged()
    }
}

/// Coefficients and current residuals of a linear fit in progress.
#[derive(Debug, Clone)]
pub struct LinearState {
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl LinearState {
    pub fn new(design: &StandardizedDesign, init: &CoefficientVector) -> Result<Self> {
        check_linear(design)?;
        if init.betas.len() != design.p() {
            return Err(Error::DimensionMismatch {
                expected: design.p(),
                got: init.betas.len(),
            });
        }
        let beta = init.betas.clone();
        let residuals = compute_residuals(design, &beta);
        Ok(LinearState { beta, residuals })
    }

    /// Updates coordinate `j` in place and returns its absolute change.
    pub fn coordinate_update(
        &mut self,
        design: &StandardizedDesign,
        penalty: &Penalty,
        j: usize,
    ) -> f64 {
        let x = design.column(j);
        let n = x.len() as f64;
        let old = self.beta[j];
        let z = dot(x, &self.residuals) / n + old;
        let new = penalty.univariate_solution(z);
        let delta = new - old;
        if delta != 0.0 {
            for (r, xi) in self.residuals.iter_mut().zip(x) {
                *r -= delta * xi;
            }
            self.beta[j] = new;
        }
        delta.abs()
    }

    pub fn objective(&self, penalty: &Penalty) -> f64 {
        let n = self.residuals.len() as f64;
        let rss: f64 = self.residuals.iter().map(|r| r * r).sum();
        rss / (2.0 * n) + self.beta.iter().map(|b| penalty.value(b.abs())).sum::<f64>()
    }

    pub fn coefficients(&self) -> CoefficientVector {
        CoefficientVector {
            intercept: 0.0,
            betas: self.beta.clone(),
            scale: Scale::Standardized,
        }
    }
}

fn check_linear(design: &StandardizedDesign) -> Result<()> {
    if design.family() != Family::Gaussian {
        return Err(Error::Contract(
            "linear coordinate descent requires a Gaussian design".into(),
        ));
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y − Xβ` recomputed from scratch.
pub fn compute_residuals(design: &StandardizedDesign, beta: &[f64]) -> Vec<f64> {
    let mut r = design.y().to_vec();
    let off = design.penalized_offset();
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            for (ri, xi) in r.iter_mut().zip(design.column(j + off)) {
                *ri -= b * xi;
            }
        }
    }
    r
}

/// Penalized least-squares objective at `beta` on a Gaussian design.
pub fn linear_objective(design: &StandardizedDesign, penalty: &Penalty, beta: &[f64]) -> f64 {
    let r = compute_residuals(design, beta);
    let n = r.len() as f64;
    r.iter().map(|v| v * v).sum::<f64>() / (2.0 * n)
        + beta.iter().map(|b| penalty.value(b.abs())).sum::<f64>()
}

/// Fits one (λ, γ) by cycling over the coordinates in column order.
///
/// Hitting `max_iter` is not an error: the last iterate is returned with
/// [`FitStatus::MaxIterations`].
pub fn fit_linear(
    design: &StandardizedDesign,
    penalty: &Penalty,
    init: &CoefficientVector,
    config: &FitConfig,
) -> Result<FitResult> {
    config.validate()?;
    let mut state = LinearState::new(design, init)?;
    let p = design.p();
    let mut trace = vec![state.objective(penalty)];
    let mut status = FitStatus::MaxIterations;
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        let mut max_change = 0.0f64;
        for j in 0..p {
            max_change = max_change.max(state.coordinate_update(design, penalty, j));
        }
        trace.push(state.objective(penalty));
        if max_change < config.tol {
            status = FitStatus::Converged;
            break;
        }
    }
    let objective = *trace.last().expect("trace starts non-empty");
    Ok(FitResult {
        coefs: state.coefficients(),
        iterations,
        objective,
        status,
        trace,
        min_denominator: penalty.update_denominator(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{standardize, Dataset};
    use ndarray::{Array1, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_design(n: usize, p: usize, seed: u64) -> (Dataset, StandardizedDesign) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |i| {
            let e: f64 = StandardNormal.sample(&mut rng);
            x[[i, 0]] * 1.5 - x[[i, 1 % p]] + 0.5 * x[[i, 2 % p]] + e
        });
        let d = Dataset::new(x, y, Family::Gaussian).unwrap();
        let s = standardize(&d).unwrap();
        (d, s)
    }

    fn zeros(p: usize) -> CoefficientVector {
        CoefficientVector::zeros(p, Scale::Standardized)
    }

    #[test]
    fn zero_response_gives_zero_fit_in_one_cycle() {
        let (d, _) = random_design(20, 3, 1);
        let d = Dataset::new(d.x().clone(), Array1::zeros(20), Family::Gaussian).unwrap();
        let s = standardize(&d).unwrap();
        let fit = fit_linear(&s, &Penalty::mcp(0.1, 3.0).unwrap(), &zeros(3), &FitConfig::default())
            .unwrap();
        assert!(fit.coefs.betas.iter().all(|&b| b == 0.0));
        assert_eq!(fit.iterations, 1);
        assert!(fit.converged());
    }

    #[test]
    fn kill_zone_leaves_state_untouched() {
        let (_, s) = random_design(40, 3, 2);
        let mut st = LinearState::new(&s, &zeros(3)).unwrap();
        let before = st.residuals.clone();
        let big = Penalty::lasso(1e3).unwrap();
        assert_eq!(st.coordinate_update(&s, &big, 1), 0.0);
        assert_eq!(st.beta, vec![0.0; 3]);
        assert_eq!(st.residuals, before);
    }

    #[test]
    fn unpenalized_single_covariate_is_ols() {
        let (d, _) = random_design(50, 1, 3);
        let s = standardize(&d).unwrap();
        let fit = fit_linear(&s, &Penalty::lasso(0.0).unwrap(), &zeros(1), &FitConfig::default())
            .unwrap();
        let x = s.column(0);
        let ols = dot(x, s.y().as_slice().unwrap()) / dot(x, x);
        assert!((fit.coefs.betas[0] - ols).abs() < 1e-12);
    }

    #[test]
    fn residual_bookkeeping_matches_recomputation() {
        let (_, s) = random_design(60, 8, 4);
        let pen = Penalty::scad(0.05, 3.7).unwrap();
        let mut st = LinearState::new(&s, &zeros(8)).unwrap();
        for sweep in 0..7 {
            for j in 0..8 {
                st.coordinate_update(&s, &pen, (j * 3 + sweep) % 8);
            }
        }
        let fresh = compute_residuals(&s, &st.beta);
        for (a, b) in st.residuals.iter().zip(&fresh) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn coordinatewise_optimal_at_convergence() {
        let (_, s) = random_design(80, 6, 5);
        for pen in [
            Penalty::mcp(0.1, 3.0).unwrap(),
            Penalty::scad(0.1, 3.7).unwrap(),
            Penalty::lasso(0.1).unwrap(),
        ] {
            let cfg = FitConfig {
                tol: 1e-10,
                ..FitConfig::default()
            };
            let fit = fit_linear(&s, &pen, &zeros(6), &cfg).unwrap();
            let q = linear_objective(&s, &pen, &fit.coefs.betas);
            assert!((q - fit.objective).abs() < 1e-10);
            for j in 0..6 {
                for delta in [1e-4, -1e-4] {
                    let mut b = fit.coefs.betas.clone();
                    b[j] += delta;
                    assert!(linear_objective(&s, &pen, &b) >= q - 1e-10);
                }
            }
        }
    }

    #[test]
    fn coordinatewise_second_differences_bounded_below() {
        let (_, s) = random_design(50, 5, 6);
        let beta = vec![0.7, -0.3, 0.2, 1.1, -0.9];
        let h = 1e-3;
        for (pen, bound) in [
            (Penalty::mcp(0.2, 3.0).unwrap(), 1.0 - 1.0 / 3.0),
            (Penalty::scad(0.2, 3.7).unwrap(), 1.0 - 1.0 / 2.7),
        ] {
            for j in 0..5 {
                for &t in &[-1.3f64, -0.45, 0.12, 0.31, 0.55, 0.8] {
                    if t.abs() < 2.0 * h {
                        continue;
                    }
                    let q = |v: f64| {
                        let mut b = beta.clone();
                        b[j] = v;
                        linear_objective(&s, &pen, &b)
                    };
                    let second = (q(t + h) - 2.0 * q(t) + q(t - h)) / (h * h);
                    assert!(second >= bound - 1e-6, "{second} < {bound}");
                }
            }
        }
    }

    #[test]
    fn large_gamma_mcp_matches_lasso() {
        let (_, s) = random_design(100, 10, 7);
        let cfg = FitConfig::default();
        let a = fit_linear(&s, &Penalty::mcp(0.1, 1e8).unwrap(), &zeros(10), &cfg).unwrap();
        let b = fit_linear(&s, &Penalty::lasso(0.1).unwrap(), &zeros(10), &cfg).unwrap();
        assert!(a.coefs.max_abs_diff(&b.coefs) < 1e-6);
    }

    #[test]
    fn trace_is_monotone() {
        let (_, s) = random_design(100, 20, 8);
        for pen in [
            Penalty::mcp(0.05, 3.0).unwrap(),
            Penalty::scad(0.05, 3.7).unwrap(),
        ] {
            let fit = fit_linear(&s, &pen, &zeros(20), &FitConfig::default()).unwrap();
            for w in fit.trace.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn max_iter_returns_unconverged() {
        let (_, s) = random_design(50, 10, 9);
        let cfg = FitConfig {
            tol: 1e-14,
            max_iter: 2,
        };
        let fit = fit_linear(&s, &Penalty::lasso(0.01).unwrap(), &zeros(10), &cfg).unwrap();
        assert_eq!(fit.status, FitStatus::MaxIterations);
        assert_eq!(fit.iterations, 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (_, s) = random_design(20, 3, 10);
        let pen = Penalty::lasso(0.1).unwrap();
        assert!(fit_linear(&s, &pen, &zeros(4), &FitConfig::default()).is_err());
        let cfg = FitConfig {
            tol: 0.0,
            max_iter: 10,
        };
        assert!(fit_linear(&s, &pen, &zeros(3), &cfg).is_err());
    }
}
