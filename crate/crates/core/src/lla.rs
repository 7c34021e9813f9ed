//! Local linear approximation (LLA) baseline for linear models.
//!
//! Each outer iteration replaces the penalty by its tangent line at the
//! current iterate, `Σ p'(|β_j^(m)|)|β_j|`, and solves the resulting weighted
//! lasso exactly. The inner solver is coordinate descent on the weighted
//! lasso, warm-started at the current iterate.

use serde::{Deserialize, Serialize};

use crate::cd_linear::{compute_residuals, dot, linear_objective, FitConfig, FitResult, FitStatus};
use crate::design::{CoefficientVector, Dataset, Family, Scale, StandardizedDesign};
use crate::error::{Error, Result};
use crate::path::{fit_path, PathOptions, PathResult, Solver};
use crate::penalties::{soft_threshold, Penalty};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlaConfig {
    pub inner: FitConfig,
    pub outer_tol: f64,
    pub outer_max_iter: usize,
}

impl Default for LlaConfig {
    fn default() -> Self {
        let inner = FitConfig::default();
        LlaConfig {
            outer_tol: inner.tol,
            outer_max_iter: 1000,
            inner,
        }
    }
}

impl LlaConfig {
    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        if !(self.outer_tol > 0.0) || self.outer_max_iter == 0 {
            return Err(Error::InvalidArgument(
                "LLA outer tolerance and iteration cap must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one weighted-lasso solve.
#[derive(Debug, Clone)]
pub struct WeightedLassoFit {
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
    pub cycles: usize,
    pub converged: bool,
}

/// Minimizes `(2n)⁻¹‖y − Xβ‖² + Σ_j weights_j |β_j|` by cyclic coordinate
/// descent from `init`.
pub fn weighted_lasso(
    design: &StandardizedDesign,
    weights: &[f64],
    init: &[f64],
    config: &FitConfig,
) -> WeightedLassoFit {
    let p = design.p();
    let mut beta = init.to_vec();
    let mut residuals = compute_residuals(design, &beta);
    let n = design.n() as f64;
    let mut cycles = 0;
    let mut converged = false;
    while cycles < config.max_iter {
        cycles += 1;
        let mut max_change = 0.0f64;
        for j in 0..p {
            let x = design.column(j);
            let old = beta[j];
            let z = dot(x, &residuals) / n + old;
            let new = soft_threshold(z, weights[j]);
            let delta = new - old;
            if delta != 0.0 {
                for (r, xi) in residuals.iter_mut().zip(x) {
                    *r -= delta * xi;
                }
                beta[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change < config.tol {
            converged = true;
            break;
        }
    }
    WeightedLassoFit {
        beta,
        residuals,
        cycles,
        converged,
    }
}

/// Fits one (λ, γ) for MCP or SCAD by iterated weighted-lasso solves.
///
/// `trace` holds the true penalized objective after every outer iteration.
/// The weight at `β_j = 0` is λ.
pub fn lla_fit(
    design: &StandardizedDesign,
    penalty: &Penalty,
    init: &CoefficientVector,
    config: &LlaConfig,
) -> Result<FitResult> {
    config.validate()?;
    if design.family() != Family::Gaussian {
        return Err(Error::InvalidArgument(
            "the LLA solver is implemented for linear models only".into(),
        ));
    }
    if init.betas.len() != design.p() {
        return Err(Error::DimensionMismatch {
            expected: design.p(),
            got: init.betas.len(),
        });
    }
    let mut beta = init.betas.clone();
    let mut trace = vec![linear_objective(design, penalty, &beta)];
    let mut status = FitStatus::MaxIterations;
    let mut iterations = 0;
    let mut inner_ok = true;
    while iterations < config.outer_max_iter {
        iterations += 1;
        let weights: Vec<f64> = beta
            .iter()
            .map(|b| penalty.linearization_weight(b.abs()))
            .collect();
        let inner = weighted_lasso(design, &weights, &beta, &config.inner);
        inner_ok &= inner.converged;
        let change = beta
            .iter()
            .zip(&inner.beta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        beta = inner.beta;
        let n = design.n() as f64;
        let rss: f64 = inner.residuals.iter().map(|r| r * r).sum();
        trace.push(rss / (2.0 * n) + beta.iter().map(|b| penalty.value(b.abs())).sum::<f64>());
        if change < config.outer_tol {
            status = if inner_ok {
                FitStatus::Converged
            } else {
                FitStatus::MaxIterations
            };
            break;
        }
    }
    Ok(FitResult {
        coefs: CoefficientVector {
            intercept: 0.0,
            betas: beta,
            scale: Scale::Standardized,
        },
        iterations,
        objective: *trace.last().expect("non-empty trace"),
        status,
        trace,
        min_denominator: 1.0,
    })
}

/// Pathwise LLA: same grid and warm starts as the coordinate descent path,
/// with [`lla_fit`] as the per-λ solver.
pub fn lla_fit_path(data: &Dataset, opts: &PathOptions) -> Result<PathResult> {
    let opts = opts.clone().solver(Solver::Lla);
    fit_path(data, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cd_linear::fit_linear;
    use crate::design::{standardize, Dataset};
    use ndarray::{Array1, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn design(n: usize, p: usize, seed: u64) -> StandardizedDesign {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |i| {
            3.0 * x[[i, 0]] - 2.0 * x[[i, 1]] + Distribution::<f64>::sample(&StandardNormal, &mut rng)
        });
        standardize(&Dataset::new(x, y, Family::Gaussian).unwrap()).unwrap()
    }

    fn ols(s: &StandardizedDesign) -> Vec<f64> {
        let cfg = FitConfig {
            tol: 1e-13,
            max_iter: 100_000,
        };
        weighted_lasso(s, &vec![0.0; s.p()], &vec![0.0; s.p()], &cfg).beta
    }

    #[test]
    fn zero_weights_give_least_squares() {
        let s = design(60, 4, 1);
        let b = ols(&s);
        // normal equations: X'(y − Xb) = 0
        let r = compute_residuals(&s, &b);
        for j in 0..4 {
            assert!(dot(s.column(j), &r).abs() < 1e-8);
        }
    }

    #[test]
    fn flat_region_start_is_fixed_point() {
        let s = design(60, 4, 2);
        let b = ols(&s);
        let smallest = b.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let pen = Penalty::mcp(smallest / 4.0, 3.0).unwrap();
        let init = CoefficientVector {
            intercept: 0.0,
            betas: b.clone(),
            scale: Scale::Standardized,
        };
        let fit = lla_fit(&s, &pen, &init, &LlaConfig::default()).unwrap();
        assert_eq!(fit.iterations, 1);
        for (a, c) in fit.coefs.betas.iter().zip(&b) {
            assert!((a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn first_iteration_from_zero_is_lasso() {
        let s = design(60, 5, 3);
        let pen = Penalty::mcp(0.2, 3.0).unwrap();
        let cfg = LlaConfig {
            outer_max_iter: 1,
            ..LlaConfig::default()
        };
        let zeros = CoefficientVector::zeros(5, Scale::Standardized);
        let one = lla_fit(&s, &pen, &zeros, &cfg).unwrap();
        let lasso = fit_linear(&s, &Penalty::lasso(0.2).unwrap(), &zeros, &cfg.inner).unwrap();
        assert_eq!(one.coefs.betas, lasso.coefs.betas);
    }

    #[test]
    fn outer_iterations_descend() {
        let s = design(80, 10, 4);
        for pen in [Penalty::mcp(0.15, 2.0).unwrap(), Penalty::scad(0.15, 3.7).unwrap()] {
            let zeros = CoefficientVector::zeros(10, Scale::Standardized);
            let fit = lla_fit(&s, &pen, &zeros, &LlaConfig::default()).unwrap();
            assert!(fit.converged());
            for w in fit.trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-10 * w[0].abs(), "{} > {}", w[1], w[0]);
            }
        }
    }

    #[test]
    fn agrees_with_cd_in_convex_case() {
        // n >> p with independent columns: c_* is near 1, so gamma = 3 is convex.
        let s = design(200, 5, 5);
        let zeros = CoefficientVector::zeros(5, Scale::Standardized);
        for pen in [Penalty::mcp(0.3, 3.0).unwrap(), Penalty::scad(0.3, 3.7).unwrap()] {
            let a = lla_fit(&s, &pen, &zeros, &LlaConfig::default()).unwrap();
            let b = fit_linear(&s, &pen, &zeros, &FitConfig::default()).unwrap();
            assert!(a.coefs.max_abs_diff(&b.coefs) < 1e-4);
        }
    }
}
