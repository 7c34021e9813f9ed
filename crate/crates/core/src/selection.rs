//! Tuning-parameter selection: AIC/BIC along a path, k-fold cross-validation
//! on a shared λ grid, and convexity-guided advice for choosing γ.
//!
//! Degrees of freedom are the number of nonzero coefficients, counting the
//! intercept for logistic models.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convexity::diagnose_path;
use crate::design::{standardize, Dataset, Family};
use crate::error::{Error, Result};
use crate::path::{fit_path_design, grid_for, PathOptions, PathResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    pub lambda: f64,
    pub df: usize,
    /// Residual sum of squares (Gaussian) or deviance (binomial).
    pub loss: f64,
    pub aic: f64,
    pub bic: f64,
}

fn log1p_exp(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

/// Per-observation binomial deviance contribution at linear predictor `eta`.
fn deviance_term(eta: f64, y: f64) -> f64 {
    2.0 * (log1p_exp(eta) - y * eta)
}

/// AIC and BIC at every fitted grid point of `path`, evaluated on `data`.
pub fn information_criteria(path: &PathResult, data: &Dataset) -> Vec<Criteria> {
    let n = data.n() as f64;
    path.points
        .iter()
        .map(|pt| {
            let eta = pt.coefs.linear_predictor(data.x());
            let active = pt.coefs.betas.iter().filter(|b| **b != 0.0).count();
            let (df, fit_term, loss) = match data.family() {
                Family::Gaussian => {
                    let rss: f64 = eta
                        .iter()
                        .zip(data.y())
                        .map(|(e, y)| (y - e) * (y - e))
                        .sum();
                    (active, n * (rss / n).ln(), rss)
                }
                Family::Binomial => {
                    let dev: f64 = eta
                        .iter()
                        .zip(data.y())
                        .map(|(&e, &y)| deviance_term(e, y))
                        .sum();
                    (active + 1, dev, dev)
                }
            };
            Criteria {
                lambda: pt.lambda,
                df,
                loss,
                aic: fit_term + 2.0 * df as f64,
                bic: fit_term + n.ln() * df as f64,
            }
        })
        .collect()
}

/// Held-out loss used for binomial cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinomialLoss {
    /// Misclassification at threshold 0.5.
    Misclassification,
    Deviance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub binomial_loss: BinomialLoss,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 10,
            seed: 1,
            binomial_loss: BinomialLoss::Misclassification,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chosen {
    pub aic: f64,
    pub bic: f64,
    pub cv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub lambdas: Vec<f64>,
    pub df: Vec<usize>,
    pub aic: Vec<f64>,
    pub bic: Vec<f64>,
    /// Mean held-out loss per observation.
    pub cv_error: Vec<f64>,
    /// Standard error of `cv_error` across observations.
    pub cv_se: Vec<f64>,
    pub chosen: Chosen,
    pub folds: usize,
    pub seed: u64,
    /// Fold index (0-based) of every observation.
    pub fold_assignment: Vec<usize>,
    pub loss: String,
    /// Set when some fold stopped early and the report covers a prefix of
    /// the grid.
    pub truncated: Option<String>,
}

/// Seeded fold labels. Binomial data are stratified by class so every fold
/// receives both classes whenever each class has at least `k` members.
pub fn assign_folds(y: &[f64], family: Family, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = y.len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "{k} folds requested for {n} observations"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order: Vec<usize> = match family {
        Family::Gaussian => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            idx
        }
        Family::Binomial => {
            let mut zeros: Vec<usize> = (0..n).filter(|&i| y[i] == 0.0).collect();
            let mut ones: Vec<usize> = (0..n).filter(|&i| y[i] != 0.0).collect();
            zeros.shuffle(&mut rng);
            ones.shuffle(&mut rng);
            zeros.into_iter().chain(ones).collect()
        }
    };
    let mut folds = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        folds[i] = pos % k;
    }
    Ok(folds)
}

fn first_argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

/// Held-out losses for every observation in `test` at every λ of `path`.
fn held_out_losses(
    path: &PathResult,
    data: &Dataset,
    test: &[usize],
    loss: BinomialLoss,
) -> Vec<Vec<f64>> {
    path.points
        .iter()
        .map(|pt| {
            test.iter()
                .map(|&i| {
                    let row = data.x().row(i);
                    let eta = pt.coefs.intercept
                        + row.iter().zip(&pt.coefs.betas).map(|(x, b)| x * b).sum::<f64>();
                    let y = data.y()[i];
                    match (data.family(), loss) {
                        (Family::Gaussian, _) => (y - eta) * (y - eta),
                        (Family::Binomial, BinomialLoss::Misclassification) => {
                            let predicted = if eta > 0.0 { 1.0 } else { 0.0 };
                            f64::from(predicted != y)
                        }
                        (Family::Binomial, BinomialLoss::Deviance) => deviance_term(eta, y),
                    }
                })
                .collect()
        })
        .collect()
}

/// k-fold cross-validation over the λ grid of the full data.
///
/// Each fold refits the path on its training rows using that same grid;
/// folds run in parallel and are combined in fold order.
pub fn cross_validate(
    data: &Dataset,
    opts: &PathOptions,
    cv: &CvOptions,
) -> Result<SelectionReport> {
    let n = data.n();
    let folds = assign_folds(data.y().as_slice().expect("contiguous"), data.family(), cv.folds, cv.seed)?;
    let design = standardize(data)?;
    let grid = grid_for(&design, opts)?;
    let full_opts = opts.clone().lambdas(grid.values.clone());
    let full = fit_path_design(&design, &full_opts)?;

    let per_fold: Vec<(Vec<usize>, Vec<Vec<f64>>, Option<String>)> = (0..cv.folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..n).filter(|&i| folds[i] != f).collect();
            let test: Vec<usize> = (0..n).filter(|&i| folds[i] == f).collect();
            let train_data = data.subset(&train)?;
            let path = fit_path_design(&standardize(&train_data)?, &full_opts)?;
            let losses = held_out_losses(&path, data, &test, cv.binomial_loss);
            Ok((test, losses, path.truncated))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut len = full.points.len();
    let mut truncated = full.truncated.clone();
    for (f, (_, losses, t)) in per_fold.iter().enumerate() {
        if losses.len() < len {
            len = losses.len();
            truncated = Some(format!(
                "fold {f}: {}",
                t.clone().unwrap_or_else(|| "path ended early".into())
            ));
        }
    }
    if len == 0 {
        return Err(Error::Degenerate("no grid point was fitted in every fold".into()));
    }

    let mut errors = vec![vec![0.0; n]; len];
    for (test, losses, _) in &per_fold {
        for (k, row) in losses.iter().take(len).enumerate() {
            for (&i, &l) in test.iter().zip(row) {
                errors[k][i] = l;
            }
        }
    }
    let nf = n as f64;
    let cv_error: Vec<f64> = errors.iter().map(|e| e.iter().sum::<f64>() / nf).collect();
    let cv_se: Vec<f64> = errors
        .iter()
        .zip(&cv_error)
        .map(|(e, m)| {
            let var = e.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (nf - 1.0);
            (var / nf).sqrt()
        })
        .collect();

    let ic: Vec<Criteria> = information_criteria(&full, data).into_iter().take(len).collect();
    let lambdas: Vec<f64> = ic.iter().map(|c| c.lambda).collect();
    let aic: Vec<f64> = ic.iter().map(|c| c.aic).collect();
    let bic: Vec<f64> = ic.iter().map(|c| c.bic).collect();
    let chosen = Chosen {
        aic: lambdas[first_argmin(&aic)],
        bic: lambdas[first_argmin(&bic)],
        cv: lambdas[first_argmin(&cv_error)],
    };
    let loss = match (data.family(), cv.binomial_loss) {
        (Family::Gaussian, _) => "mse",
        (Family::Binomial, BinomialLoss::Misclassification) => "misclassification",
        (Family::Binomial, BinomialLoss::Deviance) => "deviance",
    };
    Ok(SelectionReport {
        df: ic.iter().map(|c| c.df).collect(),
        lambdas,
        aic,
        bic,
        cv_error,
        cv_se,
        chosen,
        folds: cv.folds,
        seed: cv.seed,
        fold_assignment: folds,
        loss: loss.into(),
        truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaAdvice {
    /// The BIC choice sits at or below λ*: the solution is in the locally
    /// nonconvex region.
    IncreaseGamma,
    /// The BIC choice is well above λ*.
    MayDecreaseGamma,
    Keep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSummary {
    pub gamma: f64,
    pub chosen_lambda: f64,
    pub chosen_df: usize,
    pub lambda_star: Option<f64>,
    pub advice: GammaAdvice,
}

/// Ratio `chosen / λ*` at or above which γ may be lowered.
pub const DEFAULT_WELL_ABOVE_RATIO: f64 = 2.0;

/// Fits one path per candidate γ, selects λ by BIC and relates the choice to
/// the locally convex region of that path.
pub fn gamma_guidance(
    data: &Dataset,
    opts: &PathOptions,
    gammas: &[f64],
    well_above_ratio: f64,
) -> Result<Vec<GammaSummary>> {
    if gammas.is_empty() {
        return Err(Error::InvalidArgument("no candidate gamma values".into()));
    }
    let design = standardize(data)?;
    gammas
        .iter()
        .map(|&gamma| {
            let path = fit_path_design(&design, &opts.clone().gamma(gamma))?;
            let report = diagnose_path(&path, &design)?;
            let ic = information_criteria(&path, data);
            let bic: Vec<f64> = ic.iter().map(|c| c.bic).collect();
            let best = first_argmin(&bic);
            let chosen_lambda = ic[best].lambda;
            let advice = match report.lambda_star {
                None => GammaAdvice::Keep,
                Some(star) if chosen_lambda <= star => GammaAdvice::IncreaseGamma,
                Some(star) if chosen_lambda >= well_above_ratio * star => {
                    GammaAdvice::MayDecreaseGamma
                }
                Some(_) => GammaAdvice::Keep,
            };
            Ok(GammaSummary {
                gamma,
                chosen_lambda,
                chosen_df: ic[best].df,
                lambda_star: report.lambda_star,
                advice,
            })
        })
        .collect()
}
