//! Local convexity diagnostics along a fitted path.
//!
//! For each grid point the augmented set `U(λ_k) = A(λ_k) ∪ A(λ_{k+1})` (the
//! current active set and the one at the next, smaller λ) defines a restricted
//! Gram matrix. Its smallest eigenvalue `c_*(λ)` decides whether the objective
//! is convex in the neighbourhood of the solution:
//!
//! - linear: `c_* > 1/γ` (MCP), `c_* > 1/(γ − 1)` (SCAD)
//! - logistic: `c_* > 0`, with `c_*` taken from `n⁻¹X_U'WX_U − D_p`

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::cd_logistic::{irls_refresh, ScaleMode};
use crate::design::{Family, StandardizedDesign};
use crate::error::{Error, Result};
use crate::path::PathResult;
use crate::penalties::PenaltyFamily;

/// Smallest eigenvalue of a symmetric matrix, `+∞` for an empty one.
///
/// The input is symmetrized as `(M + M')/2` first.
pub fn min_eigenvalue(m: &Array2<f64>) -> f64 {
    let k = m.nrows();
    if k == 0 {
        return f64::INFINITY;
    }
    let sym = DMatrix::from_fn(k, k, |i, j| 0.5 * (m[[i, j]] + m[[j, i]]));
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityPoint {
    pub lambda: f64,
    /// Nonzero penalized coefficients (0-based covariate indices).
    pub active: Vec<usize>,
    pub augmented: Vec<usize>,
    /// `None` when the restricted matrix is empty (vacuously convex).
    pub c_star: Option<f64>,
    pub locally_convex: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub family: Family,
    pub penalty: PenaltyFamily,
    pub gamma: Option<f64>,
    pub mode: ScaleMode,
    /// `c_*` must exceed this for local convexity.
    pub threshold: f64,
    pub points: Vec<ConvexityPoint>,
    /// First grid λ, scanning down from λ_max, where local convexity fails.
    pub lambda_star: Option<f64>,
    /// Grid λ just above `lambda_star`; the exact boundary lies in between.
    pub lambda_star_upper: Option<f64>,
    /// Smallest grid λ at which the condition holds.
    pub smallest_convex_lambda: Option<f64>,
    /// True when some grid point below `lambda_star` is locally convex again,
    /// so the two definitions of the boundary disagree.
    pub nonmonotone: bool,
}

/// Diagnoses every point of `path`, which must have been fitted on `design`.
pub fn diagnose_path(path: &PathResult, design: &StandardizedDesign) -> Result<ConvexityReport> {
    if path.family != design.family() {
        return Err(Error::Contract("path and design families differ".into()));
    }
    let gamma = path.gamma;
    let penalty_curvature = match path.penalty {
        PenaltyFamily::Lasso => 0.0,
        PenaltyFamily::Mcp => 1.0 / gamma,
        PenaltyFamily::Scad => 1.0 / (gamma - 1.0),
    };
    let threshold = match path.family {
        Family::Gaussian => penalty_curvature,
        Family::Binomial => 0.0,
    };
    let actives: Vec<Vec<usize>> = path
        .points
        .iter()
        .map(|pt| pt.standardized.active_set())
        .collect();

    let mut points = Vec::with_capacity(path.points.len());
    for (k, pt) in path.points.iter().enumerate() {
        let mut augmented = actives[k].clone();
        if let Some(next) = actives.get(k + 1) {
            augmented.extend(next);
            augmented.sort_unstable();
            augmented.dedup();
        }
        let c_star = match path.family {
            Family::Gaussian => {
                let cols: Vec<usize> = augmented.clone();
                (!cols.is_empty()).then(|| min_eigenvalue(&weighted_gram(design, &cols, None)))
            }
            Family::Binomial => {
                let mut beta = vec![pt.standardized.intercept];
                beta.extend(&pt.standardized.betas);
                let st = irls_refresh(&beta, design)?;
                let cols: Vec<usize> =
                    std::iter::once(0).chain(augmented.iter().map(|j| j + 1)).collect();
                let mut m = weighted_gram(design, &cols, Some(&st.w));
                for (a, &c) in cols.iter().enumerate().skip(1) {
                    let d = match path.mode {
                        ScaleMode::Fixed => penalty_curvature,
                        ScaleMode::Adaptive => st.v[c] * penalty_curvature,
                    };
                    m[[a, a]] -= d;
                }
                Some(min_eigenvalue(&m))
            }
        };
        let locally_convex = match c_star {
            None => true,
            Some(c) => c > threshold,
        };
        points.push(ConvexityPoint {
            lambda: pt.lambda,
            active: actives[k].clone(),
            augmented,
            c_star,
            locally_convex,
        });
    }

    let first_fail = points.iter().position(|p| !p.locally_convex);
    let lambda_star = first_fail.map(|k| points[k].lambda);
    let lambda_star_upper = first_fail.and_then(|k| k.checked_sub(1)).map(|k| points[k].lambda);
    let smallest_convex_lambda = points
        .iter()
        .filter(|p| p.locally_convex)
        .map(|p| p.lambda)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.min(l))));
    let nonmonotone = first_fail
        .map(|k| points[k..].iter().any(|p| p.locally_convex))
        .unwrap_or(false);

    Ok(ConvexityReport {
        family: path.family,
        penalty: path.penalty,
        gamma: (path.penalty != PenaltyFamily::Lasso).then_some(gamma),
        mode: path.mode,
        threshold,
        points,
        lambda_star,
        lambda_star_upper,
        smallest_convex_lambda,
        nonmonotone,
    })
}

/// `n⁻¹ X_S' W X_S` for design columns `cols` (`W = I` when `w` is `None`).
pub fn weighted_gram(design: &StandardizedDesign, cols: &[usize], w: Option<&[f64]>) -> Array2<f64> {
    let k = cols.len();
    let n = design.n() as f64;
    let mut m = Array2::zeros((k, k));
    for a in 0..k {
        let xa = design.column(cols[a]);
        for b in a..k {
            let xb = design.column(cols[b]);
            let s: f64 = match w {
                None => xa.iter().zip(xb).map(|(u, v)| u * v).sum(),
                Some(w) => xa
                    .iter()
                    .zip(xb)
                    .zip(w)
                    .map(|((u, v), wi)| u * v * wi)
                    .sum(),
            };
            m[[a, b]] = s / n;
            m[[b, a]] = s / n;
        }
    }
    m
}

/// Smallest eigenvalue of the full Gram matrix `n⁻¹X'X` of the penalized
/// columns.
pub fn full_gram_min_eigenvalue(design: &StandardizedDesign) -> f64 {
    let off = design.penalized_offset();
    let cols: Vec<usize> = (0..design.p()).map(|j| j + off).collect();
    min_eigenvalue(&weighted_gram(design, &cols, None))
}
