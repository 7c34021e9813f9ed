//! Lasso, MCP and SCAD penalties and their coordinatewise minimizers.
//!
//! All thresholding rules here assume the coordinate has been standardized so
//! that `n⁻¹ x_j'x_j = 1` (linear case) or carries an explicit curvature `v_j`
//! (weighted case, `v_j = n⁻¹ x_j'W x_j`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MCP_GAMMA: f64 = 3.0;
pub const DEFAULT_SCAD_GAMMA: f64 = 3.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyFamily {
    Lasso,
    Mcp,
    Scad,
}

impl PenaltyFamily {
    pub fn default_gamma(self) -> f64 {
        match self {
            PenaltyFamily::Lasso => f64::INFINITY,
            PenaltyFamily::Mcp => DEFAULT_MCP_GAMMA,
            PenaltyFamily::Scad => DEFAULT_SCAD_GAMMA,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PenaltyFamily::Lasso => "lasso",
            PenaltyFamily::Mcp => "mcp",
            PenaltyFamily::Scad => "scad",
        }
    }
}

impl std::str::FromStr for PenaltyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lasso" => Ok(PenaltyFamily::Lasso),
            "mcp" => Ok(PenaltyFamily::Mcp),
            "scad" => Ok(PenaltyFamily::Scad),
            other => Err(Error::InvalidArgument(format!("unknown penalty `{other}`"))),
        }
    }
}

/// A penalty family together with its regularization level and shape.
///
/// `gamma` is ignored for the lasso. Construction enforces `lambda >= 0`,
/// `gamma > 1` for MCP and `gamma > 2` for SCAD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    family: PenaltyFamily,
    lambda: f64,
    gamma: f64,
}

impl Penalty {
    pub fn new(family: PenaltyFamily, lambda: f64, gamma: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidPenalty(format!(
                "lambda must be finite and nonnegative, got {lambda}"
            )));
        }
        match family {
            PenaltyFamily::Lasso => {}
            PenaltyFamily::Mcp if !(gamma > 1.0) => {
                return Err(Error::InvalidPenalty(format!(
                    "MCP requires gamma > 1, got {gamma}"
                )))
            }
            PenaltyFamily::Scad if !(gamma > 2.0) => {
                return Err(Error::InvalidPenalty(format!(
                    "SCAD requires gamma > 2, got {gamma}"
                )))
            }
            _ => {}
        }
        Ok(Penalty {
            family,
            lambda,
            gamma,
        })
    }

    pub fn lasso(lambda: f64) -> Result<Self> {
        Self::new(PenaltyFamily::Lasso, lambda, f64::INFINITY)
    }

    pub fn mcp(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(PenaltyFamily::Mcp, lambda, gamma)
    }

    pub fn scad(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(PenaltyFamily::Scad, lambda, gamma)
    }

    pub fn family(&self) -> PenaltyFamily {
        self.family
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same family and shape at a different regularization level.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.family, lambda, self.gamma)
    }

    /// Penalty value `p(θ)` for `θ >= 0`.
    pub fn value(&self, theta: f64) -> f64 {
        let theta = theta.abs();
        let (l, g) = (self.lambda, self.gamma);
        match self.family {
            PenaltyFamily::Lasso => l * theta,
            PenaltyFamily::Mcp => {
                if theta <= g * l {
                    l * theta - theta * theta / (2.0 * g)
                } else {
                    0.5 * g * l * l
                }
            }
            PenaltyFamily::Scad => {
                if theta <= l {
                    l * theta
                } else if theta <= g * l {
                    (g * l * theta - 0.5 * (theta * theta + l * l)) / (g - 1.0)
                } else {
                    l * l * (g + 1.0) / 2.0
                }
            }
        }
    }

    /// Penalty derivative `p'(θ)` for `θ > 0`.
    ///
    /// The penalties are not differentiable at the origin; `θ = 0` is a
    /// contract violation.
    pub fn derivative(&self, theta: f64) -> Result<f64> {
        if !(theta > 0.0) {
            return Err(Error::Contract(format!(
                "penalty derivative requires theta > 0, got {theta}"
            )));
        }
        let (l, g) = (self.lambda, self.gamma);
        Ok(match self.family {
            PenaltyFamily::Lasso => l,
            PenaltyFamily::Mcp => {
                if theta <= g * l {
                    l - theta / g
                } else {
                    0.0
                }
            }
            PenaltyFamily::Scad => {
                if theta <= l {
                    l
                } else if theta <= g * l {
                    (g * l - theta) / (g - 1.0)
                } else {
                    0.0
                }
            }
        })
    }

    /// Derivative with the subgradient bound `λ` at the origin, as used by
    /// the local linear approximation.
    pub(crate) fn linearization_weight(&self, theta: f64) -> f64 {
        if theta == 0.0 {
            self.lambda
        } else {
            // theta > 0 here
            self.derivative(theta.abs()).unwrap_or(self.lambda)
        }
    }

    /// Global minimizer of `½(z − β)² + p(|β|)`.
    pub fn univariate_solution(&self, z: f64) -> f64 {
        let (l, g) = (self.lambda, self.gamma);
        match self.family {
            PenaltyFamily::Lasso => soft_threshold(z, l),
            PenaltyFamily::Mcp => {
                if z.abs() <= g * l {
                    soft_threshold(z, l) / (1.0 - 1.0 / g)
                } else {
                    z
                }
            }
            PenaltyFamily::Scad => {
                if z.abs() <= 2.0 * l {
                    soft_threshold(z, l)
                } else if z.abs() <= g * l {
                    soft_threshold(z, g * l / (g - 1.0)) / (1.0 - 1.0 / (g - 1.0))
                } else {
                    z
                }
            }
        }
    }

    /// Fixed-scale update: minimizer of `½vβ² − zβ + p(|β|)`.
    ///
    /// Requires `γ > 1/v` (MCP) or `γ > 1 + 1/v` (SCAD); otherwise the
    /// subproblem is not convex and its minimizer jumps discontinuously in `z`.
    pub fn weighted_update(&self, z: f64, v: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::Contract(format!(
                "weighted update requires v > 0, got {v}"
            )));
        }
        let (l, g) = (self.lambda, self.gamma);
        match self.family {
            PenaltyFamily::Lasso => Ok(soft_threshold(z, l) / v),
            PenaltyFamily::Mcp => {
                if !(g > 1.0 / v) {
                    return Err(Error::NonconvexSubproblem {
                        gamma: g,
                        v,
                        min_v: 1.0 / g,
                    });
                }
                if z.abs() <= v * g * l {
                    Ok(soft_threshold(z, l) / (v - 1.0 / g))
                } else {
                    Ok(z / v)
                }
            }
            PenaltyFamily::Scad => {
                if !(g > 1.0 + 1.0 / v) {
                    return Err(Error::NonconvexSubproblem {
                        gamma: g,
                        v,
                        min_v: 1.0 / (g - 1.0),
                    });
                }
                if z.abs() <= l * (v + 1.0) {
                    Ok(soft_threshold(z, l) / v)
                } else if z.abs() <= v * g * l {
                    Ok(soft_threshold(z, g * l / (g - 1.0)) / (v - 1.0 / (g - 1.0)))
                } else {
                    Ok(z / v)
                }
            }
        }
    }

    /// Adaptively rescaled update `f(z, λ, γ) / v`.
    ///
    /// This minimizes `½vβ² − zβ + p(v|β|)/v`; for MCP that is the fixed-scale
    /// objective with shape `γ/v`.
    pub fn adaptive_rescaled_update(&self, z: f64, v: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::Contract(format!(
                "rescaled update requires v > 0, got {v}"
            )));
        }
        Ok(self.univariate_solution(z) / v)
    }

    /// Denominator of the active branch of the fixed-scale update. Positive
    /// exactly when the coordinatewise subproblem is strictly convex.
    pub fn update_denominator(&self, v: f64) -> f64 {
        match self.family {
            PenaltyFamily::Lasso => v,
            PenaltyFamily::Mcp => v - 1.0 / self.gamma,
            PenaltyFamily::Scad => v - 1.0 / (self.gamma - 1.0),
        }
    }
}

/// Soft-thresholding operator `S(z, λ)`.
#[inline]
pub fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

#[cfg(test)]
pub(crate) mod oracle {
    /// Minimizes a convex univariate function on `[lo, hi]` by successive grid
    /// refinement. Independent of the closed forms it is used to check.
    pub fn grid_argmin(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        let steps = 2000;
        let mut best = lo;
        for _ in 0..6 {
            let h = (hi - lo) / steps as f64;
            let mut best_val = f64::INFINITY;
            for k in 0..=steps {
                let b = lo + h * k as f64;
                let val = f(b);
                if val < best_val {
                    best_val = val;
                    best = b;
                }
            }
            lo = best - 2.0 * h;
            hi = best + 2.0 * h;
        }
        best
    }

    /// Trapezoid integral of `g` on `[0, t]`.
    pub fn integrate(g: impl Fn(f64) -> f64, t: f64, steps: usize) -> f64 {
        let h = t / steps as f64;
        let mut acc = 0.5 * (g(0.0) + g(t));
        for k in 1..steps {
            acc += g(h * k as f64);
        }
        acc * h
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::{grid_argmin, integrate};
    use super::*;
    use proptest::prelude::*;

    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{} vs {} (tol {})", a, b, $tol);
        }};
    }

    fn deriv_for_integration(p: Penalty) -> impl Fn(f64) -> f64 {
        move |t| {
            if t <= 0.0 {
                p.lambda()
            } else {
                p.derivative(t).unwrap()
            }
        }
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(1.0, 1.0), 0.0);
    }

    #[test]
    fn penalty_values_match_integrated_derivative() {
        let mcp = Penalty::mcp(1.0, 3.0).unwrap();
        let integral = integrate(deriv_for_integration(mcp), 5.0, 200_000);
        assert_close!(integral, 1.5, 1e-6);
        assert_close!(mcp.value(5.0), 1.5, 1e-12);
        assert_eq!(mcp.value(0.0), 0.0);

        let scad = Penalty::scad(1.0, 3.7).unwrap();
        let integral = integrate(deriv_for_integration(scad), 10.0, 200_000);
        let expected = 1.0 * (3.7 * 3.7 - 1.0) / (2.0 * (3.7 - 1.0));
        assert_close!(integral, expected, 1e-6);
        assert_close!(scad.value(10.0), expected, 1e-12);
        assert_close!(scad.value(10.0), 2.35, 1e-12);
    }

    #[test]
    fn derivative_examples() {
        let mcp = Penalty::mcp(1.0, 3.0).unwrap();
        assert_eq!(mcp.derivative(3.0).unwrap(), 0.0);
        let scad = Penalty::scad(1.0, 3.7).unwrap();
        assert_eq!(scad.derivative(0.5).unwrap(), 1.0);
        let h = 1e-6;
        let fd = (scad.value(2.0 + h) - scad.value(2.0 - h)) / (2.0 * h);
        assert_close!(fd, 0.629_629_629_6, 1e-8);
        assert_close!(scad.derivative(2.0).unwrap(), fd, 1e-8);
        assert!(matches!(mcp.derivative(0.0), Err(Error::Contract(_))));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(Penalty::mcp(1.0, 1.0).is_err());
        assert!(Penalty::scad(1.0, 2.0).is_err());
        assert!(Penalty::lasso(-0.1).is_err());
        assert!(Penalty::mcp(f64::NAN, 3.0).is_err());
        assert!(Penalty::lasso(0.0).is_ok());
    }

    fn univariate_oracle(p: Penalty, z: f64) -> f64 {
        let r = z.abs() + 1.0;
        grid_argmin(|b| 0.5 * (z - b) * (z - b) + p.value(b.abs()), -r, r)
    }

    #[test]
    fn univariate_examples_match_grid_oracle() {
        let mcp = Penalty::mcp(1.0, 3.0).unwrap();
        let expected = univariate_oracle(mcp, 2.0);
        assert_close!(expected, 1.5, 1e-5);
        assert_close!(mcp.univariate_solution(2.0), 1.5, 1e-12);
        assert_eq!(mcp.univariate_solution(5.0), 5.0);

        let scad = Penalty::scad(1.0, 3.7).unwrap();
        let expected = univariate_oracle(scad, 3.0);
        assert_close!(expected, 2.588_235, 1e-5);
        assert_close!(scad.univariate_solution(3.0), 2.588_235_294, 1e-8);
        let expected = univariate_oracle(scad, 1.5);
        assert_close!(expected, 0.5, 1e-5);
        assert_close!(scad.univariate_solution(1.5), 0.5, 1e-12);
    }

    #[test]
    fn weighted_update_examples() {
        let mcp = Penalty::mcp(0.1, 8.0).unwrap();
        let oracle = grid_argmin(
            |b| 0.5 * 0.25 * b * b - 0.15 * b + mcp.value(b.abs()),
            -2.0,
            2.0,
        );
        assert_close!(oracle, 0.4, 1e-5);
        assert_close!(mcp.weighted_update(0.15, 0.25).unwrap(), 0.4, 1e-12);

        for p in [
            Penalty::lasso(0.1).unwrap(),
            Penalty::mcp(0.1, 8.0).unwrap(),
            Penalty::scad(0.1, 8.0).unwrap(),
        ] {
            assert_eq!(p.weighted_update(0.0, 0.25).unwrap(), 0.0);
        }

        let bad = Penalty::mcp(0.1, 3.7).unwrap();
        for z in [0.0, 0.05, 0.5] {
            assert!(matches!(
                bad.weighted_update(z, 0.25),
                Err(Error::NonconvexSubproblem { .. })
            ));
        }
        let bad = Penalty::scad(0.1, 4.9).unwrap();
        assert!(bad.weighted_update(0.1, 0.25).is_err());
        assert!(Penalty::scad(0.1, 5.1).unwrap().weighted_update(0.1, 0.25).is_ok());
    }

    #[test]
    fn adaptive_update_examples() {
        let mcp = Penalty::mcp(0.1, 3.0).unwrap();
        let f = univariate_oracle(mcp, 0.15);
        assert_close!(f, 0.075, 1e-5);
        assert_close!(mcp.adaptive_rescaled_update(0.15, 0.25).unwrap(), 0.3, 1e-12);
        assert_eq!(mcp.adaptive_rescaled_update(0.0, 0.25).unwrap(), 0.0);
        for z in [-3.0, -0.2, 0.05, 0.29, 2.0] {
            assert_eq!(
                mcp.adaptive_rescaled_update(z, 1.0).unwrap(),
                mcp.univariate_solution(z)
            );
        }
    }

    #[test]
    fn adaptive_mcp_equals_fixed_scale_with_rescaled_gamma() {
        let (l, g) = (0.1, 3.0);
        let mcp = Penalty::mcp(l, g).unwrap();
        for v in [0.1, 0.2, 0.25] {
            let star = Penalty::mcp(l, g / v).unwrap();
            for z in [-0.5, -0.12, 0.0, 0.07, 0.15, 0.31, 1.0] {
                assert_close!(
                    mcp.adaptive_rescaled_update(z, v).unwrap(),
                    star.weighted_update(z, v).unwrap(),
                    1e-12
                );
            }
        }
    }

    #[test]
    fn breakpoints_are_continuous() {
        for p in [
            Penalty::mcp(0.7, 2.5).unwrap(),
            Penalty::scad(0.7, 3.7).unwrap(),
        ] {
            let (l, g) = (p.lambda(), p.gamma());
            let mut breaks = vec![g * l];
            if p.family() == PenaltyFamily::Scad {
                breaks.push(l);
            }
            for b in breaks {
                let left = p.value(b * (1.0 - 1e-14));
                let right = p.value(b * (1.0 + 1e-14));
                assert_close!(left, right, 1e-12);
                let zl = p.univariate_solution(b * (1.0 - 1e-14));
                let zr = p.univariate_solution(b * (1.0 + 1e-14));
                assert_close!(zl, zr, 1e-10);
            }
        }
    }

    #[test]
    fn gamma_limits() {
        let l = 0.5;
        for z in [-2.0, -0.6, -0.3, 0.0, 0.4, 0.55, 1.7] {
            let big_mcp = Penalty::mcp(l, 1e9).unwrap().univariate_solution(z);
            let big_scad = Penalty::scad(l, 1e9).unwrap().univariate_solution(z);
            assert_close!(big_mcp, soft_threshold(z, l), 1e-8);
            assert_close!(big_scad, soft_threshold(z, l), 1e-8);
            if (z.abs() - l).abs() > 1e-3 {
                let near_one = Penalty::mcp(l, 1.0 + 1e-9).unwrap().univariate_solution(z);
                let hard = if z.abs() > l { z } else { 0.0 };
                assert_close!(near_one, hard, 1e-5);
            }
        }
    }

    fn arb_penalty() -> impl Strategy<Value = Penalty> {
        (0usize..3, 0.01f64..2.0, 0.0f64..8.0).prop_map(|(f, l, g)| match f {
            0 => Penalty::lasso(l).unwrap(),
            1 => Penalty::mcp(l, 1.05 + g).unwrap(),
            _ => Penalty::scad(l, 2.05 + g).unwrap(),
        })
    }

    proptest! {
        #[test]
        fn solution_shrinks_and_is_odd(p in arb_penalty(), z in -20.0f64..20.0) {
            let b = p.univariate_solution(z);
            prop_assert!(b.abs() <= z.abs() + 1e-12);
            prop_assert_eq!(p.univariate_solution(-z), -b);
            prop_assert!(b == 0.0 || b.signum() == z.signum());
            if p.family() != PenaltyFamily::Lasso && z.abs() > p.gamma() * p.lambda() {
                prop_assert_eq!(b, z);
            }
        }

        #[test]
        fn derivative_matches_finite_differences(p in arb_penalty(), t in 0.001f64..30.0) {
            let (l, g) = (p.lambda(), p.gamma());
            let h = 1e-6;
            let near = |b: f64| (t - b).abs() < 10.0 * h;
            prop_assume!(!near(l) && !near(g * l) && t > 10.0 * h);
            let fd = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
            prop_assert!((fd - p.derivative(t).unwrap()).abs() < 1e-6);
        }
    }
}
