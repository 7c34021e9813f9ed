//! Wall-clock comparison of coordinate descent and LLA path fits.
//!
//! Data follow the null model (standard normal response, or fair-coin
//! Bernoulli for binomial) so the timing is not driven by the signal. MCP's
//! γ is set to `1.01 / c_*`, where `c_*` is the smallest eigenvalue of the
//! full Gram matrix; this makes the linear objective convex at every λ. When
//! `p ≥ n` that eigenvalue is zero and γ falls back to the default, in which
//! case the two paths are only compared on the locally convex part of the
//! grid.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cd_logistic::ScaleMode;
use crate::convexity::{diagnose_path, full_gram_min_eigenvalue};
use crate::design::{standardize, Family};
use crate::error::{Error, Result};
use crate::path::{fit_path_design, PathOptions, PathResult, Solver};
use crate::penalties::{PenaltyFamily, DEFAULT_MCP_GAMMA};
use crate::simgen::{generate_replicate, DesignKind, Signal, SimSpec};

/// Gram eigenvalues at or below this count as singular.
pub const SINGULAR_EIGENVALUE: f64 = 1e-8;
/// Maximum coefficient difference allowed between CD and LLA paths.
pub const AGREEMENT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    pub family: Family,
    pub solver: Solver,
    /// Median γ over the accepted replicates.
    pub gamma: f64,
    pub accepted: usize,
    /// Replicates dropped for non-convergence or CD/LLA disagreement.
    pub excluded: usize,
    pub median_seconds: f64,
    /// Largest CD/LLA coefficient difference seen on accepted replicates.
    pub max_path_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub n: usize,
    pub rho: f64,
    pub family: Family,
    pub solver: Solver,
    /// Least-squares slope of log(time) on log(p).
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingTable {
    pub rows: Vec<TimingRow>,
    pub slopes: Vec<SlopeEstimate>,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Least-squares slope of `ys` on `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Largest coefficient difference over the first `len` points of two paths.
fn path_diff(a: &PathResult, b: &PathResult, keep: impl Fn(usize) -> bool) -> f64 {
    a.points
        .iter()
        .zip(&b.points)
        .enumerate()
        .filter(|(k, _)| keep(*k))
        .map(|(_, (x, y))| x.standardized.max_abs_diff(&y.standardized))
        .fold(0.0, f64::max)
}

struct RepOutcome {
    gamma: f64,
    seconds: Vec<Option<f64>>,
    diff: Option<f64>,
}

fn run_rep(
    cfg: &BenchConfig,
    solvers: &[Solver],
    seed: u64,
    stream: u64,
    nlambda: usize,
) -> Result<RepOutcome> {
    let spec = SimSpec {
        n: cfg.n,
        p: cfg.p,
        design: if cfg.rho == 0.0 {
            DesignKind::Independent
        } else {
            DesignKind::Equicorrelated { rho: cfg.rho }
        },
        signal: Signal::FourSpike { s: 0.0 },
        family: cfg.family,
        seed,
    };
    let data = generate_replicate(&spec, stream)?.data;
    let design = standardize(&data)?;
    let c_star = full_gram_min_eigenvalue(&design);
    let singular = c_star <= SINGULAR_EIGENVALUE;
    let gamma = if singular { DEFAULT_MCP_GAMMA } else { 1.01 / c_star };
    let base = PathOptions::new(PenaltyFamily::Mcp)
        .gamma(gamma)
        .mode(ScaleMode::Adaptive)
        .nlambda(nlambda);

    let mut seconds = Vec::with_capacity(solvers.len());
    let mut paths = Vec::with_capacity(solvers.len());
    for &solver in solvers {
        let opts = base.clone().solver(solver);
        let start = Instant::now();
        let path = fit_path_design(&design, &opts)?;
        let elapsed = start.elapsed().as_secs_f64();
        let ok = path.truncated.is_none() && path.points.iter().all(|p| p.status.converged());
        seconds.push(ok.then_some(elapsed));
        paths.push(path);
    }

    let mut diff = None;
    if let (Some(cd), Some(lla)) = (
        solvers.iter().position(|s| *s == Solver::Cd),
        solvers.iter().position(|s| *s == Solver::Lla),
    ) {
        let d = if singular {
            let report = diagnose_path(&paths[cd], &design)?;
            let cutoff = report
                .points
                .iter()
                .position(|p| !p.locally_convex)
                .unwrap_or(report.points.len());
            path_diff(&paths[cd], &paths[lla], |k| k < cutoff)
        } else {
            path_diff(&paths[cd], &paths[lla], |_| true)
        };
        if d >= AGREEMENT_TOL {
            seconds.iter_mut().for_each(|s| *s = None);
        }
        diff = Some(d);
    }
    Ok(RepOutcome {
        gamma,
        seconds,
        diff,
    })
}

/// Times `reps` fresh data sets per configuration for every solver.
///
/// Replicate `r` of configuration `c` uses simulation stream
/// `(c << 32) | r`. Fits run one at a time.
pub fn time_paths(
    configs: &[BenchConfig],
    solvers: &[Solver],
    reps: usize,
    seed: u64,
    nlambda: usize,
) -> Result<TimingTable> {
    if solvers.is_empty() {
        return Err(Error::InvalidArgument("no solver selected".into()));
    }
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be positive".into()));
    }
    for cfg in configs {
        if cfg.family == Family::Binomial && solvers.contains(&Solver::Lla) {
            return Err(Error::InvalidArgument(
                "the LLA solver is implemented for linear models only".into(),
            ));
        }
    }

    let mut rows = Vec::new();
    for (c, cfg) in configs.iter().enumerate() {
        let mut outcomes = Vec::with_capacity(reps);
        for r in 0..reps {
            outcomes.push(run_rep(cfg, solvers, seed, ((c as u64) << 32) | r as u64, nlambda)?);
        }
        for (s, &solver) in solvers.iter().enumerate() {
            let accepted: Vec<&RepOutcome> =
                outcomes.iter().filter(|o| o.seconds[s].is_some()).collect();
            let times: Vec<f64> = accepted.iter().filter_map(|o| o.seconds[s]).collect();
            let gammas: Vec<f64> = accepted.iter().map(|o| o.gamma).collect();
            rows.push(TimingRow {
                n: cfg.n,
                p: cfg.p,
                rho: cfg.rho,
                family: cfg.family,
                solver,
                gamma: median(&gammas).unwrap_or(f64::NAN),
                accepted: times.len(),
                excluded: reps - times.len(),
                median_seconds: median(&times).unwrap_or(f64::NAN),
                max_path_diff: accepted
                    .iter()
                    .filter_map(|o| o.diff)
                    .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d)))),
            });
        }
    }

    let mut slopes = Vec::new();
    let mut seen: Vec<(usize, u64, Family, Solver)> = Vec::new();
    for row in &rows {
        let key = (row.n, row.rho.to_bits(), row.family, row.solver);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let group: Vec<&TimingRow> = rows
            .iter()
            .filter(|r| {
                (r.n, r.rho.to_bits(), r.family, r.solver) == key && r.median_seconds > 0.0
            })
            .collect();
        let xs: Vec<f64> = group.iter().map(|r| (r.p as f64).ln()).collect();
        let ys: Vec<f64> = group.iter().map(|r| r.median_seconds.ln()).collect();
        if let Some(slope) = ls_slope(&xs, &ys) {
            slopes.push(SlopeEstimate {
                n: row.n,
                rho: row.rho,
                family: row.family,
                solver: row.solver,
                slope,
            });
        }
    }
    Ok(TimingTable { rows, slopes })
}

impl TimingTable {
    /// Delimited rows for external plotting.
    pub fn to_csv_writer<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record([
            "n",
            "p",
            "rho",
            "family",
            "solver",
            "gamma",
            "accepted",
            "excluded",
            "median_seconds",
            "max_path_diff",
        ])?;
        for r in &self.rows {
            wtr.write_record([
                r.n.to_string(),
                r.p.to_string(),
                r.rho.to_string(),
                r.family.name().to_string(),
                r.solver.name().to_string(),
                r.gamma.to_string(),
                r.accepted.to_string(),
                r.excluded.to_string(),
                r.median_seconds.to_string(),
                r.max_path_diff.map(|d| d.to_string()).unwrap_or_default(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn slope_of_power_law() {
        let xs: Vec<f64> = [50.0f64, 100.0, 200.0].iter().map(|p| p.ln()).collect();
        let ys: Vec<f64> = [50.0f64, 100.0, 200.0].iter().map(|p| (3e-4 * p).ln()).collect();
        assert!((ls_slope(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ls_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn smoke() {
        let cfg = BenchConfig {
            n: 60,
            p: 10,
            rho: 0.0,
            family: Family::Gaussian,
        };
        let t = time_paths(&[cfg], &[Solver::Cd, Solver::Lla], 1, 3, 20).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].accepted, 1);
        assert!(t.rows[0].max_path_diff.unwrap() < AGREEMENT_TOL);
    }

    #[test]
    fn logistic_lla_rejected() {
        let cfg = BenchConfig {
            n: 60,
            p: 10,
            rho: 0.0,
            family: Family::Binomial,
        };
        assert!(time_paths(&[cfg], &[Solver::Lla], 3, 0, 10).is_err());
    }
}
