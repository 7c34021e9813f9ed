//! On-disk formats. Artifacts are pretty-printed JSON; serde_json writes
//! floats with the shortest representation that parses back to the same
//! bits, so reading an artifact recovers every value exactly.

use std::path::Path;

use ncvpath::{
    CoefficientVector, ConvexityReport, Error, Family, FitStatus, LambdaGrid, PathPoint,
    PathResult, PenaltyFamily, Result, Scale, ScaleMode, SelectionReport, Solver,
};
use serde::{Deserialize, Serialize};

pub const PATH_FORMAT: &str = "ncvpath-path";
pub const CV_FORMAT: &str = "ncvpath-cv";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub lambda: f64,
    pub intercept: f64,
    /// Original scale, in covariate order.
    pub coefficients: Vec<f64>,
    pub standardized_intercept: f64,
    pub standardized: Vec<f64>,
    pub iterations: usize,
    pub objective: f64,
    pub status: FitStatus,
    /// Smallest coordinate update denominator (absent when no penalized
    /// coordinate was updated).
    pub min_denominator: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathArtifact {
    pub format: String,
    pub version: u32,
    pub family: Family,
    pub penalty: PenaltyFamily,
    /// Absent for the lasso.
    pub gamma: Option<f64>,
    pub solver: Solver,
    pub scale_mode: ScaleMode,
    pub seed: u64,
    pub response: String,
    pub covariates: Vec<String>,
    pub n: usize,
    pub lambda_max: f64,
    pub lambda_min_ratio: f64,
    pub nlambda: usize,
    pub truncated: Option<String>,
    pub points: Vec<PointRecord>,
    pub convexity: ConvexityReport,
}

impl PathArtifact {
    pub fn new(
        path: &PathResult,
        report: ConvexityReport,
        response: &str,
        covariates: &[String],
        n: usize,
        seed: u64,
    ) -> Self {
        let points = path
            .points
            .iter()
            .map(|pt| PointRecord {
                lambda: pt.lambda,
                intercept: pt.coefs.intercept,
                coefficients: pt.coefs.betas.clone(),
                standardized_intercept: pt.standardized.intercept,
                standardized: pt.standardized.betas.clone(),
                iterations: pt.iterations,
                objective: pt.objective,
                status: pt.status,
                min_denominator: pt.min_denominator.is_finite().then_some(pt.min_denominator),
            })
            .collect();
        PathArtifact {
            format: PATH_FORMAT.into(),
            version: VERSION,
            family: path.family,
            penalty: path.penalty,
            gamma: (path.penalty != PenaltyFamily::Lasso).then_some(path.gamma),
            solver: path.solver,
            scale_mode: path.mode,
            seed,
            response: response.into(),
            covariates: covariates.to_vec(),
            n,
            lambda_max: path.grid.lambda_max,
            lambda_min_ratio: path.grid.lambda_min_ratio,
            nlambda: path.grid.count,
            truncated: path.truncated.clone(),
            points,
            convexity: report,
        }
    }

    /// Rebuilds the fitted path (enough of it for re-diagnosis).
    pub fn to_path_result(&self) -> Result<PathResult> {
        let p = self.covariates.len();
        let mut points = Vec::with_capacity(self.points.len());
        for rec in &self.points {
            if rec.coefficients.len() != p || rec.standardized.len() != p {
                return Err(Error::Parse(format!(
                    "point at lambda = {} has the wrong number of coefficients",
                    rec.lambda
                )));
            }
            points.push(PathPoint {
                lambda: rec.lambda,
                coefs: CoefficientVector {
                    intercept: rec.intercept,
                    betas: rec.coefficients.clone(),
                    scale: Scale::Original,
                },
                standardized: CoefficientVector {
                    intercept: rec.standardized_intercept,
                    betas: rec.standardized.clone(),
                    scale: Scale::Standardized,
                },
                iterations: rec.iterations,
                objective: rec.objective,
                status: rec.status,
                min_denominator: rec.min_denominator.unwrap_or(f64::INFINITY),
            });
        }
        let lambdas: Vec<f64> = points.iter().map(|p| p.lambda).collect();
        let grid = if lambdas.is_empty() {
            LambdaGrid {
                values: vec![],
                lambda_max: self.lambda_max,
                lambda_min_ratio: self.lambda_min_ratio,
                count: self.nlambda,
            }
        } else {
            LambdaGrid::from_values(lambdas).map_err(|e| Error::Parse(e.to_string()))?
        };
        Ok(PathResult {
            grid,
            points,
            penalty: self.penalty,
            gamma: self.gamma.unwrap_or(f64::INFINITY),
            family: self.family,
            mode: self.scale_mode,
            solver: self.solver,
            truncated: self.truncated.clone(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        let artifact: PathArtifact = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if artifact.format != PATH_FORMAT {
            return Err(Error::Parse(format!(
                "{}: not a path artifact (format `{}`)",
                path.display(),
                artifact.format
            )));
        }
        Ok(artifact)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvArtifact {
    pub format: String,
    pub version: u32,
    pub family: Family,
    pub penalty: PenaltyFamily,
    pub gamma: Option<f64>,
    pub solver: Solver,
    pub scale_mode: ScaleMode,
    pub response: String,
    pub n: usize,
    pub report: SelectionReport,
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Contract(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

/// Wide table: `lambda,intercept,<covariates...>` with one row per λ.
pub fn write_coef_csv(artifact: &PathArtifact, path: &Path) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    let mut header = vec!["lambda".to_string(), "intercept".to_string()];
    header.extend(artifact.covariates.iter().cloned());
    wtr.write_record(&header)?;
    for rec in &artifact.points {
        let mut row = vec![rec.lambda.to_string(), rec.intercept.to_string()];
        row.extend(rec.coefficients.iter().map(|b| b.to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
