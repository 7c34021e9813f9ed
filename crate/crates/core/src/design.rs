//! Data container, standardization and back-transformation.
//!
//! Covariates are centered and scaled so that `Σ x_ij = 0` and
//! `n⁻¹ Σ x_ij² = 1` (population divisor). For Gaussian responses the
//! response is centered; for binomial responses it is left as 0/1 and an
//! unpenalized all-ones column is prepended at position 0.

use std::io::Read;

use ndarray::{Array1, Array2, ArrayView1, ShapeBuilder};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Binomial,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Binomial => "binomial",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Family::Gaussian),
            "binomial" => Ok(Family::Binomial),
            other => Err(Error::InvalidArgument(format!("unknown family `{other}`"))),
        }
    }
}

/// Covariates and response on the original scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Array2<f64>,
    y: Array1<f64>,
    family: Family,
    names: Vec<String>,
}

impl Dataset {
    /// Validates shapes, finiteness and (for binomial data) that every
    /// response is 0 or 1. Column variance and class balance are checked by
    /// [`standardize`].
    pub fn new(x: Array2<f64>, y: Array1<f64>, family: Family) -> Result<Self> {
        let names = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
        Self::with_names(x, y, family, names)
    }

    pub fn with_names(
        x: Array2<f64>,
        y: Array1<f64>,
        family: Family,
        names: Vec<String>,
    ) -> Result<Self> {
        let (n, p) = x.dim();
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 rows, got {n}")));
        }
        if p < 1 {
            return Err(Error::InvalidInput("need at least one covariate".into()));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if names.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: names.len(),
            });
        }
        for (i, row) in x.rows().into_iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    what: format!("column `{}`", names[j]),
                    row: i,
                });
            }
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "response".into(),
                row: i,
            });
        }
        if family == Family::Binomial {
            if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::InvalidInput(format!(
                    "binomial response must be 0 or 1, got {} at row {i}",
                    y[i]
                )));
            }
        }
        Ok(Dataset {
            x,
            y,
            family,
            names,
        })
    }

    /// Reads a CSV file with a header row. The column named `response` is the
    /// response; every other column is a covariate.
    pub fn from_csv_reader<R: Read>(reader: R, response: &str, family: Family) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let response_idx = headers
            .iter()
            .position(|h| h == response)
            .ok_or_else(|| Error::InvalidInput(format!("response column `{response}` not found")))?;
        let names: Vec<String> = headers
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != response_idx)
            .map(|(_, h)| h.clone())
            .collect();
        let p = names.len();

        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != headers.len() {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, expected {}",
                    row + 1,
                    record.len(),
                    headers.len()
                )));
            }
            for (k, field) in record.iter().enumerate() {
                let value: f64 = field.trim().parse().map_err(|_| {
                    Error::Parse(format!(
                        "row {}: `{}` in column `{}` is not a number",
                        row + 1,
                        field,
                        headers[k]
                    ))
                })?;
                if k == response_idx {
                    ys.push(value);
                } else {
                    xs.push(value);
                }
            }
        }
        let n = ys.len();
        let x = Array2::from_shape_vec((n, p), xs)
            .map_err(|e| Error::Parse(format!("malformed covariate table: {e}")))?;
        Self::with_names(x, Array1::from(ys), family, names)
    }

    pub fn from_csv_path(
        path: impl AsRef<std::path::Path>,
        response: &str,
        family: Family,
    ) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref()).map_err(|e| {
            Error::Io(format!("cannot open {}: {e}", path.as_ref().display()))
        })?;
        Self::from_csv_reader(std::io::BufReader::new(file), response, family)
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Rows selected by `rows`, in that order.
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        let x = self.x.select(ndarray::Axis(0), rows);
        let y = self.y.select(ndarray::Axis(0), rows);
        Dataset::with_names(x, y, self.family, self.names.clone())
    }

    /// Writes a header row (response first, named `response`) followed by
    /// one row per observation. Values use shortest round-trip formatting.
    pub fn to_csv_writer<W: std::io::Write>(&self, writer: W, response: &str) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec![response.to_string()];
        header.extend(self.names.iter().cloned());
        wtr.write_record(&header)?;
        for (i, row) in self.x.rows().into_iter().enumerate() {
            let mut rec = vec![self.y[i].to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Same rows with the covariate columns reordered by `order`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Dataset> {
        let x = self.x.select(ndarray::Axis(1), order);
        let names = order.iter().map(|&j| self.names[j].clone()).collect();
        Dataset::with_names(x, self.y.clone(), self.family, names)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Standardized,
    Original,
}

/// Intercept and slopes for one fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub intercept: f64,
    pub betas: Vec<f64>,
    pub scale: Scale,
}

impl CoefficientVector {
    pub fn zeros(p: usize, scale: Scale) -> Self {
        CoefficientVector {
            intercept: 0.0,
            betas: vec![0.0; p],
            scale,
        }
    }

    /// Indices of nonzero slopes.
    pub fn active_set(&self) -> Vec<usize> {
        self.betas
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn max_abs_diff(&self, other: &CoefficientVector) -> f64 {
        let d0 = (self.intercept - other.intercept).abs();
        self.betas
            .iter()
            .zip(&other.betas)
            .map(|(a, b)| (a - b).abs())
            .fold(d0, f64::max)
    }

    /// Linear predictor for original-scale rows.
    pub fn linear_predictor(&self, x: &Array2<f64>) -> Array1<f64> {
        let b = ArrayView1::from(&self.betas[..]);
        x.dot(&b) + self.intercept
    }
}

/// Standardized covariates plus the record needed to undo the transform.
///
/// For binomial data `x` has `p + 1` columns and column 0 is the
/// unpenalized intercept.
#[derive(Debug, Clone)]
pub struct StandardizedDesign {
    x: Array2<f64>,
    y: Array1<f64>,
    centers: Vec<f64>,
    scales: Vec<f64>,
    y_mean: f64,
    family: Family,
}

impl StandardizedDesign {
    /// Column-major design; each column is a contiguous slice.
    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn column(&self, j: usize) -> &[f64] {
        self.x
            .column(j)
            .to_slice()
            .expect("standardized design is stored column-major")
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of penalized covariates.
    pub fn p(&self) -> usize {
        self.centers.len()
    }

    pub fn has_intercept_column(&self) -> bool {
        self.family == Family::Binomial
    }

    /// Column index of penalized covariate `j` in `x()`.
    pub fn penalized_offset(&self) -> usize {
        usize::from(self.has_intercept_column())
    }

    /// Builds a design from columns that are already on the working scale.
    /// Used where the caller controls the columns exactly.
    pub fn from_parts(
        x: Array2<f64>,
        y: Array1<f64>,
        centers: Vec<f64>,
        scales: Vec<f64>,
        y_mean: f64,
        family: Family,
    ) -> Result<Self> {
        let (n, cols) = x.dim();
        let expected = centers.len() + usize::from(family == Family::Binomial);
        if cols != expected || scales.len() != centers.len() {
            return Err(Error::DimensionMismatch {
                expected,
                got: cols,
            });
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        let mut fx = Array2::zeros((n, cols).f());
        fx.assign(&x);
        Ok(StandardizedDesign {
            x: fx,
            y,
            centers,
            scales,
            y_mean,
            family,
        })
    }

    /// Coefficients for standardized columns mapped back to the original
    /// covariate scale, preserving the linear predictor.
    pub fn unstandardize(&self, coefs: &CoefficientVector) -> Result<CoefficientVector> {
        if coefs.scale != Scale::Standardized {
            return Err(Error::Contract(
                "unstandardize expects standardized coefficients".into(),
            ));
        }
        if coefs.betas.len() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                got: coefs.betas.len(),
            });
        }
        let betas: Vec<f64> = coefs
            .betas
            .iter()
            .zip(&self.scales)
            .map(|(b, s)| b / s)
            .collect();
        let shift: f64 = betas.iter().zip(&self.centers).map(|(b, m)| b * m).sum();
        let base = match self.family {
            Family::Gaussian => self.y_mean + coefs.intercept,
            Family::Binomial => coefs.intercept,
        };
        Ok(CoefficientVector {
            intercept: base - shift,
            betas,
            scale: Scale::Original,
        })
    }

    /// Inverse of [`unstandardize`](Self::unstandardize).
    pub fn restandardize(&self, coefs: &CoefficientVector) -> Result<CoefficientVector> {
        if coefs.scale != Scale::Original {
            return Err(Error::Contract(
                "restandardize expects original-scale coefficients".into(),
            ));
        }
        let shift: f64 = coefs.betas.iter().zip(&self.centers).map(|(b, m)| b * m).sum();
        let betas = coefs
            .betas
            .iter()
            .zip(&self.scales)
            .map(|(b, s)| b * s)
            .collect();
        let intercept = match self.family {
            Family::Gaussian => coefs.intercept + shift - self.y_mean,
            Family::Binomial => coefs.intercept + shift,
        };
        Ok(CoefficientVector {
            intercept,
            betas,
            scale: Scale::Standardized,
        })
    }
}

pub fn standardize(data: &Dataset) -> Result<StandardizedDesign> {
    let (n, p) = data.x.dim();
    let nf = n as f64;
    let offset = usize::from(data.family == Family::Binomial);
    let mut xs = Array2::<f64>::zeros((n, p + offset).f());
    if offset == 1 {
        xs.column_mut(0).fill(1.0);
    }
    let mut centers = Vec::with_capacity(p);
    let mut scales = Vec::with_capacity(p);
    for (j, col) in data.x.columns().into_iter().enumerate() {
        let mean = col.sum() / nf;
        let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        let scale = (ss / nf).sqrt();
        if !(scale > 0.0) || scale <= 1e-12 * mean.abs().max(1.0) {
            return Err(Error::ZeroVariance {
                column: data.names[j].clone(),
            });
        }
        let mut out = xs.column_mut(j + offset);
        for (o, v) in out.iter_mut().zip(col.iter()) {
            *o = (v - mean) / scale;
        }
        centers.push(mean);
        scales.push(scale);
    }
    let (y, y_mean) = match data.family {
        Family::Gaussian => {
            let m = data.y.sum() / nf;
            (data.y.mapv(|v| v - m), m)
        }
        Family::Binomial => {
            let ones = data.y.sum();
            if ones == 0.0 || ones == nf {
                return Err(Error::SingleClass);
            }
            (data.y.clone(), ones / nf)
        }
    };
    Ok(StandardizedDesign {
        x: xs,
        y,
        centers,
        scales,
        y_mean,
        family: data.family,
    })
}
