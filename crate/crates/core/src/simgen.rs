//! Seeded synthetic data.
//!
//! Every replicate draws from its own ChaCha8 stream: the generator is
//! seeded with `SimSpec::seed` and replicate `r` uses stream `r`. Within a
//! replicate the draws happen in a fixed order (true coefficients, then the
//! covariates column by column, then the responses), so a spec always
//! produces the same bits on every platform.

use ndarray::{Array1, Array2};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Exp, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{Dataset, Family};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    Independent,
    /// Every pair of covariates has correlation `rho`.
    Equicorrelated { rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    /// Four nonzero coefficients `+s, +s, −s, −s` at random positions.
    FourSpike { s: f64 },
    /// `count` coefficients with exponential magnitudes and random signs.
    SparseExp { count: usize, rate: f64 },
    /// `count` coefficients drawn from `N(0, sd²)`.
    DenseNormal { count: usize, sd: f64 },
}

impl Signal {
    pub fn count(&self) -> usize {
        match *self {
            Signal::FourSpike { .. } => 4,
            Signal::SparseExp { count, .. } | Signal::DenseNormal { count, .. } => count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub n: usize,
    pub p: usize,
    pub design: DesignKind,
    pub signal: Signal,
    pub family: Family,
    pub seed: u64,
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.p < 1 {
            return Err(Error::InvalidInput("n and p must be at least 1".into()));
        }
        if let DesignKind::Equicorrelated { rho } = self.design {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::InvalidInput(format!("rho must lie in [0, 1), got {rho}")));
            }
        }
        let count = self.signal.count();
        if count > self.p {
            return Err(Error::InvalidInput(format!(
                "signal needs {count} nonzero coefficients but p = {}",
                self.p
            )));
        }
        match self.signal {
            Signal::FourSpike { s } if !s.is_finite() => {
                Err(Error::InvalidInput("spike size must be finite".into()))
            }
            Signal::SparseExp { rate, .. } if !(rate > 0.0 && rate.is_finite()) => {
                Err(Error::InvalidInput("exponential rate must be positive".into()))
            }
            Signal::DenseNormal { sd, .. } if !(sd >= 0.0 && sd.is_finite()) => {
                Err(Error::InvalidInput("normal sd must be nonnegative".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub data: Dataset,
    /// True coefficients (no intercept).
    pub beta: Vec<f64>,
}

fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

fn draw_beta(spec: &SimSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut beta = vec![0.0; spec.p];
    let positions = sample(rng, spec.p, spec.signal.count()).into_vec();
    match spec.signal {
        Signal::FourSpike { s } => {
            for (k, &j) in positions.iter().enumerate() {
                beta[j] = if k < 2 { s } else { -s };
            }
        }
        Signal::SparseExp { rate, .. } => {
            let exp = Exp::new(rate).expect("validated rate");
            for &j in &positions {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                beta[j] = sign * exp.sample(rng);
            }
        }
        Signal::DenseNormal { sd, .. } => {
            let normal = Normal::new(0.0, sd).expect("validated sd");
            for &j in &positions {
                beta[j] = normal.sample(rng);
            }
        }
    }
    beta
}

/// One replicate of `spec`, drawn from stream `replicate`.
pub fn generate_replicate(spec: &SimSpec, replicate: u64) -> Result<Simulated> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.p);
    let mut rng = replicate_rng(spec.seed, replicate);
    let beta = draw_beta(spec, &mut rng);

    let mut x = Array2::<f64>::zeros((n, p));
    match spec.design {
        DesignKind::Independent => {
            for j in 0..p {
                for i in 0..n {
                    x[[i, j]] = StandardNormal.sample(&mut rng);
                }
            }
        }
        DesignKind::Equicorrelated { rho } => {
            let shared: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let (a, b) = (rho.sqrt(), (1.0 - rho).sqrt());
            for j in 0..p {
                for i in 0..n {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x[[i, j]] = a * shared[i] + b * z;
                }
            }
        }
    }

    let eta = x.dot(&Array1::from(beta.clone()));
    let y = match spec.family {
        Family::Gaussian => eta.mapv(|e| {
            let noise: f64 = StandardNormal.sample(&mut rng);
            e + noise
        }),
        Family::Binomial => eta.mapv(|e| {
            let pi = 1.0 / (1.0 + (-e).exp());
            f64::from(Bernoulli::new(pi).expect("probability").sample(&mut rng) as u8)
        }),
    };
    Ok(Simulated {
        data: Dataset::new(x, y, spec.family)?,
        beta,
    })
}

/// Replicate 0 of `spec`.
pub fn generate(spec: &SimSpec) -> Result<Simulated> {
    generate_replicate(spec, 0)
}

/// Replicates `0..count`, generated in parallel and returned in order.
pub fn generate_replicates(spec: &SimSpec, count: usize) -> Result<Vec<Simulated>> {
    spec.validate()?;
    (0..count as u64)
        .into_par_iter()
        .map(|r| generate_replicate(spec, r))
        .collect()
}
