#![allow(dead_code)]

use ncvpath::{Dataset, Family};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    Distribution::<f64>::sample(&StandardNormal, rng)
}

/// Random design with a few true effects. Binomial responses are drawn from
/// the logistic model.
pub fn random_data(n: usize, p: usize, family: Family, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Array2::from_shape_fn((n, p), |_| normal(&mut rng) * 2.0 + 1.0);
    let beta: Vec<f64> = (0..p).map(|j| if j < 3 { 0.6 - 0.4 * j as f64 } else { 0.0 }).collect();
    let y = Array1::from_shape_fn(n, |i| {
        let eta: f64 = (0..p).map(|j| x[[i, j]] * beta[j]).sum();
        match family {
            Family::Gaussian => eta + normal(&mut rng),
            Family::Binomial => {
                let prob = 1.0 / (1.0 + (-eta).exp());
                (rng.random::<f64>() < prob) as u8 as f64
            }
        }
    });
    Dataset::new(x, y, family).unwrap()
}

/// Columns centered and scaled to unit mean square, plus their means and
/// scales.
pub struct Standardized {
    pub x: Vec<Vec<f64>>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

pub fn standardize_columns(data: &Dataset) -> Standardized {
    let n = data.n() as f64;
    let mut out = Standardized {
        x: vec![],
        means: vec![],
        scales: vec![],
    };
    for col in data.x().columns() {
        let mean = col.sum() / n;
        let scale = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        out.x.push(col.iter().map(|v| (v - mean) / scale).collect());
        out.means.push(mean);
        out.scales.push(scale);
    }
    out
}

pub fn soft(z: f64, t: f64) -> f64 {
    z.signum() * (z.abs() - t).max(0.0)
}
