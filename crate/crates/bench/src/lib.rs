//! Shared inputs for the criterion benchmarks in `benches/`.

use ncvpath::convexity::full_gram_min_eigenvalue;
use ncvpath::{generate, standardize, DesignKind, Family, Signal, SimSpec, StandardizedDesign};

/// Standardized null-model design (standard normal response) of size n × p.
pub fn null_design(n: usize, p: usize, seed: u64) -> StandardizedDesign {
    let spec = SimSpec {
        n,
        p,
        design: DesignKind::Independent,
        signal: Signal::FourSpike { s: 0.0 },
        family: Family::Gaussian,
        seed,
    };
    standardize(&generate(&spec).expect("valid simulation").data).expect("non-degenerate design")
}

/// Just above the global convexity bound when n > p, else 3.
pub fn bench_gamma(design: &StandardizedDesign) -> f64 {
    let c = full_gram_min_eigenvalue(design);
    if c > 1e-8 {
        1.01 / c
    } else {
        3.0
    }
}
