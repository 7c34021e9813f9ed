use ncvpath::simgen::generate_replicate;
use ncvpath::{generate, generate_replicates, DesignKind, Family, Signal, SimSpec};

fn spec(n: usize, p: usize, design: DesignKind, seed: u64) -> SimSpec {
    SimSpec {
        n,
        p,
        design,
        signal: Signal::FourSpike { s: 1.0 },
        family: Family::Gaussian,
        seed,
    }
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn columns(sim: &ncvpath::Simulated) -> Vec<Vec<f64>> {
    sim.data.x().columns().into_iter().map(|c| c.to_vec()).collect()
}

#[test]
fn independent_columns_are_nearly_uncorrelated() {
    for n in [100, 400, 1600] {
        let sim = generate(&spec(n, 10, DesignKind::Independent, 3)).unwrap();
        let cols = columns(&sim);
        let mut total = 0.0;
        let mut count = 0.0;
        for a in 0..10 {
            for b in (a + 1)..10 {
                let g: f64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum::<f64>() / n as f64;
                total += g;
                count += 1.0;
            }
        }
        assert!((total / count).abs() < 3.0 / (n as f64).sqrt());
    }
}

#[test]
fn equicorrelated_columns_hit_the_target() {
    let sim = generate(&spec(1000, 6, DesignKind::Equicorrelated { rho: 0.9 }, 4)).unwrap();
    let cols = columns(&sim);
    for a in 0..6 {
        for b in (a + 1)..6 {
            let r = correlation(&cols[a], &cols[b]);
            assert!((r - 0.9).abs() < 0.05, "corr({a},{b}) = {r}");
        }
    }
}

#[test]
fn replicates_are_reproducible_and_distinct() {
    let s = spec(30, 8, DesignKind::Independent, 9);
    let all = generate_replicates(&s, 3).unwrap();
    assert_eq!(all[0].data.x(), generate(&s).unwrap().data.x());
    assert_eq!(all[2].data.y(), generate_replicate(&s, 2).unwrap().data.y());
    assert_ne!(all[0].data.x(), all[1].data.x());
    let again = generate_replicates(&s, 3).unwrap();
    for (a, b) in all.iter().zip(&again) {
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.data.y(), b.data.y());
    }
}

#[test]
fn signal_kinds_have_the_requested_support() {
    let sparse = SimSpec {
        signal: Signal::SparseExp { count: 5, rate: 3.0 },
        ..spec(50, 20, DesignKind::Independent, 1)
    };
    let dense = SimSpec {
        signal: Signal::DenseNormal { count: 20, sd: 3.0 },
        ..spec(50, 20, DesignKind::Independent, 1)
    };
    assert_eq!(generate(&sparse).unwrap().beta.iter().filter(|b| **b != 0.0).count(), 5);
    assert_eq!(generate(&dense).unwrap().beta.iter().filter(|b| **b != 0.0).count(), 20);
    let spikes = generate(&spec(50, 20, DesignKind::Independent, 1)).unwrap().beta;
    let mut nonzero: Vec<f64> = spikes.into_iter().filter(|b| *b != 0.0).collect();
    nonzero.sort_by(f64::total_cmp);
    assert_eq!(nonzero, vec![-1.0, -1.0, 1.0, 1.0]);
}

#[test]
fn bad_specs_are_rejected() {
    let too_many = SimSpec {
        signal: Signal::FourSpike { s: 1.0 },
        ..spec(10, 2, DesignKind::Independent, 1)
    };
    assert!(generate(&too_many).is_err());
    let bad_rho = spec(10, 5, DesignKind::Equicorrelated { rho: 1.5 }, 1);
    assert!(generate(&bad_rho).is_err());
}
