use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncvpath::{fit_linear, fit_path_design, FitConfig, PathOptions, Penalty, PenaltyFamily, Solver};
use ncvpath_bench::{bench_gamma, null_design};

fn path_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("mcp_path");
    group.sample_size(10);
    for p in [50, 100, 200] {
        let design = null_design(400, p, 1);
        let opts = PathOptions::new(PenaltyFamily::Mcp).gamma(bench_gamma(&design)).nlambda(50);
        for solver in [Solver::Cd, Solver::Lla] {
            let opts = opts.clone().solver(solver);
            group.bench_with_input(BenchmarkId::new(solver.name(), p), &design, |b, d| {
                b.iter(|| fit_path_design(d, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn single_fit(c: &mut Criterion) {
    let design = null_design(500, 200, 2);
    let lmax = ncvpath::lambda_max(&design).unwrap();
    let start = ncvpath::CoefficientVector::zeros(200, ncvpath::Scale::Standardized);
    let mut group = c.benchmark_group("single_fit");
    for (name, pen) in [
        ("lasso", Penalty::lasso(0.1 * lmax).unwrap()),
        ("mcp", Penalty::mcp(0.1 * lmax, 3.0).unwrap()),
        ("scad", Penalty::scad(0.1 * lmax, 3.7).unwrap()),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| fit_linear(&design, &pen, &start, &FitConfig::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, path_solvers, single_fit);
criterion_main!(benches);
