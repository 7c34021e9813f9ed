use ncvpath::{time_paths, BenchConfig, Family, Solver};

#[test]
fn timing_table_has_one_row_per_configuration_and_solver() {
    let configs: Vec<BenchConfig> = [10, 20]
        .iter()
        .map(|&p| BenchConfig {
            n: 40,
            p,
            rho: 0.0,
            family: Family::Gaussian,
        })
        .collect();
    let one = time_paths(&configs, &[Solver::Cd, Solver::Lla], 1, 3, 20).unwrap();
    let five = time_paths(&configs, &[Solver::Cd, Solver::Lla], 5, 3, 20).unwrap();
    assert_eq!(one.rows.len(), 4);
    assert_eq!(five.rows.len(), 4);
    assert_eq!(one.slopes.len(), 2);
    for (a, b) in one.rows.iter().zip(&five.rows) {
        assert_eq!((a.p, a.solver), (b.p, b.solver));
        assert!(a.median_seconds > 0.0 && b.median_seconds > 0.0);
        assert_eq!(b.accepted + b.excluded, 5);
        assert!(a.gamma.is_finite() && a.gamma > 1.0);
    }
    let mut csv = Vec::new();
    five.to_csv_writer(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 5);
}
