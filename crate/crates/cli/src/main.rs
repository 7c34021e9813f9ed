mod artifact;
mod cli;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ncvpath::{
    cross_validate, diagnose_path, fit_path_design, generate_replicates, standardize, time_paths,
    BenchConfig, BinomialLoss, ConvexityReport, CvOptions, Dataset, DesignKind, Error, Family,
    PathOptions, PenaltyFamily, Result, ScaleMode, Signal, SimSpec, Solver,
};

use artifact::{write_coef_csv, write_json, CvArtifact, PathArtifact, CV_FORMAT, VERSION};
use cli::{BenchArgs, Cli, Command, CvArgs, DiagnoseArgs, FitArgs, ModelArgs, SimulateArgs};

/// Process exit status for each error class.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_)
        | Error::Parse(_)
        | Error::InvalidInput(_)
        | Error::ZeroVariance { .. }
        | Error::SingleClass
        | Error::NonFinite { .. }
        | Error::DimensionMismatch { .. } => 2,
        Error::Degenerate(_) | Error::Contract(_) => 3,
        Error::InvalidArgument(_) | Error::InvalidPenalty(_) | Error::NonconvexSubproblem { .. } => {
            4
        }
    }
}

enum Failure {
    Error(Error),
    /// Reported after the artifact has been written.
    NoConvergence,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

struct Model {
    data: Dataset,
    opts: PathOptions,
}

fn load_model(args: &ModelArgs) -> Result<Model> {
    let family: Family = args.family.parse()?;
    let penalty: PenaltyFamily = args.penalty.parse()?;
    let solver: Solver = args.solver.parse()?;
    let mode: ScaleMode = args.scale_mode.parse()?;
    if let Some(r) = args.lambda_min_ratio {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "--lambda-min-ratio must lie in (0, 1), got {r}"
            )));
        }
    }
    if args.nlambda < 2 {
        return Err(Error::InvalidArgument("--nlambda must be at least 2".into()));
    }
    if family == Family::Binomial && solver == Solver::Lla {
        return Err(Error::InvalidArgument(
            "--solver lla is available for gaussian data only".into(),
        ));
    }
    let mut opts = PathOptions::new(penalty)
        .mode(mode)
        .solver(solver)
        .nlambda(args.nlambda);
    if let Some(g) = args.gamma {
        opts = opts.gamma(g);
    }
    if let Some(r) = args.lambda_min_ratio {
        opts = opts.lambda_min_ratio(r);
    }
    // flag combinations are validated before the data are read
    ncvpath::Penalty::new(penalty, 0.0, opts.gamma)?;
    if family == Family::Binomial && mode == ScaleMode::Fixed {
        ncvpath::cd_logistic::check_fixed_scale_feasible(penalty, opts.gamma)?;
    }
    let data = Dataset::from_csv_path(&args.data, &args.response, family)?;
    Ok(Model { data, opts })
}

fn run_fit(args: &FitArgs) -> std::result::Result<(), Failure> {
    let m = load_model(&args.model)?;
    let design = standardize(&m.data)?;
    let path = fit_path_design(&design, &m.opts)?;
    let report = diagnose_path(&path, &design)?;
    let art = PathArtifact::new(
        &path,
        report,
        &args.model.response,
        m.data.names(),
        m.data.n(),
        args.model.seed,
    );
    write_json(&art, &args.out)?;
    if let Some(csv) = &args.coef_csv {
        write_coef_csv(&art, csv)?;
    }
    if let Some(reason) = &path.truncated {
        eprintln!("note: path truncated ({reason})");
    }
    if !path.any_converged() {
        return Err(Failure::NoConvergence);
    }
    Ok(())
}

fn run_cv(args: &CvArgs) -> std::result::Result<(), Failure> {
    if args.folds < 2 {
        return Err(Error::InvalidArgument(format!("--folds must be at least 2, got {}", args.folds)).into());
    }
    let binomial_loss = match args.cv_loss.as_str() {
        "misclassification" => BinomialLoss::Misclassification,
        "deviance" => BinomialLoss::Deviance,
        other => {
            return Err(Error::InvalidArgument(format!("unknown --cv-loss `{other}`")).into())
        }
    };
    let m = load_model(&args.model)?;
    let cv = CvOptions {
        folds: args.folds,
        seed: args.model.seed,
        binomial_loss,
    };
    let report = cross_validate(&m.data, &m.opts, &cv)?;
    let art = CvArtifact {
        format: CV_FORMAT.into(),
        version: VERSION,
        family: m.data.family(),
        penalty: m.opts.penalty,
        gamma: (m.opts.penalty != PenaltyFamily::Lasso).then_some(m.opts.gamma),
        solver: m.opts.solver,
        scale_mode: m.opts.mode,
        response: args.model.response.clone(),
        n: m.data.n(),
        report,
    };
    write_json(&art, &args.out)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "none".into())
}

fn render_report(report: &ConvexityReport, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "family: {}", report.family.name())?;
    writeln!(out, "penalty: {}", report.penalty.name())?;
    writeln!(out, "gamma: {}", fmt_opt(report.gamma))?;
    writeln!(out, "scale_mode: {}", report.mode.name())?;
    writeln!(out, "threshold: {}", report.threshold)?;
    writeln!(out, "lambda_star: {}", fmt_opt(report.lambda_star))?;
    writeln!(out, "lambda_star_upper: {}", fmt_opt(report.lambda_star_upper))?;
    writeln!(out, "smallest_convex_lambda: {}", fmt_opt(report.smallest_convex_lambda))?;
    writeln!(out, "nonmonotone: {}", report.nonmonotone)?;
    writeln!(out)?;
    writeln!(out, "{:>14} {:>7} {:>9} {:>14} convex", "lambda", "active", "augmented", "c_star")?;
    for p in &report.points {
        writeln!(
            out,
            "{:>14.6e} {:>7} {:>9} {:>14} {}",
            p.lambda,
            p.active.len(),
            p.augmented.len(),
            p.c_star.map(|c| format!("{c:.6e}")).unwrap_or_else(|| "-".into()),
            if p.locally_convex { "yes" } else { "no" }
        )?;
    }
    Ok(())
}

fn write_report_csv(report: &ConvexityReport, path: &std::path::Path) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["lambda", "active", "augmented", "c_star", "locally_convex"])?;
    for p in &report.points {
        wtr.write_record([
            p.lambda.to_string(),
            p.active.len().to_string(),
            p.augmented.len().to_string(),
            p.c_star.map(|c| c.to_string()).unwrap_or_default(),
            p.locally_convex.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn run_diagnose(args: &DiagnoseArgs) -> std::result::Result<(), Failure> {
    let art = PathArtifact::read(&args.artifact)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    render_report(&art.convexity, &mut out).map_err(Error::from)?;
    if let Some(csv) = &args.csv {
        write_report_csv(&art.convexity, csv)?;
    }
    if let Some(data_path) = &args.data {
        let data = Dataset::from_csv_path(data_path, &art.response, art.family)?;
        if data.names() != art.covariates.as_slice() {
            return Err(Error::InvalidInput(
                "data columns differ from those recorded in the artifact".into(),
            )
            .into());
        }
        let design = standardize(&data)?;
        let recomputed = diagnose_path(&art.to_path_result()?, &design)?;
        if recomputed != art.convexity {
            let at = recomputed
                .points
                .iter()
                .zip(&art.convexity.points)
                .position(|(a, b)| a != b)
                .map(|k| format!(" (first difference at grid point {k})"))
                .unwrap_or_default();
            return Err(Error::Contract(format!(
                "recomputed convexity report differs from the stored one{at}"
            ))
            .into());
        }
        writeln!(out, "\nrecomputed report matches").map_err(Error::from)?;
    }
    Ok(())
}

fn write_truth(sim: &ncvpath::Simulated, path: &std::path::Path) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["covariate", "beta"])?;
    for (name, b) in sim.data.names().iter().zip(&sim.beta) {
        wtr.write_record([name.clone(), b.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

fn run_simulate(args: &SimulateArgs) -> std::result::Result<(), Failure> {
    let family: Family = args.family.parse()?;
    let signal = match args.signal.as_str() {
        "four-spike" => Signal::FourSpike { s: args.s },
        "sparse-exp" => Signal::SparseExp {
            count: args.count,
            rate: args.rate,
        },
        "dense-normal" => Signal::DenseNormal {
            count: args.count,
            sd: args.sd,
        },
        other => {
            return Err(Error::InvalidArgument(format!("unknown --signal `{other}`")).into())
        }
    };
    let spec = SimSpec {
        n: args.n,
        p: args.p,
        design: if args.rho == 0.0 {
            DesignKind::Independent
        } else {
            DesignKind::Equicorrelated { rho: args.rho }
        },
        signal,
        family,
        seed: args.seed,
    };
    let sims = generate_replicates(&spec, args.replicates)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", args.out_dir.display())))?;
    for (r, sim) in sims.iter().enumerate() {
        let data_path = args.out_dir.join(format!("data_{r}.csv"));
        let file = fs::File::create(&data_path)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", data_path.display())))?;
        sim.data.to_csv_writer(std::io::BufWriter::new(file), "y")?;
        write_truth(sim, &args.out_dir.join(format!("truth_{r}.csv")))?;
    }
    Ok(())
}

fn run_bench(args: &BenchArgs) -> std::result::Result<(), Failure> {
    let family: Family = args.family.parse()?;
    let solvers = args
        .solvers
        .iter()
        .map(|s| s.parse::<Solver>())
        .collect::<Result<Vec<_>>>()?;
    let mut configs = Vec::new();
    for &rho in &args.rho {
        for &p in &args.p {
            configs.push(BenchConfig {
                n: args.n,
                p,
                rho,
                family,
            });
        }
    }
    let table = time_paths(&configs, &solvers, args.reps, args.seed, args.nlambda)?;
    let file = fs::File::create(&args.out)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", args.out.display())))?;
    table.to_csv_writer(std::io::BufWriter::new(file))?;
    for s in &table.slopes {
        println!(
            "slope n={} rho={} {} {}: {:.3}",
            s.n,
            s.rho,
            s.family.name(),
            s.solver.name(),
            s.slope
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Fit(a) => run_fit(a),
        Command::Cv(a) => run_cv(a),
        Command::Diagnose(a) => run_diagnose(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::NoConvergence) => {
            eprintln!("error: no lambda value converged");
            ExitCode::from(3)
        }
    }
}
