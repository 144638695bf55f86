//! `rwmp`: solve, diagnose and explore quadratic models with reweighted
//! message passing.
//!
//! Exit codes: 0 success or convergence, 2 no convergence, 1 usage or input
//! error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rwmp::classical::direct_solve;
use rwmp::covers::{adversarial_two_cover, kronecker_double_cover, random_two_cover};
use rwmp::diagnostics::{diagnose, fmt_num, DEFAULT_R_MAX};
use rwmp::engine::{run, Schedule, DEFAULT_DELTA, DEFAULT_MAX_ITER, DEFAULT_TOL};
use rwmp::experiments::{
    c_grid, chord_error_curves, curves_csv, four_chord, quadcover_report, random_four, sweep_c,
    sweep_csv, CURVE_ITERATIONS,
};
use rwmp::model::io::{load_model, write_dense, write_matrix_market, write_vector, MatrixFormat};
use rwmp::{Model, Params};

const ERROR_REPORT_MAX_N: usize = 500;

#[derive(Parser)]
#[command(
    name = "rwmp",
    version,
    about = "Reweighted Gaussian message passing for quadratic minimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run message passing and report means and variances.
    Solve(SolveArgs),
    /// Positive definiteness, walk-summability, covers and the uniform-r certificate.
    Diagnose(DiagnoseArgs),
    /// Iteration counts over a grid of uniform reweighting parameters, as CSV.
    SweepC(SweepArgs),
    /// Regenerate the reference experiments into a directory.
    Reproduce(ReproduceArgs),
    /// Write a 2-cover of the model.
    Cover(CoverArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Matrix file (Matrix Market `.mtx`/`.mm`, otherwise dense text).
    #[arg(required_unless_present = "p", conflicts_with = "p")]
    matrix: Option<PathBuf>,
    /// Use the built-in four-node chord model with coupling p instead of a file.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// File with one h value per line (default: all ones).
    #[arg(long)]
    h: Option<PathBuf>,
    /// Matrix format; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    MatrixMarket,
    DenseText,
}

impl From<FormatArg> for MatrixFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::MatrixMarket => MatrixFormat::MatrixMarket,
            FormatArg::DenseText => MatrixFormat::DenseText,
        }
    }
}

impl ModelArgs {
    fn load(&self) -> Result<Model> {
        match (&self.matrix, self.p) {
            (_, Some(p)) => {
                let m = four_chord(p);
                match &self.h {
                    Some(h) => {
                        let text = fs::read_to_string(h)
                            .with_context(|| format!("reading {}", h.display()))?;
                        Ok(m.with_h(rwmp::model::io::parse_vector(&text)?)?)
                    }
                    None => Ok(m),
                }
            }
            (Some(path), None) => {
                let format = self
                    .format
                    .map(Into::into)
                    .unwrap_or_else(|| MatrixFormat::from_path(path));
                load_model(path, format, self.h.as_deref())
                    .with_context(|| format!("loading {}", path.display()))
            }
            (None, None) => bail!("a matrix file or --p is required"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Sync,
    Async,
    Damped,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Uniform reweighting parameter (1 is plain min-sum).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, value_enum, default_value = "sync")]
    schedule: ScheduleArg,
    /// Weight kept on the previous message by the damped schedule.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Largest r tried by the uniform-r search.
    #[arg(long, default_value_t = DEFAULT_R_MAX)]
    r_max: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    c_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    c_max: f64,
    #[arg(long, default_value_t = rwmp::experiments::DEFAULT_C_STEP)]
    c_step: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    FigChord,
    FigC,
    FigRnd,
    Quadcover,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    target: Target,
    #[arg(long, default_value = "artifacts")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverKind {
    Kronecker,
    Adversarial,
    Random,
}

#[derive(Args)]
struct CoverArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value = "kronecker")]
    kind: CoverKind,
    /// Seed for `--kind random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format for the cover matrix.
    #[arg(long, value_enum, default_value = "matrix-market")]
    out_format: FormatArg,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(args: &SolveArgs) -> Result<ExitCode> {
    let model = args.model.load()?;
    let c = Params::uniform(&model, args.c)?;
    let schedule = match args.schedule {
        ScheduleArg::Sync => Schedule::Synchronous,
        ScheduleArg::Async => Schedule::asynchronous(model.n()),
        ScheduleArg::Damped => Schedule::damped(args.delta)?,
    };
    let report = run(&model, &c, &schedule, args.tol, args.max_iter)?;
    println!("converged: {}", if report.converged { "yes" } else { "no" });
    println!("iterations: {}", report.iterations);
    if report.unbounded {
        println!("stopped: unbounded message curvature");
    }
    println!("node,mean,variance");
    for i in 0..model.n() {
        let (mean, var) = match (
            report.final_beliefs.mean(i),
            report.final_beliefs.variance(i),
        ) {
            (Some(m), Some(v)) => (fmt_num(m), fmt_num(v)),
            _ => ("nan".into(), "nan".into()),
        };
        println!("{i},{mean},{var}");
    }
    if model.n() <= ERROR_REPORT_MAX_N {
        if let (Ok(truth), Some(means)) = (direct_solve(&model), report.final_means()) {
            let err = means
                .iter()
                .zip(&truth)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            println!("error vs direct solve (2-norm): {err:e}");
        }
    }
    Ok(if report.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn sweep(args: &SweepArgs) -> Result<ExitCode> {
    let model = args.model.load()?;
    let grid = c_grid(args.c_min, args.c_max, args.c_step)?;
    let records = sweep_c(&model, &grid, args.tol, args.max_iter);
    emit(args.out.as_deref(), &sweep_csv(&records))?;
    Ok(ExitCode::SUCCESS)
}

fn reproduce(args: &ReproduceArgs) -> Result<ExitCode> {
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let write = |name: &str, text: &str| -> Result<()> {
        let path = args.out_dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    };
    match args.target {
        Target::FigChord => {
            let curves = chord_error_curves(CURVE_ITERATIONS)?;
            for c in &curves {
                let last = c
                    .errors
                    .iter()
                    .rev()
                    .find(|e| e.is_finite())
                    .copied()
                    .unwrap_or(f64::NAN);
                println!(
                    "p={} {}: reaches 1e-6: {}, final error {last:e}",
                    c.p,
                    c.algorithm,
                    if c.reaches(1e-6) { "yes" } else { "no" }
                );
            }
            write("fig_chord.csv", &curves_csv(&curves))?;
        }
        Target::FigC => {
            let grid = c_grid(-3.0, 3.0, rwmp::experiments::DEFAULT_C_STEP)?;
            write(
                "fig_c.csv",
                &sweep_csv(&sweep_c(
                    &four_chord(0.4),
                    &grid,
                    DEFAULT_TOL,
                    DEFAULT_MAX_ITER,
                )),
            )?;
        }
        Target::FigRnd => {
            let grid = c_grid(-5.0, 5.0, rwmp::experiments::DEFAULT_C_STEP)?;
            write(
                "fig_rnd.csv",
                &sweep_csv(&sweep_c(
                    &random_four(),
                    &grid,
                    DEFAULT_TOL,
                    DEFAULT_MAX_ITER,
                )),
            )?;
        }
        Target::Quadcover => {
            let text = quadcover_report();
            print!("{text}");
            write("quadcover.txt", &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cover(args: &CoverArgs) -> Result<ExitCode> {
    let model = args.model.load()?;
    let cover = match args.kind {
        CoverKind::Kronecker => kronecker_double_cover(&model),
        CoverKind::Adversarial => adversarial_two_cover(&model),
        CoverKind::Random => random_two_cover(&model, args.seed),
    };
    let text = match args.out_format {
        FormatArg::MatrixMarket => write_matrix_market(cover.model().gamma()),
        FormatArg::DenseText => write_dense(cover.model().gamma()),
    };
    emit(args.out.as_deref(), &text)?;
    if let Some(out) = &args.out {
        let h_path = out.with_extension("h.txt");
        fs::write(&h_path, write_vector(cover.model().h()))
            .with_context(|| format!("writing {}", h_path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Diagnose(a) => {
            let model = a.model.load()?;
            print!("{}", diagnose(&model, a.r_max)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepC(a) => sweep(a),
        Command::Reproduce(a) => reproduce(a),
        Command::Cover(a) => cover(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
