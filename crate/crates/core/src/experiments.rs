//! Reference instances and the reproducible experiments built on them.

use rayon::prelude::*;

use crate::classical::direct_solve;
use crate::covers::{build_cover, CoverSpec};
use crate::dense::symmetric_eigenvalues;
use crate::diagnostics::{fmt_num, walk_summability, WALK_TOL};
use crate::engine::{run, run_with, MessageState, Schedule};
use crate::error::{Error, Result};
use crate::matrix::{norm2, Matrix};
use crate::model::{EdgeParameters, QuadraticModel};
use crate::scalar::Scalar;

/// Four-node cycle with one chord, parameterized by the coupling `p`:
///
/// ```text
///  1   p  -p  -p
///  p   1  -p   0
/// -p  -p   1  -p
/// -p   0  -p   1
/// ```
///
/// Positive definite for `p ∈ (−½, ½)`; `h` is all ones.
pub fn four_chord<T: Scalar>(p: f64) -> QuadraticModel<T> {
    let g = Matrix::from_f64_rows(&[
        &[1.0, p, -p, -p],
        &[p, 1.0, -p, 0.0],
        &[-p, -p, 1.0, -p],
        &[-p, 0.0, -p, 1.0],
    ])
    .expect("4x4 literal");
    QuadraticModel::with_unit_h(g).expect("symmetric literal")
}

/// Coupling at which min-sum variances still converge on [`four_chord`] but
/// the means do not.
pub const VARIANCE_ONLY_P: f64 = 0.39866;

/// A dense, randomly generated 4×4 positive definite instance with `h = 1`.
pub fn random_four<T: Scalar>() -> QuadraticModel<T> {
    let g = Matrix::from_f64_rows(&[
        &[45.0, 21.0, 23.0, -42.0],
        &[21.0, 83.0, 8.0, -32.0],
        &[23.0, 8.0, 14.0, -29.0],
        &[-42.0, -32.0, -29.0, 134.0],
    ])
    .expect("4x4 literal");
    QuadraticModel::with_unit_h(g).expect("symmetric literal")
}

/// Triangle with unit diagonal and every off-diagonal equal to `w`.
pub fn uniform_triangle<T: Scalar>(w: f64) -> QuadraticModel<T> {
    let g =
        Matrix::from_f64_rows(&[&[1.0, w, w], &[w, 1.0, w], &[w, w, 1.0]]).expect("3x3 literal");
    QuadraticModel::with_unit_h(g).expect("symmetric literal")
}

/// The positive definite triangle (`w = 0.6`) that has a 2-cover with a
/// negative eigenvalue.
pub fn pd_triangle<T: Scalar>() -> QuadraticModel<T> {
    uniform_triangle(0.6)
}

/// That 2-cover, written out with fibers contiguous.
pub fn pd_triangle_bad_cover_matrix<T: Scalar>() -> Matrix<T> {
    Matrix::from_f64_rows(&[
        &[1.0, 0.0, 0.6, 0.0, 0.0, 0.6],
        &[0.0, 1.0, 0.0, 0.6, 0.6, 0.0],
        &[0.6, 0.0, 1.0, 0.0, 0.6, 0.0],
        &[0.0, 0.6, 0.0, 1.0, 0.0, 0.6],
        &[0.0, 0.6, 0.6, 0.0, 1.0, 0.0],
        &[0.6, 0.0, 0.0, 0.6, 0.0, 1.0],
    ])
    .expect("6x6 literal")
}

/// `[[1, γ], [γ, 1]]` with `h = (1, 1)`.
pub fn two_node<T: Scalar>(gamma: f64) -> QuadraticModel<T> {
    let g = Matrix::from_f64_rows(&[&[1.0, gamma], &[gamma, 1.0]]).expect("2x2 literal");
    QuadraticModel::with_unit_h(g).expect("symmetric literal")
}

/// Iteration counts for one grid point of a reweighting sweep; `None` means
/// no convergence within the iteration cap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRecord {
    pub c: f64,
    pub sync_iters: Option<usize>,
    pub async_iters: Option<usize>,
}

pub const SWEEP_HEADER: &str = "c,sync_iters,async_iters";
pub const DEFAULT_C_STEP: f64 = 0.1;

/// `min, min + step, …, ≤ max`, rounded to 10 decimals, with 0 removed.
pub fn c_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || min > max {
        return Err(Error::InvalidArgument(format!(
            "invalid c grid: min {min}, max {max}, step {step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=count)
        .map(|i| ((min + i as f64 * step) * 1e10).round() / 1e10)
        .filter(|&c| c != 0.0)
        .collect();
    if grid.is_empty() {
        return Err(Error::InvalidArgument("c grid contains only 0".into()));
    }
    Ok(grid)
}

fn iterations_to_converge(
    model: &QuadraticModel<f64>,
    c: f64,
    schedule: &Schedule<f64>,
    tol: f64,
    max_iter: usize,
) -> Option<usize> {
    let params = EdgeParameters::uniform(model, c).ok()?;
    let report = run(model, &params, schedule, tol, max_iter).ok()?;
    report.converged.then_some(report.iterations)
}

/// Runs the synchronous and asynchronous schedules at every grid point, in
/// parallel. Records come back in grid order.
pub fn sweep_c(
    model: &QuadraticModel<f64>,
    grid: &[f64],
    tol: f64,
    max_iter: usize,
) -> Vec<SweepRecord> {
    let asynchronous = Schedule::asynchronous(model.n());
    grid.par_iter()
        .map(|&c| SweepRecord {
            c,
            sync_iters: iterations_to_converge(model, c, &Schedule::Synchronous, tol, max_iter),
            async_iters: iterations_to_converge(model, c, &asynchronous, tol, max_iter),
        })
        .collect()
}

fn opt(n: Option<usize>) -> String {
    n.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV with header [`SWEEP_HEADER`]; non-convergence is an empty field.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            r.c,
            opt(r.sync_iters),
            opt(r.async_iters)
        ));
    }
    out
}

/// 2-norm error of the mean estimates against the direct solution after
/// every iteration. `NaN` marks iterations with a non-decodable belief.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    pub p: f64,
    pub algorithm: &'static str,
    pub errors: Vec<f64>,
}

impl ErrorCurve {
    pub fn reaches(&self, tol: f64) -> bool {
        self.errors.iter().any(|&e| e < tol)
    }
}

pub fn error_curve(
    model: &QuadraticModel<f64>,
    c: &EdgeParameters<f64>,
    schedule: &Schedule<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let truth = direct_solve(model)?;
    let mut errors = Vec::new();
    run_with(
        model,
        c,
        schedule,
        tol,
        max_iter,
        MessageState::zeros(model),
        |view| {
            let e = match view.beliefs.means() {
                Some(m) => norm2(&m.iter().zip(&truth).map(|(a, b)| a - b).collect::<Vec<_>>()),
                None => f64::NAN,
            };
            errors.push(e);
        },
    )?;
    Ok(errors)
}

pub const CHORD_PS: [f64; 3] = [0.3, 0.398, 0.4];
pub const CURVE_ITERATIONS: usize = 200;

/// Error curves on [`four_chord`] for min-sum and for synchronous and
/// asynchronous updates with `c = 2`, at each `p` in [`CHORD_PS`].
pub fn chord_error_curves(max_iter: usize) -> Result<Vec<ErrorCurve>> {
    let mut curves = Vec::new();
    for &p in &CHORD_PS {
        let m = four_chord::<f64>(p);
        let two = EdgeParameters::uniform(&m, 2.0)?;
        let runs = [
            (
                "min-sum",
                EdgeParameters::min_sum(&m),
                Schedule::Synchronous,
            ),
            ("sync-c2", two.clone(), Schedule::Synchronous),
            ("async-c2", two, Schedule::asynchronous(m.n())),
        ];
        for (algorithm, c, schedule) in runs {
            // a tiny tolerance keeps every curve running to the cap
            let errors = error_curve(&m, &c, &schedule, f64::MIN_POSITIVE, max_iter)?;
            curves.push(ErrorCurve {
                p,
                algorithm,
                errors,
            });
        }
    }
    Ok(curves)
}

/// Long-format CSV: `p,algorithm,iteration,error`.
pub fn curves_csv(curves: &[ErrorCurve]) -> String {
    let mut out = String::from("p,algorithm,iteration,error\n");
    for c in curves {
        for (t, e) in c.errors.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", c.p, c.algorithm, t + 1, e));
        }
    }
    out
}

fn write_matrix(out: &mut String, g: &Matrix<f64>) {
    for i in 0..g.rows() {
        let row: Vec<String> = g.row(i).iter().map(|v| format!("{v:>5}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// The positive definite triangle, its bad 2-cover, and their spectra.
pub fn quadcover_report() -> String {
    let base = pd_triangle::<f64>();
    let mut spec = CoverSpec::identity(&base, 2);
    spec.set(0, 2, vec![1, 0]);
    let cover = build_cover(&base, &spec).expect("triangle cover");
    let mut out = String::from("base:\n");
    write_matrix(&mut out, base.gamma());
    out.push_str("2-cover:\n");
    write_matrix(&mut out, cover.model().gamma());
    let eig = |g: &Matrix<f64>| -> String {
        symmetric_eigenvalues(g)
            .iter()
            .map(|&v| fmt_num(v))
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push_str(&format!("base eigenvalues: {}\n", eig(base.gamma())));
    out.push_str(&format!(
        "2-cover eigenvalues: {}\n",
        eig(cover.model().gamma())
    ));
    if let Ok(w) = walk_summability(&base, WALK_TOL) {
        out.push_str(&format!("rho(|I - G|): {}\n", fmt_num(w.rho)));
    }
    out
}
