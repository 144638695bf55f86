//! Perron roots, walk-summability and scaled diagonal dominance.

use crate::dense::min_eigenvalue;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::QuadraticModel;
use crate::scalar::{DenseScalar, Scalar};

pub const WALK_TOL: f64 = 1e-9;
pub const POWER_MAX_ITER: usize = 100_000;

/// Perron root and a strictly positive vector attaining it on each
/// connected component.
#[derive(Clone, Debug, PartialEq)]
pub struct Perron<T> {
    pub rho: T,
    pub vector: Vec<T>,
}

fn power_tol<T: Scalar>() -> T {
    T::epsilon() * T::lit(1e3)
}

fn components<T: Scalar>(a: &Matrix<T>) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut comp = vec![s];
        label[s] = id;
        let mut head = 0;
        while head < comp.len() {
            let u = comp[head];
            head += 1;
            for v in 0..n {
                if label[v] == usize::MAX
                    && v != u
                    && (a[(u, v)] != T::zero() || a[(v, u)] != T::zero())
                {
                    label[v] = id;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Power iteration on `A + I` restricted to each connected component of the
/// support graph, stopped when the Collatz-Wielandt bounds
/// `min (Bx)_i/x_i ≤ ϱ(B) ≤ max (Bx)_i/x_i` are within `tol`.
pub fn perron<T: Scalar>(a: &Matrix<T>, tol: T, max_iter: usize) -> Result<Perron<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            if !(a[(i, j)] >= T::zero()) {
                return Err(Error::NegativeEntry(i, j));
            }
        }
    }
    let mut vector = vec![T::one(); n];
    let mut rho = T::zero();
    for comp in components(a) {
        let mut x = vec![T::one(); comp.len()];
        let mut bounds = (T::zero(), T::infinity());
        let mut done = false;
        for _ in 0..max_iter {
            let y: Vec<T> = comp
                .iter()
                .enumerate()
                .map(|(p, &u)| {
                    x[p] + comp
                        .iter()
                        .zip(&x)
                        .map(|(&v, &xv)| a[(u, v)] * xv)
                        .sum::<T>()
                })
                .collect();
            let (lo, hi) =
                y.iter()
                    .zip(&x)
                    .fold((T::infinity(), T::zero()), |(lo, hi), (&yi, &xi)| {
                        let r = yi / xi;
                        (lo.min(r), hi.max(r))
                    });
            bounds = (lo, hi);
            let scale = y.iter().copied().fold(T::zero(), T::max);
            x = y.into_iter().map(|v| v / scale).collect();
            if hi - lo <= tol {
                done = true;
                break;
            }
        }
        let estimate = (bounds.0 + bounds.1) * T::half() - T::one();
        if !done {
            return Err(Error::NoConvergence {
                iterations: max_iter,
                estimate: estimate.to_f64_lossy(),
            });
        }
        rho = rho.max(estimate);
        for (p, &u) in comp.iter().enumerate() {
            vector[u] = x[p];
        }
    }
    Ok(Perron { rho, vector })
}

/// Spectral radius of an entrywise nonnegative matrix.
pub fn spectral_radius_nonneg<T: Scalar>(a: &Matrix<T>, tol: T, max_iter: usize) -> Result<T> {
    perron(a, tol, max_iter).map(|p| p.rho)
}

fn check_diagonal<T: Scalar>(model: &QuadraticModel<T>) -> Result<()> {
    match (0..model.n()).find(|&i| !(model.diag(i) > T::zero())) {
        Some(i) => Err(Error::NonPositiveDiagonal(i)),
        None => Ok(()),
    }
}

/// `D^{-1/2} Γ D^{-1/2}` with `h` scaled by `D^{-1/2}`.
pub fn normalized<T: Scalar>(model: &QuadraticModel<T>) -> Result<QuadraticModel<T>> {
    check_diagonal(model)?;
    let d: Vec<T> = (0..model.n())
        .map(|i| T::one() / model.diag(i).sqrt())
        .collect();
    let g = Matrix::from_fn(model.n(), model.n(), |i, j| {
        if i == j {
            T::one()
        } else {
            model.entry(i, j) * (d[i] * d[j])
        }
    });
    let h = model.h().iter().zip(&d).map(|(&h, &s)| h * s).collect();
    QuadraticModel::new(g, h)
}

/// `|I − D^{-1/2} Γ D^{-1/2}|`, entrywise.
pub fn walk_matrix<T: Scalar>(model: &QuadraticModel<T>) -> Result<Matrix<T>> {
    let g = normalized(model)?;
    Ok(Matrix::from_fn(model.n(), model.n(), |i, j| {
        if i == j {
            T::zero()
        } else {
            g.entry(i, j).abs()
        }
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// `rho` within the tolerance of 1.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkSummability<T> {
    pub verdict: Verdict,
    pub rho: T,
}

impl<T> WalkSummability<T> {
    pub fn is_walk_summable(&self) -> bool {
        self.verdict == Verdict::Yes
    }
}

/// Walk-summable when `ϱ(|I − D^{-1/2} Γ D^{-1/2}|) < 1 − tol`; not
/// walk-summable when it exceeds `1 + tol`.
pub fn walk_summability<T: Scalar>(
    model: &QuadraticModel<T>,
    tol: T,
) -> Result<WalkSummability<T>> {
    let rho = spectral_radius_nonneg(&walk_matrix(model)?, power_tol(), POWER_MAX_ITER)?;
    let verdict = if rho < T::one() - tol {
        Verdict::Yes
    } else if rho > T::one() + tol {
        Verdict::No
    } else {
        Verdict::Indeterminate
    };
    Ok(WalkSummability { verdict, rho })
}

/// Checks `Γ_ii w_i > Σ_{j≠i} |Γ_ij| w_j` for every `i`.
pub fn is_sdd_witness<T: Scalar>(model: &QuadraticModel<T>, w: &[T]) -> bool {
    w.len() == model.n()
        && w.iter().all(|&v| v > T::zero())
        && (0..model.n()).all(|i| {
            let off: T = model
                .edges()
                .neighbors(i)
                .iter()
                .map(|&j| model.entry(i, j).abs() * w[j])
                .sum();
            model.diag(i).abs() * w[i] > off
        })
}

/// A scaled-diagonal-dominance witness `w = D^{-1/2} x` from the Perron
/// vector `x` of the walk matrix, normalized to max 1, if it satisfies every
/// strict inequality.
pub fn sdd_witness<T: Scalar>(model: &QuadraticModel<T>) -> Option<Vec<T>> {
    let p = perron(&walk_matrix(model).ok()?, power_tol(), POWER_MAX_ITER).ok()?;
    let mut w: Vec<T> = p
        .vector
        .iter()
        .enumerate()
        .map(|(i, &x)| x / model.diag(i).sqrt())
        .collect();
    let top = w.iter().copied().fold(T::zero(), T::max);
    w.iter_mut().for_each(|v| *v /= top);
    is_sdd_witness(model, &w).then_some(w)
}

/// Minimum eigenvalue by dense symmetric eigensolve, and whether it is
/// positive.
pub fn positive_definite_check<T: DenseScalar>(model: &QuadraticModel<T>) -> (bool, T) {
    let l = min_eigenvalue(model.gamma());
    (l > T::zero(), l)
}

/// The unit vector `z` on the adversarial 2-cover built from the Perron
/// vector `x` of `|I − Γ|`: `z_(v, copy) = ±x_v / √2`, sign flipping with
/// the copy. For unit-diagonal `Γ`, `zᵀ Γ̃ z = 1 − ϱ(|I − Γ|)`.
pub fn adversarial_witness<T: Scalar>(model: &QuadraticModel<T>) -> Result<Vec<T>> {
    let p = perron(&walk_matrix(model)?, power_tol(), POWER_MAX_ITER)?;
    let norm = (T::two() * p.vector.iter().map(|&v| v * v).sum::<T>()).sqrt();
    Ok(p.vector
        .iter()
        .flat_map(|&v| [v / norm, -v / norm])
        .collect())
}
