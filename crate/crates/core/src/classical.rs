//! Direct and classical iterative solvers, the doubled system that turns
//! Jacobi into Gauss-Seidel, and the linear system satisfied by the mean
//! messages once the variances have converged.

use crate::dense;
use crate::engine::{self, async_edge_order, local_terms, Curvature, MessageState};
use crate::error::{Error, Result};
use crate::matrix::{norm2, Matrix};
use crate::model::{EdgeParameters, QuadraticModel};
use crate::scalar::{DenseScalar, Scalar};

/// Ground-truth `Γ⁻¹h` by dense LU.
pub fn direct_solve<T: DenseScalar>(model: &QuadraticModel<T>) -> Result<Vec<T>> {
    dense::lu_solve(model.gamma(), model.h())
}

/// Iterates `x^0, x^1, …` of a classical solver and `‖Γx^t − h‖₂` for each.
#[derive(Clone, Debug)]
pub struct IterateTrace<T> {
    pub iterates: Vec<Vec<T>>,
    pub residuals: Vec<T>,
    pub converged: bool,
}

impl<T: Scalar> IterateTrace<T> {
    fn start(model: &QuadraticModel<T>, x0: Vec<T>) -> Self {
        Self {
            residuals: vec![norm2(&model.residual(&x0))],
            iterates: vec![x0],
            converged: false,
        }
    }

    fn push(&mut self, model: &QuadraticModel<T>, x: Vec<T>) {
        self.residuals.push(norm2(&model.residual(&x)));
        self.iterates.push(x);
    }

    pub fn last(&self) -> &[T] {
        self.iterates.last().expect("trace holds x^0")
    }

    /// Number of completed iterations.
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }

    /// `(x^t + x^{t−1}) / 2` for `t ≥ 1`.
    pub fn averaged(&self, t: usize) -> Vec<T> {
        assert!(t >= 1 && t < self.iterates.len());
        self.iterates[t]
            .iter()
            .zip(&self.iterates[t - 1])
            .map(|(&a, &b)| (a + b) * T::half())
            .collect()
    }
}

fn check_diagonal<T: Scalar>(model: &QuadraticModel<T>) -> Result<()> {
    match (0..model.n()).find(|&j| model.diag(j) == T::zero()) {
        Some(j) => Err(Error::NonPositiveDiagonal(j)),
        None => Ok(()),
    }
}

fn check_len<T>(x: &[T], n: usize) -> Result<()> {
    if x.len() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: n,
            actual: x.len(),
        })
    }
}

/// `(h_j − Σ_{k≠j} Γ_jk x_k) / Γ_jj`, summing in index order.
#[inline]
fn relax<T: Scalar>(model: &QuadraticModel<T>, x: &[T], j: usize) -> T {
    let row = model.gamma().row(j);
    let mut acc = model.h()[j];
    for (k, (&g, &xk)) in row.iter().zip(x).enumerate() {
        if k != j {
            acc -= g * xk;
        }
    }
    acc / row[j]
}

pub fn jacobi_step<T: Scalar>(model: &QuadraticModel<T>, x: &[T]) -> Vec<T> {
    (0..model.n()).map(|j| relax(model, x, j)).collect()
}

/// One Gauss-Seidel sweep in `order`, updating `x` in place.
pub fn gauss_seidel_sweep<T: Scalar>(model: &QuadraticModel<T>, x: &mut [T], order: &[usize]) {
    for &j in order {
        x[j] = relax(model, x, j);
    }
}

fn change<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

/// Jacobi iteration; converged once `‖x^t − x^{t−1}‖_∞ ≤ tol`.
pub fn jacobi_run<T: Scalar>(
    model: &QuadraticModel<T>,
    x0: &[T],
    tol: T,
    max_iter: usize,
) -> Result<IterateTrace<T>> {
    check_diagonal(model)?;
    check_len(x0, model.n())?;
    let mut trace = IterateTrace::start(model, x0.to_vec());
    for _ in 0..max_iter {
        let next = jacobi_step(model, trace.last());
        let delta = change(&next, trace.last());
        trace.push(model, next);
        if delta <= tol {
            trace.converged = true;
            break;
        }
    }
    Ok(trace)
}

/// Gauss-Seidel; one iteration is one full sweep over `order`.
pub fn gauss_seidel_run<T: Scalar>(
    model: &QuadraticModel<T>,
    x0: &[T],
    order: &[usize],
    tol: T,
    max_iter: usize,
) -> Result<IterateTrace<T>> {
    check_diagonal(model)?;
    check_len(x0, model.n())?;
    if !engine::is_permutation(order, model.n()) {
        return Err(Error::InvalidArgument(
            "sweep order is not a permutation".into(),
        ));
    }
    let mut trace = IterateTrace::start(model, x0.to_vec());
    for _ in 0..max_iter {
        let mut next = trace.last().to_vec();
        gauss_seidel_sweep(model, &mut next, order);
        let delta = change(&next, trace.last());
        trace.push(model, next);
        if delta <= tol {
            trace.converged = true;
            break;
        }
    }
    Ok(trace)
}

/// `Γ' = [[D, Γ − D], [Γ − D, D]]` with `h' = [h; h]`, where `D = diag(Γ)`.
pub fn double_model<T: Scalar>(model: &QuadraticModel<T>) -> QuadraticModel<T> {
    let n = model.n();
    let g = Matrix::from_fn(2 * n, 2 * n, |r, s| {
        let (i, j) = (r % n, s % n);
        let same_block = (r < n) == (s < n);
        match (same_block, i == j) {
            (true, true) => model.diag(i),
            (true, false) | (false, true) => T::zero(),
            (false, false) => model.entry(i, j),
        }
    });
    let h = (0..2 * n).map(|r| model.h()[r % n]).collect();
    QuadraticModel::new(g, h).expect("doubled matrix is symmetric")
}

/// Largest deviation observed by a dual-route check and whether it stayed
/// within tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Agreement<T> {
    pub holds: bool,
    pub max_deviation: T,
}

fn scaled_dev<T: Scalar>(a: T, b: T) -> T {
    (a - b).abs() / T::one().max(a.abs()).max(b.abs())
}

/// Runs Jacobi on `model` and Gauss-Seidel in order `0..2n` on
/// [`double_model`] from `y^0 = [x^0; x^0]`, and checks
/// `y^t = [x^{2t−1}; x^{2t}]` for `t = 1..=steps` to a relative 1e−12.
pub fn jacobi_gs_embedding_check<T: Scalar>(
    model: &QuadraticModel<T>,
    x0: &[T],
    steps: usize,
) -> Result<Agreement<T>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    check_diagonal(model)?;
    check_len(x0, model.n())?;
    let n = model.n();
    let doubled = double_model(model);
    let order: Vec<usize> = (0..2 * n).collect();

    let mut jac = vec![x0.to_vec()];
    for _ in 0..2 * steps {
        let next = jacobi_step(model, jac.last().expect("nonempty"));
        jac.push(next);
    }
    let mut y: Vec<T> = x0.iter().chain(x0).copied().collect();
    let mut worst = T::zero();
    for t in 1..=steps {
        gauss_seidel_sweep(&doubled, &mut y, &order);
        for i in 0..n {
            worst = worst
                .max(scaled_dev(y[i], jac[2 * t - 1][i]))
                .max(scaled_dev(y[n + i], jac[2 * t][i]));
        }
    }
    Ok(Agreement {
        holds: worst <= T::lit(1e-12),
        max_deviation: worst,
    })
}

/// `M b = d` over directed edges, satisfied by every fixed point `b*` of the
/// mean updates once the curvatures are frozen at `a*`.
#[derive(Clone, Debug)]
pub struct MeanSystem<T> {
    pub m: Matrix<T>,
    pub d: Vec<T>,
}

impl<T: Scalar> MeanSystem<T> {
    /// `‖M b − d‖_∞`.
    pub fn residual(&self, b: &[T]) -> T {
        self.m
            .mul_vec(b)
            .iter()
            .zip(&self.d)
            .fold(T::zero(), |acc, (&mb, &d)| acc.max((mb - d).abs()))
    }

    /// One Gauss-Seidel sweep over the rows in `order`.
    pub fn gauss_seidel_sweep(&self, b: &mut [T], order: &[usize]) {
        for &r in order {
            let row = self.m.row(r);
            let mut acc = self.d[r];
            for (k, (&mk, &bk)) in row.iter().zip(b.iter()).enumerate() {
                if k != r {
                    acc -= mk * bk;
                }
            }
            b[r] = acc / row[r];
        }
    }
}

/// Builds `M` and `d` from converged curvatures:
/// `M_{ij,ij} = A*_{i\j}`, `M_{ij,ki} = c_ki Γ_ij / c_ij` for `k ∈ ∂i∖j`,
/// `M_{ij,ji} = (c_ij − 1) Γ_ij / c_ij`, `d_ij = h_i Γ_ij / c_ij`.
pub fn build_mean_system<T: Scalar>(
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    a_star: &MessageState<T>,
) -> Result<MeanSystem<T>> {
    if let Some(e) = a_star.first_unbounded() {
        return Err(Error::UnboundedMessage(e));
    }
    let edges = model.edges();
    let m_len = edges.len();
    let mut m = Matrix::zeros(m_len, m_len);
    let mut d = vec![T::zero(); m_len];
    for e in 0..m_len {
        let i = edges.source(e);
        let back = edges.reverse(e);
        let g = model.coupling(e) / c.get(e);
        match local_terms(a_star, model, c, e).0 {
            Curvature::Finite(a) => m[(e, e)] = a,
            Curvature::Unbounded => return Err(Error::UnboundedMessage(e)),
        }
        for k in edges.in_edges(i) {
            m[(e, k)] = if k == back {
                (c.get(k) - T::one()) * g
            } else {
                c.get(k) * g
            };
        }
        d[e] = model.h()[i] * g;
    }
    Ok(MeanSystem { m, d })
}

/// Compares one engine mean sweep (curvatures from `a_star`, linear terms
/// from `state`) with one Gauss-Seidel sweep on the mean system in the
/// matching directed-edge order, to a relative 1e−12.
pub fn mean_sweep_equivalence_check<T: Scalar>(
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    a_star: &MessageState<T>,
    state: &MessageState<T>,
    order: &[usize],
) -> Result<Agreement<T>> {
    if !engine::is_permutation(order, model.n()) {
        return Err(Error::InvalidArgument(
            "sweep order is not a permutation".into(),
        ));
    }
    let system = build_mean_system(model, c, a_star)?;
    let start = MessageState {
        a: a_star.a.clone(),
        b: state.b.clone(),
        iteration: state.iteration,
    };
    let via_engine = engine::mean_sweep(&start, model, c, order);
    let mut via_gs = state.b.clone();
    system.gauss_seidel_sweep(&mut via_gs, &async_edge_order(model, order));
    let worst = via_engine
        .b
        .iter()
        .zip(&via_gs)
        .fold(T::zero(), |m, (&x, &y)| m.max(scaled_dev(x, y)));
    Ok(Agreement {
        holds: worst <= T::lit(1e-12),
        max_deviation: worst,
    })
}
