//! The quadratic-minimization instance `½xᵀΓx − hᵀx` and its factor graph.

mod edges;
pub mod io;
mod params;

use std::fmt;

pub use edges::DirectedEdgeIndex;
pub use params::{EdgeParameters, ParameterSpec};

use crate::error::{Error, Result};
use crate::matrix::{symmetrize, Matrix};
use crate::scalar::Scalar;

/// Symmetric coefficient matrix `Γ` and linear term `h`.
///
/// Immutable after construction. The directed edge index is derived from the
/// exact off-diagonal nonzero pattern of `Γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticModel<T> {
    gamma: Matrix<T>,
    h: Vec<T>,
    edges: DirectedEdgeIndex,
}

impl<T: Scalar> QuadraticModel<T> {
    /// Requires `gamma` to be square and bitwise symmetric.
    pub fn new(gamma: Matrix<T>, h: Vec<T>) -> Result<Self> {
        if !gamma.is_square() {
            return Err(Error::NotSquare {
                rows: gamma.rows(),
                cols: gamma.cols(),
            });
        }
        if gamma.rows() == 0 {
            return Err(Error::Empty);
        }
        if h.len() != gamma.rows() {
            return Err(Error::DimensionMismatch {
                expected: gamma.rows(),
                actual: h.len(),
            });
        }
        if let Some((row, col)) = gamma.first_asymmetry() {
            return Err(Error::Asymmetric { row, col });
        }
        let edges = DirectedEdgeIndex::from_matrix(&gamma);
        Ok(Self { gamma, h, edges })
    }

    /// Symmetrizes an arbitrary square matrix first.
    pub fn from_raw(raw: &Matrix<T>, h: Vec<T>) -> Result<Self> {
        Self::new(symmetrize(raw)?, h)
    }

    /// Model with `h` set to the all-ones vector.
    pub fn with_unit_h(gamma: Matrix<T>) -> Result<Self> {
        let n = gamma.rows();
        Self::new(gamma, vec![T::one(); n])
    }

    pub fn n(&self) -> usize {
        self.gamma.rows()
    }

    pub fn gamma(&self) -> &Matrix<T> {
        &self.gamma
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> T {
        self.gamma[(i, j)]
    }

    #[inline]
    pub fn diag(&self, i: usize) -> T {
        self.gamma[(i, i)]
    }

    pub fn h(&self) -> &[T] {
        &self.h
    }

    pub fn edges(&self) -> &DirectedEdgeIndex {
        &self.edges
    }

    /// Coefficient `Γ_ij` carried by directed edge `e = i → j`.
    #[inline]
    pub fn coupling(&self, e: usize) -> T {
        let (i, j) = self.edges.endpoints(e);
        self.gamma[(i, j)]
    }

    pub fn with_h(&self, h: Vec<T>) -> Result<Self> {
        Self::new(self.gamma.clone(), h)
    }

    /// `f(x) = ½xᵀΓx − hᵀx`.
    pub fn objective(&self, x: &[T]) -> T {
        T::half() * self.gamma.quadratic_form(x) - self.h.iter().zip(x).map(|(&a, &b)| a * b).sum()
    }

    /// `Γx − h`.
    pub fn residual(&self, x: &[T]) -> Vec<T> {
        self.gamma
            .mul_vec(x)
            .into_iter()
            .zip(&self.h)
            .map(|(g, &h)| g - h)
            .collect()
    }

    /// Invariant violations that make the model unusable by message passing.
    pub fn validate(&self) -> Vec<Violation> {
        validate_matrix(&self.gamma)
    }

    pub fn has_positive_diagonal(&self) -> bool {
        (0..self.n()).all(|i| self.diag(i) > T::zero())
    }
}

/// One violated model invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotSquare,
    Asymmetric { row: usize, col: usize },
    NonPositiveDiagonal(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare => write!(f, "not square"),
            Violation::Asymmetric { row, col } => write!(f, "asymmetric at ({row}, {col})"),
            Violation::NonPositiveDiagonal(i) => write!(f, "nonpositive diagonal at {i}"),
        }
    }
}

/// Reports every violated invariant of a (possibly raw) coefficient matrix.
/// An empty list means the matrix is usable by message passing.
pub fn validate_matrix<T: Scalar>(gamma: &Matrix<T>) -> Vec<Violation> {
    if !gamma.is_square() {
        return vec![Violation::NotSquare];
    }
    let n = gamma.rows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if gamma[(i, j)] != gamma[(j, i)] {
                out.push(Violation::Asymmetric { row: i, col: j });
            }
        }
    }
    for i in 0..n {
        if !(gamma[(i, i)] > T::zero()) {
            out.push(Violation::NonPositiveDiagonal(i));
        }
    }
    out
}
