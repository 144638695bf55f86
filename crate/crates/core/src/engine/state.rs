use std::cmp::Ordering;

use crate::model::QuadraticModel;
use crate::scalar::Scalar;

/// Quadratic coefficient of a message or local subproblem.
///
/// `Unbounded` stands for `a = −∞`: the minimization that produced the
/// message was not bounded from below. It is kept out of IEEE arithmetic so
/// that it cannot leak into the linear coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curvature<T> {
    Finite(T),
    Unbounded,
}

impl<T: Scalar> Curvature<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Curvature::Finite(v) => Some(v),
            Curvature::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Curvature::Unbounded)
    }

    /// `true` for a finite, strictly positive value.
    pub fn is_positive(self) -> bool {
        matches!(self, Curvature::Finite(v) if v > T::zero())
    }

    /// Value with `Unbounded` mapped to `−∞`, for reporting only.
    pub fn to_scalar(self) -> T {
        self.finite().unwrap_or_else(T::neg_infinity)
    }
}

impl<T: Scalar> PartialOrd for Curvature<T> {
    /// `Unbounded` is below every finite value.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Curvature::Unbounded, Curvature::Unbounded) => Some(Ordering::Equal),
            (Curvature::Unbounded, Curvature::Finite(_)) => Some(Ordering::Less),
            (Curvature::Finite(_), Curvature::Unbounded) => Some(Ordering::Greater),
            (Curvature::Finite(a), Curvature::Finite(b)) => a.partial_cmp(b),
        }
    }
}

/// Messages `m_{i→j}(x_j) = ½·a_{i→j}·x_j² + b_{i→j}·x_j`, one per directed
/// edge of the model's [`DirectedEdgeIndex`](crate::model::DirectedEdgeIndex).
///
/// Normalization constants are not tracked. When `a` is unbounded the
/// matching `b` is meaningless and is stored as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageState<T> {
    pub a: Vec<Curvature<T>>,
    pub b: Vec<T>,
    pub iteration: usize,
}

impl<T: Scalar> MessageState<T> {
    /// All-zero initial messages.
    pub fn zeros(model: &QuadraticModel<T>) -> Self {
        let m = model.edges().len();
        Self {
            a: vec![Curvature::Finite(T::zero()); m],
            b: vec![T::zero(); m],
            iteration: 0,
        }
    }

    pub fn from_coefficients(a: Vec<T>, b: Vec<T>) -> Self {
        assert_eq!(a.len(), b.len());
        Self {
            a: a.into_iter().map(Curvature::Finite).collect(),
            b,
            iteration: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// A state is invalid once any message curvature is unbounded.
    pub fn is_invalid(&self) -> bool {
        self.a.iter().any(|a| a.is_unbounded())
    }

    pub fn first_unbounded(&self) -> Option<usize> {
        self.a.iter().position(|a| a.is_unbounded())
    }

    /// Finite curvatures, or `None` if any is unbounded.
    pub fn finite_a(&self) -> Option<Vec<T>> {
        self.a.iter().map(|a| a.finite()).collect()
    }

    /// `max_e max(|Δa_e|, |Δb_e|)`, infinite when either state is invalid.
    pub fn sup_change(&self, other: &Self) -> T {
        self.a_change(other).max(
            self.b
                .iter()
                .zip(&other.b)
                .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs())),
        )
    }

    /// `max_e |Δa_e|`, infinite when either state is invalid.
    pub fn a_change(&self, other: &Self) -> T {
        let mut m = T::zero();
        for (x, y) in self.a.iter().zip(&other.a) {
            match (x, y) {
                (Curvature::Finite(x), Curvature::Finite(y)) => m = m.max((*x - *y).abs()),
                _ => return T::infinity(),
            }
        }
        m
    }
}
