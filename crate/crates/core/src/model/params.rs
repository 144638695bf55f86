use std::collections::HashMap;

use super::QuadraticModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How the reweighting parameters are assigned to edges.
#[derive(Clone, Debug)]
pub enum ParameterSpec<T> {
    Uniform(T),
    /// Keyed by undirected edge; either orientation `(i, j)` or `(j, i)` is
    /// accepted, but each edge may only be given once.
    PerEdge(HashMap<(usize, usize), T>),
}

/// Reweighting constants `c_ij = c_ji`, one per undirected edge, stored per
/// directed edge for constant-time access inside the update loops.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeParameters<T> {
    by_edge: Vec<T>,
}

impl<T: Scalar> EdgeParameters<T> {
    pub fn uniform(model: &QuadraticModel<T>, c: T) -> Result<Self> {
        Self::new(model, &ParameterSpec::Uniform(c))
    }

    /// The standard min-sum weights, `c ≡ 1`.
    pub fn min_sum(model: &QuadraticModel<T>) -> Self {
        Self {
            by_edge: vec![T::one(); model.edges().len()],
        }
    }

    pub fn new(model: &QuadraticModel<T>, spec: &ParameterSpec<T>) -> Result<Self> {
        let edges = model.edges();
        let mut by_edge = vec![T::zero(); edges.len()];
        match spec {
            ParameterSpec::Uniform(c) => {
                if *c == T::zero() {
                    if let Some((i, j)) = edges.undirected().next() {
                        return Err(Error::ZeroParameter(i, j));
                    }
                }
                by_edge.iter_mut().for_each(|v| *v = *c);
            }
            ParameterSpec::PerEdge(map) => {
                let mut seen = vec![false; edges.len()];
                for (&(i, j), &c) in map {
                    let e = edges.find(i, j).ok_or(Error::NotAnEdge(i, j))?;
                    let r = edges.reverse(e);
                    if seen[e] {
                        return Err(Error::InvalidArgument(format!(
                            "edge ({i}, {j}) given more than once"
                        )));
                    }
                    if c == T::zero() {
                        return Err(Error::ZeroParameter(i.min(j), i.max(j)));
                    }
                    seen[e] = true;
                    seen[r] = true;
                    by_edge[e] = c;
                    by_edge[r] = c;
                }
                if let Some(e) = seen.iter().position(|s| !s) {
                    let (i, j) = edges.endpoints(e);
                    return Err(Error::MissingEdge(i.min(j), i.max(j)));
                }
            }
        }
        Ok(Self { by_edge })
    }

    /// Parameter of the directed edge `e` (equal to that of its reverse).
    #[inline]
    pub fn get(&self, e: usize) -> T {
        self.by_edge[e]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.by_edge
    }

    /// Builds parameters directly from per-directed-edge values; used when
    /// lifting parameters to a cover.
    pub(crate) fn from_directed(by_edge: Vec<T>) -> Self {
        Self { by_edge }
    }

    pub fn all_at_least(&self, bound: T) -> bool {
        self.by_edge.iter().all(|&c| c >= bound)
    }

    pub fn all_negative(&self) -> bool {
        self.by_edge.iter().all(|&c| c < T::zero())
    }
}
