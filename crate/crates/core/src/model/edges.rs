use std::ops::Range;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Directed-edge enumeration of the factor graph implied by a symmetric
/// coefficient matrix.
///
/// Edges are stored in CSR order: the out-edges of node `i` occupy
/// `offsets[i]..offsets[i + 1]` and are sorted by target. Every undirected
/// edge therefore appears exactly twice, and `reverse` is an involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedEdgeIndex {
    offsets: Vec<usize>,
    source: Vec<usize>,
    target: Vec<usize>,
    reverse: Vec<usize>,
}

impl DirectedEdgeIndex {
    /// Builds the index from the exact off-diagonal nonzero pattern.
    pub fn from_matrix<T: Scalar>(gamma: &Matrix<T>) -> Self {
        let n = gamma.rows();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut source = Vec::new();
        let mut target = Vec::new();
        offsets.push(0);
        for i in 0..n {
            for j in 0..n {
                if i != j && gamma[(i, j)] != T::zero() {
                    source.push(i);
                    target.push(j);
                }
            }
            offsets.push(source.len());
        }
        Self::finish(offsets, source, target)
    }

    /// Builds the index from sorted neighbor lists, which must be symmetric.
    pub fn from_neighbors(neighbors: &[Vec<usize>]) -> Self {
        let mut offsets = vec![0];
        let mut source = Vec::new();
        let mut target = Vec::new();
        for (i, nb) in neighbors.iter().enumerate() {
            let mut nb = nb.clone();
            nb.sort_unstable();
            nb.dedup();
            for j in nb {
                source.push(i);
                target.push(j);
            }
            offsets.push(source.len());
        }
        Self::finish(offsets, source, target)
    }

    fn finish(offsets: Vec<usize>, source: Vec<usize>, target: Vec<usize>) -> Self {
        let mut idx = Self {
            offsets,
            source,
            target,
            reverse: Vec::new(),
        };
        idx.reverse = (0..idx.len())
            .map(|e| {
                idx.find(idx.target[e], idx.source[e])
                    .expect("neighbor relation must be symmetric")
            })
            .collect();
        idx
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of directed edges (twice the undirected edge count).
    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn undirected_len(&self) -> usize {
        self.len() / 2
    }

    pub fn source(&self, e: usize) -> usize {
        self.source[e]
    }

    pub fn target(&self, e: usize) -> usize {
        self.target[e]
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.source[e], self.target[e])
    }

    pub fn reverse(&self, e: usize) -> usize {
        self.reverse[e]
    }

    /// Edge ids `i → j` for `j ∈ ∂i`, sorted by `j`.
    pub fn out_edges(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Edge ids `k → i` for `k ∈ ∂i`, sorted by `k`.
    pub fn in_edges(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges(i).map(move |e| self.reverse[e])
    }

    /// Sorted neighbor list `∂i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.target[self.out_edges(i)]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|i| self.degree(i))
            .max()
            .unwrap_or(0)
    }

    /// Directed edge id of `i → j`, if present.
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.node_count() {
            return None;
        }
        let range = self.out_edges(i);
        self.target[range.clone()]
            .binary_search(&j)
            .ok()
            .map(|k| range.start + k)
    }

    /// Undirected edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn undirected(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len())
            .map(move |e| self.endpoints(e))
            .filter(|&(i, j)| i < j)
    }
}
