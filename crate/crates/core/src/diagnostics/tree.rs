//! Explicit computation trees and exact elimination on them.
//!
//! The depth-`t` tree rooted at `r` unrolls `t` rounds of reweighted message
//! passing. Each tree node carries a weight `w` (the product of multipliers
//! on its path to the root); its potential is `w` times the base node
//! potential and the edge to its parent carries `w·Γ/c` for the base edge it
//! was reached through. The subtree realizing `m_{k→i}` has a child per
//! `l ∈ ∂k \ i` with multiplier `c_lk`, plus a backtracking child for `i`
//! with multiplier `c_ki − 1`, dropped when that is zero.

use std::collections::VecDeque;

use crate::engine::Curvature;
use crate::matrix::Matrix;
use crate::model::{EdgeParameters, QuadraticModel};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode<T> {
    pub origin: usize,
    pub parent: Option<usize>,
    pub weight: T,
    pub level: usize,
    /// Diagonal entry `w·Γ_kk`.
    pub diag: T,
    /// Linear term `w·h_k`.
    pub linear: T,
    /// Entry shared with the parent, `w·Γ_ki/c_ki`; zero at the root.
    pub coupling: T,
}

/// Tree nodes in breadth-first order; node 0 is the root.
#[derive(Clone, Debug, PartialEq)]
pub struct ComputationTree<T> {
    nodes: Vec<TreeNode<T>>,
    depth: usize,
}

/// Root min-marginal coefficients and the tree matrix's smallest eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeSolution<T> {
    pub curvature: Curvature<T>,
    pub linear: T,
    pub lambda_min: T,
}

/// Builds the depth-`depth` computation tree rooted at `root`.
pub fn build_computation_tree<T: Scalar>(
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    root: usize,
    depth: usize,
) -> ComputationTree<T> {
    let edges = model.edges();
    let mut nodes = vec![TreeNode {
        origin: root,
        parent: None,
        weight: T::one(),
        level: 0,
        diag: model.diag(root),
        linear: model.h()[root],
        coupling: T::zero(),
    }];
    // (tree node, base edge k → i it realizes, rounds left)
    let mut queue = VecDeque::new();
    let push = |nodes: &mut Vec<TreeNode<T>>, parent: usize, e: usize, weight: T, rounds: usize| {
        let k = edges.source(e);
        let idx = nodes.len();
        nodes.push(TreeNode {
            origin: k,
            parent: Some(parent),
            weight,
            level: nodes[parent].level + 1,
            diag: weight * model.diag(k),
            linear: weight * model.h()[k],
            coupling: weight * model.coupling(e) / c.get(e),
        });
        (idx, e, rounds)
    };
    if depth >= 1 {
        for e in edges.in_edges(root) {
            queue.push_back(push(&mut nodes, 0, e, c.get(e), depth));
        }
    }
    while let Some((node, e, rounds)) = queue.pop_front() {
        if rounds < 2 {
            continue;
        }
        let w = nodes[node].weight;
        let (k, i) = edges.endpoints(e);
        for l in edges.in_edges(k) {
            if edges.source(l) == i {
                let back = c.get(e) - T::one();
                if back != T::zero() {
                    queue.push_back(push(&mut nodes, node, l, w * back, rounds - 1));
                }
            } else {
                queue.push_back(push(&mut nodes, node, l, w * c.get(l), rounds - 1));
            }
        }
    }
    ComputationTree { nodes, depth }
}

impl<T: Scalar> ComputationTree<T> {
    pub fn nodes(&self) -> &[TreeNode<T>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn root_origin(&self) -> usize {
        self.nodes[0].origin
    }

    /// The tree as a dense quadratic model.
    pub fn to_model(&self) -> QuadraticModel<T> {
        let n = self.nodes.len();
        let mut g = Matrix::zeros(n, n);
        for (v, node) in self.nodes.iter().enumerate() {
            g[(v, v)] = node.diag;
            if let Some(p) = node.parent {
                g[(v, p)] = node.coupling;
                g[(p, v)] = node.coupling;
            }
        }
        let h = self.nodes.iter().map(|n| n.linear).collect();
        QuadraticModel::new(g, h).expect("tree matrix is symmetric")
    }

    /// Number of eigenvalues of the tree matrix below `sigma`, by counting
    /// negative pivots of a leaf-to-root factorization of `T − σI`.
    pub fn count_below(&self, sigma: T) -> usize {
        let tiny = T::min_positive_value();
        let mut d: Vec<T> = self.nodes.iter().map(|n| n.diag - sigma).collect();
        let mut negatives = 0;
        for v in (0..self.nodes.len()).rev() {
            if d[v] == T::zero() {
                d[v] = -tiny;
            }
            if d[v] < T::zero() {
                negatives += 1;
            }
            if let Some(p) = self.nodes[v].parent {
                let e = self.nodes[v].coupling;
                let dv = d[v];
                d[p] -= e * e / dv;
            }
        }
        negatives
    }

    /// Smallest eigenvalue of the tree matrix by bisection on
    /// [`count_below`](Self::count_below), bracketed by Geršgorin discs.
    pub fn lambda_min(&self) -> T {
        let mut radius = vec![T::zero(); self.nodes.len()];
        for (v, node) in self.nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                radius[v] += node.coupling.abs();
                radius[p] += node.coupling.abs();
            }
        }
        let mut lo = self
            .nodes
            .iter()
            .zip(&radius)
            .map(|(n, &r)| n.diag - r)
            .fold(T::infinity(), T::min);
        let mut hi = self
            .nodes
            .iter()
            .map(|n| n.diag)
            .fold(T::infinity(), T::min);
        if self.count_below(hi) == 0 {
            return hi;
        }
        loop {
            let mid = (lo + hi) * T::half();
            if mid <= lo || mid >= hi {
                return hi;
            }
            if self.count_below(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}

/// Eliminates the tree from the leaves to the root. A pivot is valid only
/// when its curvature per unit weight is positive; otherwise the root
/// marginal is unbounded below.
pub fn exact_tree_elimination<T: Scalar>(tree: &ComputationTree<T>) -> TreeSolution<T> {
    let nodes = &tree.nodes;
    let mut alpha: Vec<T> = nodes.iter().map(|n| n.diag).collect();
    let mut beta: Vec<T> = nodes.iter().map(|n| n.linear).collect();
    let mut bounded = true;
    for v in (1..nodes.len()).rev() {
        if !(alpha[v] / nodes[v].weight > T::zero()) {
            bounded = false;
            break;
        }
        let p = nodes[v].parent.expect("non-root node has a parent");
        let e = nodes[v].coupling;
        let (av, bv) = (alpha[v], beta[v]);
        alpha[p] -= e * e / av;
        beta[p] -= bv * e / av;
    }
    let lambda_min = tree.lambda_min();
    if bounded {
        TreeSolution {
            curvature: Curvature::Finite(alpha[0]),
            linear: beta[0],
            lambda_min,
        }
    } else {
        TreeSolution {
            curvature: Curvature::Unbounded,
            linear: T::zero(),
            lambda_min,
        }
    }
}
