use super::state::{Curvature, MessageState};
use super::update::local_terms;
use crate::matrix::Matrix;
use crate::model::{EdgeParameters, QuadraticModel};
use crate::scalar::Scalar;

/// Node beliefs `τ_i(x) = ½·A_i·x² − B_i·x` (up to a constant), where
/// `A_i = Γ_ii + Σ_k c_ki a_{k→i}` and `B_i = h_i − Σ_k c_ki b_{k→i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefSummary<T> {
    pub curvature: Vec<Curvature<T>>,
    pub linear: Vec<T>,
}

impl<T: Scalar> BeliefSummary<T> {
    pub fn n(&self) -> usize {
        self.curvature.len()
    }

    /// `B_i / A_i` when `A_i > 0`.
    pub fn mean(&self, i: usize) -> Option<T> {
        match self.curvature[i] {
            Curvature::Finite(a) if a > T::zero() => Some(self.linear[i] / a),
            _ => None,
        }
    }

    /// `1 / A_i` when `A_i > 0`.
    pub fn variance(&self, i: usize) -> Option<T> {
        match self.curvature[i] {
            Curvature::Finite(a) if a > T::zero() => Some(T::one() / a),
            _ => None,
        }
    }

    /// All means, or `None` if some node is not decodable.
    pub fn means(&self) -> Option<Vec<T>> {
        (0..self.n()).map(|i| self.mean(i)).collect()
    }

    pub fn variances(&self) -> Option<Vec<T>> {
        (0..self.n()).map(|i| self.variance(i)).collect()
    }

    /// Nodes whose belief is not a strictly convex quadratic.
    pub fn non_decodable(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| !self.curvature[i].is_positive())
            .collect()
    }

    pub fn is_decodable(&self) -> bool {
        self.curvature.iter().all(|a| a.is_positive())
    }
}

/// Node beliefs of a message state.
pub fn beliefs<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
) -> BeliefSummary<T> {
    let edges = model.edges();
    let mut curvature = Vec::with_capacity(model.n());
    let mut linear = Vec::with_capacity(model.n());
    for i in 0..model.n() {
        let mut a = Curvature::Finite(model.diag(i));
        let mut b = model.h()[i];
        for k in edges.in_edges(i) {
            let w = c.get(k);
            a = match (a, state.a[k]) {
                (Curvature::Finite(acc), Curvature::Finite(ak)) => Curvature::Finite(acc + w * ak),
                _ => Curvature::Unbounded,
            };
            b -= w * state.b[k];
        }
        if a.is_unbounded() {
            b = T::zero();
        }
        curvature.push(a);
        linear.push(b);
    }
    BeliefSummary { curvature, linear }
}

/// Pairwise belief on edge `(i, j)`:
/// `½p_i x_i² + ½p_j x_j² + g x_i x_j + q_i x_i + q_j x_j`, `g = Γ_ij/c_ij`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairBelief<T> {
    pub i: usize,
    pub j: usize,
    pub p_i: T,
    pub p_j: T,
    pub g: T,
    pub q_i: T,
    pub q_j: T,
}

impl<T: Scalar> PairBelief<T> {
    /// Coefficients `(curvature, linear)` of `min_{x_j} τ_ij(x_i, x_j)` as a
    /// function of `x_i`, when the minimization over `x_j` is bounded.
    pub fn marginalize_onto_i(&self) -> Option<(T, T)> {
        if !(self.p_j > T::zero()) {
            return None;
        }
        Some((
            self.p_i - self.g * self.g / self.p_j,
            self.q_i - self.g * self.q_j / self.p_j,
        ))
    }
}

/// Pairwise beliefs for every undirected edge `(i, j)`, `i < j`. Requires a
/// valid (finite) state.
pub fn pair_beliefs<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
) -> Option<Vec<PairBelief<T>>> {
    let node = beliefs(state, model, c);
    let edges = model.edges();
    let mut out = Vec::new();
    for e in 0..edges.len() {
        let (i, j) = edges.endpoints(e);
        if i > j {
            continue;
        }
        let r = edges.reverse(e);
        let (a_ij, a_ji) = (state.a[e].finite()?, state.a[r].finite()?);
        let (ai, aj) = (node.curvature[i].finite()?, node.curvature[j].finite()?);
        out.push(PairBelief {
            i,
            j,
            p_i: ai - a_ji,
            p_j: aj - a_ij,
            g: model.coupling(e) / c.get(e),
            q_i: -node.linear[i] - state.b[r],
            q_j: -node.linear[j] - state.b[e],
        });
    }
    Some(out)
}

/// Reassembles `Σ_i τ_i + Σ_(i,j) c_ij (τ_ij − τ_i − τ_j)` and returns its
/// quadratic and linear coefficients `(Q, q)` so that the result equals
/// `½xᵀQx + qᵀx` up to a constant. For any finite state this reproduces
/// `(Γ, −h)`; with `c ≡ 1` the edge weights are all one.
pub fn reassemble_objective<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
) -> Option<(Matrix<T>, Vec<T>)> {
    let n = model.n();
    let node = beliefs(state, model, c);
    let pairs = pair_beliefs(state, model, c)?;
    let mut q = Matrix::zeros(n, n);
    let mut lin = vec![T::zero(); n];
    for i in 0..n {
        q[(i, i)] = node.curvature[i].finite()?;
        lin[i] = -node.linear[i];
    }
    for p in pairs {
        let e = model
            .edges()
            .find(p.i, p.j)
            .expect("pair belief on an edge");
        let w = c.get(e);
        let ai = node.curvature[p.i].finite()?;
        let aj = node.curvature[p.j].finite()?;
        q[(p.i, p.i)] += w * (p.p_i - ai);
        q[(p.j, p.j)] += w * (p.p_j - aj);
        q[(p.i, p.j)] += w * p.g;
        q[(p.j, p.i)] += w * p.g;
        lin[p.i] += w * (p.q_i + node.linear[p.i]);
        lin[p.j] += w * (p.q_j + node.linear[p.j]);
    }
    Some((q, lin))
}

/// Largest deviation from the fixed-point consistency condition
/// `min_{x_j} τ_ij(x_i, x_j) = τ_i(x_i) + const` over all ordered edges.
/// `None` if some marginalization is unbounded.
pub fn consistency_gap<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
) -> Option<T> {
    let node = beliefs(state, model, c);
    let mut gap = T::zero();
    for p in pair_beliefs(state, model, c)? {
        let flipped = PairBelief {
            i: p.j,
            j: p.i,
            p_i: p.p_j,
            p_j: p.p_i,
            g: p.g,
            q_i: p.q_j,
            q_j: p.q_i,
        };
        for pb in [p, flipped] {
            let (curv, lin) = pb.marginalize_onto_i()?;
            let ai = node.curvature[pb.i].finite()?;
            gap = gap
                .max((curv - ai).abs())
                .max((lin + node.linear[pb.i]).abs());
        }
    }
    Some(gap)
}

/// Local subproblem curvature `A_{i\j}` for every directed edge.
pub fn local_curvatures<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
) -> Vec<Curvature<T>> {
    (0..state.len())
        .map(|e| local_terms(state, model, c, e).0)
        .collect()
}
