//! Finite graph covers of a quadratic model.
//!
//! A k-cover replaces every node `v` by a fiber of `k` copies and every edge
//! `(i, j)` by a perfect matching between the fibers of `i` and `j`. Cover
//! node `v·k + copy` is copy `copy` of base node `v`, so fibers are
//! contiguous and the covering matrix is the block matrix with blocks
//! `Γ_ij·P_ij`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{update_edges_in_place, MessageState};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{EdgeParameters, QuadraticModel};
use crate::scalar::Scalar;

/// Fold count plus one permutation per undirected edge `(i, j)`, `i < j`.
///
/// `perms[&(i, j)][a] = b` connects copy `a` of `i` to copy `b` of `j`; the
/// reverse block uses the inverse permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSpec {
    pub k: usize,
    pub perms: BTreeMap<(usize, usize), Vec<usize>>,
}

impl CoverSpec {
    /// Every edge gets the same permutation.
    pub fn constant<T: Scalar>(model: &QuadraticModel<T>, perm: &[usize]) -> Self {
        let perms = model
            .edges()
            .undirected()
            .map(|e| (e, perm.to_vec()))
            .collect();
        Self {
            k: perm.len(),
            perms,
        }
    }

    pub fn identity<T: Scalar>(model: &QuadraticModel<T>, k: usize) -> Self {
        Self::constant(model, &(0..k).collect::<Vec<_>>())
    }

    /// Sets the permutation of edge `{i, j}`, inverting it if given as `i > j`.
    pub fn set(&mut self, i: usize, j: usize, perm: Vec<usize>) {
        if i < j {
            self.perms.insert((i, j), perm);
        } else {
            self.perms.insert((j, i), invert(&perm));
        }
    }
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![usize::MAX; perm.len()];
    for (a, &b) in perm.iter().enumerate() {
        if b < inv.len() {
            inv[b] = a;
        }
    }
    inv
}

const SWAP: [usize; 2] = [1, 0];
const KEEP: [usize; 2] = [0, 1];

/// A covering model together with its base and covering map.
#[derive(Clone, Debug)]
pub struct CoveredModel<T> {
    model: QuadraticModel<T>,
    base: QuadraticModel<T>,
    k: usize,
}

impl<T: Scalar> CoveredModel<T> {
    /// Wraps a hand-built cover matrix. Nothing is checked here; use
    /// [`validate_cover`].
    pub fn from_parts(base: QuadraticModel<T>, model: QuadraticModel<T>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "cover fold count must be positive".into(),
            ));
        }
        if model.n() != k * base.n() {
            return Err(Error::DimensionMismatch {
                expected: k * base.n(),
                actual: model.n(),
            });
        }
        Ok(Self { model, base, k })
    }

    pub fn model(&self) -> &QuadraticModel<T> {
        &self.model
    }

    pub fn base(&self) -> &QuadraticModel<T> {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Covering map: cover node to base node.
    pub fn pi(&self, u: usize) -> usize {
        u / self.k
    }

    pub fn copy_of(&self, u: usize) -> usize {
        u % self.k
    }

    pub fn fiber(&self, v: usize) -> Range<usize> {
        v * self.k..(v + 1) * self.k
    }

    /// The base directed edge a cover directed edge lies over.
    pub fn base_edge(&self, cover_edge: usize) -> Option<usize> {
        let (u, w) = self.model.edges().endpoints(cover_edge);
        self.base.edges().find(self.pi(u), self.pi(w))
    }

    /// The cover edge leaving copy `copy` of the source of base edge `e`.
    pub fn lifted_edge(&self, e: usize, copy: usize) -> Option<usize> {
        let (i, j) = self.base.edges().endpoints(e);
        let u = i * self.k + copy;
        self.model
            .edges()
            .out_edges(u)
            .find(|&ce| self.pi(self.model.edges().target(ce)) == j)
    }
}

/// Builds the covering model described by `spec`.
pub fn build_cover<T: Scalar>(
    model: &QuadraticModel<T>,
    spec: &CoverSpec,
) -> Result<CoveredModel<T>> {
    let k = spec.k;
    if k == 0 {
        return Err(Error::InvalidArgument(
            "cover fold count must be positive".into(),
        ));
    }
    for &(i, j) in spec.perms.keys() {
        if i >= j || model.edges().find(i, j).is_none() {
            return Err(Error::NotAnEdge(i, j));
        }
    }
    let n = model.n();
    let mut g = Matrix::zeros(k * n, k * n);
    for v in 0..n {
        for a in 0..k {
            g[(v * k + a, v * k + a)] = model.diag(v);
        }
    }
    for (i, j) in model.edges().undirected() {
        let perm = spec.perms.get(&(i, j)).ok_or(Error::MissingEdge(i, j))?;
        if perm.len() != k || invert(perm).contains(&usize::MAX) {
            return Err(Error::InvalidPermutation(i, j));
        }
        let gij = model.entry(i, j);
        for (a, &b) in perm.iter().enumerate() {
            g[(i * k + a, j * k + b)] = gij;
            g[(j * k + b, i * k + a)] = gij;
        }
    }
    let h = lift_unchecked(model.h(), k);
    let cover = QuadraticModel::new(g, h)?;
    CoveredModel::from_parts(model.clone(), cover, k)
}

/// The bipartite double cover: every edge `(i, j)` becomes `(i₁, j₂)` and
/// `(i₂, j₁)`.
pub fn kronecker_double_cover<T: Scalar>(model: &QuadraticModel<T>) -> CoveredModel<T> {
    build_cover(model, &CoverSpec::constant(model, &SWAP)).expect("swap cover of a valid model")
}

/// The 2-cover keeping negative couplings within a copy and crossing
/// positive ones. For unit diagonal its minimum eigenvalue is at most
/// `1 − ϱ(|I − Γ|)`.
pub fn adversarial_two_cover<T: Scalar>(model: &QuadraticModel<T>) -> CoveredModel<T> {
    let mut spec = CoverSpec::constant(model, &KEEP);
    for (i, j) in model.edges().undirected() {
        if model.entry(i, j) > T::zero() {
            spec.set(i, j, SWAP.to_vec());
        }
    }
    build_cover(model, &spec).expect("two-cover of a valid model")
}

/// Each edge independently keeps or swaps the copies with probability ½.
pub fn random_two_cover<T: Scalar>(model: &QuadraticModel<T>, seed: u64) -> CoveredModel<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = CoverSpec::constant(model, &KEEP);
    for (i, j) in model.edges().undirected() {
        if rng.gen_bool(0.5) {
            spec.set(i, j, SWAP.to_vec());
        }
    }
    build_cover(model, &spec).expect("two-cover of a valid model")
}

fn lift_unchecked<T: Copy>(x: &[T], k: usize) -> Vec<T> {
    x.iter().flat_map(|&v| std::iter::repeat_n(v, k)).collect()
}

/// `lift(x)_u = x_{π(u)}`.
pub fn lift_vector<T: Scalar>(x: &[T], cover: &CoveredModel<T>) -> Result<Vec<T>> {
    if x.len() != cover.base.n() {
        return Err(Error::DimensionMismatch {
            expected: cover.base.n(),
            actual: x.len(),
        });
    }
    Ok(lift_unchecked(x, cover.k))
}

/// Fiber averages.
pub fn project_vector<T: Scalar>(y: &[T], cover: &CoveredModel<T>) -> Result<Vec<T>> {
    if y.len() != cover.model.n() {
        return Err(Error::DimensionMismatch {
            expected: cover.model.n(),
            actual: y.len(),
        });
    }
    let k = T::from_usize(cover.k).expect("fold count fits the scalar");
    Ok(y.chunks(cover.k)
        .map(|f| f.iter().copied().sum::<T>() / k)
        .collect())
}

/// Per-edge parameters on the cover copied from the edges they lie over.
pub fn lift_parameters<T: Scalar>(
    c: &EdgeParameters<T>,
    cover: &CoveredModel<T>,
) -> Result<EdgeParameters<T>> {
    let by_edge = (0..cover.model.edges().len())
        .map(|ce| lifted_base_edge(cover, ce).map(|e| c.get(e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EdgeParameters::from_directed(by_edge))
}

/// Message state on the cover copying each base message onto every edge
/// above it.
pub fn lift_state<T: Scalar>(
    state: &MessageState<T>,
    cover: &CoveredModel<T>,
) -> Result<MessageState<T>> {
    let m = cover.model.edges().len();
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for ce in 0..m {
        let e = lifted_base_edge(cover, ce)?;
        a.push(state.a[e]);
        b.push(state.b[e]);
    }
    Ok(MessageState {
        a,
        b,
        iteration: state.iteration,
    })
}

fn lifted_base_edge<T: Scalar>(cover: &CoveredModel<T>, ce: usize) -> Result<usize> {
    cover.base_edge(ce).ok_or_else(|| {
        let (u, w) = cover.model.edges().endpoints(ce);
        Error::NotAnEdge(cover.pi(u), cover.pi(w))
    })
}

/// Messages leaving copy `copy` of each node, indexed by base edge.
pub fn fiber_messages<T: Scalar>(
    state: &MessageState<T>,
    cover: &CoveredModel<T>,
    copy: usize,
) -> Result<MessageState<T>> {
    let base = cover.base.edges();
    let mut a = Vec::with_capacity(base.len());
    let mut b = Vec::with_capacity(base.len());
    for e in 0..base.len() {
        let (i, j) = base.endpoints(e);
        let ce = cover.lifted_edge(e, copy).ok_or(Error::MissingEdge(i, j))?;
        a.push(state.a[ce]);
        b.push(state.b[ce]);
    }
    Ok(MessageState {
        a,
        b,
        iteration: state.iteration,
    })
}

/// Half of one bipartite asynchronous iteration on a double cover: updates,
/// in place, every message leaving a node in copy `part`.
pub fn bipartite_half_step<T: Scalar>(
    state: &mut MessageState<T>,
    cover: &CoveredModel<T>,
    c: &EdgeParameters<T>,
    part: usize,
) {
    let edges: Vec<usize> = (0..cover.model.edges().len())
        .filter(|&ce| cover.copy_of(cover.model.edges().source(ce)) == part)
        .collect();
    update_edges_in_place(state, &cover.model, c, &edges);
}

/// One full bipartite iteration: copy-0 senders, then copy-1 senders.
pub fn bipartite_step<T: Scalar>(
    state: &MessageState<T>,
    cover: &CoveredModel<T>,
    c: &EdgeParameters<T>,
) -> MessageState<T> {
    let mut next = state.clone();
    bipartite_half_step(&mut next, cover, c, 0);
    bipartite_half_step(&mut next, cover, c, 1);
    next.iteration += 1;
    next
}

/// A reason a matrix fails to cover its base.
#[derive(Clone, Debug, PartialEq)]
pub enum CoverViolation {
    Dimension {
        expected: usize,
        actual: usize,
    },
    Diagonal(usize),
    Field(usize),
    /// The neighbors of the cover node do not map one-to-one onto the base
    /// neighbors of its image.
    NeighborhoodNotBijective(usize),
    /// A cover edge carries a different coupling than the base edge below it.
    Coupling(usize, usize),
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dimension { expected, actual } => {
                write!(f, "cover has {actual} nodes, expected {expected}")
            }
            Self::Diagonal(u) => write!(f, "diagonal at cover node {u} differs from its base node"),
            Self::Field(u) => write!(f, "h at cover node {u} differs from its base node"),
            Self::NeighborhoodNotBijective(u) => {
                write!(f, "neighborhood not bijective at cover node {u}")
            }
            Self::Coupling(u, w) => write!(f, "coupling ({u}, {w}) differs from the base edge"),
        }
    }
}

/// Checks fiber sizes, diagonal and `h` replication, and that every cover
/// node's neighborhood maps bijectively, with matching couplings, onto the
/// base neighborhood. Together these make each block `Γ_ij` times a
/// permutation.
pub fn validate_cover<T: Scalar>(cover: &CoveredModel<T>) -> Vec<CoverViolation> {
    let (cm, base, k) = (&cover.model, &cover.base, cover.k);
    if cm.n() != k * base.n() {
        return vec![CoverViolation::Dimension {
            expected: k * base.n(),
            actual: cm.n(),
        }];
    }
    let mut out = Vec::new();
    for u in 0..cm.n() {
        let v = cover.pi(u);
        if cm.diag(u) != base.diag(v) {
            out.push(CoverViolation::Diagonal(u));
        }
        if cm.h()[u] != base.h()[v] {
            out.push(CoverViolation::Field(u));
        }
        let mut images: Vec<usize> = cm
            .edges()
            .neighbors(u)
            .iter()
            .map(|&w| cover.pi(w))
            .collect();
        images.sort_unstable();
        if images != base.edges().neighbors(v) {
            out.push(CoverViolation::NeighborhoodNotBijective(u));
            continue;
        }
        for &w in cm.edges().neighbors(u) {
            if cm.entry(u, w) != base.entry(v, cover.pi(w)) {
                out.push(CoverViolation::Coupling(u, w));
            }
        }
    }
    out
}
