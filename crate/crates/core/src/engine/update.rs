//! Closed-form reweighted min-sum updates for quadratic potentials.
//!
//! The message `m_{i→j}` minimizes, over `x_i`,
//!
//! ```text
//! ψ_ij(x_i, x_j)/c_ij + φ_i(x_i) + (c_ij − 1)·m_{j→i}(x_i) + Σ_{k∈∂i∖j} c_ki·m_{k→i}(x_i)
//! ```
//!
//! with `φ_i(x) = ½Γ_ii x² − h_i x` and `ψ_ij = Γ_ij x_i x_j`. Collecting the
//! `x_i` terms gives `½·A·x_i² − B·x_i + (Γ_ij/c_ij)·x_i·x_j` with
//!
//! ```text
//! A = Γ_ii + Σ_{k∈∂i∖j} c_ki a_{k→i} + (c_ij − 1) a_{j→i}
//! B = h_i  − Σ_{k∈∂i∖j} c_ki b_{k→i} − (c_ij − 1) b_{j→i}
//! ```
//!
//! and completing the square yields `a_{i→j} = −g²/A`, `b_{i→j} = B·g/A`
//! where `g = Γ_ij/c_ij`. With this convention the belief at node `i` is
//! `½A_i x² − B_i x` and its mean is `B_i/A_i`.

use super::state::{Curvature, MessageState};
use crate::model::{EdgeParameters, QuadraticModel};
use crate::scalar::Scalar;

/// Curvature and linear term of the local problem minimized when sending
/// along directed edge `e = i → j`.
pub fn local_terms<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    e: usize,
) -> (Curvature<T>, T) {
    local_terms_split(&state.a, &state.b, model, c, e)
}

#[inline]
pub(crate) fn local_terms_split<T: Scalar>(
    a: &[Curvature<T>],
    b: &[T],
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    e: usize,
) -> (Curvature<T>, T) {
    let edges = model.edges();
    let i = edges.source(e);
    let back = edges.reverse(e);
    let mut curv = model.diag(i);
    let mut lin = model.h()[i];
    for k in edges.in_edges(i) {
        let w = if k == back {
            c.get(k) - T::one()
        } else {
            c.get(k)
        };
        if w == T::zero() {
            continue;
        }
        match a[k] {
            Curvature::Unbounded => return (Curvature::Unbounded, T::zero()),
            Curvature::Finite(ak) => curv += w * ak,
        }
        lin -= w * b[k];
    }
    (Curvature::Finite(curv), lin)
}

/// Minimizes `½·A·x² − B·x + (Γ_ij/c_ij)·x·y` over `x`, returning the
/// coefficients of the resulting quadratic in `y`.
#[inline]
pub fn send_message<T: Scalar>(
    local_curv: Curvature<T>,
    local_lin: T,
    gamma_ij: T,
    c_ij: T,
) -> (Curvature<T>, T) {
    match local_curv {
        Curvature::Finite(a) if a > T::zero() => {
            let g = gamma_ij / c_ij;
            (Curvature::Finite(-(g * g) / a), local_lin * g / a)
        }
        _ => (Curvature::Unbounded, T::zero()),
    }
}

/// Positivity bookkeeping collected while updating messages.
#[derive(Clone, Copy, Debug)]
pub(crate) struct StepStats {
    pub all_local_positive: bool,
}

impl Default for StepStats {
    fn default() -> Self {
        Self {
            all_local_positive: true,
        }
    }
}

#[inline]
fn update_edge<T: Scalar>(
    src_a: &[Curvature<T>],
    src_b: &[T],
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    e: usize,
    stats: &mut StepStats,
) -> (Curvature<T>, T) {
    let (curv, lin) = local_terms_split(src_a, src_b, model, c, e);
    if !curv.is_positive() {
        stats.all_local_positive = false;
    }
    send_message(curv, lin, model.coupling(e), c.get(e))
}

pub(crate) fn sync_step_stats<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
) -> (MessageState<T>, StepStats) {
    let mut stats = StepStats::default();
    let mut a = Vec::with_capacity(state.len());
    let mut b = Vec::with_capacity(state.len());
    for e in 0..state.len() {
        let (ae, be) = update_edge(&state.a, &state.b, model, c, e, &mut stats);
        a.push(ae);
        b.push(be);
    }
    let next = MessageState {
        a,
        b,
        iteration: state.iteration + 1,
    };
    (next, stats)
}

/// One synchronous step: every message recomputed from the previous state.
pub fn sync_step<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
) -> MessageState<T> {
    sync_step_stats(state, model, c).0
}

/// Directed edges in the order an asynchronous sweep visits them: for each
/// `j` in `order`, the edges `i → j` for `i ∈ ∂j` in ascending `i`.
pub fn async_edge_order<T: Scalar>(model: &QuadraticModel<T>, order: &[usize]) -> Vec<usize> {
    order
        .iter()
        .flat_map(|&j| model.edges().in_edges(j))
        .collect()
}

/// Updates the listed edges sequentially in place; later updates see the
/// earlier ones.
pub(crate) fn update_edges_in_place<T: Scalar>(
    state: &mut MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    edge_order: &[usize],
) -> StepStats {
    let mut stats = StepStats::default();
    for &e in edge_order {
        let (ae, be) = update_edge(&state.a, &state.b, model, c, e, &mut stats);
        state.a[e] = ae;
        state.b[e] = be;
    }
    stats
}

pub(crate) fn async_sweep_stats<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    order: &[usize],
) -> (MessageState<T>, StepStats) {
    let mut next = state.clone();
    let stats = update_edges_in_place(&mut next, model, c, &async_edge_order(model, order));
    next.iteration += 1;
    (next, stats)
}

/// One asynchronous sweep over `order` (a permutation of the nodes).
pub fn async_sweep<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    order: &[usize],
) -> MessageState<T> {
    debug_assert!(is_permutation(order, model.n()));
    async_sweep_stats(state, model, c, order).0
}

pub(crate) fn damped_step_stats<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    delta: T,
) -> (MessageState<T>, StepStats) {
    let (undamped, stats) = sync_step_stats(state, model, c);
    let keep = T::one() - delta;
    let mut next = undamped;
    for e in 0..next.len() {
        match (state.a[e], next.a[e]) {
            (Curvature::Finite(old), Curvature::Finite(new)) => {
                next.a[e] = Curvature::Finite(delta * old + keep * new);
                next.b[e] = delta * state.b[e] + keep * next.b[e];
            }
            _ => {
                next.a[e] = Curvature::Unbounded;
                next.b[e] = T::zero();
            }
        }
    }
    (next, stats)
}

/// Damped synchronous step: `δ·old + (1 − δ)·sync_step(old)`, coefficientwise.
pub fn damped_step<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    delta: T,
) -> MessageState<T> {
    damped_step_stats(state, model, c, delta).0
}

/// Asynchronous sweep of the linear coefficients only, with every `a` held
/// at its current value. With converged `a` this is one Gauss-Seidel sweep
/// on the mean system.
pub fn mean_sweep<T: Scalar>(
    state: &MessageState<T>,
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    order: &[usize],
) -> MessageState<T> {
    let mut next = state.clone();
    for e in async_edge_order(model, order) {
        let (curv, lin) = local_terms_split(&next.a, &next.b, model, c, e);
        let (_, be) = send_message(curv, lin, model.coupling(e), c.get(e));
        next.b[e] = be;
    }
    next.iteration += 1;
    next
}

pub(crate) fn is_permutation(order: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    order.len() == n
        && order
            .iter()
            .all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
}
