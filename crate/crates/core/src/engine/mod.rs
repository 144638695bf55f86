//! Reweighted min-sum message passing for quadratic objectives.

mod beliefs;
mod state;
mod update;

pub use beliefs::{
    beliefs, consistency_gap, local_curvatures, pair_beliefs, reassemble_objective, BeliefSummary,
    PairBelief,
};
pub use state::{Curvature, MessageState};
pub use update::{
    async_edge_order, async_sweep, damped_step, local_terms, mean_sweep, send_message, sync_step,
};
pub(crate) use update::{is_permutation, update_edges_in_place};

use update::{async_sweep_stats, damped_step_stats, sync_step_stats, StepStats};

use crate::error::{Error, Result};
use crate::matrix::sup_norm;
use crate::model::{EdgeParameters, QuadraticModel};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_DELTA: f64 = 0.5;

/// Message update schedule. One iteration is one synchronous step, one full
/// asynchronous sweep, or one damped synchronous step.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule<T> {
    Synchronous,
    /// `order` must be a permutation of the nodes.
    Asynchronous {
        order: Vec<usize>,
    },
    /// `delta ∈ (0, 1)` is the weight kept on the previous message.
    DampedSynchronous {
        delta: T,
    },
}

impl<T: Scalar> Schedule<T> {
    /// Asynchronous sweeps in ascending node order.
    pub fn asynchronous(n: usize) -> Self {
        Schedule::Asynchronous {
            order: (0..n).collect(),
        }
    }

    pub fn damped(delta: T) -> Result<Self> {
        if !(delta > T::zero() && delta < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "damping factor must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Schedule::DampedSynchronous { delta })
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Schedule::Synchronous => Ok(()),
            Schedule::Asynchronous { order } => {
                if is_permutation(order, n) {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "asynchronous order is not a permutation of 0..{n}"
                    )))
                }
            }
            Schedule::DampedSynchronous { delta } => Self::damped(*delta).map(|_| ()),
        }
    }

    fn step(
        &self,
        state: &MessageState<T>,
        model: &QuadraticModel<T>,
        c: &EdgeParameters<T>,
    ) -> (MessageState<T>, StepStats) {
        match self {
            Schedule::Synchronous => sync_step_stats(state, model, c),
            Schedule::Asynchronous { order } => async_sweep_stats(state, model, c, order),
            Schedule::DampedSynchronous { delta } => damped_step_stats(state, model, c, *delta),
        }
    }
}

/// Trace of one [`run`].
#[derive(Clone, Debug)]
pub struct RunReport<T> {
    pub iterations: usize,
    /// Last mean change was within tolerance and every belief decodable.
    pub converged: bool,
    /// Some message curvature became unbounded; the run stopped there.
    pub unbounded: bool,
    /// Sup-norm change of the mean estimates per iteration (`∞` while some
    /// belief is not decodable).
    pub residual_history: Vec<T>,
    /// Sup-norm change of all message coefficients per iteration.
    pub message_residual_history: Vec<T>,
    /// Sup-norm change of the message curvatures per iteration.
    pub a_residual_history: Vec<T>,
    /// `a^t ≤ a^{t−1}` held entrywise at every iteration.
    pub a_monotone: bool,
    /// Every local curvature `A_{i\j}` and every belief curvature `A_i`
    /// seen during the run was strictly positive.
    pub trees_positive: bool,
    pub final_state: MessageState<T>,
    pub final_beliefs: BeliefSummary<T>,
}

impl<T: Scalar> RunReport<T> {
    pub fn final_means(&self) -> Option<Vec<T>> {
        self.final_beliefs.means()
    }

    pub fn final_variances(&self) -> Option<Vec<T>> {
        self.final_beliefs.variances()
    }

    pub fn last_residual(&self) -> Option<T> {
        self.residual_history.last().copied()
    }
}

/// Snapshot handed to the observer of [`run_with`] after every iteration.
pub struct IterationView<'a, T> {
    pub iteration: usize,
    pub state: &'a MessageState<T>,
    pub beliefs: &'a BeliefSummary<T>,
}

/// Iterates from zero messages until the sup-norm change of the mean
/// estimates is at most `tol`, `max_iter` iterations have run, or a message
/// becomes unbounded.
pub fn run<T: Scalar>(
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    schedule: &Schedule<T>,
    tol: T,
    max_iter: usize,
) -> Result<RunReport<T>> {
    run_with(
        model,
        c,
        schedule,
        tol,
        max_iter,
        MessageState::zeros(model),
        |_| {},
    )
}

/// [`run`] with an explicit initial state and a per-iteration observer.
pub fn run_with<T: Scalar>(
    model: &QuadraticModel<T>,
    c: &EdgeParameters<T>,
    schedule: &Schedule<T>,
    tol: T,
    max_iter: usize,
    initial: MessageState<T>,
    mut observe: impl FnMut(IterationView<'_, T>),
) -> Result<RunReport<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if initial.len() != model.edges().len() {
        return Err(Error::DimensionMismatch {
            expected: model.edges().len(),
            actual: initial.len(),
        });
    }
    schedule.validate(model.n())?;

    let mut state = initial;
    let mut current = beliefs(&state, model, c);
    let mut prev_means = current.means();
    let mut report = RunReport {
        iterations: 0,
        converged: false,
        unbounded: state.is_invalid(),
        residual_history: Vec::new(),
        message_residual_history: Vec::new(),
        a_residual_history: Vec::new(),
        a_monotone: true,
        trees_positive: current.is_decodable(),
        final_state: state.clone(),
        final_beliefs: current.clone(),
    };
    if report.unbounded {
        return Ok(report);
    }

    for t in 1..=max_iter {
        let (next, stats) = schedule.step(&state, model, c);
        current = beliefs(&next, model, c);
        let means = current.means();

        let residual = match (&means, &prev_means) {
            (Some(m), Some(p)) => {
                let diff: Vec<T> = m.iter().zip(p).map(|(&x, &y)| x - y).collect();
                sup_norm(&diff)
            }
            _ => T::infinity(),
        };
        report.iterations = t;
        report.residual_history.push(residual);
        report
            .message_residual_history
            .push(next.sup_change(&state));
        report.a_residual_history.push(next.a_change(&state));
        if next.a.iter().zip(&state.a).any(|(new, old)| !(new <= old)) {
            report.a_monotone = false;
        }
        if !stats.all_local_positive || !current.is_decodable() {
            report.trees_positive = false;
        }

        observe(IterationView {
            iteration: t,
            state: &next,
            beliefs: &current,
        });

        state = next;
        prev_means = means;
        if state.is_invalid() {
            report.unbounded = true;
            break;
        }
        if residual <= tol && current.is_decodable() {
            report.converged = true;
            break;
        }
    }
    report.final_state = state;
    report.final_beliefs = current;
    Ok(report)
}
