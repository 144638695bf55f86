//! Convergence diagnostics: spectral tests, computation trees, and the
//! uniform-reweighting certificate.

mod certificate;
mod report;
mod spectral;
mod tree;

pub use certificate::{
    find_uniform_r, gershgorin_certificate, gershgorin_margins, GershgorinCertificate,
};
pub use report::{diagnose, fmt_num, DiagnosticReport, DEFAULT_R_MAX};
pub use spectral::{
    adversarial_witness, is_sdd_witness, normalized, perron, positive_definite_check, sdd_witness,
    spectral_radius_nonneg, walk_matrix, walk_summability, Perron, Verdict, WalkSummability,
    POWER_MAX_ITER, WALK_TOL,
};
pub use tree::{
    build_computation_tree, exact_tree_elimination, ComputationTree, TreeNode, TreeSolution,
};

use crate::covers::adversarial_two_cover;
use crate::dense::min_eigenvalue;
use crate::model::QuadraticModel;
use crate::scalar::DenseScalar;

/// Minimum eigenvalue of [`adversarial_two_cover`].
pub fn adversarial_two_cover_lambda_min<T: DenseScalar>(model: &QuadraticModel<T>) -> T {
    min_eigenvalue(adversarial_two_cover(model).model().gamma())
}

#[cfg(test)]
mod tests;
