//! A Geršgorin-disc certificate that uniform reweighting by `r` keeps every
//! computation tree positive definite.
//!
//! Scaling tree nodes at distance `d` from the root by `(s/r)^d` and applying
//! Geršgorin's theorem leaves three families of strict inequalities, over all
//! nodes `i` and neighbors `p ∈ ∂i`:
//!
//! ```text
//! leaf:     Γ_ii > |Γ_ip|/s
//! internal: Γ_ii > |Γ_ip|/s + (s/r)·[((r−1)/r)|Γ_ip| + Σ_{k∈∂i\p} |Γ_ki|]
//! root:     Γ_ii > (s/r)·Σ_{k∈∂i} |Γ_ki|
//! ```
//!
//! None depend on the depth.

use crate::model::QuadraticModel;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GershgorinCertificate<T> {
    pub r: T,
    pub s: T,
    /// Smallest margin over all inequality instances; always positive.
    pub slack: T,
}

/// Smallest margin of each family (leaf, internal, root).
pub fn gershgorin_margins<T: Scalar>(model: &QuadraticModel<T>, r: T, s: T) -> (T, T, T) {
    let edges = model.edges();
    let mut leaf = T::infinity();
    let mut internal = T::infinity();
    let mut root = T::infinity();
    let q = s / r;
    for i in 0..model.n() {
        let gii = model.diag(i).abs();
        let total: T = edges
            .neighbors(i)
            .iter()
            .map(|&k| model.entry(k, i).abs())
            .sum();
        root = root.min(gii - q * total);
        for &p in edges.neighbors(i) {
            let gip = model.entry(i, p).abs();
            leaf = leaf.min(gii - gip / s);
            let rest = total - gip;
            internal = internal.min(gii - gip / s - q * ((r - T::one()) / r * gip + rest));
        }
    }
    (leaf, internal, root)
}

/// The certificate for `(r, s)` when every inequality holds strictly.
pub fn gershgorin_certificate<T: Scalar>(
    model: &QuadraticModel<T>,
    r: T,
    s: T,
) -> Option<GershgorinCertificate<T>> {
    if r < T::one() || !(s > T::zero()) || !model.has_positive_diagonal() {
        return None;
    }
    let (leaf, internal, root) = gershgorin_margins(model, r, s);
    let slack = leaf.min(internal).min(root);
    (slack > T::zero()).then_some(GershgorinCertificate { r, s, slack })
}

/// Fixes `s` half a unit above the largest ratio `|Γ_ip|/|Γ_ii|`, which
/// settles the leaf family, then doubles `r` from 1 until the certificate
/// holds or `r` exceeds `r_max`.
pub fn find_uniform_r<T: Scalar>(
    model: &QuadraticModel<T>,
    r_max: T,
) -> Option<GershgorinCertificate<T>> {
    if !model.has_positive_diagonal() {
        return None;
    }
    let ratio = model
        .edges()
        .undirected()
        .flat_map(|(i, j)| {
            let g = model.entry(i, j).abs();
            [g / model.diag(i), g / model.diag(j)]
        })
        .fold(T::zero(), T::max);
    let s = ratio + T::half();
    let mut r = T::one();
    while r <= r_max {
        if let Some(cert) = gershgorin_certificate(model, r, s) {
            return Some(cert);
        }
        r *= T::two();
    }
    None
}
