//! Line-oriented summary of every diagnostic for one model.

use std::fmt;

use super::{
    adversarial_two_cover_lambda_min, find_uniform_r, positive_definite_check, sdd_witness,
    walk_summability, GershgorinCertificate, Verdict, WalkSummability,
};
use crate::error::Result;
use crate::model::QuadraticModel;
use crate::scalar::DenseScalar;

pub const DEFAULT_R_MAX: f64 = 1024.0;

#[derive(Clone, Debug)]
pub struct DiagnosticReport<T> {
    pub nodes: usize,
    pub edges: usize,
    pub positive_definite: bool,
    pub lambda_min: T,
    pub walk: WalkSummability<T>,
    pub sdd_witness: Option<Vec<T>>,
    pub adversarial_lambda_min: T,
    pub certificate: Option<GershgorinCertificate<T>>,
    pub r_max: T,
}

/// Runs every diagnostic. Requires a positive diagonal.
pub fn diagnose<T: DenseScalar>(
    model: &QuadraticModel<T>,
    r_max: T,
) -> Result<DiagnosticReport<T>> {
    let (positive_definite, lambda_min) = positive_definite_check(model);
    let walk = walk_summability(model, T::lit(super::WALK_TOL))?;
    Ok(DiagnosticReport {
        nodes: model.n(),
        edges: model.edges().undirected_len(),
        positive_definite,
        lambda_min,
        walk,
        sdd_witness: sdd_witness(model),
        adversarial_lambda_min: adversarial_two_cover_lambda_min(model),
        certificate: find_uniform_r(model, r_max),
        r_max,
    })
}

/// Shortest decimal that round-trips through `f64`, capped at 10
/// significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.9e}", x);
    let v: f64 = s.parse().unwrap_or(x);
    let plain = format!("{v}");
    if plain.len() <= 16 {
        plain
    } else {
        s
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl<T: DenseScalar> fmt::Display for DiagnosticReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |x: T| fmt_num(x.to_f64_lossy());
        writeln!(f, "nodes: {}", self.nodes)?;
        writeln!(f, "edges: {}", self.edges)?;
        writeln!(
            f,
            "PD: {} (lambda_min={})",
            yes_no(self.positive_definite),
            n(self.lambda_min)
        )?;
        let walk = match self.walk.verdict {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Indeterminate => "indeterminate",
        };
        writeln!(f, "walk-summable: {} (rho={})", walk, n(self.walk.rho))?;
        match &self.sdd_witness {
            Some(w) => {
                let parts: Vec<String> = w.iter().map(|&v| n(v)).collect();
                writeln!(f, "SDD witness: ({})", parts.join(", "))?;
            }
            None => writeln!(f, "SDD witness: none")?,
        }
        writeln!(
            f,
            "adversarial 2-cover lambda_min: {}",
            n(self.adversarial_lambda_min)
        )?;
        match &self.certificate {
            Some(c) => writeln!(
                f,
                "uniform r: r={} s={} slack={}",
                n(c.r),
                n(c.s),
                n(c.slack)
            ),
            None => writeln!(f, "uniform r: none up to r={}", n(self.r_max)),
        }
    }
}
