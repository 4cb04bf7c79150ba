//! Degree reduction modulo the ideals `I₂`, `I₃` and efficiency certificates.

use num_traits::Zero;

use super::{Clazz, EstimatingSystem, EstimatorError};
use crate::groebner::{GroebnerBasis, GroebnerLimits, ReductionIdeal};
use crate::polyalg::{Block, Rat};

fn reduction_basis(sys: &EstimatingSystem, k: usize, limits: GroebnerLimits) -> Result<GroebnerBasis, EstimatorError> {
    if k != 2 && k != 3 {
        return Err(EstimatorError::Alignment(format!("reduction ideal order must be 2 or 3, got {k}")));
    }
    let eta = sys.table.block(Block::Eta);
    let x = sys.table.block(Block::X);
    Ok(ReductionIdeal::new(k, &eta, &x)?.basis(limits)?)
}

/// Replaces each non-constraint equation of an MLE system by its normal form
/// modulo GB(I_k) under pure lex `η ≻ X`.
pub fn reduce_system(sys: &EstimatingSystem, k: usize, limits: GroebnerLimits) -> Result<EstimatingSystem, EstimatorError> {
    if sys.clazz != Clazz::Mle {
        return Err(EstimatorError::ClazzMismatch { expected: "mle", found: sys.clazz });
    }
    let mut eta = sys.table.block(Block::Eta);
    let mut unknowns = sys.unknowns.clone();
    eta.sort_unstable();
    unknowns.sort_unstable();
    if eta != unknowns {
        return Err(EstimatorError::NotEtaUnknowns);
    }
    let gb = reduction_basis(sys, k, limits)?;
    let equations = sys
        .equations
        .iter()
        .zip(&sys.is_constraint)
        .map(|(p, &constraint)| if constraint { p.clone() } else { gb.normal_form(p) })
        .collect();
    let clazz = if k == 3 { Clazz::ReducedSecondOrder } else { Clazz::ReducedFirstOrder };
    EstimatingSystem::new(
        sys.model,
        sys.table.clone(),
        equations,
        sys.is_constraint.clone(),
        sys.unknowns.clone(),
        clazz,
        sys.c.clone(),
    )
}

/// Membership verdict for one aligned equation pair.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationCertificate {
    pub index: usize,
    /// `candidate − λ·mle ∈ I_k`.
    pub member: bool,
    /// The factor λ found by leading-coefficient matching.
    pub lambda: Option<Rat>,
    pub eta_degree: u32,
}

/// Outcome of [`certify_class`].
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub k: usize,
    pub equations: Vec<EquationCertificate>,
    pub total_degree_product: u128,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.equations.iter().all(|e| e.member)
    }

    /// One-line machine-readable summary.
    pub fn to_line(&self) -> String {
        let parts: Vec<String> = self
            .equations
            .iter()
            .map(|e| format!("eq{}:member={}:eta_degree={}", e.index + 1, e.member, e.eta_degree))
            .collect();
        format!(
            "certificate k={} holds={} total_degree_product={} {}",
            self.k,
            self.holds(),
            self.total_degree_product,
            parts.join(" ")
        )
    }
}

/// Checks `candidateⱼ − λⱼ·mleⱼ ∈ I_k` for every non-constraint equation,
/// with λⱼ matched on the leading coefficients of the normal forms.
pub fn certify_class(
    candidate: &EstimatingSystem,
    mle: &EstimatingSystem,
    k: usize,
    limits: GroebnerLimits,
) -> Result<Certificate, EstimatorError> {
    if candidate.model != mle.model || candidate.table != mle.table {
        return Err(EstimatorError::Alignment("systems belong to different models".into()));
    }
    if candidate.equations.len() != mle.equations.len() || candidate.is_constraint != mle.is_constraint {
        return Err(EstimatorError::Alignment("equation lists differ in shape".into()));
    }
    for i in 0..mle.equations.len() {
        if mle.is_constraint[i] && candidate.equations[i] != mle.equations[i] {
            return Err(EstimatorError::Alignment(format!("constraint {} differs", i + 1)));
        }
    }
    let gb = reduction_basis(mle, k, limits)?;
    let eta = mle.table.block(Block::Eta);
    let mut equations = Vec::new();
    for i in mle.estimating_indices() {
        let nc = gb.normal_form(&candidate.equations[i]);
        let nm = gb.normal_form(&mle.equations[i]);
        let (member, lambda) = if nm.is_zero() {
            (nc.is_zero(), None)
        } else {
            let (lc, lm) = nm.leading_term(gb.order())?;
            let lambda = nc.coeff(&lm) / lc;
            (!lambda.is_zero() && nc == nm.scale(&lambda), Some(lambda))
        };
        equations.push(EquationCertificate {
            index: i,
            member,
            lambda,
            eta_degree: candidate.equations[i].degree_in(&eta).unwrap_or(0),
        });
    }
    Ok(Certificate { k, equations, total_degree_product: candidate.total_degree_product })
}
