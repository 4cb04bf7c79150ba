//! MLE systems, the vector version `X = η + Σvₖeₖ + c·Σfⱼeⱼ` and elimination of `v`.

use std::sync::Arc;

use num_traits::Zero;

use super::frames::{determinant, normalize_integer, strip_content, Content};
use super::{proportionality_factor, Clazz, EstimatingSystem, EstimatorError};
use crate::groebner::{buchberger, GroebnerLimits};
use crate::models::{Model, Parametrization};
use crate::polyalg::{MonomialOrder, Polynomial, Rat, Var, VariableTable};

/// Perturbation polynomials `f_j(u, v)` and the constant `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationChoice {
    /// One polynomial per completion vector.
    pub f: Vec<Polynomial<Rat>>,
    /// `None` keeps `c` as a symbol.
    pub c: Option<Rat>,
}

impl PerturbationChoice {
    /// `f₁ = v₁³` for second order or `v₁²` for first order; the other `f_j` vanish.
    pub fn default_for(model: &Model, clazz: Clazz, c: Option<Rat>) -> Result<Self, EstimatorError> {
        let e = min_v_degree(clazz)?;
        let mut f = vec![Polynomial::zero(); model.frames.completion.len()];
        if let Some(f0) = f.first_mut() {
            *f0 = Polynomial::var(model.v[0]).pow(e);
        }
        Ok(PerturbationChoice { f, c })
    }

    /// Checks that every `f_j` has v-degree at least the class bound.
    pub fn validate(&self, model: &Model, clazz: Clazz) -> Result<(), EstimatorError> {
        let required = min_v_degree(clazz)?;
        if self.f.len() != model.frames.completion.len() {
            return Err(EstimatorError::PerturbationCount { expected: model.frames.completion.len(), got: self.f.len() });
        }
        for (index, f) in self.f.iter().enumerate() {
            if let Some(degree) = f.min_degree_in(&model.v) {
                if degree < required {
                    return Err(EstimatorError::PerturbationDegree { index: index + 1, degree, required });
                }
            }
        }
        Ok(())
    }
}

fn min_v_degree(clazz: Clazz) -> Result<u32, EstimatorError> {
    match clazz {
        Clazz::FirstOrder => Ok(2),
        Clazz::SecondOrder => Ok(3),
        found => Err(EstimatorError::ClazzMismatch { expected: "first-order or second-order", found }),
    }
}

/// The vector version of an estimator: `d` equations (plus model constraints
/// for implicit models) in the unknowns `u ∪ v`, with data `X`.
#[derive(Clone, Debug)]
pub struct VectorSystem {
    pub model: crate::models::ModelId,
    pub table: Arc<VariableTable>,
    pub equations: Vec<Polynomial<Rat>>,
    pub is_constraint: Vec<bool>,
    /// Unknowns other than `v`.
    pub unknowns: Vec<Var>,
    pub v: Vec<Var>,
    pub c: Option<Rat>,
    pub clazz: Clazz,
    constraints: Vec<Polynomial<Rat>>,
}

fn residual(model: &Model) -> Vec<Polynomial<Rat>> {
    let eta: Vec<Polynomial<Rat>> = match &model.parametrization {
        Parametrization::Explicit { eta } => eta.clone(),
        Parametrization::Implicit { .. } => model.eta.iter().map(|&v| Polynomial::var(v)).collect(),
    };
    model.x.iter().zip(&eta).map(|(&x, e)| &Polynomial::var(x) - e).collect()
}

fn unknowns_of(model: &Model) -> Vec<Var> {
    if model.is_explicit() {
        model.params.clone()
    } else {
        model.eta.clone()
    }
}

/// MLE system: the orthogonality equations `Σᵢ (Xᵢ − ηᵢ)·ẽⱼᵢ = 0` followed by
/// the model constraints (implicit models), with symbolic data.
pub fn build_mle_system(model: &Model) -> Result<EstimatingSystem, EstimatorError> {
    let r = residual(model);
    let content = if model.is_explicit() && model.p == 1 { Content::Univariate(model.params[0]) } else { Content::Monomial };
    let mut equations = Vec::new();
    for dual in &model.frames.dual {
        let eq = r.iter().zip(dual).fold(Polynomial::zero(), |acc, (a, b)| &acc + &(a * b));
        if eq.is_zero() {
            return Err(EstimatorError::DegenerateFrame);
        }
        let eq = strip_content(&[eq], content);
        equations.extend(normalize_integer(&eq));
    }
    let mut is_constraint = vec![false; equations.len()];
    if !model.is_explicit() {
        equations.extend(model.constraints.iter().cloned());
        is_constraint.resize(equations.len(), true);
    }
    EstimatingSystem::new(
        model.id,
        model.table.clone(),
        equations,
        is_constraint,
        unknowns_of(model),
        Clazz::Mle,
        Some(Rat::zero()),
    )
}

/// `X − η + Σₖ vₖ·eₖ + c·Σⱼ fⱼ·eⱼ` with normals `eₖ` and completion vectors `eⱼ`.
pub fn build_vector_version(
    model: &Model,
    choice: &PerturbationChoice,
    clazz: Clazz,
) -> Result<VectorSystem, EstimatorError> {
    choice.validate(model, clazz)?;
    let frames = &model.frames;
    let basis: Vec<Vec<Polynomial<Rat>>> = frames.completion.iter().chain(&frames.normals).cloned().collect();
    let columns: Vec<Vec<Polynomial<Rat>>> =
        (0..model.d).map(|i| basis.iter().map(|e| e[i].clone()).collect()).collect();
    if basis.len() != model.d || determinant(&columns).is_zero() {
        return Err(EstimatorError::DegenerateFrame);
    }
    let c = match &choice.c {
        Some(c) => Polynomial::constant(c.clone()),
        None => Polynomial::var(model.c),
    };
    let mut equations = residual(model);
    for (k, e) in frames.normals.iter().enumerate() {
        let vk = Polynomial::var(model.v[k]);
        for (eq, ei) in equations.iter_mut().zip(e) {
            *eq = &*eq + &(&vk * ei);
        }
    }
    for (f, e) in choice.f.iter().zip(&frames.completion) {
        let cf = &c * f;
        for (eq, ei) in equations.iter_mut().zip(e) {
            *eq = &*eq + &(&cf * ei);
        }
    }
    let mut is_constraint = vec![false; equations.len()];
    if !model.is_explicit() {
        equations.extend(model.constraints.iter().cloned());
        is_constraint.resize(equations.len(), true);
    }
    Ok(VectorSystem {
        model: model.id,
        table: model.table.clone(),
        equations,
        is_constraint,
        unknowns: unknowns_of(model),
        v: model.v[..frames.normals.len()].to_vec(),
        c: choice.c.clone(),
        clazz,
        constraints: model.constraints.clone(),
    })
}

/// Pure lex elimination order `v ≻ X ≻ c ≻ u` used by [`eliminate_v`].
pub fn elimination_order(vs: &VectorSystem) -> MonomialOrder {
    let t = &vs.table;
    let mut priority = vs.v.clone();
    priority.extend(t.block(crate::polyalg::Block::X));
    if let Some(c) = t.id("c") {
        priority.push(c);
    }
    for &u in vs.unknowns.iter().rev() {
        if !priority.contains(&u) {
            priority.push(u);
        }
    }
    MonomialOrder::lex(priority).expect("distinct variables")
}

/// Eliminates the frame coordinates `v`: the algebraic version consists of the
/// elements of a lex Gröbner basis free of `v`.
pub fn eliminate_v(vs: &VectorSystem, limits: GroebnerLimits) -> Result<EstimatingSystem, EstimatorError> {
    let ord = elimination_order(vs);
    let gb = buchberger(&vs.equations, &ord, limits)?;
    let mut equations = Vec::new();
    let mut is_constraint = Vec::new();
    for g in gb.generators().iter().rev() {
        if g.degree_in(&vs.v).unwrap_or(0) == 0 {
            let g = normalize_integer(std::slice::from_ref(g)).remove(0);
            is_constraint.push(vs.constraints.iter().any(|m| proportionality_factor(&g, m).is_some()));
            equations.push(g);
        }
    }
    EstimatingSystem::new(vs.model, vs.table.clone(), equations, is_constraint, vs.unknowns.clone(), vs.clazz, vs.c.clone())
}
