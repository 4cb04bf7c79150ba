//! Estimating systems: MLE, vector and algebraic versions, degree reduction,
//! efficiency certificates and bias correction.

mod bias;
mod construct;
pub mod frames;
mod reduce;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::groebner::GroebnerError;
use crate::models::{ModelError, ModelId};
use crate::polyalg::{format_poly, format_rat, parse_poly, parse_rat, PolyError, Polynomial, Rat, Var, VariableTable};

pub use bias::{bias_correction, numeric_bias, BiasSource, BiasTerm, BIAS_STEP};
pub use construct::{build_mle_system, build_vector_version, eliminate_v, PerturbationChoice, VectorSystem};
pub use reduce::{certify_class, reduce_system, Certificate, EquationCertificate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("expected a {expected} system, got {found}")]
    ClazzMismatch { expected: &'static str, found: Clazz },
    #[error("system has {equations} equations in {unknowns} unknowns")]
    NotSquare { equations: usize, unknowns: usize },
    #[error("reduction needs the eta block as unknowns")]
    NotEtaUnknowns,
    #[error("perturbation f_{index} has v-degree {degree}, below the required {required}")]
    PerturbationDegree { index: usize, degree: u32, required: u32 },
    #[error("expected {expected} perturbation polynomials, got {got}")]
    PerturbationCount { expected: usize, got: usize },
    #[error("the frame is degenerate")]
    DegenerateFrame,
    #[error("systems are not aligned: {0}")]
    Alignment(String),
    #[error("Fisher matrix is singular at the requested point")]
    SingularFisher,
    #[error("malformed system text: {0}")]
    Format(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Efficiency class of an estimating system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clazz {
    Mle,
    FirstOrder,
    SecondOrder,
    ReducedFirstOrder,
    ReducedSecondOrder,
}

impl Clazz {
    pub const ALL: [Clazz; 5] =
        [Clazz::Mle, Clazz::FirstOrder, Clazz::SecondOrder, Clazz::ReducedFirstOrder, Clazz::ReducedSecondOrder];

    pub fn as_str(self) -> &'static str {
        match self {
            Clazz::Mle => "mle",
            Clazz::FirstOrder => "first-order",
            Clazz::SecondOrder => "second-order",
            Clazz::ReducedFirstOrder => "reduced-first-order",
            Clazz::ReducedSecondOrder => "reduced-second-order",
        }
    }

    /// The `k` of the reduction ideal whose membership preserves this class.
    pub fn ideal_order(self) -> Option<usize> {
        match self {
            Clazz::FirstOrder | Clazz::ReducedFirstOrder => Some(2),
            Clazz::SecondOrder | Clazz::ReducedSecondOrder => Some(3),
            Clazz::Mle => None,
        }
    }
}

impl fmt::Display for Clazz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Clazz {
    type Err = EstimatorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Clazz::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| EstimatorError::Format(format!("unknown class `{s}`")))
    }
}

/// A square polynomial system whose roots define an estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatingSystem {
    pub model: ModelId,
    pub table: Arc<VariableTable>,
    pub equations: Vec<Polynomial<Rat>>,
    /// `true` for model constraints, which reductions pass through.
    pub is_constraint: Vec<bool>,
    pub unknowns: Vec<Var>,
    pub clazz: Clazz,
    /// Perturbation constant; `None` when `c` is kept as a symbol.
    pub c: Option<Rat>,
    pub total_degree_product: u128,
}

impl EstimatingSystem {
    /// Assembles a system and computes its total degree product.
    pub fn new(
        model: ModelId,
        table: Arc<VariableTable>,
        equations: Vec<Polynomial<Rat>>,
        is_constraint: Vec<bool>,
        unknowns: Vec<Var>,
        clazz: Clazz,
        c: Option<Rat>,
    ) -> Result<Self, EstimatorError> {
        if equations.len() != unknowns.len() {
            return Err(EstimatorError::NotSquare { equations: equations.len(), unknowns: unknowns.len() });
        }
        if is_constraint.len() != equations.len() {
            return Err(EstimatorError::Alignment("constraint flags do not match equations".into()));
        }
        let total_degree_product = degree_product(&equations, &unknowns);
        Ok(EstimatingSystem { model, table, equations, is_constraint, unknowns, clazz, c, total_degree_product })
    }

    /// Degree of each equation in the unknowns.
    pub fn degrees(&self) -> Vec<u32> {
        self.equations.iter().map(|p| p.degree_in(&self.unknowns).unwrap_or(0)).collect()
    }

    /// Indices of equations that are not model constraints.
    pub fn estimating_indices(&self) -> Vec<usize> {
        (0..self.equations.len()).filter(|&i| !self.is_constraint[i]).collect()
    }

    /// Highest η-degree among the non-constraint equations.
    pub fn max_eta_degree(&self) -> u32 {
        let eta = self.table.block(crate::polyalg::Block::Eta);
        self.estimating_indices().iter().filter_map(|&i| self.equations[i].degree_in(&eta)).max().unwrap_or(0)
    }

    /// Largest absolute equation value at the dense assignment `values`.
    pub fn residual(&self, values: &[f64]) -> Result<f64, EstimatorError> {
        let mut worst = 0.0f64;
        for p in &self.equations {
            worst = worst.max(p.eval_f64(values)?.abs());
        }
        Ok(worst)
    }

    /// Serializes with a comment header followed by one equation per line.
    pub fn to_text(&self) -> String {
        let t = &self.table;
        let constraints: Vec<String> =
            self.is_constraint.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| (i + 1).to_string()).collect();
        let mut s = String::new();
        s += &format!("# model: {}\n", self.model);
        s += &format!("# clazz: {}\n", self.clazz);
        s += &format!("# c: {}\n", self.c.as_ref().map(format_rat).unwrap_or_else(|| "symbolic".into()));
        s += &format!(
            "# unknowns: {}\n",
            self.unknowns.iter().map(|&v| t.name(v)).collect::<Vec<_>>().join(", ")
        );
        s += &format!("# total_degree_product: {}\n", self.total_degree_product);
        s += &format!(
            "# constraints: {}\n",
            if constraints.is_empty() { "none".to_string() } else { constraints.join(", ") }
        );
        for p in &self.equations {
            s += &format_poly(p, t);
            s.push('\n');
        }
        s
    }

    /// Parses [`to_text`](Self::to_text) output; the variable table is the
    /// model's own. The stored degree product is checked against the equations.
    pub fn from_text(src: &str) -> Result<Self, EstimatorError> {
        let mut header = std::collections::BTreeMap::new();
        let mut lines = Vec::new();
        for line in src.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    header.insert(k.trim().to_string(), v.trim().to_string());
                }
            } else {
                lines.push(line);
            }
        }
        let field = |k: &str| header.get(k).ok_or_else(|| EstimatorError::Format(format!("missing header `{k}`")));
        let model: ModelId = field("model")?.parse()?;
        let clazz: Clazz = field("clazz")?.parse()?;
        let c = match field("c")?.as_str() {
            "symbolic" => None,
            v => Some(parse_rat(v).map_err(|e| EstimatorError::Format(e.to_string()))?),
        };
        let table = model.build().table;
        let unknowns = field("unknowns")?
            .split(',')
            .map(|n| table.id(n.trim()).ok_or_else(|| EstimatorError::Format(format!("unknown variable `{}`", n.trim()))))
            .collect::<Result<Vec<_>, _>>()?;
        let equations = lines.iter().map(|l| parse_poly(l, &table)).collect::<Result<Vec<_>, _>>()?;
        let mut is_constraint = vec![false; equations.len()];
        let cons = field("constraints")?;
        if cons != "none" {
            for tok in cons.split(',') {
                let i: usize = tok.trim().parse().map_err(|_| EstimatorError::Format(format!("bad index `{tok}`")))?;
                *is_constraint
                    .get_mut(i.wrapping_sub(1))
                    .ok_or_else(|| EstimatorError::Format(format!("constraint index {i} out of range")))? = true;
            }
        }
        let sys = EstimatingSystem::new(model, table, equations, is_constraint, unknowns, clazz, c)?;
        if let Ok(declared) = field("total_degree_product") {
            if declared.parse::<u128>().ok() != Some(sys.total_degree_product) {
                return Err(EstimatorError::Format(format!(
                    "declared total degree product {declared} but equations give {}",
                    sys.total_degree_product
                )));
            }
        }
        Ok(sys)
    }

    /// The system with the data block bound to `x`.
    pub fn with_data(&self, x: &[Rat]) -> Result<Self, EstimatorError> {
        let xs = self.table.block(crate::polyalg::Block::X);
        if x.len() != xs.len() {
            return Err(EstimatorError::Alignment(format!("expected {} data values, got {}", xs.len(), x.len())));
        }
        let values = xs.iter().copied().zip(x.iter().cloned()).collect();
        let equations = self.equations.iter().map(|p| p.partial_eval(&values)).collect();
        EstimatingSystem::new(
            self.model,
            self.table.clone(),
            equations,
            self.is_constraint.clone(),
            self.unknowns.clone(),
            self.clazz,
            self.c.clone(),
        )
    }
}

fn degree_product(equations: &[Polynomial<Rat>], unknowns: &[Var]) -> u128 {
    equations.iter().map(|p| p.degree_in(unknowns).unwrap_or(0) as u128).product()
}

/// The factor λ with `candidate = λ·reference`, if one exists and is nonzero.
pub fn proportionality_factor(candidate: &Polynomial<Rat>, reference: &Polynomial<Rat>) -> Option<Rat> {
    let (m, rc) = reference.natural_leading()?;
    let cc = candidate.coeff(m);
    if num_traits::Zero::is_zero(&cc) {
        return None;
    }
    let lambda = cc / rc;
    (candidate == &reference.scale(&lambda)).then_some(lambda)
}
