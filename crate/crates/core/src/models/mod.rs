//! Built-in curved exponential families: symbolic descriptors, numeric
//! parametrizations and samplers of the sufficient-statistic mean.

pub mod reference;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use thiserror::Error;

use crate::estimators::frames::{complement_normals, dual_vectors, mat_vec, adjugate, determinant, Content, FrameSet, PolyVec};
use crate::polyalg::{parse_poly, rat, Block, PolyError, Polynomial, Rat, Var, VariableTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("intensities must be positive, got {0}")]
    NonPositive(f64),
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("point violates the model constraints (residual {0:.3e})")]
    ConstraintViolation(f64),
    #[error("singular Jacobian while solving the constraints")]
    SingularJacobian,
    #[error("this model has no explicit parametrization for the requested map")]
    Unsupported,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Identifier of a built-in model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelId {
    PeriodicGaussian,
    LogMarginal,
    ToyLinear,
}

impl ModelId {
    pub const ALL: [ModelId; 3] = [ModelId::PeriodicGaussian, ModelId::LogMarginal, ModelId::ToyLinear];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::PeriodicGaussian => "periodic-gaussian",
            ModelId::LogMarginal => "log-marginal",
            ModelId::ToyLinear => "toy-linear",
        }
    }

    pub fn build(self) -> Model {
        match self {
            ModelId::PeriodicGaussian => periodic_gaussian(),
            ModelId::LogMarginal => log_marginal(),
            ModelId::ToyLinear => toy_linear(),
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelId::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| ModelError::UnknownModel(s.to_string()))
    }
}

/// Coordinates in which a Fisher matrix is expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricDirection {
    /// `G = ∂²ψ/∂θ∂θ`, equal to the covariance of the sufficient statistic.
    Theta,
    /// `Ḡ = G⁻¹`.
    Eta,
}

#[derive(Clone, Debug)]
pub struct FisherMetric {
    pub matrix: Vec<PolyVec>,
    pub direction: MetricDirection,
}

/// How η depends on the model parameters.
#[derive(Clone, Debug)]
pub enum Parametrization {
    /// η = η(u), polynomial in the parameter variables.
    Explicit { eta: PolyVec },
    /// η constrained by the model constraints; the parameters are the η
    /// coordinates at positions `free`, the rest are determined implicitly.
    Implicit { free: Vec<usize>, dependent: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SamplerKind {
    CirculantGaussian,
    Poisson,
    GaussianMean,
}

/// A point of a model given by both its parameters and its η-coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TruePoint {
    pub u: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Descriptor of a curved exponential family.
#[derive(Clone, Debug)]
pub struct Model {
    pub id: ModelId,
    pub d: usize,
    pub p: usize,
    pub table: Arc<VariableTable>,
    pub eta: Vec<Var>,
    pub x: Vec<Var>,
    /// Parameter variables u (for implicit models a subset of `eta`).
    pub params: Vec<Var>,
    /// Frame coordinates v.
    pub v: Vec<Var>,
    /// Perturbation constant c.
    pub c: Var,
    pub parametrization: Parametrization,
    /// Constraint polynomials m_j vanishing on the model.
    pub constraints: PolyVec,
    pub fisher: FisherMetric,
    pub frames: FrameSet,
    sampler: SamplerKind,
}

fn polys(src: &[&str], t: &VariableTable) -> PolyVec {
    src.iter().map(|s| parse_poly(s, t).expect("built-in polynomial parses")).collect()
}

/// Periodic Gaussian: `X ~ N(0, Σ(a))` on ℝ⁴ with circulant Σ(a) of first
/// row `(1, a, a², a)`; d = 3, p = 1, η(a) = (−2, −4a, −2a²).
pub fn periodic_gaussian() -> Model {
    let t = VariableTable::from_entries(
        ["eta1", "eta2", "eta3"]
            .iter()
            .map(|n| (n.to_string(), Block::Eta))
            .chain(["x1", "x2", "x3"].iter().map(|n| (n.to_string(), Block::X)))
            .chain(["a", "v1", "v2", "c"].iter().map(|n| (n.to_string(), Block::Aux))),
    )
    .expect("valid table");
    let a = t.id("a").unwrap();
    let eta_u = polys(&["-2", "-4*a", "-2*a^2"], &t);
    let fisher = polys(
        &[
            "2*(a^2+1)^2", "8*a*(1+a^2)", "8*a^2",
            "8*a*(1+a^2)", "4*(a^4+6*a^2+1)", "8*a*(1+a^2)",
            "8*a^2", "8*a*(1+a^2)", "2*(a^2+1)^2",
        ],
        &t,
    );
    let fisher: Vec<PolyVec> = fisher.chunks(3).map(|r| r.to_vec()).collect();
    let tangent = vec![eta_u.iter().map(|p| p.diff(a)).collect::<PolyVec>()];
    let normals = vec![polys(&["3*a^2+1", "4*a", "0"], &t), polys(&["-a^2-1", "0", "2"], &t)];
    let completion = vec![polys(&["0", "-1", "-a"], &t)];
    let dual = dual_vectors(&tangent, &fisher, Content::Univariate(a));
    Model {
        id: ModelId::PeriodicGaussian,
        d: 3,
        p: 1,
        eta: t.block(Block::Eta),
        x: t.block(Block::X),
        params: vec![a],
        v: vec![t.id("v1").unwrap(), t.id("v2").unwrap()],
        c: t.id("c").unwrap(),
        parametrization: Parametrization::Explicit { eta: eta_u },
        constraints: polys(&["eta1 + 2", "eta2^2 + 8*eta3"], &t),
        fisher: FisherMetric { matrix: fisher, direction: MetricDirection::Theta },
        frames: FrameSet { tangent, normals, completion, dual },
        sampler: SamplerKind::CirculantGaussian,
        table: Arc::new(t),
    }
}

/// Log-marginal Poisson model on a 2×3 table with constant acceleration of
/// the row ratio; d = 6, p = 3, u = (η₁, η₃, η₅), v = (η₂, η₄, η₆).
///
/// The sum constraint is `Σηᵢ − Σxᵢ`, so the total is taken from the data.
pub fn log_marginal() -> Model {
    let t = VariableTable::eta_x(6, &["v1", "v2", "v3", "c"]).expect("valid table");
    let eta = t.block(Block::Eta);
    let constraints = polys(
        &[
            "eta1*eta3*eta5^2 - eta2^2*eta4*eta6",
            "eta1 + eta2 + eta3 - eta4 - eta5 - eta6",
            "eta1 + eta2 + eta3 + eta4 + eta5 + eta6 - x1 - x2 - x3 - x4 - x5 - x6",
        ],
        &t,
    );
    let free = vec![0, 2, 4];
    let dependent = vec![1, 3, 5];
    let tangent = implicit_tangents(&constraints, &eta, &free, &dependent);
    let fisher: Vec<PolyVec> = (0..6)
        .map(|i| (0..6).map(|j| if i == j { Polynomial::var(eta[i]) } else { Polynomial::zero() }).collect())
        .collect();
    let e0 = polys(
        &[
            "eta2^2*(eta4-eta6)",
            "-eta2^2*(eta4-eta6)",
            "0",
            "-eta3*eta5^2 - 2*eta2*eta4*eta6",
            "0",
            "eta3*eta5^2 + 2*eta2*eta4*eta6",
        ],
        &t,
    );
    let normals = vec![
        polys(&["eta1", "eta2", "eta3", "0", "0", "0"], &t),
        polys(
            &[
                "eta1*(-eta1*eta5^2 + eta3*eta5^2)",
                "eta2*(-eta1*eta5^2 - 2*eta2*eta4*eta6)",
                "0",
                "eta4*(eta2^2*eta4 - eta2^2*eta6)",
                "eta5*(eta2^2*eta4 + 2*eta1*eta3*eta5)",
                "0",
            ],
            &t,
        ),
        polys(
            &[
                "eta1*(eta1*eta5^2 - eta3*eta5^2)",
                "eta2*(eta1*eta5^2 + 2*eta2*eta4*eta6)",
                "0",
                "eta4*(2*eta1*eta3*eta5 + eta2^2*eta6)",
                "0",
                "eta6*(eta2^2*eta4 + 2*eta1*eta3*eta5)",
            ],
            &t,
        ),
    ];
    let completion = vec![e0, tangent[1].clone(), tangent[2].clone()];
    let dual = dual_vectors(&tangent, &fisher, Content::Monomial);
    Model {
        id: ModelId::LogMarginal,
        d: 6,
        p: 3,
        params: free.iter().map(|&i| eta[i]).collect(),
        x: t.block(Block::X),
        v: vec![t.id("v1").unwrap(), t.id("v2").unwrap(), t.id("v3").unwrap()],
        c: t.id("c").unwrap(),
        parametrization: Parametrization::Implicit { free, dependent },
        constraints,
        fisher: FisherMetric { matrix: fisher, direction: MetricDirection::Theta },
        frames: FrameSet { tangent, normals, completion, dual },
        sampler: SamplerKind::Poisson,
        eta,
        table: Arc::new(t),
    }
}

/// Parabola η(u) = (u, u²) in a Gaussian-mean family with identity metric.
pub fn toy_linear() -> Model {
    let t = VariableTable::eta_x(2, &["u", "v1", "c"]).expect("valid table");
    let u = t.id("u").unwrap();
    let eta_u = polys(&["u", "u^2"], &t);
    let fisher = vec![polys(&["1", "0"], &t), polys(&["0", "1"], &t)];
    let tangent = vec![eta_u.iter().map(|p| p.diff(u)).collect::<PolyVec>()];
    let normals = complement_normals(&tangent[0], &fisher);
    let dual = dual_vectors(&tangent, &fisher, Content::Univariate(u));
    Model {
        id: ModelId::ToyLinear,
        d: 2,
        p: 1,
        eta: t.block(Block::Eta),
        x: t.block(Block::X),
        params: vec![u],
        v: vec![t.id("v1").unwrap()],
        c: t.id("c").unwrap(),
        parametrization: Parametrization::Explicit { eta: eta_u },
        constraints: polys(&["eta2 - eta1^2"], &t),
        fisher: FisherMetric { matrix: fisher, direction: MetricDirection::Theta },
        frames: FrameSet { completion: tangent.clone(), tangent, normals, dual },
        sampler: SamplerKind::GaussianMean,
        table: Arc::new(t),
    }
}

/// Determinant-scaled tangents of the variety `m = 0` in the free coordinates:
/// the free part of ξ_a is `det(J_v)·e_a`, the dependent part `−adj(J_v)·∂m/∂u_a`.
fn implicit_tangents(m: &[Polynomial<Rat>], eta: &[Var], free: &[usize], dependent: &[usize]) -> Vec<PolyVec> {
    let jv: Vec<PolyVec> = m.iter().map(|mi| dependent.iter().map(|&j| mi.diff(eta[j])).collect()).collect();
    let det = determinant(&jv);
    let adj = adjugate(&jv);
    free.iter()
        .enumerate()
        .map(|(a, &ua)| {
            let dm: PolyVec = m.iter().map(|mi| mi.diff(eta[ua])).collect();
            let dv = mat_vec(&adj, &dm);
            let mut xi = vec![Polynomial::zero(); eta.len()];
            for (b, &ub) in free.iter().enumerate() {
                if a == b {
                    xi[ub] = det.clone();
                }
            }
            for (k, &vk) in dependent.iter().enumerate() {
                xi[vk] = -&dv[k];
            }
            xi
        })
        .collect()
}

impl Model {
    pub fn is_explicit(&self) -> bool {
        matches!(self.parametrization, Parametrization::Explicit { .. })
    }

    /// Symbolic η(u) for explicit models.
    pub fn eta_of_u(&self) -> Option<&[Polynomial<Rat>]> {
        match &self.parametrization {
            Parametrization::Explicit { eta } => Some(eta),
            Parametrization::Implicit { .. } => None,
        }
    }

    /// Dense assignment over the variable table.
    fn assignment(&self, eta: &[f64], u: &[f64], data: &[f64]) -> Vec<f64> {
        let mut a = vec![0.0; self.table.len()];
        for (i, &v) in self.eta.iter().enumerate() {
            a[v] = eta.get(i).copied().unwrap_or(0.0);
        }
        for (i, &v) in self.x.iter().enumerate() {
            a[v] = data.get(i).copied().unwrap_or(0.0);
        }
        if self.is_explicit() {
            for (i, &v) in self.params.iter().enumerate() {
                a[v] = u[i];
            }
        }
        a
    }

    fn check_params(&self, u: &[f64]) -> Result<(), ModelError> {
        if u.len() != self.p {
            return Err(ModelError::Dimension { expected: self.p, got: u.len() });
        }
        if self.id == ModelId::PeriodicGaussian && !(0.0..1.0).contains(&u[0]) {
            return Err(ModelError::OutOfRange { name: "a", value: u[0], range: "[0, 1)" });
        }
        Ok(())
    }

    /// η at parameters `u`. Implicit models solve the constraints by Newton's
    /// method from `anchor`, a nearby η that also fixes the data-dependent
    /// constraint constants (the data block is bound to `anchor`).
    pub fn eta_at(&self, u: &[f64], anchor: Option<&[f64]>) -> Result<Vec<f64>, ModelError> {
        Ok(self.eta_jacobian(u, anchor)?.0)
    }

    /// η(u) together with the Jacobian rows `∂η/∂u_a`.
    pub fn eta_jacobian(&self, u: &[f64], anchor: Option<&[f64]>) -> Result<(Vec<f64>, Vec<Vec<f64>>), ModelError> {
        if u.len() != self.p {
            return Err(ModelError::Dimension { expected: self.p, got: u.len() });
        }
        match &self.parametrization {
            Parametrization::Explicit { eta } => {
                let a = self.assignment(&[], u, &[]);
                let e = eta.iter().map(|p| p.eval_f64(&a)).collect::<Result<Vec<_>, _>>()?;
                let jac = self
                    .params
                    .iter()
                    .map(|&w| eta.iter().map(|p| p.diff(w).eval_f64(&a)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((e, jac))
            }
            Parametrization::Implicit { free, dependent } => {
                let anchor = anchor.ok_or(ModelError::Unsupported)?;
                if anchor.len() != self.d {
                    return Err(ModelError::Dimension { expected: self.d, got: anchor.len() });
                }
                let mut e = anchor.to_vec();
                for (k, &i) in free.iter().enumerate() {
                    e[i] = u[k];
                }
                let jv = |e: &[f64]| -> Result<(DVector<f64>, DMatrix<f64>, DMatrix<f64>), ModelError> {
                    let a = self.assignment(e, &[], anchor);
                    let r = self.constraints.iter().map(|m| m.eval_f64(&a)).collect::<Result<Vec<_>, _>>()?;
                    let mut jv = DMatrix::zeros(dependent.len(), dependent.len());
                    let mut ju = DMatrix::zeros(dependent.len(), free.len());
                    for (i, m) in self.constraints.iter().enumerate() {
                        for (j, &k) in dependent.iter().enumerate() {
                            jv[(i, j)] = m.diff(self.eta[k]).eval_f64(&a)?;
                        }
                        for (j, &k) in free.iter().enumerate() {
                            ju[(i, j)] = m.diff(self.eta[k]).eval_f64(&a)?;
                        }
                    }
                    Ok((DVector::from_vec(r), jv, ju))
                };
                for _ in 0..100 {
                    let (r, j, _) = jv(&e)?;
                    let step = j.lu().solve(&r).ok_or(ModelError::SingularJacobian)?;
                    for (k, &i) in dependent.iter().enumerate() {
                        e[i] -= step[k];
                    }
                    let scale = e.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                    if step.amax() <= 4.0 * f64::EPSILON * scale {
                        break;
                    }
                }
                let (r, j, ju) = jv(&e)?;
                if r.amax() > 1e-9 {
                    return Err(ModelError::ConstraintViolation(r.amax()));
                }
                let dv = -j.lu().solve(&ju).ok_or(ModelError::SingularJacobian)?;
                let jac = (0..free.len())
                    .map(|a| {
                        let mut row = vec![0.0; self.d];
                        row[free[a]] = 1.0;
                        for (k, &i) in dependent.iter().enumerate() {
                            row[i] = dv[(k, a)];
                        }
                        row
                    })
                    .collect();
                Ok((e, jac))
            }
        }
    }

    /// Fisher matrix w.r.t. θ at the model point with coordinates `eta`/`u`.
    pub fn fisher_theta_at(&self, eta: &[f64], u: &[f64]) -> Result<DMatrix<f64>, ModelError> {
        let a = self.assignment(eta, u, eta);
        let g = DMatrix::from_fn(self.d, self.d, |i, j| self.fisher.matrix[i][j].eval_f64(&a).unwrap_or(f64::NAN));
        if g.iter().any(|x| !x.is_finite()) {
            return Err(ModelError::Poly(PolyError::Unbound(0)));
        }
        Ok(match self.fisher.direction {
            MetricDirection::Theta => g,
            MetricDirection::Eta => g.try_inverse().ok_or(ModelError::SingularJacobian)?,
        })
    }

    /// Parameters from η: the free coordinates for implicit models.
    pub fn params_of_eta(&self, eta: &[f64]) -> Result<Vec<f64>, ModelError> {
        match &self.parametrization {
            Parametrization::Implicit { free, .. } => Ok(free.iter().map(|&i| eta[i]).collect()),
            Parametrization::Explicit { .. } => Err(ModelError::Unsupported),
        }
    }

    /// True point from parameters (explicit models).
    pub fn truth_from_params(&self, u: &[f64]) -> Result<TruePoint, ModelError> {
        self.check_params(u)?;
        if !self.is_explicit() {
            return Err(ModelError::Unsupported);
        }
        Ok(TruePoint { u: u.to_vec(), eta: self.eta_at(u, None)? })
    }

    /// True point from η (implicit models); the constraints must hold to 1e−12
    /// with the data block bound to η itself.
    pub fn truth_from_eta(&self, eta: &[f64]) -> Result<TruePoint, ModelError> {
        if eta.len() != self.d {
            return Err(ModelError::Dimension { expected: self.d, got: eta.len() });
        }
        if self.is_explicit() {
            return Err(ModelError::Unsupported);
        }
        if let Some(&bad) = eta.iter().find(|&&e| e <= 0.0) {
            return Err(ModelError::NonPositive(bad));
        }
        let r = self.constraint_residual(eta, eta)?;
        if r > 1e-12 {
            return Err(ModelError::ConstraintViolation(r));
        }
        Ok(TruePoint { u: self.params_of_eta(eta)?, eta: eta.to_vec() })
    }

    /// True point from either parameter or η coordinates, by length.
    pub fn truth(&self, values: &[f64]) -> Result<TruePoint, ModelError> {
        if values.len() == self.p && self.is_explicit() {
            self.truth_from_params(values)
        } else {
            self.truth_from_eta(values)
        }
    }

    /// Largest absolute constraint value at `eta` with data `data`.
    pub fn constraint_residual(&self, eta: &[f64], data: &[f64]) -> Result<f64, ModelError> {
        let a = self.assignment(eta, &[], data);
        let mut worst = 0.0f64;
        for m in &self.constraints {
            worst = worst.max(m.eval_f64(&a)?.abs());
        }
        Ok(worst)
    }

    /// Mean of the sufficient statistic over `n` independent observations.
    pub fn sample_mean<R: Rng + ?Sized>(&self, truth: &TruePoint, n: u64, rng: &mut R) -> Result<Vec<f64>, ModelError> {
        if n == 0 {
            return Err(ModelError::Dimension { expected: 1, got: 0 });
        }
        match self.sampler {
            SamplerKind::CirculantGaussian => {
                let a = truth.u[0];
                self.check_params(&truth.u)?;
                let r = (1.0 - a * a).sqrt();
                let s = [(1.0 + r) / 2.0, a / 2.0, (1.0 - r) / 2.0, a / 2.0];
                let mut acc = [0.0f64; 3];
                for _ in 0..n {
                    let z: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
                    let x: [f64; 4] = std::array::from_fn(|i| (0..4).map(|j| s[(j + 4 - i) % 4] * z[j]).sum());
                    let t = circulant_statistic(&x);
                    for k in 0..3 {
                        acc[k] += t[k];
                    }
                }
                Ok(acc.iter().map(|s| s / n as f64).collect())
            }
            SamplerKind::Poisson => truth
                .eta
                .iter()
                .map(|&lam| {
                    if lam <= 0.0 {
                        return Err(ModelError::NonPositive(lam));
                    }
                    let total: f64 = Poisson::new(lam * n as f64).map_err(|_| ModelError::NonPositive(lam))?.sample(rng);
                    Ok(total / n as f64)
                })
                .collect(),
            SamplerKind::GaussianMean => {
                let sd = 1.0 / (n as f64).sqrt();
                let normal = Normal::new(0.0, sd).expect("positive standard deviation");
                Ok(truth.eta.iter().map(|&m| m + normal.sample(rng)).collect())
            }
        }
    }
}

/// Sufficient statistic of the periodic Gaussian:
/// `(−½Σxᵢ², −(x₁x₂+x₂x₃+x₃x₄+x₄x₁), −(x₁x₃+x₂x₄))`.
pub fn circulant_statistic(x: &[f64; 4]) -> [f64; 3] {
    [
        -0.5 * x.iter().map(|v| v * v).sum::<f64>(),
        -(x[0] * x[1] + x[1] * x[2] + x[2] * x[3] + x[3] * x[0]),
        -(x[0] * x[2] + x[1] * x[3]),
    ]
}

/// The point η* = (1/6, 1/4, 1/12, 1/12, 1/4, 1/6) of the log-marginal model.
pub fn log_marginal_reference_point() -> [Rat; 6] {
    [rat(1, 6), rat(1, 4), rat(1, 12), rat(1, 12), rat(1, 4), rat(1, 6)]
}
