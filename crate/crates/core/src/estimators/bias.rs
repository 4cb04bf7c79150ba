//! First-order bias `bᵃ = Γ⁽ᵐ⁾ᵃ_cd g^cd` and its correction.

use nalgebra::DMatrix;

use super::EstimatorError;
use crate::models::reference::{PERIODIC_GAUSSIAN_BIAS_DEN, PERIODIC_GAUSSIAN_BIAS_NUM};
use crate::models::{Model, ModelId};
use crate::polyalg::{parse_poly, Polynomial, Rat, Var};

/// A bias term as rational functions of the parameters, one per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasTerm {
    pub params: Vec<Var>,
    pub numerators: Vec<Polynomial<Rat>>,
    pub denominator: Polynomial<Rat>,
}

impl BiasTerm {
    /// Closed form derived from the model's parametrization and metric.
    pub fn closed_form(model: &Model) -> BiasTerm {
        let t = &model.table;
        let (num, den) = match model.id {
            ModelId::PeriodicGaussian => ("a*(a^2 - 1)*(a^2 + 1)", "2*(1 + 2*a^2)^2"),
            ModelId::ToyLinear => ("4*u", "(1 + 4*u^2)^2"),
            ModelId::LogMarginal => ("0", "1"),
        };
        BiasTerm {
            params: model.params.clone(),
            numerators: vec![parse_poly(num, t).expect("valid closed form"); model.p],
            denominator: parse_poly(den, t).expect("valid closed form"),
        }
    }

    /// The published closed form, where one exists.
    pub fn printed(model: &Model) -> Option<BiasTerm> {
        match model.id {
            ModelId::PeriodicGaussian => Some(BiasTerm {
                params: model.params.clone(),
                numerators: vec![parse_poly(PERIODIC_GAUSSIAN_BIAS_NUM, &model.table).expect("valid reference")],
                denominator: parse_poly(PERIODIC_GAUSSIAN_BIAS_DEN, &model.table).expect("valid reference"),
            }),
            ModelId::LogMarginal => Some(BiasTerm::closed_form(model)),
            ModelId::ToyLinear => None,
        }
    }

    pub fn eval(&self, u: &[f64]) -> Result<Vec<f64>, EstimatorError> {
        let var_count = self.params.iter().copied().max().map_or(0, |m| m + 1);
        let mut values = vec![0.0; var_count];
        for (&v, &x) in self.params.iter().zip(u) {
            values[v] = x;
        }
        let den = self.denominator.eval_f64(&values)?;
        if den == 0.0 {
            return Err(EstimatorError::SingularFisher);
        }
        self.numerators.iter().map(|n| Ok(n.eval_f64(&values)? / den)).collect()
    }
}

/// Where [`bias_correction`] takes `b` from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BiasSource {
    ClosedForm,
    Numeric,
}

/// Step used for the numeric connection.
pub const BIAS_STEP: f64 = 1e-4;

/// `bᵃ(u) = g^{ae} g^{cd} (∂c∂d η)ᵀ Ḡ ∂e η` with the second derivatives taken
/// as central differences of the Jacobian of η(u), improved by one
/// Richardson step. Implicit models need `anchor`, see [`Model::eta_jacobian`].
pub fn numeric_bias(model: &Model, u: &[f64], anchor: Option<&[f64]>, h: f64) -> Result<Vec<f64>, EstimatorError> {
    let (p, d) = (model.p, model.d);
    let (eta, jac) = model.eta_jacobian(u, anchor)?;
    let jdiff = |c: usize, h: f64| -> Result<Vec<Vec<f64>>, EstimatorError> {
        let mut up = u.to_vec();
        let mut dn = u.to_vec();
        up[c] += h;
        dn[c] -= h;
        let (_, jp) = model.eta_jacobian(&up, anchor)?;
        let (_, jm) = model.eta_jacobian(&dn, anchor)?;
        Ok(jp.iter().zip(&jm).map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) / (2.0 * h)).collect()).collect())
    };
    // hess[c][e][i] = ∂c ∂e ηᵢ
    let mut hess = vec![vec![vec![0.0; d]; p]; p];
    for (c, hc) in hess.iter_mut().enumerate() {
        let coarse = jdiff(c, h)?;
        let fine = jdiff(c, h / 2.0)?;
        for e in 0..p {
            for i in 0..d {
                hc[e][i] = (4.0 * fine[e][i] - coarse[e][i]) / 3.0;
            }
        }
    }
    let gbar = model.fisher_theta_at(&eta, u)?.try_inverse().ok_or(EstimatorError::SingularFisher)?;
    let j = DMatrix::from_fn(p, d, |a, i| jac[a][i]);
    let dtheta = &j * &gbar;
    let ginv = (&dtheta * j.transpose()).try_inverse().ok_or(EstimatorError::SingularFisher)?;
    let mut contracted = vec![0.0; p];
    for (e, ce) in contracted.iter_mut().enumerate() {
        for c in 0..p {
            for dd in 0..p {
                let gamma: f64 = (0..d).map(|i| hess[c][dd][i] * dtheta[(e, i)]).sum();
                *ce += ginv[(c, dd)] * gamma;
            }
        }
    }
    Ok((0..p).map(|a| (0..p).map(|e| ginv[(a, e)] * contracted[e]).sum()).collect())
}

/// The O(1/N) bias of an estimate, `−b(û)/(2N)`; the corrected estimate is
/// `û` minus this vector.
pub fn bias_correction(
    model: &Model,
    u_hat: &[f64],
    n: f64,
    anchor: Option<&[f64]>,
    source: BiasSource,
) -> Result<Vec<f64>, EstimatorError> {
    let b = match source {
        BiasSource::ClosedForm => BiasTerm::closed_form(model).eval(u_hat)?,
        BiasSource::Numeric => numeric_bias(model, u_hat, anchor, BIAS_STEP)?,
    };
    Ok(b.iter().map(|x| -x / (2.0 * n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{log_marginal, periodic_gaussian, toy_linear};

    #[test]
    fn numeric_matches_closed_form_on_explicit_models() {
        for m in [periodic_gaussian(), toy_linear()] {
            let closed = BiasTerm::closed_form(&m);
            for u in [0.1, 0.3, 0.5, 0.7] {
                let n = numeric_bias(&m, &[u], None, BIAS_STEP).unwrap()[0];
                let c = closed.eval(&[u]).unwrap()[0];
                assert!((n - c).abs() <= 1e-9 * c.abs(), "{} at {u}: {n} vs {c}", m.id);
            }
        }
    }

    #[test]
    fn log_marginal_bias_vanishes() {
        let m = log_marginal();
        let star = [1.0 / 6.0, 0.25, 1.0 / 12.0, 1.0 / 12.0, 0.25, 1.0 / 6.0];
        let b = numeric_bias(&m, &m.params_of_eta(&star).unwrap(), Some(&star), BIAS_STEP).unwrap();
        assert!(b.iter().all(|x| x.abs() < 1e-8), "{b:?}");
    }
}
