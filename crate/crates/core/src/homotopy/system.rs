//! Square complex polynomial systems compiled for fast evaluation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::HomotopyError;
use crate::polyalg::{Polynomial, Var};

#[derive(Clone, Debug)]
struct Term {
    coeff: Complex64,
    /// (unknown index, exponent), exponents ≥ 1.
    exps: Vec<(usize, u32)>,
}

/// A square system `f(z) = 0` in dense unknowns `z₀ … z_{n−1}`.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    equations: Vec<Vec<Term>>,
    degrees: Vec<u32>,
    n: usize,
}

impl CompiledSystem {
    /// Compiles `polys` in the listed unknowns; any other variable is an error.
    pub fn new(polys: &[Polynomial<Complex64>], unknowns: &[Var]) -> Result<Self, HomotopyError> {
        if polys.len() != unknowns.len() {
            return Err(HomotopyError::NotSquare { equations: polys.len(), unknowns: unknowns.len() });
        }
        let mut equations = Vec::with_capacity(polys.len());
        let mut degrees = Vec::with_capacity(polys.len());
        for (i, p) in polys.iter().enumerate() {
            let mut terms = Vec::with_capacity(p.len());
            for (m, c) in p.terms() {
                let mut exps = Vec::with_capacity(m.pairs().len());
                for &(v, e) in m.pairs() {
                    let k = unknowns.iter().position(|&u| u == v).ok_or(HomotopyError::Unbound(v))?;
                    exps.push((k, e));
                }
                terms.push(Term { coeff: *c, exps });
            }
            let d = p.total_degree().unwrap_or(0);
            if d == 0 {
                return Err(HomotopyError::ZeroDegree(i));
            }
            degrees.push(d);
            equations.push(terms);
        }
        Ok(CompiledSystem { equations, degrees, n: unknowns.len() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Total degree of each equation.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Bézout number `∏ dᵢ`.
    pub fn bezout_number(&self) -> u128 {
        self.degrees.iter().map(|&d| d as u128).product()
    }

    pub fn eval(&self, z: &[Complex64]) -> DVector<Complex64> {
        DVector::from_iterator(
            self.n,
            self.equations.iter().map(|terms| {
                terms.iter().map(|t| t.exps.iter().fold(t.coeff, |acc, &(k, e)| acc * z[k].powu(e))).sum()
            }),
        )
    }

    /// Values and Jacobian at `z`.
    pub fn eval_jacobian(&self, z: &[Complex64]) -> (DVector<Complex64>, DMatrix<Complex64>) {
        let mut f = DVector::zeros(self.n);
        let mut jac = DMatrix::zeros(self.n, self.n);
        for (i, terms) in self.equations.iter().enumerate() {
            for t in terms {
                let value = t.exps.iter().fold(t.coeff, |acc, &(k, e)| acc * z[k].powu(e));
                f[i] += value;
                for (j, &(k, e)) in t.exps.iter().enumerate() {
                    let mut d = t.coeff * Complex64::from(e as f64) * z[k].powu(e - 1);
                    for (l, &(k2, e2)) in t.exps.iter().enumerate() {
                        if l != j {
                            d *= z[k2].powu(e2);
                        }
                    }
                    jac[(i, k)] += d;
                }
            }
        }
        (f, jac)
    }

    /// Normwise backward error `maxᵢ |fᵢ(z)| / Σ |c|·ρ^|α|` over the terms of
    /// fᵢ, with `ρ = max(1, ‖z‖∞)`.
    pub fn backward_error(&self, z: &[Complex64]) -> f64 {
        let rho = z.iter().map(|c| c.norm()).fold(1.0, nan_max);
        let mut worst = 0.0f64;
        for terms in &self.equations {
            let mut value = Complex64::new(0.0, 0.0);
            let mut scale = 0.0;
            for t in terms {
                value += t.exps.iter().fold(t.coeff, |acc, &(k, e)| acc * z[k].powu(e));
                let degree: u32 = t.exps.iter().map(|&(_, e)| e).sum();
                scale += t.coeff.norm() * rho.powi(degree as i32);
            }
            worst = nan_max(worst, value.norm() / scale.max(f64::MIN_POSITIVE));
        }
        worst
    }
}

/// `max` that propagates NaN, so non-finite values are never hidden.
pub(crate) fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
