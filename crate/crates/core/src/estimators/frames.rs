//! Frame vectors and the symbolic linear algebra used to build them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::polyalg::{divide_with_remainder, Monomial, MonomialOrder, Polynomial, Rat, Var};

/// A polynomial vector in ℝ[…]^d.
pub type PolyVec = Vec<Polynomial<Rat>>;

/// Frame vectors of a model.
///
/// `tangent` spans ∇_u η, `normals` span its Ḡ-orthogonal complement,
/// `completion` complements the normals to a basis of ℝ^d and `dual` holds
/// the vectors ẽ_j ∝ Ḡ ∂_j η used by the orthogonality equations.
#[derive(Clone, Debug)]
pub struct FrameSet {
    pub tangent: Vec<PolyVec>,
    pub normals: Vec<PolyVec>,
    pub completion: Vec<PolyVec>,
    pub dual: Vec<PolyVec>,
}

impl FrameSet {
    /// Polynomials ⟨e, t⟩ with the pairing `eᵀ·adj(G_θ)·t`, one per
    /// (normal, tangent) pair; all vanish when the normals are Ḡ-orthogonal.
    pub fn orthogonality_defects(&self, fisher_theta: &[PolyVec]) -> Vec<Polynomial<Rat>> {
        let adj = adjugate(fisher_theta);
        let mut out = Vec::new();
        for e in &self.normals {
            for t in &self.tangent {
                out.push(dot(e, &mat_vec(&adj, t)));
            }
        }
        out
    }
}

pub fn dot(a: &[Polynomial<Rat>], b: &[Polynomial<Rat>]) -> Polynomial<Rat> {
    a.iter().zip(b).fold(Polynomial::zero(), |acc, (x, y)| &acc + &(x * y))
}

pub fn mat_vec(m: &[PolyVec], v: &[Polynomial<Rat>]) -> PolyVec {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Determinant by Laplace expansion along the first row, skipping zeros.
pub fn determinant(m: &[PolyVec]) -> Polynomial<Rat> {
    let n = m.len();
    if n == 0 {
        return Polynomial::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<PolyVec> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = &m[0][j] * &determinant(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Classical adjugate, so that `adj(M)·M = det(M)·I`.
pub fn adjugate(m: &[PolyVec]) -> Vec<PolyVec> {
    let n = m.len();
    let mut adj = vec![vec![Polynomial::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<PolyVec> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, p)| p.clone()).collect())
                .collect();
            let c = determinant(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { c } else { -c };
        }
    }
    adj
}

/// Greatest common divisor of two univariate polynomials in `v`, monic.
pub fn univariate_gcd(p: &Polynomial<Rat>, q: &Polynomial<Rat>, v: Var) -> Polynomial<Rat> {
    let ord = MonomialOrder::lex(vec![v]).expect("single variable");
    let (mut a, mut b) = (p.clone(), q.clone());
    while !b.is_zero() {
        let r = divide_with_remainder(&a, std::slice::from_ref(&b), &ord).expect("nonzero divisor").remainder;
        a = b;
        b = r;
    }
    a.monic(&ord)
}

/// Content to remove from frame vectors and equations.
#[derive(Clone, Copy, Debug)]
pub enum Content {
    /// Common univariate factor in the given parameter, with every other
    /// variable treated as a coefficient indeterminate.
    Univariate(Var),
    /// Common monomial factor.
    Monomial,
}

/// Divides all entries by their common content.
pub fn strip_content(v: &[Polynomial<Rat>], content: Content) -> PolyVec {
    match content {
        Content::Monomial => {
            let g = v.iter().filter(|p| !p.is_zero()).map(Polynomial::monomial_content).reduce(|a, b| a.gcd(&b));
            let g = g.unwrap_or_else(Monomial::one);
            v.iter().map(|p| p.div_monomial(&g).expect("common monomial factor")).collect()
        }
        Content::Univariate(a) => {
            let mut g: Option<Polynomial<Rat>> = None;
            for p in v {
                for cof in p.collect_in(&p.variables().into_iter().filter(|&w| w != a).collect::<Vec<_>>()).values() {
                    g = Some(match g {
                        None => cof.monic(&MonomialOrder::lex(vec![a]).expect("single variable")),
                        Some(g) => univariate_gcd(&g, cof, a),
                    });
                }
            }
            let Some(g) = g else { return v.to_vec() };
            if g.total_degree() == Some(0) {
                return v.to_vec();
            }
            let ord = MonomialOrder::lex(vec![a]).expect("single variable");
            v.iter()
                .map(|p| {
                    let d = divide_with_remainder(p, std::slice::from_ref(&g), &ord).expect("nonzero divisor");
                    debug_assert!(d.remainder.is_zero());
                    d.quotients[0].clone()
                })
                .collect()
        }
    }
}

/// Scales a vector to integer coefficients with unit integer content and a
/// positive leading coefficient on its first nonzero entry.
pub fn normalize_integer(v: &[Polynomial<Rat>]) -> PolyVec {
    let mut den = BigInt::one();
    for p in v {
        for (_, c) in p.terms() {
            den = den.lcm(c.denom());
        }
    }
    let mut g = BigInt::zero();
    for p in v {
        for (_, c) in p.terms() {
            g = g.gcd(&(c.numer() * &den / c.denom()));
        }
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let negative = v.iter().find_map(|p| p.natural_leading()).is_some_and(|(_, c)| c.is_negative());
    let k = Rat::new(if negative { -den } else { den }, g);
    v.iter().map(|p| p.scale(&k)).collect()
}

/// Ḡ-orthogonal complement of a single tangent direction `t`:
/// with `w = adj(G_θ)·t`, returns `w₁·E_i − w_i·E₁` for `i = 2..d`.
pub fn complement_normals(t: &[Polynomial<Rat>], fisher_theta: &[PolyVec]) -> Vec<PolyVec> {
    let w = mat_vec(&adjugate(fisher_theta), t);
    let d = w.len();
    let pivot = w.iter().position(|p| !p.is_zero()).unwrap_or(0);
    (0..d)
        .filter(|&i| i != pivot)
        .map(|i| {
            let mut e = vec![Polynomial::zero(); d];
            e[i] = w[pivot].clone();
            e[pivot] = -&w[i];
            normalize_integer(&e)
        })
        .collect()
}

/// Dual vectors ẽ_j = adj(G_θ)·t_j with content removed.
pub fn dual_vectors(tangent: &[PolyVec], fisher_theta: &[PolyVec], content: Content) -> Vec<PolyVec> {
    let adj = adjugate(fisher_theta);
    tangent
        .iter()
        .map(|t| normalize_integer(&strip_content(&mat_vec(&adj, t), content)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{parse_poly, VariableTable};

    fn t() -> VariableTable {
        VariableTable::eta_x(0, &["a", "b"]).unwrap()
    }
    fn p(s: &str) -> Polynomial<Rat> {
        parse_poly(s, &t()).unwrap()
    }

    #[test]
    fn adjugate_times_matrix_is_determinant() {
        let m = vec![vec![p("a"), p("1"), p("0")], vec![p("b"), p("a^2"), p("1")], vec![p("1"), p("0"), p("a+b")]];
        let adj = adjugate(&m);
        let det = determinant(&m);
        for i in 0..3 {
            for j in 0..3 {
                let e = (0..3).fold(Polynomial::zero(), |acc, k| &acc + &(&adj[i][k] * &m[k][j]));
                assert_eq!(e, if i == j { det.clone() } else { Polynomial::zero() });
            }
        }
    }

    #[test]
    fn gcd_of_shared_factor() {
        let g = univariate_gcd(&p("(a-1)^2*(a+2)"), &p("(a-1)*(a+3)"), 0);
        assert_eq!(g, p("a - 1"));
    }

    #[test]
    fn strips_univariate_content_across_entries() {
        let v = vec![p("(a^2+1)*b"), p("(a^2+1)*(a-2)")];
        assert_eq!(strip_content(&v, Content::Univariate(0)), vec![p("b"), p("a - 2")]);
        let w = vec![p("a^2*b"), p("a*b^3")];
        assert_eq!(strip_content(&w, Content::Monomial), vec![p("a"), p("b^2")]);
    }

    #[test]
    fn normalization_clears_denominators() {
        let v = vec![p("-1/2*a + 1/3"), p("2/3")];
        assert_eq!(normalize_integer(&v), vec![p("3*a - 2"), p("-4")]);
    }

    #[test]
    fn complement_of_parabola_tangent() {
        let id = vec![vec![p("1"), p("0")], vec![p("0"), p("1")]];
        let n = complement_normals(&[p("1"), p("2*a")], &id);
        assert_eq!(n, vec![vec![p("2*a"), p("-1")]]);
    }
}
