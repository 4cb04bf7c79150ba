use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::monomial::{Monomial, Var};
use super::order::{MonomialOrder, Relabel};
use super::PolyError;

/// Exact rational coefficients.
pub type Rat = BigRational;

/// Coefficient domain of a [`Polynomial`]: a commutative ring with exact zero test.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl Coeff for Rat {}
impl Coeff for Complex64 {}

/// Coefficient domains with exact division by nonzero elements.
pub trait Field: Coeff + Div<Output = Self> {}

impl Field for Rat {}
impl Field for Complex64 {}

/// Builds a rational from an integer numerator and denominator.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse multivariate polynomial in canonical form: no zero coefficients,
/// terms keyed by monomial.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<C: Coeff> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for Polynomial<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    /// The polynomial consisting of the single variable `v`.
    pub fn var(v: Var) -> Self {
        Self::term(C::one(), Monomial::var(v, 1))
    }

    pub fn term(c: C, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    /// Sums the given terms, merging repeated monomials.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing natural lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Adds `c·m` in place, keeping the canonical form.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self += c · m · other`.
    pub fn add_scaled(&mut self, c: &C, m: &Monomial, other: &Polynomial<C>) {
        for (n, d) in &other.terms {
            self.add_term(m.mul(n), c.clone() * d.clone());
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial::from_terms(self.terms.iter().map(|(m, d)| (m.clone(), c.clone() * d.clone())))
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial { terms: self.terms.iter().map(|(n, c)| (m.mul(n), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Maximum over terms of the exponent sum restricted to `vars`;
    /// `None` (standing for −∞) for the zero polynomial.
    pub fn degree_in(&self, vars: &[Var]) -> Option<u32> {
        self.terms.keys().map(|m| m.degree_where(|v| vars.contains(&v))).max()
    }

    /// Minimum over terms of the exponent sum restricted to `vars`.
    pub fn min_degree_in(&self, vars: &[Var]) -> Option<u32> {
        self.terms.keys().map(|m| m.degree_where(|v| vars.contains(&v))).min()
    }

    /// Variables occurring in some term, increasing.
    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.pairs().iter().map(|&(v, _)| v)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Largest term under the derived (natural) order.
    pub fn natural_leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// The ≺-maximal term.
    pub fn leading_term(&self, ord: &MonomialOrder) -> Result<(C, Monomial), PolyError> {
        self.terms
            .iter()
            .map(|(m, c)| (ord.key(m), m, c))
            .max_by(|a, b| a.0.cmp(&b.0))
            .map(|(_, m, c)| (c.clone(), m.clone()))
            .ok_or(PolyError::ZeroPolynomial)
    }

    /// Formal partial derivative with respect to `v`.
    pub fn diff(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            if e == 0 {
                continue;
            }
            let mut k = C::zero();
            for _ in 0..e {
                k = k + C::one();
            }
            out.add_term(rest.mul(&Monomial::var(v, e - 1)), c.clone() * k);
        }
        out
    }

    /// Renames variables; the map must be injective on the variables of `self`.
    pub fn remap<F: Fn(Var) -> Var>(&self, map: F) -> Self {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.remap(&map), c.clone())))
    }

    /// Converts coefficients into another domain.
    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> Polynomial<D> {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Replaces every variable in `subs` by the given polynomial.
    pub fn substitute(&self, subs: &BTreeMap<Var, Polynomial<C>>) -> Self {
        let mut cache: BTreeMap<(Var, u32), Polynomial<C>> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut mono = Monomial::one();
            let mut acc = Polynomial::constant(c.clone());
            for &(v, e) in m.pairs() {
                match subs.get(&v) {
                    Some(p) => {
                        let pw = cache.entry((v, e)).or_insert_with(|| p.pow(e)).clone();
                        acc = &acc * &pw;
                    }
                    None => mono = mono.mul(&Monomial::var(v, e)),
                }
            }
            out = &out + &acc.mul_monomial(&mono);
        }
        out
    }

    /// Substitutes scalar values for some variables, leaving the others symbolic.
    pub fn partial_eval(&self, values: &BTreeMap<Var, C>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut k = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.pairs() {
                match values.get(&v) {
                    Some(x) => k = k * pow_coeff(x, e),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial::from_pairs(rest), k);
        }
        out
    }

    /// Evaluates at a full assignment; errors on the first unbound variable.
    pub fn eval<F: Fn(Var) -> Option<C>>(&self, value: F) -> Result<C, PolyError> {
        let mut powers: BTreeMap<(Var, u32), C> = BTreeMap::new();
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let p = match powers.get(&(v, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let x = value(v).ok_or(PolyError::Unbound(v))?;
                        let p = pow_coeff(&x, e);
                        powers.insert((v, e), p.clone());
                        p
                    }
                };
                t = t * p;
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Evaluates with a dense assignment indexed by variable id.
    pub fn eval_dense(&self, values: &[C]) -> Result<C, PolyError> {
        self.eval(|v| values.get(v).cloned())
    }

    /// Coefficients grouped by the exponent of `v`: `self = Σ_k out[k] · v^k`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Polynomial<C>> {
        let mut out: Vec<Polynomial<C>> = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            let e = e as usize;
            if out.len() <= e {
                out.resize_with(e + 1, Polynomial::zero);
            }
            out[e].add_term(rest, c.clone());
        }
        out
    }

    /// Groups terms by their monomial in `vars`; the values are the cofactors.
    pub fn collect_in(&self, vars: &[Var]) -> BTreeMap<Monomial, Polynomial<C>> {
        let mut out: BTreeMap<Monomial, Polynomial<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside): (Vec<_>, Vec<_>) = m.pairs().iter().partition(|(v, _)| vars.contains(v));
            out.entry(Monomial::from_pairs(inside))
                .or_default()
                .add_term(Monomial::from_pairs(outside), c.clone());
        }
        out
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one() };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    /// Divides every term by the monomial `m`, which must divide each of them.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (n, c) in &self.terms {
            terms.insert(m.quotient_of(n)?, c.clone());
        }
        Some(Polynomial { terms })
    }
}

impl<C: Field> Polynomial<C> {
    /// Scales so that the natural-order leading coefficient is 1.
    pub fn monic_natural(&self) -> Self {
        match self.natural_leading() {
            None => Self::zero(),
            Some((_, c)) => self.scale(&(C::one() / c.clone())),
        }
    }

    /// Scales so that the ≺-leading coefficient is 1.
    pub fn monic(&self, ord: &MonomialOrder) -> Self {
        match self.leading_term(ord) {
            Err(_) => Self::zero(),
            Ok((c, _)) => self.scale(&(C::one() / c)),
        }
    }
}

impl Polynomial<Rat> {
    /// Lossy conversion to complex floating coefficients.
    pub fn to_complex(&self) -> Polynomial<Complex64> {
        self.map_coeffs(|c| Complex64::new(rat_to_f64(c), 0.0))
    }

    /// Evaluates at a real point in floating point.
    pub fn eval_f64(&self, values: &[f64]) -> Result<f64, PolyError> {
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            let mut t = rat_to_f64(c);
            for &(v, e) in m.pairs() {
                let x = *values.get(v).ok_or(PolyError::Unbound(v))?;
                t *= x.powi(e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }
}

/// Nearest double to a rational.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from a double.
pub fn f64_to_rat(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(Rat::zero)
}

fn pow_coeff<C: Coeff>(x: &C, e: u32) -> C {
    let mut acc = C::one();
    for _ in 0..e {
        acc = acc * x.clone();
    }
    acc
}

impl<C: Coeff> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_scaled(c, m, rhs);
        }
        out
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<C: Coeff> $tr for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $f(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$f(&rhs)
            }
        }
        impl<C: Coeff> $tr<&Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $f(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Coeff> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

/// Result of multivariate division: `f = Σ quotients[i]·divisors[i] + remainder`.
#[derive(Clone, Debug, PartialEq)]
pub struct Division<C: Coeff> {
    pub quotients: Vec<Polynomial<C>>,
    pub remainder: Polynomial<C>,
}

/// Multivariate division with remainder under `ord`; divisors are tried in
/// list order and no term of the remainder is divisible by a divisor's leading term.
pub fn divide_with_remainder<C: Field>(
    f: &Polynomial<C>,
    divisors: &[Polynomial<C>],
    ord: &MonomialOrder,
) -> Result<Division<C>, PolyError> {
    if divisors.iter().any(Polynomial::is_zero) {
        return Err(PolyError::ZeroPolynomial);
    }
    let n = f
        .variables()
        .into_iter()
        .chain(divisors.iter().flat_map(Polynomial::variables))
        .max()
        .map_or(0, |m| m + 1);
    let relabel = Relabel::new(ord, n);
    let fwd = |v| relabel.to_internal(v);
    let bwd = |v| relabel.to_external(v);
    let divs: Vec<Polynomial<C>> = divisors.iter().map(|g| g.remap(fwd)).collect();
    let lts: Vec<(Monomial, C)> = divs
        .iter()
        .map(|g| {
            let (m, c) = g.natural_leading().expect("nonzero divisor");
            (m.clone(), c.clone())
        })
        .collect();
    let mut p = f.remap(fwd);
    let mut quotients = vec![Polynomial::zero(); divs.len()];
    let mut remainder = Polynomial::zero();
    while let Some((m, c)) = p.terms.pop_last() {
        match lts.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(i) => {
                let q = lts[i].0.quotient_of(&m).expect("divisible");
                let k = c / lts[i].1.clone();
                quotients[i].add_term(q.clone(), k.clone());
                let mut tail = divs[i].clone();
                tail.terms.pop_last();
                p.add_scaled(&(-k), &q, &tail);
            }
            None => {
                remainder.terms.insert(m, c);
            }
        }
    }
    Ok(Division {
        quotients: quotients.iter().map(|q| q.remap(bwd)).collect(),
        remainder: remainder.remap(bwd),
    })
}

pub(crate) fn pop_last<C: Coeff>(p: &mut Polynomial<C>) -> Option<(Monomial, C)> {
    p.terms.pop_last()
}

pub(crate) fn insert_unchecked<C: Coeff>(p: &mut Polynomial<C>, m: Monomial, c: C) {
    debug_assert!(!c.is_zero());
    p.terms.insert(m, c);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial<Rat> {
        Polynomial::var(0)
    }
    fn y() -> Polynomial<Rat> {
        Polynomial::var(1)
    }
    fn k(n: i64) -> Polynomial<Rat> {
        Polynomial::constant(rat(n, 1))
    }

    #[test]
    fn cancellation_gives_canonical_form() {
        let p = &(&x() + &k(1)) + &(&x() - &k(1));
        assert_eq!(p, x().scale(&rat(2, 1)));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x() + &y()) * &(&x() - &y());
        assert_eq!(p, &x().pow(2) - &y().pow(2));
    }

    #[test]
    fn eval_pythagoras() {
        let p = &x().pow(2) + &y().pow(2);
        assert_eq!(p.eval_dense(&[rat(3, 1), rat(4, 1)]).unwrap(), rat(25, 1));
        assert_eq!(p.eval_dense(&[rat(3, 1)]), Err(PolyError::Unbound(1)));
    }

    #[test]
    fn derivative() {
        let a = Polynomial::<Rat>::var(0);
        let p = a.pow(2).scale(&rat(-2, 1));
        assert_eq!(p.diff(0), a.scale(&rat(-4, 1)));
    }

    #[test]
    fn leading_term_respects_priority() {
        // eta1^2 x1 + eta2^3 with eta1 > eta2 > x1
        let p = &(&Polynomial::<Rat>::var(0).pow(2) * &Polynomial::var(2)) + &Polynomial::var(1).pow(3);
        let ord = MonomialOrder::lex(vec![0, 1, 2]).unwrap();
        let (c, m) = p.leading_term(&ord).unwrap();
        assert_eq!(c, rat(1, 1));
        assert_eq!(m, Monomial::from_pairs([(0, 2), (2, 1)]));
        let univariate = &x().pow(5) + &x().pow(3);
        assert_eq!(univariate.leading_term(&ord).unwrap().1, Monomial::var(0, 5));
        assert_eq!(Polynomial::<Rat>::zero().leading_term(&ord), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn degree_in_block() {
        let p = &Polynomial::<Rat>::var(0).pow(2) * &Polynomial::var(1).pow(3);
        assert_eq!(p.degree_in(&[0]), Some(2));
        assert_eq!(Polynomial::<Rat>::zero().degree_in(&[0]), None);
    }

    #[test]
    fn division_by_linear_leading_eta() {
        // variables: eta1 = 0, x1 = 1; order eta1 > x1
        let ord = MonomialOrder::lex(vec![0, 1]).unwrap();
        let g = &Polynomial::<Rat>::var(1) - &Polynomial::var(0);
        let f = Polynomial::<Rat>::var(1).pow(2);
        let d = divide_with_remainder(&f, std::slice::from_ref(&g), &ord).unwrap();
        assert_eq!(d.remainder, f);
        let d = divide_with_remainder(&g, std::slice::from_ref(&g), &ord).unwrap();
        assert!(d.remainder.is_zero());
    }

    #[test]
    fn division_reconstructs_under_reversed_priority() {
        let ord = MonomialOrder::lex(vec![1, 0]).unwrap();
        let f = &(&x().pow(3) * &y()) + &(&y().pow(2) - &k(7));
        let g1 = &(&x() * &y()) - &k(1);
        let g2 = &y().pow(2) - &x();
        let d = divide_with_remainder(&f, &[g1.clone(), g2.clone()], &ord).unwrap();
        let back = &(&(&d.quotients[0] * &g1) + &(&d.quotients[1] * &g2)) + &d.remainder;
        assert_eq!(back, f);
    }
}
