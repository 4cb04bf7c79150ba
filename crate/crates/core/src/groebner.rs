//! Buchberger's algorithm, S-polynomials, normal forms and the reduction
//! ideals generated by products of residuals `Xᵢ − ηᵢ`.

use std::collections::BTreeSet;

use num_traits::One;
use thiserror::Error;

use crate::polyalg::{
    format_poly, insert_unchecked, parse_poly, pop_last, Monomial, MonomialOrder, PolyError, Polynomial, Rat,
    Relabel, Var, VariableTable,
};

/// Resource ceilings for Buchberger's algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroebnerLimits {
    pub max_basis: usize,
    pub max_degree: u32,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        GroebnerLimits { max_basis: 10_000, max_degree: 40 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("all generators are zero")]
    NoGenerators,
    #[error("basis grew to {size} elements, over the ceiling of {limit}")]
    BasisTooLarge { size: usize, limit: usize },
    #[error("a basis element reached total degree {degree}, over the ceiling of {limit}")]
    DegreeTooHigh { degree: u32, limit: u32 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A Gröbner basis together with its monomial order.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    generators: Vec<Polynomial<Rat>>,
    order: MonomialOrder,
    reduced: bool,
    internal: Internal,
}

#[derive(Clone, Debug)]
struct Internal {
    nvars: usize,
    polys: Vec<Polynomial<Rat>>,
    leads: Vec<(Monomial, Rat)>,
    tails: Vec<Polynomial<Rat>>,
}

impl Internal {
    fn new(nvars: usize, polys: Vec<Polynomial<Rat>>) -> Self {
        let mut leads = Vec::with_capacity(polys.len());
        let mut tails = Vec::with_capacity(polys.len());
        for p in &polys {
            let mut t = p.clone();
            let (m, c) = pop_last(&mut t).expect("nonzero generator");
            leads.push((m, c));
            tails.push(t);
        }
        Internal { nvars, polys, leads, tails }
    }

    fn reduce(&self, f: &Polynomial<Rat>) -> Polynomial<Rat> {
        full_reduce(f, &self.leads, &self.tails, None)
    }
}

/// Fully reduces `f` (internal labels) against the given leading terms and tails,
/// skipping index `skip`.
fn full_reduce(
    f: &Polynomial<Rat>,
    leads: &[(Monomial, Rat)],
    tails: &[Polynomial<Rat>],
    skip: Option<usize>,
) -> Polynomial<Rat> {
    let mut p = f.clone();
    let mut r = Polynomial::zero();
    while let Some((m, c)) = pop_last(&mut p) {
        let hit = leads.iter().enumerate().find(|(i, (lm, _))| Some(*i) != skip && lm.divides(&m));
        match hit {
            Some((i, (lm, lc))) => {
                let q = lm.quotient_of(&m).expect("divisible");
                let k = -(c / lc);
                p.add_scaled(&k, &q, &tails[i]);
            }
            None => insert_unchecked(&mut r, m, c),
        }
    }
    r
}

fn nvars_of(polys: &[Polynomial<Rat>], ord: &MonomialOrder) -> usize {
    polys
        .iter()
        .flat_map(Polynomial::variables)
        .chain(ord.priority().iter().copied())
        .max()
        .map_or(0, |m| m + 1)
}

impl GroebnerBasis {
    pub fn generators(&self) -> &[Polynomial<Rat>] {
        &self.generators
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Leading monomials of the generators under the basis order.
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators
            .iter()
            .map(|g| g.leading_term(&self.order).expect("nonzero generator").1)
            .collect()
    }

    fn relabel_for(&self, f: &Polynomial<Rat>) -> Relabel {
        let n = f.variables().last().map_or(0, |m| m + 1).max(self.internal.nvars);
        Relabel::new(&self.order, n)
    }

    /// The unique remainder of `f` modulo the basis.
    pub fn normal_form(&self, f: &Polynomial<Rat>) -> Polynomial<Rat> {
        let r = self.relabel_for(f);
        let nf = self.internal.reduce(&f.remap(|v| r.to_internal(v)));
        nf.remap(|v| r.to_external(v))
    }

    /// True iff `f` lies in the ideal spanned by the basis.
    pub fn contains(&self, f: &Polynomial<Rat>) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Checks that every S-polynomial of a generator pair reduces to zero.
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        let int = &self.internal;
        for i in 0..int.polys.len() {
            for j in (i + 1)..int.polys.len() {
                let s = s_poly_internal(&int.polys[i], &int.polys[j]);
                if !int.reduce(&s).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Checks the reducedness conditions: monic generators and no generator
    /// term divisible by another generator's leading term.
    pub fn check_reduced(&self) -> bool {
        let int = &self.internal;
        for (i, p) in int.polys.iter().enumerate() {
            if !int.leads[i].1.is_one() {
                return false;
            }
            for (m, _) in p.terms() {
                for (j, (lm, _)) in int.leads.iter().enumerate() {
                    if i != j && lm.divides(m) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Same basis with the generator list permuted; the order is unchanged.
    pub fn permuted(&self, perm: &[usize]) -> GroebnerBasis {
        let gens: Vec<_> = perm.iter().map(|&i| self.generators[i].clone()).collect();
        let polys: Vec<_> = perm.iter().map(|&i| self.internal.polys[i].clone()).collect();
        GroebnerBasis {
            generators: gens,
            order: self.order.clone(),
            reduced: self.reduced,
            internal: Internal::new(self.internal.nvars, polys),
        }
    }

    /// Serialises as an `# order: lex a > b > …` header followed by one
    /// generator per line.
    pub fn to_text(&self, table: &VariableTable) -> String {
        let names: Vec<&str> = self.order.priority().iter().map(|&v| table.name(v)).collect();
        let mut s = format!("# order: lex {}\n", names.join(" > "));
        for g in &self.generators {
            s.push_str(&format_poly(g, table));
            s.push('\n');
        }
        s
    }

    /// Reads the [`to_text`](Self::to_text) layout and recomputes the reduced basis.
    pub fn from_text(src: &str, table: &VariableTable, limits: GroebnerLimits) -> Result<GroebnerBasis, GroebnerError> {
        let mut order = None;
        let mut gens = Vec::new();
        for (lineno, line) in src.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("# order:") {
                let rest = rest.trim().strip_prefix("lex").ok_or_else(|| PolyError::Parse {
                    pos: lineno,
                    msg: "only lex orders are supported".into(),
                })?;
                let vars = rest
                    .split('>')
                    .map(|n| table.expect(n.trim()))
                    .collect::<Result<Vec<Var>, _>>()?;
                order = Some(MonomialOrder::lex(vars)?);
            } else if !line.is_empty() && !line.starts_with('#') {
                gens.push(parse_poly(line, table)?);
            }
        }
        let order = order.ok_or_else(|| PolyError::Parse { pos: 0, msg: "missing order header".into() })?;
        buchberger(&gens, &order, limits)
    }
}

/// S-polynomial `lcm/LT(f)·f − lcm/LT(g)·g` of two nonzero polynomials.
pub fn s_polynomial(
    f: &Polynomial<Rat>,
    g: &Polynomial<Rat>,
    ord: &MonomialOrder,
) -> Result<Polynomial<Rat>, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let r = Relabel::new(ord, nvars_of(&[f.clone(), g.clone()], ord));
    let s = s_poly_internal(&f.remap(|v| r.to_internal(v)), &g.remap(|v| r.to_internal(v)));
    Ok(s.remap(|v| r.to_external(v)))
}

fn s_poly_internal(f: &Polynomial<Rat>, g: &Polynomial<Rat>) -> Polynomial<Rat> {
    let (mf, cf) = f.natural_leading().expect("nonzero");
    let (mg, cg) = g.natural_leading().expect("nonzero");
    let l = mf.lcm(mg);
    let mut s = Polynomial::zero();
    s.add_scaled(&(Rat::one() / cf), &mf.quotient_of(&l).expect("divides lcm"), f);
    s.add_scaled(&(-(Rat::one() / cg)), &mg.quotient_of(&l).expect("divides lcm"), g);
    s
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Pair {
    lcm: Monomial,
    i: usize,
    j: usize,
}

/// Reduced Gröbner basis of the ideal generated by `gens` under `ord`.
///
/// Critical pairs are pruned with the Gebauer–Möller criteria and selected by
/// the normal strategy (smallest lcm first, ties by generator index), so the
/// result is deterministic for a given input order.
pub fn buchberger(
    gens: &[Polynomial<Rat>],
    ord: &MonomialOrder,
    limits: GroebnerLimits,
) -> Result<GroebnerBasis, GroebnerError> {
    let nvars = nvars_of(gens, ord);
    let relabel = Relabel::new(ord, nvars);
    let input: Vec<Polynomial<Rat>> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.remap(|v| relabel.to_internal(v)).monic_natural())
        .collect();
    if input.is_empty() {
        return Err(GroebnerError::NoGenerators);
    }

    let mut polys: Vec<Polynomial<Rat>> = Vec::new();
    let mut leads: Vec<(Monomial, Rat)> = Vec::new();
    let mut tails: Vec<Polynomial<Rat>> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs: BTreeSet<Pair> = BTreeSet::new();

    let add = |h: Polynomial<Rat>,
                   polys: &mut Vec<Polynomial<Rat>>,
                   leads: &mut Vec<(Monomial, Rat)>,
                   tails: &mut Vec<Polynomial<Rat>>,
                   active: &mut Vec<bool>,
                   pairs: &mut BTreeSet<Pair>|
     -> Result<(), GroebnerError> {
        let degree = h.total_degree().unwrap_or(0);
        if degree > limits.max_degree {
            return Err(GroebnerError::DegreeTooHigh { degree, limit: limits.max_degree });
        }
        let size = active.iter().filter(|&&a| a).count() + 1;
        if size > limits.max_basis {
            return Err(GroebnerError::BasisTooLarge { size, limit: limits.max_basis });
        }
        let mut t = h.clone();
        let (lh, ch) = pop_last(&mut t).expect("nonzero");
        let k = polys.len();

        // Gebauer–Möller: among the new pairs (g, h) keep the lcm-minimal ones,
        // then drop those with coprime leading terms.
        let mut cand: Vec<(usize, Monomial)> =
            (0..k).filter(|&g| active[g]).map(|g| (g, leads[g].0.lcm(&lh))).collect();
        let mut kept: Vec<(usize, Monomial)> = Vec::new();
        while !cand.is_empty() {
            let (g, l) = cand.remove(0);
            let coprime = leads[g].0.coprime(&lh);
            let dominated = cand.iter().chain(kept.iter()).any(|(_, l2)| l2.divides(&l));
            if coprime || !dominated {
                kept.push((g, l));
            }
        }
        let fresh: Vec<Pair> = kept
            .into_iter()
            .filter(|(g, _)| !leads[*g].0.coprime(&lh))
            .map(|(g, l)| Pair { lcm: l, i: g, j: k })
            .collect();

        // Old pairs made redundant by h.
        pairs.retain(|p| {
            !(lh.divides(&p.lcm) && leads[p.i].0.lcm(&lh) != p.lcm && leads[p.j].0.lcm(&lh) != p.lcm)
        });
        pairs.extend(fresh);

        for g in 0..k {
            if active[g] && lh.divides(&leads[g].0) {
                active[g] = false;
            }
        }
        polys.push(h);
        leads.push((lh, ch));
        tails.push(t);
        active.push(true);
        Ok(())
    };

    for h in input {
        add(h, &mut polys, &mut leads, &mut tails, &mut active, &mut pairs)?;
    }

    while let Some(p) = pairs.pop_first() {
        let s = s_poly_internal(&polys[p.i], &polys[p.j]);
        let (al, at): (Vec<_>, Vec<_>) = (0..polys.len())
            .filter(|&g| active[g])
            .map(|g| (leads[g].clone(), tails[g].clone()))
            .unzip();
        let h = full_reduce(&s, &al, &at, None);
        if !h.is_zero() {
            add(h.monic_natural(), &mut polys, &mut leads, &mut tails, &mut active, &mut pairs)?;
        }
    }

    // Inter-reduce the minimal basis and make it monic.
    let live: Vec<usize> = (0..polys.len()).filter(|&g| active[g]).collect();
    let minimal = live.iter().copied().filter(|&g| {
        !live.iter().any(|&o| o != g && leads[o].0.divides(&leads[g].0) && (leads[o].0 != leads[g].0 || o < g))
    });
    let mut basis: Vec<Polynomial<Rat>> = minimal.map(|g| polys[g].clone()).collect();
    basis.sort_by(|a, b| a.natural_leading().unwrap().0.cmp(b.natural_leading().unwrap().0));
    let mut changed = true;
    while changed {
        changed = false;
        let int = Internal::new(nvars, basis.clone());
        for i in 0..basis.len() {
            let reduced_tail = full_reduce(&int.tails[i], &int.leads, &int.tails, Some(i));
            let mut g = reduced_tail;
            insert_unchecked(&mut g, int.leads[i].0.clone(), int.leads[i].1.clone());
            let g = g.monic_natural();
            if g != basis[i] {
                basis[i] = g;
                changed = true;
            }
        }
    }
    let generators = basis.iter().map(|g| g.remap(|v| relabel.to_external(v))).collect();
    Ok(GroebnerBasis { generators, order: ord.clone(), reduced: true, internal: Internal::new(nvars, basis) })
}

/// Normal form of `f` modulo `gb`.
pub fn normal_form(f: &Polynomial<Rat>, gb: &GroebnerBasis) -> Polynomial<Rat> {
    gb.normal_form(f)
}

/// Ideal membership via a zero normal form.
pub fn ideal_membership(f: &Polynomial<Rat>, gb: &GroebnerBasis) -> bool {
    gb.contains(f)
}

/// The ideal `I_k` spanned by all degree-`k` products of residuals `Xᵢ − ηᵢ`.
#[derive(Clone, Debug)]
pub struct ReductionIdeal {
    pub k: usize,
    pub d: usize,
    pub eta: Vec<Var>,
    pub x: Vec<Var>,
    pub generators: Vec<Polynomial<Rat>>,
}

impl ReductionIdeal {
    /// Generators indexed by multisets `i₁ ≤ … ≤ i_k` of `{1..d}`.
    pub fn new(k: usize, eta: &[Var], x: &[Var]) -> Result<Self, PolyError> {
        if eta.len() != x.len() {
            return Err(PolyError::BlockMismatch { eta: eta.len(), x: x.len() });
        }
        let d = eta.len();
        let residual: Vec<Polynomial<Rat>> =
            (0..d).map(|i| &Polynomial::var(x[i]) - &Polynomial::var(eta[i])).collect();
        let mut generators = Vec::new();
        let mut idx = vec![0usize; k];
        if d > 0 {
            loop {
                let g = idx.iter().fold(Polynomial::one(), |acc, &i| &acc * &residual[i]);
                generators.push(g);
                // next non-decreasing index tuple
                let mut pos = k;
                while pos > 0 && idx[pos - 1] == d - 1 {
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                idx[pos - 1] += 1;
                let v = idx[pos - 1];
                for slot in idx.iter_mut().skip(pos) {
                    *slot = v;
                }
            }
        }
        Ok(ReductionIdeal { k, d, eta: eta.to_vec(), x: x.to_vec(), generators })
    }

    /// Pure lex order `η₁ ≻ … ≻ η_d ≻ X₁ ≻ … ≻ X_d`.
    pub fn order(&self) -> MonomialOrder {
        MonomialOrder::lex(self.eta.iter().chain(self.x.iter()).copied().collect()).expect("distinct variables")
    }

    /// Reduced Gröbner basis of the ideal under [`order`](Self::order).
    pub fn basis(&self, limits: GroebnerLimits) -> Result<GroebnerBasis, GroebnerError> {
        buchberger(&self.generators, &self.order(), limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rat;

    fn p(s: &str, t: &VariableTable) -> Polynomial<Rat> {
        parse_poly(s, t).unwrap()
    }

    #[test]
    fn s_polynomial_hand_cases() {
        let t = VariableTable::eta_x(0, &["x"]).unwrap();
        let ord = MonomialOrder::natural(1);
        let f = p("x^2 - 1", &t);
        assert!(s_polynomial(&f, &f, &ord).unwrap().is_zero());
        assert_eq!(s_polynomial(&f, &p("x", &t), &ord).unwrap(), p("-1", &t));
        assert!(s_polynomial(&f, &Polynomial::zero(), &ord).is_err());
    }

    #[test]
    fn principal_ideal_is_its_monic_generator() {
        let t = VariableTable::eta_x(1, &[]).unwrap();
        let ideal = ReductionIdeal::new(2, &[0], &[1]).unwrap();
        let gb = ideal.basis(GroebnerLimits::default()).unwrap();
        assert_eq!(gb.generators(), &[p("eta1^2 - 2*eta1*x1 + x1^2", &t)]);
        let single = buchberger(&[p("3*x1^2 - 3", &t)], &ideal.order(), GroebnerLimits::default()).unwrap();
        assert_eq!(single.generators(), &[p("x1^2 - 1", &t)]);
    }

    #[test]
    fn redundant_input_generators_are_dropped() {
        let t = VariableTable::eta_x(1, &[]).unwrap();
        let ord = MonomialOrder::natural(2);
        let gb = buchberger(&[p("2", &t), p("x1 + eta1", &t)], &ord, GroebnerLimits::default()).unwrap();
        assert_eq!(gb.generators(), &[Polynomial::one()]);
        let gb = buchberger(&[p("x1", &t), p("x1^2 + x1", &t)], &ord, GroebnerLimits::default()).unwrap();
        assert_eq!(gb.generators(), &[p("x1", &t)]);
        assert!(gb.check_reduced());
    }

    #[test]
    fn cube_plus_x_reduces_to_x() {
        let t = VariableTable::eta_x(1, &[]).unwrap();
        let gb = ReductionIdeal::new(3, &[0], &[1]).unwrap().basis(GroebnerLimits::default()).unwrap();
        let f = p("(x1 - eta1)^3 + x1", &t);
        assert_eq!(gb.normal_form(&f), p("x1", &t));
        assert!(!gb.contains(&Polynomial::one()));
    }

    #[test]
    fn generator_counts() {
        for d in 1..=4 {
            let eta: Vec<Var> = (0..d).collect();
            let x: Vec<Var> = (d..2 * d).collect();
            assert_eq!(ReductionIdeal::new(2, &eta, &x).unwrap().generators.len(), d * (d + 1) / 2);
            assert_eq!(ReductionIdeal::new(3, &eta, &x).unwrap().generators.len(), d * (d + 1) * (d + 2) / 6);
        }
    }

    #[test]
    fn s_pair_of_quadric_generators_reduces_to_zero() {
        let t = VariableTable::eta_x(2, &[]).unwrap();
        let ideal = ReductionIdeal::new(2, &[0, 1], &[2, 3]).unwrap();
        let gb = ideal.basis(GroebnerLimits::default()).unwrap();
        let s = s_polynomial(&p("(x1-eta1)^2", &t), &p("(x1-eta1)*(x2-eta2)", &t), &ideal.order()).unwrap();
        assert!(gb.contains(&s));
    }

    #[test]
    fn textbook_basis() {
        // x^2 + y, xy - 1 under lex x > y
        let t = VariableTable::eta_x(0, &["x", "y"]).unwrap();
        let ord = MonomialOrder::natural(2);
        let gb = buchberger(&[p("x^2 + y", &t), p("x*y - 1", &t)], &ord, GroebnerLimits::default()).unwrap();
        assert!(gb.satisfies_buchberger_criterion());
        assert!(gb.check_reduced());
        assert_eq!(gb.generators(), &[p("y^3 + 1", &t), p("x + y^2", &t)]);
        assert_eq!(gb.generators()[0].leading_term(&ord).unwrap().0, rat(1, 1));
    }

    #[test]
    fn ceilings_abort() {
        let t = VariableTable::eta_x(0, &["x", "y"]).unwrap();
        let ord = MonomialOrder::natural(2);
        let gens = [p("x^2 + y", &t), p("x*y - 1", &t)];
        let err = buchberger(&gens, &ord, GroebnerLimits { max_basis: 2, max_degree: 40 }).unwrap_err();
        assert!(matches!(err, GroebnerError::BasisTooLarge { .. }));
        let err = buchberger(&gens, &ord, GroebnerLimits { max_basis: 100, max_degree: 2 }).unwrap_err();
        assert!(matches!(err, GroebnerError::DegreeTooHigh { .. }));
    }

    #[test]
    fn text_round_trip() {
        let t = VariableTable::eta_x(2, &[]).unwrap();
        let gb = ReductionIdeal::new(2, &[0, 1], &[2, 3]).unwrap().basis(GroebnerLimits::default()).unwrap();
        let s = gb.to_text(&t);
        assert!(s.starts_with("# order: lex eta1 > eta2 > x1 > x2\n"));
        let back = GroebnerBasis::from_text(&s, &t, GroebnerLimits::default()).unwrap();
        assert_eq!(back.generators(), gb.generators());
    }
}
