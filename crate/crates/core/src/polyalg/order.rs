use std::cmp::Ordering;

use super::monomial::{Monomial, Var};
use super::PolyError;

/// Kind of monomial order. Only pure lex is needed by the estimator pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    Lex,
}

/// Pure lex order with an explicit variable priority (first entry is largest).
///
/// Variables absent from the priority list rank below every listed variable,
/// in increasing id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    kind: OrderKind,
    priority: Vec<Var>,
    rank: Vec<usize>,
}

impl MonomialOrder {
    /// Lex order in which `priority[0] ≻ priority[1] ≻ …`.
    pub fn lex(priority: Vec<Var>) -> Result<Self, PolyError> {
        let n = priority.iter().copied().max().map_or(0, |m| m + 1);
        let mut rank = vec![usize::MAX; n];
        for (r, &v) in priority.iter().enumerate() {
            if rank[v] != usize::MAX {
                return Err(PolyError::DuplicateVariable(v));
            }
            rank[v] = r;
        }
        Ok(MonomialOrder { kind: OrderKind::Lex, priority, rank })
    }

    /// Lex order with variable 0 largest over `n` variables.
    pub fn natural(n: usize) -> Self {
        Self::lex((0..n).collect()).expect("identity priority is valid")
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn priority(&self) -> &[Var] {
        &self.priority
    }

    /// Position of `v` in the priority list; unlisted variables follow all listed ones.
    pub fn rank(&self, v: Var) -> usize {
        match self.rank.get(v) {
            Some(&r) if r != usize::MAX => r,
            _ => self.priority.len() + v,
        }
    }

    /// True when relabelling is the identity on the first `n` variables.
    pub fn is_natural_for(&self, n: usize) -> bool {
        (0..n).all(|v| self.rank(v) == v)
    }

    /// Monomial with variables renamed to their ranks; the derived lex order
    /// on the result is this order on the input.
    pub fn key(&self, m: &Monomial) -> Monomial {
        m.remap(|v| self.rank(v))
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }
}

/// Invertible renaming that turns a [`MonomialOrder`] into the derived order.
#[derive(Clone, Debug)]
pub(crate) struct Relabel {
    forward: Vec<Var>,
    backward: Vec<Var>,
}

impl Relabel {
    /// Covers variables `0..n`; variables beyond the priority list keep their
    /// relative order.
    pub(crate) fn new(ord: &MonomialOrder, n: usize) -> Self {
        let n = n.max(ord.priority.len()).max(ord.rank.len());
        let mut vars: Vec<Var> = (0..n).collect();
        vars.sort_by_key(|&v| ord.rank(v));
        let mut forward = vec![0; n];
        for (r, &v) in vars.iter().enumerate() {
            forward[v] = r;
        }
        Relabel { forward, backward: vars }
    }

    pub(crate) fn to_internal(&self, v: Var) -> Var {
        self.forward[v]
    }

    pub(crate) fn to_external(&self, v: Var) -> Var {
        self.backward[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priority_reverses_natural_order() {
        let ord = MonomialOrder::lex(vec![1, 0]).unwrap();
        let x0 = Monomial::var(0, 5);
        let x1 = Monomial::var(1, 1);
        assert_eq!(ord.cmp(&x1, &x0), Ordering::Greater);
        assert_eq!(MonomialOrder::natural(2).cmp(&x1, &x0), Ordering::Less);
    }

    #[test]
    fn duplicate_priority_rejected() {
        assert!(MonomialOrder::lex(vec![0, 1, 0]).is_err());
    }

    #[test]
    fn relabel_round_trip() {
        let ord = MonomialOrder::lex(vec![3, 1]).unwrap();
        let r = Relabel::new(&ord, 5);
        for v in 0..5 {
            assert_eq!(r.to_external(r.to_internal(v)), v);
        }
        assert_eq!(r.to_internal(3), 0);
        assert_eq!(r.to_internal(1), 1);
        assert_eq!(r.to_internal(0), 2);
    }
}
