use std::collections::HashMap;

use super::monomial::Var;
use super::PolyError;

/// Role of a variable in an estimating system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    /// Expectation parameters η₁…η_d.
    Eta,
    /// Sufficient-statistic means X₁…X_d.
    X,
    /// Model parameters, frame coordinates and the perturbation constant.
    Aux,
}

/// Named variables partitioned into blocks. Variable ids are list positions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VariableTable {
    names: Vec<String>,
    blocks: Vec<Block>,
    index: HashMap<String, Var>,
}

impl VariableTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table and checks the block invariants.
    pub fn from_entries<S: Into<String>, I: IntoIterator<Item = (S, Block)>>(entries: I) -> Result<Self, PolyError> {
        let mut t = Self::new();
        for (name, block) in entries {
            t.push(name, block)?;
        }
        t.validate()?;
        Ok(t)
    }

    /// Table `eta1..etad, x1..xd` followed by the given auxiliary names.
    pub fn eta_x(d: usize, aux: &[&str]) -> Result<Self, PolyError> {
        let entries = (1..=d)
            .map(|i| (format!("eta{i}"), Block::Eta))
            .chain((1..=d).map(|i| (format!("x{i}"), Block::X)))
            .chain(aux.iter().map(|s| (s.to_string(), Block::Aux)));
        Self::from_entries(entries)
    }

    /// Appends a variable; names must be unique identifiers.
    pub fn push<S: Into<String>>(&mut self, name: S, block: Block) -> Result<Var, PolyError> {
        let name = name.into();
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(PolyError::BadName(name));
        }
        if self.index.contains_key(&name) {
            return Err(PolyError::DuplicateName(name));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.blocks.push(block);
        Ok(id)
    }

    /// Checks that the η- and X-blocks have equal length when both are present.
    pub fn validate(&self) -> Result<(), PolyError> {
        let (e, x) = (self.block(Block::Eta).len(), self.block(Block::X).len());
        if e > 0 && x > 0 && e != x {
            return Err(PolyError::BlockMismatch { eta: e, x });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    /// Id of a variable that must exist.
    pub fn expect(&self, name: &str) -> Result<Var, PolyError> {
        self.id(name).ok_or_else(|| PolyError::UnknownName(name.to_string()))
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn block_of(&self, v: Var) -> Block {
        self.blocks[v]
    }

    /// Variables of a block in table order.
    pub fn block(&self, b: Block) -> Vec<Var> {
        (0..self.len()).filter(|&v| self.blocks[v] == b).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_x_layout() {
        let t = VariableTable::eta_x(2, &["a"]).unwrap();
        assert_eq!(t.names(), &["eta1", "eta2", "x1", "x2", "a"]);
        assert_eq!(t.block(Block::Eta), vec![0, 1]);
        assert_eq!(t.block(Block::X), vec![2, 3]);
        assert_eq!(t.id("a"), Some(4));
    }

    #[test]
    fn rejects_duplicates_and_unequal_blocks() {
        assert!(VariableTable::from_entries([("a", Block::Aux), ("a", Block::Aux)]).is_err());
        assert!(VariableTable::from_entries([("eta1", Block::Eta), ("x1", Block::X), ("x2", Block::X)]).is_err());
        assert!(VariableTable::from_entries([("1x", Block::Aux)]).is_err());
    }
}
