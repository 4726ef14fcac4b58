//! Generators and the ambient signature a family of monomials lives in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct GenId(pub u8);

/// Which free operad monomials live in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Leaf labels satisfy the increasing-minimal-leaf condition.
    Shuffle,
    /// Leaves read left to right are `1..n`.
    Nonsymmetric,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Shuffle => "shuffle",
            Mode::Nonsymmetric => "nonsymmetric",
        }
    }
}

/// Symmetry of a binary operation in a symmetric presentation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    #[serde(rename = "nosym")]
    None,
    #[serde(rename = "sym")]
    Symmetric,
    #[serde(rename = "antisym")]
    Antisymmetric,
}

impl Symmetry {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nosym" => Some(Symmetry::None),
            "sym" => Some(Symmetry::Symmetric),
            "antisym" => Some(Symmetry::Antisymmetric),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Symmetry::None => "nosym",
            Symmetry::Symmetric => "sym",
            Symmetry::Antisymmetric => "antisym",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Generator {
    pub id: GenId,
    pub name: String,
    pub arity: u8,
}

/// An ordered list of generators together with the monomial mode.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Signature {
    mode: Mode,
    gens: Vec<Generator>,
}

impl Signature {
    pub fn new(mode: Mode) -> Self {
        Signature { mode, gens: Vec::new() }
    }

    pub fn with_generators(mode: Mode, gens: &[(&str, u8)]) -> Result<Self> {
        let mut sig = Signature::new(mode);
        for (name, arity) in gens {
            sig.add(name, *arity)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, name: &str, arity: u8) -> Result<GenId> {
        if !(1..=2).contains(&arity) {
            return Err(Error::Config(format!("generator `{name}` must have arity 1 or 2")));
        }
        if self.lookup(name).is_some() {
            return Err(Error::Config(format!("generator `{name}` declared twice")));
        }
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
            return Err(Error::Config(format!("invalid generator name `{name}`")));
        }
        let id = GenId(self.gens.len() as u8);
        self.gens.push(Generator { id, name: name.to_string(), arity });
        Ok(id)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn get(&self, id: GenId) -> &Generator {
        &self.gens[id.0 as usize]
    }

    pub fn name(&self, id: GenId) -> &str {
        &self.gens[id.0 as usize].name
    }

    pub fn arity(&self, id: GenId) -> usize {
        self.gens[id.0 as usize].arity as usize
    }

    pub fn lookup(&self, name: &str) -> Option<GenId> {
        self.gens.iter().find(|g| g.name == name).map(|g| g.id)
    }

    pub fn require(&self, name: &str) -> Result<GenId> {
        self.lookup(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> + '_ {
        self.gens.iter().map(|g| g.id)
    }

    pub fn binary(&self) -> Vec<GenId> {
        self.gens.iter().filter(|g| g.arity == 2).map(|g| g.id).collect()
    }

    pub fn unary(&self) -> Vec<GenId> {
        self.gens.iter().filter(|g| g.arity == 1).map(|g| g.id).collect()
    }

    /// Restriction to the named generators, preserving ids is not possible in
    /// general, so a translation table old id -> new id is returned.
    pub fn restrict(&self, keep: &[GenId]) -> (Signature, Vec<Option<GenId>>) {
        let mut sig = Signature::new(self.mode);
        let mut table = vec![None; self.gens.len()];
        for g in &self.gens {
            if keep.contains(&g.id) {
                table[g.id.0 as usize] = Some(sig.add(&g.name, g.arity).expect("names unique"));
            }
        }
        (sig, table)
    }
}
