//! Finite linear combinations of same-arity tree monomials.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::{Coefficient, Rational};
use crate::sexpr::{parse_raw_polynomial, RawTerm};
use crate::signature::Signature;
use crate::tree::Tree;

/// A polynomial in a free operad. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial<C = Rational> {
    arity: usize,
    terms: BTreeMap<Tree, C>,
}

impl<C: Coefficient> Polynomial<C> {
    pub fn zero(arity: usize) -> Self {
        Polynomial { arity, terms: BTreeMap::new() }
    }

    pub fn monomial(t: Tree) -> Self {
        Self::term(C::one(), t)
    }

    pub fn term(c: C, t: Tree) -> Self {
        let mut p = Self::zero(t.arity());
        p.add_term(c, t);
        p
    }

    /// Collect terms, merging duplicates. Fails if arities differ.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (C, Tree)>) -> Result<Self> {
        let mut p = Self::zero(arity);
        for (c, t) in terms {
            if t.arity() != arity {
                return Err(Error::Mismatch(format!("term of arity {} in a polynomial of arity {arity}", t.arity())));
            }
            p.add_term(c, t);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
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

    pub fn iter(&self) -> impl Iterator<Item = (&Tree, &C)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Tree> {
        self.terms.keys()
    }

    pub fn coefficient(&self, t: &Tree) -> C {
        self.terms.get(t).cloned().unwrap_or_else(C::zero)
    }

    pub fn contains(&self, t: &Tree) -> bool {
        self.terms.contains_key(t)
    }

    pub fn add_term(&mut self, c: C, t: Tree) {
        debug_assert_eq!(t.arity(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&t) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&t);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(t, c);
            }
        }
    }

    pub fn remove(&mut self, t: &Tree) -> Option<C> {
        self.terms.remove(t)
    }

    pub fn add_scaled(&mut self, c: &C, other: &Self) -> Result<()> {
        self.check(other)?;
        for (t, d) in &other.terms {
            self.add_term(c.clone() * d.clone(), t.clone());
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut p = self.clone();
        p.add_scaled(&C::one(), other)?;
        Ok(p)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut p = self.clone();
        p.add_scaled(&-C::one(), other)?;
        Ok(p)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(t, d)| (t.clone(), c.clone() * d.clone())).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-C::one())
    }

    /// Apply a monomial map term by term, merging results.
    pub fn map_monomials(&self, f: impl Fn(&Tree) -> Tree) -> Self {
        let mut p = Self::zero(self.arity);
        for (t, c) in &self.terms {
            p.add_term(c.clone(), f(t));
        }
        p
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::Mismatch(format!("arity {} vs {}", self.arity, other.arity)));
        }
        Ok(())
    }

    /// Largest monomial under `cmp`, if any.
    pub fn max_by(&self, mut cmp: impl FnMut(&Tree, &Tree) -> std::cmp::Ordering) -> Option<&Tree> {
        self.terms.keys().max_by(|a, b| cmp(a, b))
    }

    /// Scale so the coefficient of `t` becomes one.
    pub fn normalized_at(&self, t: &Tree) -> Self {
        let c = self.coefficient(t);
        assert!(!c.is_zero(), "normalizing at a monomial outside the support");
        self.scale(&(C::one() / c))
    }

    pub fn to_sexpr(&self, sig: &Signature) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut ordered: Vec<(&Tree, &C)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| canonical_cmp(a.0, b.0));
        let mut s = String::new();
        for (i, (t, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            if !mag.is_one() {
                let _ = write!(s, "{mag} ");
            }
            s.push_str(&t.to_sexpr(sig));
        }
        s
    }

    /// Convert coefficients into another field.
    pub fn convert<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut p = Polynomial::zero(self.arity);
        for (t, c) in &self.terms {
            p.add_term(f(c), t.clone());
        }
        p
    }
}

/// Default deterministic order: vertex count, then structure.
pub fn canonical_cmp(a: &Tree, b: &Tree) -> std::cmp::Ordering {
    a.vertex_count().cmp(&b.vertex_count()).then_with(|| a.cmp(b))
}

/// Resolve parsed terms against a signature without validating labels.
pub fn raw_terms_to_trees<C: Coefficient>(terms: &[RawTerm], sig: &Signature) -> Result<Vec<(C, Tree)>> {
    terms
        .iter()
        .map(|((n, d), raw)| {
            let (line, col) = raw.position();
            let c = C::from_ratio(n, d)
                .ok_or_else(|| Error::Parse { line, col, msg: "coefficient is not invertible".into() })?;
            Ok((c, Tree::from_raw(raw, sig)?))
        })
        .collect()
}

/// Parse a polynomial whose monomials are valid in `sig`'s mode.
pub fn parse_polynomial<C: Coefficient>(text: &str, sig: &Signature) -> Result<Polynomial<C>> {
    let raw = parse_raw_polynomial(text)?;
    let terms = raw_terms_to_trees::<C>(&raw, sig)?;
    let arity = terms[0].1.arity();
    for (_, t) in &terms {
        t.validate(sig)?;
    }
    Polynomial::from_terms(arity, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Mode;
    use num_bigint::BigInt;
    use num_traits::Zero;

    fn sig() -> Signature {
        Signature::with_generators(Mode::Nonsymmetric, &[("mul", 2), ("prec", 2)]).unwrap()
    }

    #[test]
    fn p_minus_p_is_zero() {
        let s = sig();
        let p: Polynomial = parse_polynomial("(mul 1 2) - 3 (prec 1 2)", &s).unwrap();
        assert!(p.add(&p.scale(&Rational::from_i64(-1))).unwrap().is_zero());
        assert!(p.scale(&Rational::zero()).is_zero());
    }

    #[test]
    fn duplicates_merge() {
        let s = sig();
        let p: Polynomial = parse_polynomial("(mul 1 2) + 2 (mul 1 2) - (prec 1 2) + (prec 1 2)", &s).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.to_sexpr(&s), "3 (mul 1 2)");
    }

    #[test]
    fn halving_is_exact() {
        let s = sig();
        let m = parse_polynomial::<Rational>("2 (mul 1 2)", &s).unwrap();
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(m.scale(&half), parse_polynomial("(mul 1 2)", &s).unwrap());
    }

    #[test]
    fn arity_mismatch() {
        let s = sig();
        let p: Polynomial = parse_polynomial("(mul 1 2)", &s).unwrap();
        let q: Polynomial = parse_polynomial("(mul 1 (mul 2 3))", &s).unwrap();
        assert!(p.add(&q).is_err());
        assert!(parse_polynomial::<Rational>("(mul 1 2) + (mul 1 (mul 2 3))", &s).is_err());
    }
}
