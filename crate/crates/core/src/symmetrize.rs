//! Passage from symmetric and nonsymmetric presentations to shuffle ones.
//!
//! A binary generator `g` without symmetry becomes the pair `g`, `gbar`
//! with `g(b, a) = gbar(a, b)` whenever `min(a) < min(b)`. A symmetric
//! generator stays single with `g(b, a) = g(a, b)`, an antisymmetric one
//! with `g(b, a) = -g(a, b)`.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;

use crate::error::Result;
use crate::linalg::{SparseEchelon, SparseRow};
use crate::poly::{canonical_cmp, Polynomial};
use crate::presentation::{Presentation, SymmetricPresentation};
use crate::rewriting::RewriteRule;
use crate::scalar::Coefficient;
use crate::signature::{GenId, Mode, Signature, Symmetry};
use crate::tree::Tree;

pub fn bar_name(name: &str) -> String {
    format!("{name}bar")
}

/// Shuffle image of each symmetric generator.
#[derive(Clone, Debug)]
pub struct ShuffleTable {
    pub sig: Signature,
    /// Indexed by the source generator id: (shuffle id, id of the opposite
    /// generator if any, symmetry).
    pub entries: Vec<(GenId, Option<GenId>, Symmetry)>,
}

impl ShuffleTable {
    pub fn new(generators: &[(String, u8, Symmetry)]) -> Result<Self> {
        let mut sig = Signature::new(Mode::Shuffle);
        let mut entries = Vec::new();
        for (name, arity, sym) in generators {
            let g = sig.add(name, *arity)?;
            let bar = if *arity == 2 && *sym == Symmetry::None { Some(sig.add(&bar_name(name), 2)?) } else { None };
            entries.push((g, bar, *sym));
        }
        Ok(ShuffleTable { sig, entries })
    }

    pub fn from_symmetric<C: Coefficient>(sp: &SymmetricPresentation<C>) -> Result<Self> {
        Self::new(&sp.generators.iter().map(|g| (g.name.clone(), g.arity, g.symmetry)).collect::<Vec<_>>())
    }

    /// Sign and shuffle monomial of a tree with arbitrary leaf order.
    pub fn convert(&self, t: &Tree) -> (bool, Tree) {
        match t {
            Tree::Leaf(l) => (false, Tree::Leaf(*l)),
            Tree::Node(g, kids) if kids.len() == 1 => {
                let (neg, c) = self.convert(&kids[0]);
                (neg, Tree::unary(self.entries[g.0 as usize].0, c))
            }
            Tree::Node(g, kids) => {
                let (na, a) = self.convert(&kids[0]);
                let (nb, b) = self.convert(&kids[1]);
                let (id, bar, sym) = self.entries[g.0 as usize];
                let neg = na ^ nb;
                if a.min_leaf() < b.min_leaf() {
                    return (neg, Tree::binary(id, a, b));
                }
                match sym {
                    Symmetry::None => (neg, Tree::binary(bar.expect("paired"), b, a)),
                    Symmetry::Symmetric => (neg, Tree::binary(id, b, a)),
                    Symmetry::Antisymmetric => (!neg, Tree::binary(id, b, a)),
                }
            }
        }
    }

    pub fn convert_terms<C: Coefficient>(&self, terms: &[(C, Tree)]) -> Polynomial<C> {
        let arity = terms.first().map(|t| t.1.arity()).unwrap_or(0);
        let mut p = Polynomial::zero(arity);
        for (c, t) in terms {
            let (neg, u) = self.convert(t);
            p.add_term(if neg { -c.clone() } else { c.clone() }, u);
        }
        p
    }
}

fn permute<C: Coefficient>(terms: &[(C, Tree)], perm: &[u8]) -> Vec<(C, Tree)> {
    terms.iter().map(|(c, t)| (c.clone(), t.relabel(&|l| perm[l as usize - 1]))).collect()
}

/// Expand a relation over every relabelling of its arguments.
pub fn expand<C: Coefficient>(table: &ShuffleTable, terms: &[(C, Tree)]) -> Vec<Polynomial<C>> {
    let n = terms.first().map(|t| t.1.arity()).unwrap_or(0);
    (1..=n as u8)
        .permutations(n)
        .map(|perm| table.convert_terms(&permute(terms, &perm)))
        .filter(|p| !p.is_zero())
        .collect()
}

/// A basis of the span of `polys`, fully reduced, largest monomials first.
pub fn span_basis<C: Coefficient>(polys: &[Polynomial<C>]) -> Vec<Polynomial<C>> {
    let mut support: Vec<Tree> = polys.iter().flat_map(|p| p.monomials().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    support.sort_by(|a, b| canonical_cmp(b, a));
    let index: HashMap<&Tree, usize> = support.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut ech = SparseEchelon::new();
    for p in polys {
        let mut row: SparseRow<C> = p.iter().map(|(t, c)| (index[t], c.clone())).collect();
        row.sort_by_key(|e| e.0);
        ech.insert(row);
    }
    ech.reduced_rows()
        .into_iter()
        .map(|row| {
            let arity = support[row[0].0].arity();
            Polynomial::from_terms(arity, row.into_iter().map(|(i, c)| (c, support[i].clone()))).expect("same arity")
        })
        .collect()
}

/// Shuffle presentation of a symmetric one.
pub fn to_shuffle<C: Coefficient>(sp: &SymmetricPresentation<C>) -> Result<Presentation<C>> {
    let table = ShuffleTable::from_symmetric(sp)?;
    let mut by_arity: std::collections::BTreeMap<usize, Vec<Polynomial<C>>> = Default::default();
    for r in &sp.relations {
        let n = r[0].1.arity();
        by_arity.entry(n).or_default().extend(expand(&table, r));
    }
    let mut pres = Presentation::new(&sp.name, table.sig.clone());
    for polys in by_arity.values() {
        pres.relations.extend(span_basis(polys));
    }
    Ok(pres)
}

/// Table for a nonsymmetric signature: every binary generator gets a
/// partner, unary generators are kept.
pub fn nonsymmetric_table(sig: &Signature) -> Result<ShuffleTable> {
    ShuffleTable::new(&sig.generators().iter().map(|g| (g.name.clone(), g.arity, Symmetry::None)).collect::<Vec<_>>())
}

fn identity_terms<C: Coefficient>(p: &Polynomial<C>) -> Vec<(C, Tree)> {
    p.iter().map(|(t, c)| (c.clone(), t.clone())).collect()
}

/// Shuffle presentation of the symmetric operad generated by a nonsymmetric
/// one. Rules become one rule per relabelling.
pub fn symmetrize<C: Coefficient>(pres: &Presentation<C>) -> Result<Presentation<C>> {
    let table = nonsymmetric_table(&pres.sig)?;
    let mut out = Presentation::new(&pres.name, table.sig.clone());
    let mut by_arity: std::collections::BTreeMap<usize, Vec<Polynomial<C>>> = Default::default();
    for r in &pres.relations {
        by_arity.entry(r.arity()).or_default().extend(expand(&table, &identity_terms(r)));
    }
    for polys in by_arity.values() {
        out.relations.extend(span_basis(polys));
    }
    out.rules = symmetrize_rules(&table, &pres.rules)?;
    Ok(out)
}

pub fn symmetrize_rules<C: Coefficient>(table: &ShuffleTable, rules: &[RewriteRule<C>]) -> Result<Vec<RewriteRule<C>>> {
    let mut out = Vec::new();
    for r in rules {
        let n = r.lhs.arity();
        let rhs_terms = identity_terms(&r.rhs);
        for perm in (1..=n as u8).permutations(n) {
            let (neg, lhs) = table.convert(&r.lhs.relabel(&|l| perm[l as usize - 1]));
            let mut rhs = table.convert_terms(&permute(&rhs_terms, &perm));
            if rhs.arity() == 0 {
                rhs = Polynomial::zero(n);
            }
            if neg {
                rhs = rhs.neg();
            }
            out.push(RewriteRule::new(lhs, rhs)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{parse_presentation, ParsedPresentation};
    use crate::scalar::Rational;
    use crate::tree::make_monomial;

    fn sym(text: &str) -> SymmetricPresentation {
        match parse_presentation(text).unwrap() {
            ParsedPresentation::Symmetric(s) => s,
            _ => panic!("expected symmetric"),
        }
    }

    #[test]
    fn antisymmetric_swap_flips_sign() {
        let sp = sym("mode symmetric\ngen b arity 2 antisym\n");
        let t = ShuffleTable::from_symmetric(&sp).unwrap();
        let raw = Tree::binary(GenId(0), Tree::leaf(2), Tree::leaf(1));
        assert_eq!(t.convert(&raw), (true, Tree::binary(GenId(0), Tree::leaf(1), Tree::leaf(2))));
    }

    #[test]
    fn nosym_generator_pairs_with_opposite() {
        let sp = sym("mode symmetric\ngen t arity 2 nosym\n");
        let t = ShuffleTable::from_symmetric(&sp).unwrap();
        assert_eq!(t.sig.name(GenId(1)), "tbar");
        let raw = Tree::binary(GenId(0), Tree::leaf(2), Tree::binary(GenId(0), Tree::leaf(3), Tree::leaf(1)));
        let (neg, u) = t.convert(&raw);
        assert!(!neg);
        assert_eq!(u, make_monomial("(tbar (tbar 1 3) 2)", &t.sig).unwrap());
    }

    #[test]
    fn jacobi_gives_one_shuffle_relation() {
        let sp = sym("mode symmetric\ngen b arity 2 antisym\nrel: (b 1 (b 2 3)) + (b 2 (b 3 1)) + (b 3 (b 1 2))\n");
        let p = to_shuffle(&sp).unwrap();
        assert_eq!(p.relations.len(), 1);
        assert_eq!(p.relations[0].len(), 3);
    }

    #[test]
    fn associativity_symmetrizes_to_six_relations() {
        let text = "mode nonsymmetric\ngen m arity 2\nrel: (m 1 (m 2 3)) - (m (m 1 2) 3)\n";
        let pres = crate::presentation::parse_plain::<Rational>(text).unwrap();
        let s = symmetrize(&pres).unwrap();
        assert_eq!(s.sig.len(), 2);
        assert_eq!(s.relations.len(), 6);
    }
}
