//! Path-lexicographic monomial orderings.
//!
//! A monomial is read as its sequence of path words (the generator labels
//! met on the way from the root to leaf `1`, `2`, ...). Orders in the family
//! differ in how they weigh vertex count, word length and proper prefixes,
//! in which direction the words are scanned, and how the planar leaf
//! permutation breaks the remaining ties.

use std::cmp::Ordering;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::Coefficient;
use crate::signature::{GenId, Signature};
use crate::tree::{graft, graft_assignments, Tree};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMode {
    Ignore,
    MoreVerticesLarger,
    MoreVerticesSmaller,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordLength {
    /// Words are compared letter by letter only.
    Ignore,
    /// Of two path words of different lengths, the shorter is larger.
    ShorterLarger,
    LongerLarger,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefixMode {
    ShorterLarger,
    ShorterSmaller,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathScan {
    /// Leaf 1 first.
    Forward,
    /// Leaf n first.
    Backward,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tiebreak {
    /// Planar leaf sequences compared lexicographically.
    PermutationLex,
    /// Reversed comparison of planar leaf sequences.
    PermutationRevlex,
}

/// A member of the path-lexicographic family, with generator ranks by name
/// (smallest first). Generators absent from `rank` rank below every listed
/// one, in declaration order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct OrderSpec {
    pub rank: Vec<String>,
    pub degree: DegreeMode,
    pub word_length: WordLength,
    pub prefix: PrefixMode,
    pub scan: PathScan,
    pub tiebreak: Tiebreak,
}

impl OrderSpec {
    /// Reverse-length path-lexicographic: shorter path words are larger.
    pub fn reverse_length(rank: &[&str]) -> Self {
        OrderSpec {
            rank: rank.iter().map(|s| s.to_string()).collect(),
            degree: DegreeMode::Ignore,
            word_length: WordLength::ShorterLarger,
            prefix: PrefixMode::ShorterLarger,
            scan: PathScan::Forward,
            tiebreak: Tiebreak::PermutationLex,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("order spec: {e}")))
    }

    pub fn resolve(&self, sig: &Signature) -> Result<MonomialOrder> {
        let mut rank = vec![0u8; sig.len()];
        let mut seen = vec![false; sig.len()];
        for (i, name) in self.rank.iter().enumerate() {
            let g = sig.require(name)?;
            if seen[g.0 as usize] {
                return Err(Error::Config(format!("generator `{name}` ranked twice")));
            }
            seen[g.0 as usize] = true;
            rank[g.0 as usize] = (sig.len() + i) as u8;
        }
        let mut next = 0u8;
        for g in sig.ids() {
            if !seen[g.0 as usize] {
                rank[g.0 as usize] = next;
                next += 1;
            }
        }
        Ok(MonomialOrder { spec: self.clone(), rank })
    }

    /// Spec with the same flags and a different ranking.
    pub fn with_rank(&self, rank: Vec<String>) -> Self {
        OrderSpec { rank, ..self.clone() }
    }
}

/// An [`OrderSpec`] bound to a signature.
#[derive(Clone, Debug)]
pub struct MonomialOrder {
    spec: OrderSpec,
    rank: Vec<u8>,
}

const LETTER_BASE: u8 = 1;
const TERM_HIGH: u8 = u8::MAX;
const TERM_LOW: u8 = 0;

impl MonomialOrder {
    pub fn spec(&self) -> &OrderSpec {
        &self.spec
    }

    pub fn rank_of(&self, g: GenId) -> u8 {
        self.rank[g.0 as usize]
    }

    /// Byte key whose lexicographic order is the monomial order, up to the
    /// final structural tiebreak.
    pub fn key(&self, t: &Tree) -> Vec<u8> {
        let s = &self.spec;
        let mut key = Vec::with_capacity(32);
        let vc = t.vertex_count().min(250) as u8;
        match s.degree {
            DegreeMode::Ignore => {}
            DegreeMode::MoreVerticesLarger => key.push(vc),
            DegreeMode::MoreVerticesSmaller => key.push(TERM_HIGH - vc),
        }
        let mut words = path_words(t);
        if s.scan == PathScan::Backward {
            words.reverse();
        }
        for w in &words {
            let len = w.len().min(250) as u8;
            match s.word_length {
                WordLength::Ignore => {}
                WordLength::ShorterLarger => key.push(TERM_HIGH - len),
                WordLength::LongerLarger => key.push(len),
            }
            key.extend(w.iter().map(|g| self.rank[g.0 as usize] + LETTER_BASE));
            key.push(match s.prefix {
                PrefixMode::ShorterLarger => TERM_HIGH,
                PrefixMode::ShorterSmaller => TERM_LOW,
            });
        }
        let leaves = t.leaves();
        match s.tiebreak {
            Tiebreak::PermutationLex => key.extend(leaves),
            Tiebreak::PermutationRevlex => key.extend(leaves.iter().map(|l| TERM_HIGH - l)),
        }
        key
    }

    pub fn compare(&self, a: &Tree, b: &Tree) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.key(a).cmp(&self.key(b)).then_with(|| a.cmp(b))
    }

    /// Checked comparison: monomials of different arity are incomparable.
    pub fn try_compare(&self, a: &Tree, b: &Tree) -> Result<Ordering> {
        if a.arity() != b.arity() {
            return Err(Error::Mismatch(format!("cannot compare arity {} with arity {}", a.arity(), b.arity())));
        }
        Ok(self.compare(a, b))
    }

    pub fn leading<'a, C: Coefficient>(&self, p: &'a Polynomial<C>) -> Option<&'a Tree> {
        p.monomials().max_by(|a, b| self.compare(a, b))
    }

    pub fn sort_desc(&self, v: &mut [Tree]) {
        v.sort_by_cached_key(|t| std::cmp::Reverse((self.key(t), t.clone())));
    }
}

/// Generator labels from the root to each leaf, indexed by leaf label.
pub fn path_words(t: &Tree) -> Vec<Vec<GenId>> {
    let mut words = vec![Vec::new(); t.arity()];
    let mut cur = Vec::new();
    fill_words(t, &mut cur, &mut words);
    words
}

fn fill_words(t: &Tree, cur: &mut Vec<GenId>, words: &mut [Vec<GenId>]) {
    match t {
        Tree::Leaf(l) => words[*l as usize - 1] = cur.clone(),
        Tree::Node(g, c) => {
            cur.push(*g);
            for child in c.iter() {
                fill_words(child, cur, words);
            }
            cur.pop();
        }
    }
}

/// Witness that an order is not compatible with composition.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AdmissibilityViolation {
    pub smaller: String,
    pub larger: String,
    pub context: String,
    pub smaller_in_context: String,
    pub larger_in_context: String,
}

/// One-vertex contexts applied to a monomial: the monomial grafted into a
/// corolla, or a corolla grafted into one of its leaves.
fn elementary_contexts(sig: &Signature, x: &Tree) -> Vec<(String, Tree)> {
    let mode = sig.mode();
    let n = x.arity();
    let mut out = Vec::new();
    for g in sig.ids() {
        let a = sig.arity(g);
        let corolla = Tree::node(g, (1..=a as u8).map(Tree::leaf).collect());
        for leaf in 1..=a {
            for labels in graft_assignments(a, leaf, n, mode) {
                if let Ok(t) = graft(&corolla, leaf, x, &labels, mode) {
                    out.push((format!("above: {} at leaf {leaf} labels {labels:?}", sig.name(g)), t));
                }
            }
        }
        for leaf in 1..=n {
            for labels in graft_assignments(n, leaf, a, mode) {
                if let Ok(t) = graft(x, leaf, &corolla, &labels, mode) {
                    out.push((format!("below: {} at leaf {leaf} labels {labels:?}", sig.name(g)), t));
                }
            }
        }
    }
    out
}

/// Bounded-exhaustive admissibility test: consecutive monomials (in the
/// order) of arity below `arity_cap` with at most `unary_cap` unary
/// vertices must stay strictly ordered in every one-vertex context. Since
/// the order is total and transitive by construction, consecutive pairs and
/// one-vertex contexts generate all cases within the caps.
pub fn check_admissible(
    order: &MonomialOrder,
    sig: &Signature,
    arity_cap: usize,
    unary_cap: usize,
) -> std::result::Result<(), AdmissibilityViolation> {
    let mut en = Enumerator::new(sig);
    for n in 1..arity_cap.max(2) {
        let mut ms = en.up_to(n, unary_cap);
        ms.sort_by_cached_key(|t| (order.key(t), t.clone()));
        let found = ms.par_windows(2).find_map_first(|w| {
            let (a, b) = (&w[0], &w[1]);
            let ca = elementary_contexts(sig, a);
            let cb = elementary_contexts(sig, b);
            ca.into_iter().zip(cb).find_map(|((desc, ta), (_, tb))| {
                (order.compare(&ta, &tb) != Ordering::Less).then(|| AdmissibilityViolation {
                    smaller: a.to_sexpr(sig),
                    larger: b.to_sexpr(sig),
                    context: desc,
                    smaller_in_context: ta.to_sexpr(sig),
                    larger_in_context: tb.to_sexpr(sig),
                })
            })
        });
        if let Some(v) = found {
            return Err(v);
        }
    }
    Ok(())
}

/// Caps used when `search_order` validates a candidate.
pub const SEARCH_ARITY_CAP: usize = 4;
pub const SEARCH_UNARY_CAP: usize = 1;

/// All flag combinations of the family, in search order.
pub fn flag_combinations() -> Vec<(DegreeMode, WordLength, PrefixMode, PathScan, Tiebreak)> {
    let mut out = Vec::new();
    for d in [DegreeMode::Ignore, DegreeMode::MoreVerticesLarger, DegreeMode::MoreVerticesSmaller] {
        for w in [WordLength::ShorterLarger, WordLength::Ignore, WordLength::LongerLarger] {
            for p in [PrefixMode::ShorterLarger, PrefixMode::ShorterSmaller] {
                for s in [PathScan::Forward, PathScan::Backward] {
                    for t in [Tiebreak::PermutationLex, Tiebreak::PermutationRevlex] {
                        out.push((d, w, p, s, t));
                    }
                }
            }
        }
    }
    out
}

/// Whether every rule's left side is strictly above every monomial on its right.
pub fn orients<C: Coefficient>(order: &MonomialOrder, rules: &[(Tree, Polynomial<C>)]) -> bool {
    rules
        .iter()
        .all(|(lhs, rhs)| rhs.monomials().all(|m| order.compare(lhs, m) == Ordering::Greater))
}

/// Scan the family for the first admissible order orienting all rules.
///
/// Generator rankings are tried as permutations of `ranked` in
/// lexicographic order of positions (so the declared order comes first),
/// each with every flag combination. The answer is the first candidate in
/// that fixed enumeration regardless of how the scan is parallelized.
pub fn search_order<C: Coefficient>(
    sig: &Signature,
    ranked: &[GenId],
    rules: &[(Tree, Polynomial<C>)],
) -> Option<OrderSpec> {
    let names: Vec<String> = ranked.iter().map(|g| sig.name(*g).to_string()).collect();
    let candidates: Vec<OrderSpec> = names
        .iter()
        .cloned()
        .permutations(names.len())
        .flat_map(|rank| {
            flag_combinations().into_iter().map(move |(degree, word_length, prefix, scan, tiebreak)| OrderSpec {
                rank: rank.clone(),
                degree,
                word_length,
                prefix,
                scan,
                tiebreak,
            })
        })
        .collect();
    candidates.into_par_iter().find_first(|spec| {
        let order = match spec.resolve(sig) {
            Ok(o) => o,
            Err(_) => return false,
        };
        orients(&order, rules) && check_admissible(&order, sig, SEARCH_ARITY_CAP, SEARCH_UNARY_CAP).is_ok()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::scalar::Rational;
    use crate::signature::Mode;
    use crate::tree::make_monomial;

    fn tridend() -> Signature {
        Signature::with_generators(Mode::Nonsymmetric, &[("mul", 2), ("succ", 2), ("prec", 2), ("R", 1)]).unwrap()
    }

    #[test]
    fn path_words_by_label() {
        let s = tridend();
        assert_eq!(path_words(&Tree::leaf(1)), vec![Vec::<GenId>::new()]);
        let m = make_monomial("(mul 1 (mul 2 3))", &s).unwrap();
        let mul = s.lookup("mul").unwrap();
        assert_eq!(path_words(&m), vec![vec![mul], vec![mul, mul], vec![mul, mul]]);
        let m = make_monomial("(succ 1 (R 2))", &s).unwrap();
        let (succ, r) = (s.lookup("succ").unwrap(), s.lookup("R").unwrap());
        assert_eq!(path_words(&m), vec![vec![succ], vec![succ, r]]);
    }

    #[test]
    fn right_comb_above_left_comb() {
        let s = tridend();
        let o = OrderSpec::reverse_length(&["R", "mul", "succ", "prec"]).resolve(&s).unwrap();
        let a = make_monomial("(prec 1 (prec 2 3))", &s).unwrap();
        let b = make_monomial("(prec (prec 1 2) 3)", &s).unwrap();
        assert_eq!(o.compare(&a, &b), Ordering::Greater);
        assert_eq!(o.compare(&a, &a), Ordering::Equal);
    }

    #[test]
    fn degree_first_orients_r_elimination() {
        let s = tridend();
        let mut spec = OrderSpec::reverse_length(&["R", "mul", "succ", "prec"]);
        spec.degree = DegreeMode::MoreVerticesLarger;
        let o = spec.resolve(&s).unwrap();
        let a = make_monomial("(mul (R 1) 2)", &s).unwrap();
        let b = make_monomial("(succ 1 2)", &s).unwrap();
        assert_eq!(o.compare(&a, &b), Ordering::Greater);
        assert!(o.try_compare(&a, &Tree::leaf(1)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = OrderSpec::reverse_length(&["mul", "succ", "prec"]);
        let text = spec.to_json();
        assert!(text.contains("shorter-larger"));
        assert_eq!(OrderSpec::from_json(&text).unwrap(), spec);
    }

    #[test]
    fn unknown_generator_in_rank() {
        let s = tridend();
        assert!(OrderSpec::reverse_length(&["foo"]).resolve(&s).is_err());
    }

    #[test]
    fn single_monomial_ambient_is_admissible() {
        let s = Signature::with_generators(Mode::Nonsymmetric, &[("b", 2)]).unwrap();
        let o = OrderSpec::reverse_length(&["b"]).resolve(&s).unwrap();
        // Arity <= 2 without unary generators: one monomial per arity.
        assert!(check_admissible(&o, &s, 2, 0).is_ok());
    }

    #[test]
    fn cyclic_rules_cannot_be_oriented() {
        let s = Signature::with_generators(Mode::Nonsymmetric, &[("a", 2), ("b", 2)]).unwrap();
        let a = make_monomial("(a 1 2)", &s).unwrap();
        let b = make_monomial("(b 1 2)", &s).unwrap();
        let rules = vec![
            (a.clone(), parse_polynomial::<Rational>("(b 1 2)", &s).unwrap()),
            (b.clone(), parse_polynomial::<Rational>("(a 1 2)", &s).unwrap()),
        ];
        assert!(search_order(&s, &s.binary(), &rules).is_none());
    }
}
