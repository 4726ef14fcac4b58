//! Rewriting systems on tree monomials.
//!
//! Termination is certified, not discovered: a [`TerminationCertificate`]
//! names a well-founded measure, [`validate_certificate`] checks that every
//! rule application in every bounded context strictly decreases it, and
//! [`check_confluence`] then joins all critical pairs. Together the two
//! verdicts give confluence by Newman's lemma.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisor::{find_divisors, occurrence_at, substitute, Occurrence};
use crate::enumerate::{random_monomial, Enumerator};
use crate::error::{Error, Result};
use crate::orders::{check_admissible, MonomialOrder, OrderSpec};
use crate::poly::{canonical_cmp, Polynomial};
use crate::scalar::{Coefficient, Rational};
use crate::signature::{Mode, Signature};
use crate::tree::Tree;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RewriteRule<C = Rational> {
    pub lhs: Tree,
    pub rhs: Polynomial<C>,
}

impl<C: Coefficient> RewriteRule<C> {
    pub fn new(lhs: Tree, rhs: Polynomial<C>) -> Result<Self> {
        if lhs.arity() != rhs.arity() {
            return Err(Error::Mismatch(format!(
                "rule left side has arity {} but right side has arity {}",
                lhs.arity(),
                rhs.arity()
            )));
        }
        if rhs.contains(&lhs) {
            return Err(Error::Config("rule left side occurs on its right side".into()));
        }
        if lhs.is_leaf() {
            return Err(Error::Config("rule left side must have an internal vertex".into()));
        }
        Ok(RewriteRule { lhs, rhs })
    }

    /// `lhs - rhs`.
    pub fn as_relation(&self) -> Polynomial<C> {
        let mut p = self.rhs.neg();
        p.add_term(C::one(), self.lhs.clone());
        p
    }

    pub fn to_text(&self, sig: &Signature) -> String {
        format!("{} -> {}", self.lhs.to_sexpr(sig), self.rhs.to_sexpr(sig))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TerminationCertificate {
    /// Rules decrease in an admissible monomial order.
    AdmissibleOrder { order: OrderSpec },
    /// Lexicographic measure: number of unary vertices; then the sum, over
    /// unary vertices, of the number of binary vertices outside the subtree
    /// they root; then the monomial order.
    Layered { order: OrderSpec },
}

impl TerminationCertificate {
    pub fn order_spec(&self) -> &OrderSpec {
        match self {
            TerminationCertificate::AdmissibleOrder { order } | TerminationCertificate::Layered { order } => order,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("certificate: {e}")))
    }
}

/// Sum over unary vertices of the binary vertices not below them.
pub fn unary_exposure(t: &Tree) -> usize {
    let total = t.binary_count();
    fn walk(t: &Tree, total: usize, acc: &mut usize) {
        if let Tree::Node(_, c) = t {
            if c.len() == 1 {
                *acc += total - t.binary_count();
            }
            c.iter().for_each(|x| walk(x, total, acc));
        }
    }
    let mut acc = 0;
    walk(t, total, &mut acc);
    acc
}

/// The certificate's well-founded measure, bound to a signature.
#[derive(Clone, Debug)]
pub struct Measure {
    layered: bool,
    order: MonomialOrder,
}

impl Measure {
    pub fn new(cert: &TerminationCertificate, sig: &Signature) -> Result<Self> {
        Ok(Measure {
            layered: matches!(cert, TerminationCertificate::Layered { .. }),
            order: cert.order_spec().resolve(sig)?,
        })
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn key(&self, t: &Tree) -> (usize, usize, Vec<u8>) {
        if self.layered {
            (t.unary_count(), unary_exposure(t), self.order.key(t))
        } else {
            (0, 0, self.order.key(t))
        }
    }

    pub fn compare(&self, a: &Tree, b: &Tree) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.key(a).cmp(&self.key(b)).then_with(|| a.cmp(b))
    }
}

pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// A rule list with its measure; performs deterministic reduction.
#[derive(Clone, Debug)]
pub struct Rewriter<C = Rational> {
    pub sig: Signature,
    pub rules: Vec<RewriteRule<C>>,
    pub certificate: TerminationCertificate,
    measure: Measure,
    pub step_cap: usize,
}

impl<C: Coefficient> Rewriter<C> {
    pub fn new(sig: Signature, rules: Vec<RewriteRule<C>>, certificate: TerminationCertificate) -> Result<Self> {
        let measure = Measure::new(&certificate, &sig)?;
        Ok(Rewriter { sig, rules, certificate, measure, step_cap: DEFAULT_STEP_CAP })
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    /// First rule application in canonical occurrence order: vertices in
    /// preorder, rules in list order at each vertex.
    pub fn first_redex(&self, t: &Tree) -> Option<(usize, Occurrence)> {
        for path in t.vertex_paths() {
            for (i, r) in self.rules.iter().enumerate() {
                if let Some(occ) = occurrence_at(t, &r.lhs, &path) {
                    return Some((i, occ));
                }
            }
        }
        None
    }

    pub fn is_normal(&self, t: &Tree) -> bool {
        self.first_redex(t).is_none()
    }

    pub fn all_redexes(&self, t: &Tree) -> Vec<(usize, Occurrence)> {
        let mut out = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            for occ in find_divisors(t, &r.lhs) {
                out.push((i, occ));
            }
        }
        out
    }

    /// Normal form: repeatedly rewrites the largest reducible monomial at its
    /// first redex.
    pub fn reduce(&self, p: &Polynomial<C>) -> Result<Polynomial<C>> {
        let mut pool: BTreeMap<((usize, usize, Vec<u8>), Tree), C> = BTreeMap::new();
        for (t, c) in p.iter() {
            pool.insert((self.measure.key(t), t.clone()), c.clone());
        }
        let mut out = Polynomial::zero(p.arity());
        let mut steps = 0usize;
        while let Some(((_, t), c)) = pool.pop_last() {
            match self.first_redex(&t) {
                None => out.add_term(c, t),
                Some((i, occ)) => {
                    steps += 1;
                    if steps > self.step_cap {
                        return Err(Error::StepCapExceeded(self.step_cap));
                    }
                    let image = substitute(&t, &occ, &self.rules[i].rhs)?;
                    for (u, d) in image.iter() {
                        let key = (self.measure.key(u), u.clone());
                        let v = c.clone() * d.clone();
                        let entry = pool.entry(key);
                        match entry {
                            std::collections::btree_map::Entry::Occupied(mut e) => {
                                let s = e.get().clone() + v;
                                if s.is_zero() {
                                    e.remove();
                                } else {
                                    *e.get_mut() = s;
                                }
                            }
                            std::collections::btree_map::Entry::Vacant(e) => {
                                if !v.is_zero() {
                                    e.insert(v);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn reduce_monomial(&self, t: &Tree) -> Result<Polynomial<C>> {
        self.reduce(&Polynomial::monomial(t.clone()))
    }

    /// Reduction choosing a random reducible monomial and a random redex at
    /// each step. Only normal forms of confluent systems are independent of
    /// such choices.
    pub fn reduce_randomized(&self, p: &Polynomial<C>, seed: u64) -> Result<Polynomial<C>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cur = p.clone();
        for _ in 0..self.step_cap {
            let reducible: Vec<Tree> = cur.monomials().filter(|t| !self.is_normal(t)).cloned().collect();
            let Some(t) = reducible.choose(&mut rng) else { return Ok(cur) };
            let redexes = self.all_redexes(t);
            let (i, occ) = &redexes[rng.gen_range(0..redexes.len())];
            let c = cur.coefficient(t);
            cur.remove(t);
            let image = substitute(t, occ, &self.rules[*i].rhs)?;
            cur.add_scaled(&c, &image)?;
        }
        Err(Error::StepCapExceeded(self.step_cap))
    }
}

/// A minimal monomial containing two overlapping rule left sides.
#[derive(Clone, Debug)]
pub struct CriticalPair<C = Rational> {
    pub overlap: Tree,
    pub rules: (usize, usize),
    pub occurrences: (Occurrence, Occurrence),
    pub reductions: (Polynomial<C>, Polynomial<C>),
}

/// Merge pattern `b` into the subtree `a` of the top pattern, leaves
/// becoming placeholders. `None` when labels disagree.
fn merge_shapes(a: &Tree, b: &Tree) -> Option<Tree> {
    match (a, b) {
        (_, Tree::Leaf(_)) => Some(a.relabel(&|_| 0)),
        (Tree::Leaf(_), _) => Some(b.relabel(&|_| 0)),
        (Tree::Node(g, ac), Tree::Node(h, bc)) if g == h && ac.len() == bc.len() => {
            let kids = ac.iter().zip(bc.iter()).map(|(x, y)| merge_shapes(x, y)).collect::<Option<Vec<_>>>()?;
            Some(Tree::node(*g, kids))
        }
        _ => None,
    }
}

/// All valid leaf labellings of a planar shape with the given label set.
pub fn labellings(shape: &Tree, labels: &[u8], mode: Mode) -> Vec<Tree> {
    match shape {
        Tree::Leaf(_) => vec![Tree::Leaf(labels[0])],
        Tree::Node(g, c) if c.len() == 1 => {
            labellings(&c[0], labels, mode).into_iter().map(|t| Tree::unary(*g, t)).collect()
        }
        Tree::Node(g, c) => {
            let k = c[0].arity();
            let mut out = Vec::new();
            let splits: Vec<(Vec<u8>, Vec<u8>)> = match mode {
                Mode::Nonsymmetric => vec![(labels[..k].to_vec(), labels[k..].to_vec())],
                Mode::Shuffle => itertools::Itertools::combinations(labels[1..].iter().copied(), k - 1)
                    .map(|rest| {
                        let mut left = vec![labels[0]];
                        left.extend(rest);
                        let right = labels.iter().copied().filter(|l| !left.contains(l)).collect();
                        (left, right)
                    })
                    .collect(),
            };
            for (l, r) in splits {
                let ls = labellings(&c[0], &l, mode);
                let rs = labellings(&c[1], &r, mode);
                for x in &ls {
                    for y in &rs {
                        out.push(Tree::binary(*g, x.clone(), y.clone()));
                    }
                }
            }
            out
        }
    }
}

/// Overlaps where `top`'s root is the root of the union and `other`'s root
/// sits at a vertex of `top`.
pub fn overlaps_with_top(top: &Tree, other: &Tree, mode: Mode) -> Vec<(Tree, Occurrence, Occurrence)> {
    let mut out = Vec::new();
    for path in top.vertex_paths() {
        let sub = top.at(&path).expect("vertex path");
        let Some(merged) = merge_shapes(sub, other) else { continue };
        let shape = top.relabel(&|_| 0).replace_at(&path, merged);
        let labels: Vec<u8> = (1..=shape.arity() as u8).collect();
        for m in labellings(&shape, &labels, mode) {
            let (Some(oa), Some(ob)) = (occurrence_at(&m, top, &[]), occurrence_at(&m, other, &path)) else {
                continue;
            };
            out.push((m, oa, ob));
        }
    }
    out
}

/// Caps on the size of overlaps examined.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Caps {
    pub arity: usize,
    pub unary: usize,
}

impl Caps {
    pub fn new(arity: usize, unary: usize) -> Self {
        Caps { arity, unary }
    }

    pub fn admits(&self, t: &Tree) -> bool {
        t.arity() <= self.arity && t.unary_count() <= self.unary
    }
}

/// All critical pairs of a rule list, in canonical order.
pub fn critical_pairs<C: Coefficient>(rules: &[RewriteRule<C>], mode: Mode) -> Result<Vec<CriticalPair<C>>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (i, a) in rules.iter().enumerate() {
        for (j, b) in rules.iter().enumerate() {
            for (m, oa, ob) in overlaps_with_top(&a.lhs, &b.lhs, mode) {
                let (va, vb) = (oa.vertex_set(), ob.vertex_set());
                if i == j && va == vb {
                    continue;
                }
                let key = if (i, &va) <= (j, &vb) {
                    (m.clone(), i, va.clone(), j, vb.clone())
                } else {
                    (m.clone(), j, vb.clone(), i, va.clone())
                };
                if !seen.insert(key) {
                    continue;
                }
                let ra = substitute(&m, &oa, &a.rhs)?;
                let rb = substitute(&m, &ob, &b.rhs)?;
                out.push(CriticalPair { overlap: m, rules: (i, j), occurrences: (oa, ob), reductions: (ra, rb) });
            }
        }
    }
    out.sort_by(|x, y| canonical_cmp(&x.overlap, &y.overlap).then(x.rules.cmp(&y.rules)));
    Ok(out)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ConfluenceFailure {
    pub overlap: String,
    pub rules: (usize, usize),
    pub normal_forms: (String, String),
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ConfluenceReport {
    pub caps: Caps,
    pub pairs_examined: usize,
    pub joinable: usize,
    pub skipped_beyond_caps: usize,
    pub failures: Vec<ConfluenceFailure>,
}

impl ConfluenceReport {
    pub fn is_confluent(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Join every critical pair within `caps`.
pub fn check_confluence<C: Coefficient>(rw: &Rewriter<C>, caps: Caps) -> Result<ConfluenceReport> {
    let pairs = critical_pairs(&rw.rules, rw.sig.mode())?;
    let (inside, outside): (Vec<_>, Vec<_>) = pairs.into_iter().partition(|cp| caps.admits(&cp.overlap));
    let verdicts: Vec<Result<Option<ConfluenceFailure>>> = inside
        .par_iter()
        .map(|cp| {
            let a = rw.reduce(&cp.reductions.0)?;
            let b = rw.reduce(&cp.reductions.1)?;
            Ok((a != b).then(|| ConfluenceFailure {
                overlap: cp.overlap.to_sexpr(&rw.sig),
                rules: cp.rules,
                normal_forms: (a.to_sexpr(&rw.sig), b.to_sexpr(&rw.sig)),
            }))
        })
        .collect();
    let mut failures = Vec::new();
    for v in verdicts {
        if let Some(f) = v? {
            failures.push(f);
        }
    }
    Ok(ConfluenceReport {
        caps,
        pairs_examined: inside.len(),
        joinable: inside.len() - failures.len(),
        skipped_beyond_caps: outside.len(),
        failures,
    })
}

/// Result of completing a rule list at caps.
#[derive(Clone, Debug)]
pub struct KnuthBendix<C = Rational> {
    pub rewriter: Rewriter<C>,
    /// Indices of the rules added by completion.
    pub added: Vec<usize>,
    pub rounds: usize,
}

/// Knuth-Bendix completion under the rewriter's measure: every critical
/// pair within `caps` that fails to join is oriented by the measure and
/// added as a rule, until all pairs within caps join. Existing rules are
/// kept as they are.
pub fn complete_rewriting<C: Coefficient>(rw: &Rewriter<C>, caps: Caps, max_rules: usize) -> Result<KnuthBendix<C>> {
    let mut current = rw.clone();
    let mut added = Vec::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut grew = false;
        let pairs = critical_pairs(&current.rules, current.sig.mode())?;
        for cp in pairs.iter().filter(|cp| caps.admits(&cp.overlap)) {
            let a = current.reduce(&cp.reductions.0)?;
            let b = current.reduce(&cp.reductions.1)?;
            let d = current.reduce(&a.sub(&b)?)?;
            if d.is_zero() {
                continue;
            }
            let lead = d.max_by(|x, y| current.measure.compare(x, y)).expect("nonzero").clone();
            let p = d.normalized_at(&lead);
            let mut rhs = p.neg();
            rhs.remove(&lead);
            current.rules.push(RewriteRule::new(lead, rhs)?);
            added.push(current.rules.len() - 1);
            if current.rules.len() > max_rules {
                return Err(Error::StepCapExceeded(max_rules));
            }
            grew = true;
        }
        if !grew {
            return Ok(KnuthBendix { rewriter: current, added, rounds });
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CertificateViolation {
    pub rule: usize,
    pub host: String,
    pub result_monomial: String,
    pub reason: String,
}

/// Check that every rule application strictly decreases the certificate's
/// measure: exhaustively for hosts within `caps`, and on `samples` random
/// hosts one or two leaves larger.
pub fn validate_certificate<C: Coefficient>(
    rw: &Rewriter<C>,
    caps: Caps,
    samples: usize,
    seed: u64,
) -> std::result::Result<(), CertificateViolation> {
    if let TerminationCertificate::AdmissibleOrder { .. } = rw.certificate {
        if let Err(v) = check_admissible(rw.measure.order(), &rw.sig, caps.arity, caps.unary) {
            return Err(CertificateViolation {
                rule: usize::MAX,
                host: v.smaller_in_context,
                result_monomial: v.larger_in_context,
                reason: format!("order is not admissible: {}", v.context),
            });
        }
    }
    let check_host = |host: &Tree| -> std::result::Result<(), CertificateViolation> {
        for (i, r) in rw.rules.iter().enumerate() {
            for occ in find_divisors(host, &r.lhs) {
                let image = substitute(host, &occ, &r.rhs).expect("fresh occurrence");
                for t in image.monomials() {
                    if rw.measure.compare(host, t) != Ordering::Greater {
                        return Err(CertificateViolation {
                            rule: i,
                            host: host.to_sexpr(&rw.sig),
                            result_monomial: t.to_sexpr(&rw.sig),
                            reason: "measure does not decrease".into(),
                        });
                    }
                }
            }
        }
        Ok(())
    };
    let mut en = Enumerator::new(&rw.sig);
    for n in 1..=caps.arity {
        let hosts = en.up_to(n, caps.unary);
        if let Some(v) = hosts.par_iter().find_map_first(|h| check_host(h).err()) {
            return Err(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let n = caps.arity + rng.gen_range(1..=2);
        let host = random_monomial(&rw.sig, n, caps.unary + 1, &mut rng);
        if let Some(h) = host {
            check_host(&h)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::tree::make_monomial;

    fn assoc() -> Rewriter {
        let sig = Signature::with_generators(Mode::Nonsymmetric, &[("mul", 2)]).unwrap();
        let lhs = make_monomial("(mul 1 (mul 2 3))", &sig).unwrap();
        let rhs = parse_polynomial("(mul (mul 1 2) 3)", &sig).unwrap();
        let rules = vec![RewriteRule::new(lhs, rhs).unwrap()];
        Rewriter::new(sig, rules, TerminationCertificate::AdmissibleOrder {
            order: OrderSpec::reverse_length(&["mul"]),
        })
        .unwrap()
    }

    #[test]
    fn associativity_single_self_overlap() {
        let rw = assoc();
        let cps = critical_pairs(&rw.rules, Mode::Nonsymmetric).unwrap();
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].overlap.to_sexpr(&rw.sig), "(mul 1 (mul 2 (mul 3 4)))");
        let rep = check_confluence(&rw, Caps::new(4, 0)).unwrap();
        assert!(rep.is_confluent());
        assert_eq!(rep.pairs_examined, 1);
    }

    #[test]
    fn reduce_to_left_comb() {
        let rw = assoc();
        let t = make_monomial("(mul 1 (mul 2 (mul 3 4)))", &rw.sig).unwrap();
        let nf = rw.reduce_monomial(&t).unwrap();
        assert_eq!(nf.to_sexpr(&rw.sig), "(mul (mul (mul 1 2) 3) 4)");
        assert_eq!(rw.reduce(&nf).unwrap(), nf);
        assert!(validate_certificate(&rw, Caps::new(4, 0), 10, 1).is_ok());
    }

    #[test]
    fn disjoint_generators_do_not_overlap() {
        let sig = Signature::with_generators(Mode::Nonsymmetric, &[("a", 2), ("b", 2)]).unwrap();
        let r1 = RewriteRule::<Rational>::new(
            make_monomial("(a 1 (a 2 3))", &sig).unwrap(),
            parse_polynomial("(a (a 1 2) 3)", &sig).unwrap(),
        )
        .unwrap();
        let r2 = RewriteRule::new(
            make_monomial("(b (b 1 2) 3)", &sig).unwrap(),
            parse_polynomial("(b 1 (b 2 3))", &sig).unwrap(),
        )
        .unwrap();
        let cps = critical_pairs(&[r1, r2], Mode::Nonsymmetric).unwrap();
        // Only the two self-overlaps remain.
        assert!(cps.iter().all(|cp| cp.rules.0 == cp.rules.1));
        assert_eq!(cps.len(), 2);
    }

    #[test]
    fn reversed_order_is_rejected() {
        let mut rw = assoc();
        rw = Rewriter::new(rw.sig.clone(), rw.rules.clone(), TerminationCertificate::AdmissibleOrder {
            order: OrderSpec { word_length: crate::orders::WordLength::LongerLarger, ..OrderSpec::reverse_length(&["mul"]) },
        })
        .unwrap();
        assert!(validate_certificate(&rw, Caps::new(4, 0), 0, 1).is_err());
    }

    #[test]
    fn step_cap_reported() {
        let mut rw = assoc();
        rw.step_cap = 1;
        let t = make_monomial("(mul 1 (mul 2 (mul 3 4)))", &rw.sig).unwrap();
        assert_eq!(rw.reduce_monomial(&t), Err(Error::StepCapExceeded(1)));
    }

    #[test]
    fn exposure_measure() {
        let sig = Signature::with_generators(Mode::Nonsymmetric, &[("succ", 2), ("R", 1)]).unwrap();
        let before = make_monomial("(succ 1 (R 2))", &sig).unwrap();
        let after = make_monomial("(R (succ 1 2))", &sig).unwrap();
        assert_eq!(unary_exposure(&before), 1);
        assert_eq!(unary_exposure(&after), 0);
    }
}
