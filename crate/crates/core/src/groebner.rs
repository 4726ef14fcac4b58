//! Completion, normal monomials and dimension tables.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisor::{divides, find_divisors, occurrence_at, substitute};
use crate::enumerate::{enumerate_monomials, Enumerator};
use crate::error::{Error, Result};
use crate::linalg::{SparseEchelon, SparseRow};
use crate::orders::{MonomialOrder, OrderSpec};
use crate::poly::{canonical_cmp, Polynomial};
use crate::rewriting::{critical_pairs, overlaps_with_top, Caps, RewriteRule, Rewriter, TerminationCertificate};
use crate::scalar::Coefficient;
use crate::signature::Signature;
use crate::tree::Tree;

/// Default bound on the number of internal vertices of overlaps processed
/// during completion.
pub const DEFAULT_DEGREE_CAP: usize = 4;

/// Vertex bound of monomials within caps: enough for completion when only
/// those monomials matter.
pub fn degree_cap(caps: Caps) -> usize {
    caps.arity.saturating_sub(1) + caps.unary
}

/// Orient each relation by its leading monomial and interreduce same-arity
/// relations so that leading monomials are distinct and no rule's right side
/// contains another rule's left side of the same arity.
pub fn interreduce<C: Coefficient>(relations: &[Polynomial<C>], order: &MonomialOrder) -> Result<Vec<RewriteRule<C>>> {
    let mut by_arity: BTreeMap<usize, Vec<&Polynomial<C>>> = BTreeMap::new();
    for p in relations.iter().filter(|p| !p.is_zero()) {
        by_arity.entry(p.arity()).or_default().push(p);
    }
    let mut rules = Vec::new();
    for polys in by_arity.values() {
        let mut support: Vec<Tree> =
            polys.iter().flat_map(|p| p.monomials().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        order.sort_desc(&mut support);
        let index: HashMap<&Tree, usize> = support.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut ech = SparseEchelon::new();
        for p in polys {
            let mut row: SparseRow<C> = p.iter().map(|(t, c)| (index[t], c.clone())).collect();
            row.sort_by_key(|e| e.0);
            ech.insert(row);
        }
        for row in ech.reduced_rows() {
            let lhs = support[row[0].0].clone();
            let mut rhs = Polynomial::zero(lhs.arity());
            for (col, c) in &row[1..] {
                rhs.add_term(-c.clone(), support[*col].clone());
            }
            rules.push(RewriteRule::new(lhs, rhs)?);
        }
    }
    Ok(rules)
}

/// Result of a completion run.
#[derive(Clone, Debug)]
pub struct Completion<C> {
    pub rules: Vec<RewriteRule<C>>,
    /// Rules added beyond the interreduced input.
    pub added: usize,
    pub pairs_processed: usize,
    /// Overlaps larger than the degree cap, left unexamined.
    pub pairs_skipped: usize,
}

fn certificate(spec: &OrderSpec) -> TerminationCertificate {
    TerminationCertificate::AdmissibleOrder { order: spec.clone() }
}

/// Buchberger completion. Overlaps are processed smallest first; each
/// S-polynomial is reduced by the current rules and a nonzero remainder
/// becomes a new rule.
pub fn buchberger<C: Coefficient>(
    sig: &Signature,
    relations: &[Polynomial<C>],
    spec: &OrderSpec,
    degree_cap: usize,
) -> Result<Completion<C>> {
    let order = spec.resolve(sig)?;
    let initial = interreduce(relations, &order)?;
    let n_initial = initial.len();
    let mut rw = Rewriter::new(sig.clone(), initial, certificate(spec))?;
    let mode = sig.mode();
    // (vertex count, overlap, top rule, inner rule, inner root)
    type Pending = BTreeSet<(usize, Tree, usize, usize, Vec<u8>)>;
    let mut queue: Pending = BTreeSet::new();
    let push_pairs = |queue: &mut Pending, rules: &[RewriteRule<C>], k: usize| {
        for j in 0..=k {
            let mut pairs = overlaps_with_top(&rules[k].lhs, &rules[j].lhs, mode)
                .into_iter()
                .map(|(m, a, b)| (m, k, j, a.vertex_set() == b.vertex_set(), b.root))
                .collect::<Vec<_>>();
            if j != k {
                pairs.extend(
                    overlaps_with_top(&rules[j].lhs, &rules[k].lhs, mode)
                        .into_iter()
                        .map(|(m, a, b)| (m, j, k, a.vertex_set() == b.vertex_set(), b.root)),
                );
            }
            for (m, a, b, same, root) in pairs {
                if a == b && same {
                    continue;
                }
                queue.insert((m.vertex_count(), m, a, b, root));
            }
        }
    };
    for k in 0..rw.rules.len() {
        push_pairs(&mut queue, &rw.rules, k);
    }
    let (mut processed, mut skipped) = (0, 0);
    while let Some((size, m, a, b, root)) = queue.pop_first() {
        if size > degree_cap {
            skipped += 1 + queue.len();
            break;
        }
        processed += 1;
        let oa = occurrence_at(&m, &rw.rules[a].lhs, &[]).expect("overlap root");
        let ob = occurrence_at(&m, &rw.rules[b].lhs, &root).expect("overlap inner");
        let s = substitute(&m, &oa, &rw.rules[a].rhs)?.sub(&substitute(&m, &ob, &rw.rules[b].rhs)?)?;
        let nf = rw.reduce(&s)?;
        if nf.is_zero() {
            continue;
        }
        let lead = order.leading(&nf).expect("nonzero").clone();
        let nf = nf.normalized_at(&lead);
        let mut rhs = nf.neg();
        rhs.remove(&lead);
        rw.rules.push(RewriteRule::new(lead, rhs)?);
        let k = rw.rules.len() - 1;
        push_pairs(&mut queue, &rw.rules, k);
    }
    let added = rw.rules.len() - n_initial;
    let rules = tidy(&rw)?;
    Ok(Completion { rules, added, pairs_processed: processed, pairs_skipped: skipped })
}

// Drop rules whose left side has a proper divisor among other left sides,
// then reduce every right side.
fn tidy<C: Coefficient>(rw: &Rewriter<C>) -> Result<Vec<RewriteRule<C>>> {
    let keep: Vec<RewriteRule<C>> = rw
        .rules
        .iter()
        .enumerate()
        .filter(|(i, r)| !rw.rules.iter().enumerate().any(|(j, s)| j != *i && s.lhs != r.lhs && divides(&s.lhs, &r.lhs)))
        .map(|(_, r)| r.clone())
        .collect();
    let base = Rewriter::new(rw.sig.clone(), keep.clone(), rw.certificate.clone())?;
    keep.into_iter().map(|r| RewriteRule::new(r.lhs, base.reduce(&r.rhs)?)).collect()
}

/// Whether the quadratic relations already form a Gröbner basis: every
/// S-polynomial reduces to zero by the interreduced relations alone.
pub fn is_quadratic_gb<C: Coefficient>(sig: &Signature, relations: &[Polynomial<C>], spec: &OrderSpec) -> Result<bool> {
    for p in relations {
        if p.iter().any(|(t, _)| t.vertex_count() != 2) {
            return Err(Error::NotQuadratic("rule left sides must have exactly two vertices".into()));
        }
    }
    let rules = interreduce(relations, &spec.resolve(sig)?)?;
    let rw = Rewriter::new(sig.clone(), rules, certificate(spec))?;
    for cp in critical_pairs(&rw.rules, sig.mode())? {
        if !rw.reduce(&cp.reductions.0.sub(&cp.reductions.1)?)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Monomials at arity `n` with at most `k` unary vertices avoiding every lhs.
pub fn normal_monomials<C: Coefficient>(sig: &Signature, rules: &[RewriteRule<C>], n: usize, k: usize) -> Vec<Tree> {
    enumerate_monomials(sig, n, k).into_par_iter().filter(|t| rules.iter().all(|r| !divides(&r.lhs, t))).collect()
}

/// Two-vertex pattern spanned by the edge from `t` to its child `i`.
fn edge_pattern(t: &Tree, i: usize) -> Tree {
    let Tree::Node(g, kids) = t else { unreachable!() };
    let collapse = |c: &Tree| Tree::leaf(c.min_leaf());
    let new_kids: Vec<Tree> = kids
        .iter()
        .enumerate()
        .map(|(j, c)| match c {
            Tree::Node(h, grand) if j == i => Tree::node(*h, grand.iter().map(collapse).collect()),
            _ => collapse(c),
        })
        .collect();
    Tree::node(*g, new_kids).standardize()
}

fn edges_all_in(t: &Tree, lead: &HashSet<Tree>) -> bool {
    let Tree::Node(_, kids) = t else { return true };
    kids.iter().enumerate().all(|(i, c)| c.is_leaf() || lead.contains(&edge_pattern(t, i))) && kids.iter().all(|c| edges_all_in(c, lead))
}

/// Number of monomials of arity `n` whose every two-vertex divisor is a
/// leading term. Requires a quadratic rule set.
pub fn count_dual_monomials<C: Coefficient>(sig: &Signature, rules: &[RewriteRule<C>], n: usize) -> Result<usize> {
    if rules.iter().any(|r| r.lhs.vertex_count() != 2) {
        return Err(Error::NotQuadratic("rule left sides must have exactly two vertices".into()));
    }
    let lead: HashSet<Tree> = rules.iter().map(|r| r.lhs.clone()).collect();
    let mut en = Enumerator::with_generators(sig.mode(), &[], &sig.binary());
    Ok(en.exact(n, 0).par_iter().filter(|t| edges_all_in(t, &lead)).count())
}

/// Dimensions indexed by arity and exact unary count.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DimTable {
    pub max_arity: usize,
    pub max_unary: usize,
    /// `rows[n - 1][k]`
    pub rows: Vec<Vec<u64>>,
}

impl DimTable {
    pub fn new(max_arity: usize, max_unary: usize) -> Self {
        DimTable { max_arity, max_unary, rows: vec![vec![0; max_unary + 1]; max_arity] }
    }

    pub fn get(&self, n: usize, k: usize) -> u64 {
        self.rows[n - 1][k]
    }

    pub fn set(&mut self, n: usize, k: usize, v: u64) {
        self.rows[n - 1][k] = v;
    }

    pub fn arity_total(&self, n: usize) -> u64 {
        self.rows[n - 1].iter().sum()
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().flatten().map(|v| v.to_string().len()).max().unwrap_or(1).max(3);
        let mut s = format!("{:>5}", "n\\k");
        for k in 0..=self.max_unary {
            let _ = write!(s, " {:>width$}", k);
        }
        s.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(s, "{:>5}", i + 1);
            for v in row {
                let _ = write!(s, " {:>width$}", v);
            }
            s.push('\n');
        }
        s
    }
}

/// Dimension table from counting normal monomials.
pub fn dims<C: Coefficient>(sig: &Signature, rules: &[RewriteRule<C>], max_arity: usize, max_unary: usize) -> DimTable {
    let mut t = DimTable::new(max_arity, max_unary);
    let mut en = Enumerator::new(sig);
    for n in 1..=max_arity {
        for k in 0..=max_unary {
            let count = en.exact(n, k).par_iter().filter(|m| rules.iter().all(|r| !divides(&r.lhs, m))).count();
            t.set(n, k, count as u64);
        }
    }
    t
}

/// Echelon form of the span of all consequences of `relations` inside the
/// space of monomials at arity `n` with at most `k` unary vertices.
pub struct IdealSlice<C> {
    pub basis: Vec<Tree>,
    index: HashMap<Tree, usize>,
    echelon: SparseEchelon<C>,
}

impl<C: Coefficient> IdealSlice<C> {
    pub fn new(sig: &Signature, relations: &[Polynomial<C>], n: usize, k: usize) -> Self {
        Self::with_basis(relations, enumerate_monomials(sig, n, k))
    }

    /// Slice over an explicit monomial basis; the column order follows it.
    pub fn with_basis(relations: &[Polynomial<C>], basis: Vec<Tree>) -> Self {
        let index: HashMap<Tree, usize> = basis.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let rows: Vec<SparseRow<C>> = relations
            .par_iter()
            .filter(|r| !r.is_zero())
            .flat_map_iter(|r| {
                // Every context applied to `r` is reached through one fixed term.
                let t0 = r.monomials().next().expect("nonzero").clone();
                let index = &index;
                basis.iter().flat_map(move |m| {
                    find_divisors(m, &t0)
                        .into_iter()
                        .filter_map(|occ| {
                            let c = substitute(m, &occ, r).ok()?;
                            let mut row: SparseRow<C> =
                                c.iter().map(|(u, d)| index.get(u).map(|&i| (i, d.clone()))).collect::<Option<_>>()?;
                            row.sort_by_key(|e| e.0);
                            Some(row)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let mut echelon = SparseEchelon::new();
        let mut seen = HashSet::new();
        for row in rows {
            if seen.insert(format!("{row:?}")) {
                echelon.insert(row);
            }
        }
        IdealSlice { basis, index, echelon }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len() - self.echelon.rank()
    }

    /// Whether `p` lies in the ideal (within this slice).
    pub fn contains(&self, p: &Polynomial<C>) -> bool {
        let Some(mut row) = p.iter().map(|(t, c)| self.index.get(t).map(|&i| (i, c.clone()))).collect::<Option<SparseRow<C>>>()
        else {
            return false;
        };
        row.sort_by_key(|e| e.0);
        self.echelon.contains(row)
    }
}

/// Dimension table from exact rank computations, independent of any
/// ordering or rewriting.
pub fn dims_by_rank<C: Coefficient>(sig: &Signature, relations: &[Polynomial<C>], max_arity: usize, max_unary: usize) -> DimTable {
    let mut t = DimTable::new(max_arity, max_unary);
    for n in 1..=max_arity {
        let mut prev = 0u64;
        for k in 0..=max_unary {
            let total = IdealSlice::new(sig, relations, n, k).dimension() as u64;
            t.set(n, k, total - prev);
            prev = total;
        }
    }
    t
}

/// Reduced Gröbner basis truncated at arity `max_arity`, computed by exact
/// linear algebra on each ideal slice instead of pair processing. Exact for
/// relations homogeneous in the number of unary vertices.
pub fn linear_gb<C: Coefficient>(
    sig: &Signature,
    relations: &[Polynomial<C>],
    spec: &OrderSpec,
    max_arity: usize,
    max_unary: usize,
) -> Result<Vec<RewriteRule<C>>> {
    let order = spec.resolve(sig)?;
    let mut rules: Vec<RewriteRule<C>> = Vec::new();
    for n in 1..=max_arity {
        let mut basis = enumerate_monomials(sig, n, max_unary);
        order.sort_desc(&mut basis);
        let slice = IdealSlice::with_basis(relations, basis);
        let fresh: Vec<RewriteRule<C>> = slice
            .echelon
            .reduced_rows()
            .into_iter()
            .filter(|row| !rules.iter().any(|r| divides(&r.lhs, &slice.basis[row[0].0])))
            .map(|row| {
                let lead = slice.basis[row[0].0].clone();
                let c = row[0].1.clone();
                let rhs = Polynomial::from_terms(n, row[1..].iter().map(|(i, d)| (-d.clone() / c.clone(), slice.basis[*i].clone())))?;
                RewriteRule::new(lead, rhs)
            })
            .collect::<Result<_>>()?;
        rules.extend(fresh);
    }
    Ok(rules)
}

/// Sort rules into a stable canonical order by left side.
pub fn sort_rules<C: Coefficient>(rules: &mut [RewriteRule<C>]) {
    rules.sort_by(|a, b| canonical_cmp(&a.lhs, &b.lhs));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::OrderSpec;
    use crate::poly::parse_polynomial;
    use crate::scalar::Rational;
    use crate::signature::Mode;

    fn assoc() -> (Signature, Vec<Polynomial>) {
        let s = Signature::with_generators(Mode::Nonsymmetric, &[("m", 2)]).unwrap();
        let r = parse_polynomial("(m 1 (m 2 3)) - (m (m 1 2) 3)", &s).unwrap();
        (s, vec![r])
    }

    #[test]
    fn associativity_is_already_complete() {
        let (s, rels) = assoc();
        let c = buchberger(&s, &rels, &OrderSpec::reverse_length(&["m"]), DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(c.added, 0);
        assert_eq!(c.rules.len(), 1);
        assert!(c.pairs_processed >= 1);
        assert!(is_quadratic_gb(&s, &rels, &OrderSpec::reverse_length(&["m"])).unwrap());
        let t = dims(&s, &c.rules, 5, 0);
        assert_eq!((1..=5).map(|n| t.get(n, 0)).collect::<Vec<_>>(), vec![1, 1, 1, 1, 1]);
        assert_eq!(dims_by_rank(&s, &rels, 5, 0), t);
    }

    #[test]
    fn free_operad_is_vacuously_a_gb() {
        let s = Signature::with_generators(Mode::Shuffle, &[("b", 2)]).unwrap();
        assert!(is_quadratic_gb::<Rational>(&s, &[], &OrderSpec::reverse_length(&["b"])).unwrap());
        assert_eq!(dims_by_rank::<Rational>(&s, &[], 4, 0).get(4, 0), 15);
    }

    #[test]
    fn nilpotent_product_completes() {
        // m(m(1,2),3) = 0 alone forces nothing new; adding
        // m(1,m(2,3)) = m(m(1,2),3) then kills all arity-3 monomials.
        let (s, mut rels) = assoc();
        rels.push(parse_polynomial("(m (m 1 2) 3)", &s).unwrap());
        let c = buchberger(&s, &rels, &OrderSpec::reverse_length(&["m"]), DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(dims(&s, &c.rules, 4, 0).get(4, 0), 0);
        assert_eq!(dims_by_rank(&s, &rels, 4, 0).get(4, 0), 0);
    }

    #[test]
    fn dual_count_rejects_cubic_rules() {
        let (s, _) = assoc();
        let r: RewriteRule = RewriteRule::new(
            crate::tree::make_monomial("(m 1 (m 2 (m 3 4)))", &s).unwrap(),
            parse_polynomial("(m (m (m 1 2) 3) 4)", &s).unwrap(),
        )
        .unwrap();
        assert!(count_dual_monomials(&s, &[r], 4).is_err());
    }

    #[test]
    fn ideal_membership() {
        let (s, rels) = assoc();
        let slice = IdealSlice::new(&s, &rels, 4, 0);
        let p: Polynomial = parse_polynomial("(m 1 (m 2 (m 3 4))) - (m (m (m 1 2) 3) 4)", &s).unwrap();
        assert!(slice.contains(&p));
        let q: Polynomial = parse_polynomial("(m 1 (m 2 (m 3 4)))", &s).unwrap();
        assert!(!slice.contains(&q));
    }

    #[test]
    fn table_text_is_aligned() {
        let mut t = DimTable::new(2, 1);
        t.set(2, 1, 1080);
        let text = t.to_text();
        assert!(text.lines().all(|l| l.len() == text.lines().next().unwrap().len()));
    }
}
