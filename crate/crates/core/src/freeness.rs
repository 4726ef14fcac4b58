//! Right-module freeness of `Q` over a suboperad `P` and the PBW check.
//!
//! The verdict is semantic. On every slice `(n, <=k)` the indecomposables
//! `X = Q / (Q o P+)` are computed from normal forms, and the action map
//! `X o P -> Q` is required to be injective with rank `|N_Q|`. Per-cell
//! numbers are differences of the cumulative ones.
//!
//! The older monomial criterion (upper parts grafted with maximal `P`-pure
//! subtrees reproduce `N_Q` exactly) is still computed and reported as a
//! [`SplittingReport`]; it is sufficient but not necessary, since the
//! leading terms of `P`'s relations can straddle the cut.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{translate, verify_morphism, MorphismWitness, Membership, OperadMorphism};
use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::groebner::DimTable;
use crate::divisor::divides;
use crate::linalg::{SparseEchelon, SparseRow};
use crate::poly::Polynomial;
use crate::rewriting::{check_confluence, Caps, ConfluenceReport, RewriteRule, Rewriter};
use crate::scalar::Coefficient;
use crate::signature::{GenId, Mode, Signature};
use crate::tree::{graft, graft_assignments, Tree};

pub const MAX_WITNESSES: usize = 20;

/// A maximal `P`-pure subtree cut off by [`fringe_factor`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Part {
    /// Leaf of the upper part it hangs from.
    pub position: u8,
    /// Standardized monomial.
    pub monomial: Tree,
    /// The leaf labels it occupies in the original monomial, increasing.
    pub labels: Vec<u8>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Factorization {
    pub upper: Tree,
    /// Nontrivial parts only; other leaves of `upper` carry the identity.
    pub parts: Vec<Part>,
}

impl Factorization {
    /// Graft the parts back into the upper part.
    pub fn reassemble(&self) -> Tree {
        let mut subs: Vec<Option<Tree>> = vec![None; self.upper.arity()];
        for p in &self.parts {
            subs[p.position as usize - 1] = Some(p.monomial.relabel(&|l| p.labels[l as usize - 1]));
        }
        // Leaves of the upper part without a part keep their original label,
        // which is the one label left over in order.
        let used: BTreeSet<u8> = self.parts.iter().flat_map(|p| p.labels.iter().copied()).collect();
        let n = self.upper.arity() + self.parts.iter().map(|p| p.labels.len() - 1).sum::<usize>();
        let mut free = (1..=n as u8).filter(|l| !used.contains(l));
        let subs: Vec<Tree> = subs.into_iter().map(|s| s.unwrap_or_else(|| Tree::leaf(free.next().expect("label")))).collect();
        self.upper.substitute_leaves(&subs)
    }
}

fn is_pure(t: &Tree, p_gens: &[GenId]) -> bool {
    match t {
        Tree::Leaf(_) => false,
        Tree::Node(g, kids) => p_gens.contains(g) && kids.iter().all(|k| k.is_leaf() || is_pure(k, p_gens)),
    }
}

/// Split off the maximal `P`-pure subtrees of `m`.
pub fn fringe_factor(m: &Tree, p_gens: &[GenId]) -> Factorization {
    fn walk(t: &Tree, p_gens: &[GenId], parts: &mut Vec<Tree>) -> Tree {
        match t {
            Tree::Leaf(l) => Tree::Leaf(*l),
            _ if is_pure(t, p_gens) => {
                parts.push(t.clone());
                Tree::Leaf(t.min_leaf())
            }
            Tree::Node(g, kids) => Tree::node(*g, kids.iter().map(|k| walk(k, p_gens, parts)).collect()),
        }
    }
    let mut cut = Vec::new();
    let collapsed = walk(m, p_gens, &mut cut);
    let mut mins = collapsed.leaves();
    mins.sort_unstable();
    let rank = |l: u8| mins.binary_search(&l).expect("leaf") as u8 + 1;
    let upper = collapsed.relabel(&rank);
    let mut parts: Vec<Part> = cut
        .into_iter()
        .map(|t| {
            let mut labels = t.leaves();
            labels.sort_unstable();
            Part { position: rank(t.min_leaf()), monomial: t.standardize(), labels }
        })
        .collect();
    parts.sort_by_key(|p| p.position);
    Factorization { upper, parts }
}

/// Ways to distribute `1..=n` over blocks of the given sizes so that a
/// composition stays a valid monomial: blocks with increasing minima in
/// shuffle mode, consecutive intervals in nonsymmetric mode.
pub fn block_labellings(sizes: &[usize], mode: Mode) -> Vec<Vec<Vec<u8>>> {
    let n: usize = sizes.iter().sum();
    if mode == Mode::Nonsymmetric {
        let mut start = 1u8;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let b: Vec<u8> = (start..start + s as u8).collect();
                start += s as u8;
                b
            })
            .collect();
        return vec![blocks];
    }
    fn rec(rest: &[u8], sizes: &[usize], acc: &mut Vec<Vec<u8>>, out: &mut Vec<Vec<Vec<u8>>>) {
        let Some((&s, more)) = sizes.split_first() else {
            out.push(acc.clone());
            return;
        };
        let (first, others) = rest.split_first().expect("enough labels");
        for chosen in itertools::Itertools::combinations(0..others.len(), s - 1) {
            let mut block = vec![*first];
            block.extend(chosen.iter().map(|&i| others[i]));
            let left: Vec<u8> = others.iter().enumerate().filter(|(i, _)| !chosen.contains(i)).map(|(_, &l)| l).collect();
            acc.push(block);
            rec(&left, more, acc, out);
            acc.pop();
        }
    }
    let labels: Vec<u8> = (1..=n as u8).collect();
    let mut out = Vec::new();
    rec(&labels, sizes, &mut Vec::new(), &mut out);
    out
}

/// Number of [`block_labellings`] without listing them.
pub fn count_labellings(sizes: &[usize], mode: Mode) -> u64 {
    if mode == Mode::Nonsymmetric {
        return 1;
    }
    let mut remaining: u64 = sizes.iter().sum::<usize>() as u64;
    let mut total = 1u64;
    for &s in sizes {
        total *= binomial(remaining - 1, s as u64 - 1);
        remaining -= s as u64;
    }
    total
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    FreeAtCaps,
    Violated,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// A normal monomial of `Q` has a part that is not normal in `P`.
    PartNotNormal,
    /// Grafting normal `P` monomials into an upper part leaves `N_Q`.
    GraftNotNormal,
    /// Normal count of `Q` differs from the composition count.
    CountMismatch,
    /// `Q`'s normal monomials in `P`'s generators differ from `N_P`.
    Restriction,
    /// The action map from the free module is not injective.
    NotInjective,
    /// The action map from the free module is not surjective.
    NotSurjective,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub monomial: String,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CountCell {
    pub arity: usize,
    pub unary: usize,
    pub normal: u64,
    pub composed: u64,
}

/// One (arity, unary) cell of the free-module comparison. `composed` is
/// the dimension of the free module on the indecomposables, `image_rank`
/// the rank of its image in `Q`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ModuleCell {
    pub arity: usize,
    pub unary: usize,
    pub normal: u64,
    pub indecomposable: u64,
    pub composed: u64,
    pub image_rank: u64,
}

/// A graft from the free module whose normal form depends on earlier ones.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct KernelWitness {
    pub graft: String,
    pub normal_form: String,
    /// An earlier graft with the same normal form, when there is one.
    pub same_as: Option<String>,
}

/// The monomial splitting of `N_Q` along the fringe. Diagnostic only:
/// it certifies freeness when clean, but rules of `P` whose left sides
/// straddle an upper part make it fail on free modules too.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SplittingReport {
    /// Dimensions of the upper-part set.
    pub upper_parts: DimTable,
    pub composition: Vec<CountCell>,
    pub restriction_consistent: bool,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
}

impl SplittingReport {
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FreenessReport {
    pub caps: Caps,
    pub p_generators: Vec<String>,
    pub verdict: Verdict,
    pub confluence: ConfluenceReport,
    pub normal_q: DimTable,
    pub normal_p: DimTable,
    /// Dimensions of `Q / (Q o P+)` by exact unary count.
    pub indecomposables: DimTable,
    pub module: Vec<ModuleCell>,
    pub kernel_witness: Option<KernelWitness>,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    pub splitting: SplittingReport,
}

impl FreenessReport {
    pub fn is_free(&self) -> bool {
        self.verdict == Verdict::FreeAtCaps
    }
}

/// Normal monomials per (arity, exact unary count) within caps.
fn normal_by_cell<C: Coefficient>(sig: &Signature, rules: &[RewriteRule<C>], caps: Caps) -> BTreeMap<(usize, usize), Vec<Tree>> {
    let mut en = Enumerator::new(sig);
    let mut out = BTreeMap::new();
    for n in 1..=caps.arity {
        for k in 0..=caps.unary {
            let v: Vec<Tree> = en.exact(n, k).into_par_iter().filter(|m| rules.iter().all(|r| !divides(&r.lhs, m))).collect();
            out.insert((n, k), v);
        }
    }
    out
}

fn table(cells: &BTreeMap<(usize, usize), Vec<Tree>>, caps: Caps) -> DimTable {
    let mut t = DimTable::new(caps.arity, caps.unary);
    for (&(n, k), v) in cells {
        t.set(n, k, v.len() as u64);
    }
    t
}

/// Rename the generators of `t` through `map`.
fn map_tree(t: &Tree, map: &[GenId]) -> Tree {
    match t {
        Tree::Leaf(l) => Tree::Leaf(*l),
        Tree::Node(g, kids) => Tree::node(map[g.0 as usize], kids.iter().map(|k| map_tree(k, map)).collect()),
    }
}

/// All (arity, unary) splittings of a budget over `r` slots.
fn distributions(r: usize, n: usize, k: usize) -> Vec<Vec<(usize, usize)>> {
    if r == 0 {
        return if n == 0 && k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for a in 1..=n.saturating_sub(r - 1) {
        for u in 0..=k {
            for mut rest in distributions(r - 1, n - a, k - u) {
                rest.insert(0, (a, u));
                out.push(rest);
            }
        }
    }
    out
}

type Cells = BTreeMap<(usize, usize), Vec<Tree>>;

/// The monomial splitting: factor `N_Q`, graft `N_P` back and
/// compare counts.
fn monomial_splitting(sig: &Signature, nq: &Cells, np: &Cells, gen_image: &[GenId], caps: Caps) -> SplittingReport {
    let mode = sig.mode();
    let np_set: HashSet<&Tree> = np.values().flatten().collect();
    let nq_set: HashSet<&Tree> = nq.values().flatten().collect();
    let mut violations = Vec::new();

    let mut uppers: BTreeMap<(usize, usize), BTreeSet<Tree>> = BTreeMap::new();
    for m in nq.values().flatten() {
        let f = fringe_factor(m, gen_image);
        for p in &f.parts {
            if !np_set.contains(&p.monomial) {
                violations.push(Violation {
                    kind: ViolationKind::PartNotNormal,
                    monomial: m.to_sexpr(sig),
                    detail: format!("part {} is not normal in P", p.monomial.to_sexpr(sig)),
                });
            }
        }
        uppers.entry((f.upper.arity(), f.upper.unary_count())).or_default().insert(f.upper);
    }

    let grafts: Vec<(&Tree, Vec<(usize, usize)>)> = uppers
        .values()
        .flatten()
        .flat_map(|u| {
            let r = u.arity();
            let ku = u.unary_count();
            (r..=caps.arity)
                .flat_map(move |n| (ku..=caps.unary).flat_map(move |k| distributions(r, n, k - ku)))
                .map(move |d| (u, d))
        })
        .collect();
    let graft_failures: Vec<Violation> = grafts
        .par_iter()
        .flat_map_iter(|(u, dist)| {
            let mut bad = Vec::new();
            let sizes: Vec<usize> = dist.iter().map(|c| c.0).collect();
            let choices: Vec<&Vec<Tree>> = dist.iter().map(|c| &np[c]).collect();
            if choices.iter().any(|c| c.is_empty()) {
                return bad;
            }
            let labellings = block_labellings(&sizes, mode);
            for tuple in itertools::Itertools::multi_cartesian_product(choices.iter().map(|c| c.iter())) {
                for blocks in &labellings {
                    let subs: Vec<Tree> =
                        tuple.iter().zip(blocks).map(|(t, b)| t.relabel(&|l| b[l as usize - 1])).collect();
                    let g = u.substitute_leaves(&subs);
                    if !nq_set.contains(&g) && bad.len() < MAX_WITNESSES {
                        bad.push(Violation {
                            kind: ViolationKind::GraftNotNormal,
                            monomial: g.to_sexpr(sig),
                            detail: format!("graft into upper part {} is not normal in Q", u.to_sexpr(sig)),
                        });
                    }
                }
            }
            bad
        })
        .collect();
    violations.extend(graft_failures);

    let np_count = |a: usize, b: usize| np.get(&(a, b)).map(|v| v.len() as u64).unwrap_or(0);
    let mut composition = Vec::new();
    for (&(n, k), v) in nq {
        let mut composed = 0u64;
        for (&(r, ku), us) in &uppers {
            if r > n || ku > k {
                continue;
            }
            for dist in distributions(r, n, k - ku) {
                let sizes: Vec<usize> = dist.iter().map(|c| c.0).collect();
                let fill: u64 = dist.iter().map(|&(a, b)| np_count(a, b)).product();
                composed += us.len() as u64 * fill * count_labellings(&sizes, mode);
            }
        }
        if composed != v.len() as u64 {
            violations.push(Violation {
                kind: ViolationKind::CountMismatch,
                monomial: String::new(),
                detail: format!("arity {n}, unary {k}: {} normal monomials, composition gives {composed}", v.len()),
            });
        }
        composition.push(CountCell { arity: n, unary: k, normal: v.len() as u64, composed });
    }

    let restricted: BTreeSet<&Tree> = nq
        .values()
        .flatten()
        .filter(|m| {
            let mut g = Vec::new();
            m.generators_used(&mut g);
            !m.is_leaf() && g.iter().all(|x| gen_image.contains(x))
        })
        .collect();
    let expected: BTreeSet<&Tree> = np.values().flatten().filter(|m| !m.is_leaf()).collect();
    let restriction_consistent = restricted == expected;
    if !restriction_consistent {
        let odd = restricted.symmetric_difference(&expected).next().expect("differ");
        violations.push(Violation {
            kind: ViolationKind::Restriction,
            monomial: odd.to_sexpr(sig),
            detail: "normal in exactly one of Q and P".into(),
        });
    }

    let mut upper_parts = DimTable::new(caps.arity, caps.unary);
    for (&(r, ku), us) in &uppers {
        upper_parts.set(r, ku, us.len() as u64);
    }
    let violation_count = violations.len();
    violations.truncate(MAX_WITNESSES);
    SplittingReport { upper_parts, composition, restriction_consistent, violation_count, violations }
}

/// Normal forms in `Q` as rows over a fixed column indexing.
struct NormalForms<'a, C> {
    q: &'a Rewriter<C>,
    columns: HashMap<Tree, usize>,
    cache: HashMap<Tree, SparseRow<C>>,
}

impl<C: Coefficient> NormalForms<'_, C> {
    fn row(&mut self, t: &Tree) -> Result<SparseRow<C>> {
        if let Some(r) = self.cache.get(t) {
            return Ok(r.clone());
        }
        let nf = self.q.reduce_monomial(t)?;
        let mut row: SparseRow<C> = Vec::with_capacity(nf.len());
        for (m, c) in nf.iter() {
            let col = *self.columns.get(m).ok_or_else(|| {
                Error::Mismatch(format!("normal form {} escapes the caps", m.to_sexpr(&self.q.sig)))
            })?;
            row.push((col, c.clone()));
        }
        row.sort_by_key(|e| e.0);
        self.cache.insert(t.clone(), row.clone());
        Ok(row)
    }

    fn sexpr(&self, row: &SparseRow<C>, index: &[Tree]) -> String {
        let mut p = Polynomial::zero(index.get(row.first().map(|e| e.0).unwrap_or(0)).map(|t| t.arity()).unwrap_or(1));
        for (col, c) in row {
            p.add_term(c.clone(), index[*col].clone());
        }
        p.to_sexpr(&self.q.sig)
    }
}

/// Every graft of a `P`-monomial into one leaf of `m`.
fn single_grafts(m: &Tree, p: &Tree, mode: Mode) -> Vec<Tree> {
    let r = m.arity();
    let a = p.arity();
    (1..=r)
        .flat_map(|i| graft_assignments(r, i, a, mode).into_iter().map(move |labels| (i, labels)))
        .map(|(i, labels)| graft(m, i, p, &labels, mode).expect("admissible graft"))
        .collect()
}

/// Right-module freeness at caps, decided by exact linear algebra. The
/// indecomposables `X = Q / (Q o P+)` are computed per cumulative slice
/// (arity `n`, at most `k` unary vertices), represented by normal
/// monomials off the pivots of the decomposables, and the action map
/// `X o P -> Q` is checked to be bijective on every slice.
#[allow(clippy::too_many_arguments)]
fn module_check<C: Coefficient>(
    q: &Rewriter<C>,
    nq: &Cells,
    np: &Cells,
    caps: Caps,
    indecomposables: &mut DimTable,
    cells: &mut Vec<ModuleCell>,
    violations: &mut Vec<Violation>,
    witness: &mut Option<KernelWitness>,
) -> Result<()> {
    let mode = q.sig.mode();
    // Columns per arity: higher unary counts first, so that pivots of the
    // decomposables prefer them and representatives stay low.
    let mut index: BTreeMap<usize, Vec<Tree>> = BTreeMap::new();
    for n in 1..=caps.arity {
        let mut v = Vec::new();
        for k in (0..=caps.unary).rev() {
            v.extend(nq[&(n, k)].iter().cloned());
        }
        index.insert(n, v);
    }
    let mut forms: BTreeMap<usize, NormalForms<C>> = index
        .iter()
        .map(|(&n, v)| {
            let columns = v.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
            (n, NormalForms { q, columns, cache: HashMap::new() })
        })
        .collect();
    let nontrivial_p: Vec<&Tree> =
        np.iter().filter(|(&(a, b), _)| a >= 2 || b >= 1).flat_map(|(_, v)| v.iter()).collect();

    // (domain, rank, indecomposables) per cumulative slice.
    let mut cumulative: BTreeMap<(usize, usize), (u64, u64, u64)> = BTreeMap::new();
    for k in 0..=caps.unary {
        let mut reps: BTreeMap<usize, Vec<Tree>> = BTreeMap::new();
        for n in 1..=caps.arity {
            let slice: Vec<Tree> = (0..=k).flat_map(|j| nq[&(n, j)].iter().cloned()).collect();
            let f = forms.get_mut(&n).expect("arity");
            // Decomposables.
            let mut dec = SparseEchelon::new();
            for r in 1..=n {
                for m in (0..=k).flat_map(|j| nq[&(r, j)].iter()) {
                    for p in &nontrivial_p {
                        if r + p.arity() - 1 != n || m.unary_count() + p.unary_count() > k {
                            continue;
                        }
                        for g in single_grafts(m, p, mode) {
                            dec.insert(f.row(&g)?);
                        }
                    }
                }
            }
            let pivots: HashSet<usize> = dec.pivot_columns().copied().collect();
            let x: Vec<Tree> =
                slice.iter().filter(|t| !pivots.contains(&f.columns[*t])).cloned().collect();
            reps.insert(n, x);

            // The action map on this slice.
            let mut image = SparseEchelon::new();
            let mut seen: HashMap<SparseRow<C>, Tree> = HashMap::new();
            let mut domain = 0u64;
            let mut dependent: Option<(Tree, SparseRow<C>)> = None;
            for r in 1..=n {
                for x in &reps[&r] {
                    let kx = x.unary_count();
                    for kk in 0..=k - kx {
                        for dist in distributions(r, n, kk) {
                            let choices: Vec<&Vec<Tree>> = dist.iter().map(|c| &np[c]).collect();
                            if choices.iter().any(|c| c.is_empty()) {
                                continue;
                            }
                            let sizes: Vec<usize> = dist.iter().map(|c| c.0).collect();
                            let labellings = block_labellings(&sizes, mode);
                            for tuple in itertools::Itertools::multi_cartesian_product(choices.iter().map(|c| c.iter())) {
                                for blocks in &labellings {
                                    let subs: Vec<Tree> = tuple
                                        .iter()
                                        .zip(blocks)
                                        .map(|(t, b)| t.relabel(&|l| b[l as usize - 1]))
                                        .collect();
                                    let g = x.substitute_leaves(&subs).canonicalize();
                                    let row = f.row(&g)?;
                                    domain += 1;
                                    if !image.insert(row.clone()) && dependent.is_none() {
                                        dependent = Some((g.clone(), row.clone()));
                                    }
                                    seen.entry(row).or_insert(g);
                                }
                            }
                        }
                    }
                }
            }
            let rank = image.rank() as u64;
            let normal = slice.len() as u64;
            if let Some((g, row)) = dependent {
                let same = seen.get(&row).filter(|t| **t != g).map(|t| t.to_sexpr(&q.sig));
                let nf = f.sexpr(&row, &index[&n]);
                violations.push(Violation {
                    kind: ViolationKind::NotInjective,
                    monomial: g.to_sexpr(&q.sig),
                    detail: format!("arity {n}, unary at most {k}: graft reduces to {nf}, dependent on earlier grafts"),
                });
                if witness.is_none() {
                    *witness = Some(KernelWitness { graft: g.to_sexpr(&q.sig), normal_form: nf, same_as: same });
                }
            }
            if rank < normal {
                violations.push(Violation {
                    kind: ViolationKind::NotSurjective,
                    monomial: String::new(),
                    detail: format!("arity {n}, unary at most {k}: image rank {rank} below {normal}"),
                });
            }
            cumulative.insert((n, k), (domain, rank, reps[&n].len() as u64));
        }
    }
    for (&(n, k), &(domain, rank, x)) in &cumulative {
        let prev = if k == 0 { (0, 0, 0) } else { cumulative[&(n, k - 1)] };
        indecomposables.set(n, k, x - prev.2);
        cells.push(ModuleCell {
            arity: n,
            unary: k,
            normal: nq[&(n, k)].len() as u64,
            indecomposable: x - prev.2,
            composed: domain - prev.0,
            image_rank: rank - prev.1,
        });
    }
    Ok(())
}

/// Check that `Q` (given by a rewriting system) is free as a right module
/// over the suboperad generated by `gen_image`, at caps. `p_rules` live
/// over `p_sig`; `gen_image[i]` is the generator of `Q` that `P`'s
/// generator `i` names.
pub fn check_right_module_freeness<C: Coefficient>(
    q: &Rewriter<C>,
    p_sig: &Signature,
    p_rules: &[RewriteRule<C>],
    gen_image: &[GenId],
    caps: Caps,
) -> Result<FreenessReport> {
    if gen_image.len() != p_sig.len() {
        return Err(Error::Config("one image per generator of P is required".into()));
    }
    if p_sig.mode() != q.sig.mode() {
        return Err(Error::Mismatch("P and Q live in different worlds".into()));
    }
    let confluence = check_confluence(q, caps)?;
    if !confluence.is_confluent() {
        let f = &confluence.failures[0];
        return Err(Error::NotConfluent(format!("critical pair at {} does not join", f.overlap)));
    }
    let nq = normal_by_cell(&q.sig, &q.rules, caps);
    let np_raw = normal_by_cell(p_sig, p_rules, caps);
    let np: Cells = np_raw.iter().map(|(&c, v)| (c, v.iter().map(|t| map_tree(t, gen_image)).collect())).collect();
    let splitting = monomial_splitting(&q.sig, &nq, &np, gen_image, caps);

    let mut indecomposables = DimTable::new(caps.arity, caps.unary);
    let mut module = Vec::new();
    let mut violations = Vec::new();
    let mut kernel_witness = None;
    module_check(q, &nq, &np, caps, &mut indecomposables, &mut module, &mut violations, &mut kernel_witness)?;
    let violation_count = violations.len();
    violations.truncate(MAX_WITNESSES);
    Ok(FreenessReport {
        caps,
        p_generators: gen_image.iter().map(|g| q.sig.name(*g).to_string()).collect(),
        verdict: if violation_count == 0 { Verdict::FreeAtCaps } else { Verdict::Violated },
        confluence,
        normal_q: table(&nq, caps),
        normal_p: table(&np, caps),
        indecomposables,
        module,
        kernel_witness,
        violation_count,
        violations,
        splitting,
    })
}

/// Outcome of [`pbw_check`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PbwOutcome {
    Checked { freeness: FreenessReport },
    MorphismFailed { witness: MorphismWitness },
}

impl PbwOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, PbwOutcome::Checked { freeness } if freeness.is_free())
    }
}

/// The PBW criterion for a morphism `f: P -> Q`: `f` is well defined, the
/// images of `P`'s generators name generators of `Q`'s rewriting system,
/// and `Q` is free as a right module over them at caps. `p_relations` and
/// `p_rules` (a Gröbner basis of `P`) live over `f.source`.
pub fn pbw_check<C: Coefficient>(
    f: &OperadMorphism<C>,
    p_relations: &[Polynomial<C>],
    p_rules: &[RewriteRule<C>],
    q_system: &Rewriter<C>,
    caps: Caps,
) -> Result<PbwOutcome> {
    let membership = Membership::Rewriting(q_system.clone());
    if let Some(witness) = verify_morphism(f, p_relations, &membership)? {
        return Ok(PbwOutcome::MorphismFailed { witness });
    }
    let gen_image = f.generator_map(|p| q_system.reduce(&translate(p, &f.target, &q_system.sig)?))?;
    let freeness = check_right_module_freeness(q_system, &f.source, p_rules, &gen_image, caps)?;
    Ok(PbwOutcome::Checked { freeness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::make_monomial;

    fn sig() -> Signature {
        Signature::with_generators(Mode::Nonsymmetric, &[("mul", 2), ("succ", 2), ("prec", 2), ("R", 1)]).unwrap()
    }

    fn p_gens(s: &Signature) -> Vec<GenId> {
        ["mul", "succ", "prec"].iter().map(|n| s.require(n).unwrap()).collect()
    }

    #[test]
    fn fully_pure_monomial_is_one_part() {
        let s = sig();
        let m = make_monomial("(prec 1 (prec 2 3))", &s).unwrap();
        let f = fringe_factor(&m, &p_gens(&s));
        assert_eq!(f.upper, Tree::leaf(1));
        assert_eq!(f.parts.len(), 1);
        assert_eq!(f.parts[0].monomial, m);
    }

    #[test]
    fn impure_child_blocks_the_parent() {
        let s = sig();
        let m = make_monomial("(prec 1 (R 2))", &s).unwrap();
        let f = fringe_factor(&m, &p_gens(&s));
        assert_eq!(f.upper, m);
        assert!(f.parts.is_empty());
        let r = make_monomial("(R 1)", &s).unwrap();
        assert_eq!(fringe_factor(&r, &p_gens(&s)).upper, r);
    }

    #[test]
    fn parts_under_an_unary_vertex() {
        let s = sig();
        let m = make_monomial("(mul (R (succ 1 2)) (prec 3 4))", &s).unwrap();
        let f = fringe_factor(&m, &p_gens(&s));
        assert_eq!(f.upper.to_sexpr(&s), "(mul (R 1) 2)");
        assert_eq!(f.parts.len(), 2);
        assert_eq!(f.reassemble(), m);
    }

    #[test]
    fn shuffle_labellings_have_increasing_minima() {
        let ls = block_labellings(&[2, 1, 1], Mode::Shuffle);
        assert_eq!(ls.len() as u64, count_labellings(&[2, 1, 1], Mode::Shuffle));
        assert_eq!(ls.len(), 3);
        for l in &ls {
            assert!(l.windows(2).all(|w| w[0][0] < w[1][0]));
        }
        assert_eq!(count_labellings(&[2, 2], Mode::Shuffle), 3);
        assert_eq!(block_labellings(&[2, 2], Mode::Nonsymmetric), vec![vec![vec![1, 2], vec![3, 4]]]);
    }
}
