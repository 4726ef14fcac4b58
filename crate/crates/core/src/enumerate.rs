//! Exhaustive enumeration of tree monomials.

use std::collections::HashMap;

use itertools::Itertools;

use crate::poly::canonical_cmp;
use crate::signature::{GenId, Mode, Signature};
use crate::tree::Tree;

/// Enumerates monomials over a fixed generator set, memoizing by
/// (arity, unary count) on standard labels.
pub struct Enumerator {
    mode: Mode,
    unary: Vec<GenId>,
    binary: Vec<GenId>,
    memo: HashMap<(usize, usize), Vec<Tree>>,
}

impl Enumerator {
    pub fn new(sig: &Signature) -> Self {
        Self::with_generators(sig.mode(), &sig.unary(), &sig.binary())
    }

    pub fn with_generators(mode: Mode, unary: &[GenId], binary: &[GenId]) -> Self {
        Enumerator { mode, unary: unary.to_vec(), binary: binary.to_vec(), memo: HashMap::new() }
    }

    /// Monomials with leaves `1..=n` and exactly `k` unary vertices.
    pub fn exact(&mut self, n: usize, k: usize) -> Vec<Tree> {
        let mut v = self.raw(n, k).to_vec();
        v.sort_by(canonical_cmp);
        v
    }

    /// Monomials with leaves `1..=n` and at most `k` unary vertices.
    pub fn up_to(&mut self, n: usize, k: usize) -> Vec<Tree> {
        let mut v: Vec<Tree> = (0..=k).flat_map(|u| self.raw(n, u).to_vec()).collect();
        v.sort_by(canonical_cmp);
        v
    }

    pub fn count_exact(&mut self, n: usize, k: usize) -> usize {
        self.raw(n, k).len()
    }

    fn raw(&mut self, n: usize, k: usize) -> &[Tree] {
        if !self.memo.contains_key(&(n, k)) {
            let v = self.build(n, k);
            self.memo.insert((n, k), v);
        }
        &self.memo[&(n, k)]
    }

    fn build(&mut self, n: usize, k: usize) -> Vec<Tree> {
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        if n == 1 && k == 0 {
            out.push(Tree::leaf(1));
        }
        if k > 0 && !self.unary.is_empty() {
            let below = self.raw(n, k - 1).to_vec();
            for &g in &self.unary.clone() {
                out.extend(below.iter().map(|t| Tree::unary(g, t.clone())));
            }
        }
        if n >= 2 && !self.binary.is_empty() {
            let binary = self.binary.clone();
            for (left, right) in splits(n, self.mode) {
                for u in 0..=k {
                    let ls = self.raw(left.len(), u).to_vec();
                    if ls.is_empty() {
                        continue;
                    }
                    let rs = self.raw(right.len(), k - u).to_vec();
                    for a in &ls {
                        let a = a.relabel(&|l| left[l as usize - 1]);
                        for b in &rs {
                            let b = b.relabel(&|l| right[l as usize - 1]);
                            for &g in &binary {
                                out.push(Tree::binary(g, a.clone(), b.clone()));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Ways to split `1..=n` between the two children of a binary root.
fn splits(n: usize, mode: Mode) -> Vec<(Vec<u8>, Vec<u8>)> {
    let all: Vec<u8> = (1..=n as u8).collect();
    match mode {
        Mode::Nonsymmetric => (1..n).map(|i| (all[..i].to_vec(), all[i..].to_vec())).collect(),
        Mode::Shuffle => {
            let mut out = Vec::new();
            // Label 1 always goes left.
            for size in 0..n - 1 {
                for extra in all[1..].iter().copied().combinations(size) {
                    let mut left = vec![1u8];
                    left.extend(extra);
                    let right: Vec<u8> = all.iter().copied().filter(|l| !left.contains(l)).collect();
                    out.push((left, right));
                }
            }
            out
        }
    }
}

/// All monomials of `sig` with `n` leaves and at most `unary_cap` unary
/// vertices, deduplicated and in canonical order.
pub fn enumerate_monomials(sig: &Signature, n: usize, unary_cap: usize) -> Vec<Tree> {
    if n == 0 {
        return Vec::new();
    }
    Enumerator::new(sig).up_to(n, unary_cap)
}

/// A random monomial with `n` leaves and at most `unary_max` unary vertices.
pub fn random_monomial<R: rand::Rng>(sig: &Signature, n: usize, unary_max: usize, rng: &mut R) -> Option<Tree> {
    let labels: Vec<u8> = (1..=n as u8).collect();
    let mut budget = unary_max;
    random_subtree(sig, &labels, &mut budget, rng)
}

fn random_subtree<R: rand::Rng>(sig: &Signature, labels: &[u8], budget: &mut usize, rng: &mut R) -> Option<Tree> {
    let unary = sig.unary();
    let binary = sig.binary();
    if *budget > 0 && !unary.is_empty() && rng.gen_bool(0.3) {
        *budget -= 1;
        let g = unary[rng.gen_range(0..unary.len())];
        return Some(Tree::unary(g, random_subtree(sig, labels, budget, rng)?));
    }
    if labels.len() == 1 {
        return Some(Tree::leaf(labels[0]));
    }
    if binary.is_empty() {
        return None;
    }
    let g = binary[rng.gen_range(0..binary.len())];
    let (left, right): (Vec<u8>, Vec<u8>) = match sig.mode() {
        Mode::Nonsymmetric => {
            let cut = rng.gen_range(1..labels.len());
            (labels[..cut].to_vec(), labels[cut..].to_vec())
        }
        Mode::Shuffle => loop {
            let mut left = vec![labels[0]];
            let mut right = Vec::new();
            for &l in &labels[1..] {
                if rng.gen_bool(0.5) {
                    left.push(l);
                } else {
                    right.push(l);
                }
            }
            if !right.is_empty() {
                break (left, right);
            }
        },
    };
    let a = random_subtree(sig, &left, budget, rng)?;
    let b = random_subtree(sig, &right, budget, rng)?;
    Some(Tree::binary(g, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(mode: Mode, gens: &[(&str, u8)]) -> Signature {
        Signature::with_generators(mode, gens).unwrap()
    }

    #[test]
    fn catalan_shapes_nonsymmetric() {
        let s = sig(Mode::Nonsymmetric, &[("b", 2)]);
        let counts: Vec<usize> = (1..=5).map(|n| enumerate_monomials(&s, n, 0).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14]);
    }

    #[test]
    fn shuffle_counts_single_generator() {
        // (2n-3)!!: 1, 1, 3, 15, 105
        let s = sig(Mode::Shuffle, &[("b", 2)]);
        let counts: Vec<usize> = (1..=5).map(|n| enumerate_monomials(&s, n, 0).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 15, 105]);
    }

    #[test]
    fn shuffle_pair_of_generators_arity_three() {
        // One binary operation without symmetry is the pair {b, bbar} in the
        // shuffle world: 3 shapes with 2^2 labellings each.
        let s = sig(Mode::Shuffle, &[("b", 2), ("bbar", 2)]);
        assert_eq!(enumerate_monomials(&s, 3, 0).len(), 12);
    }

    #[test]
    fn three_generators_nonsymmetric_arity_three() {
        let s = sig(Mode::Nonsymmetric, &[("mul", 2), ("succ", 2), ("prec", 2)]);
        assert_eq!(enumerate_monomials(&s, 3, 0).len(), 18);
    }

    #[test]
    fn unary_stacks() {
        let s = sig(Mode::Nonsymmetric, &[("b", 2), ("R", 1)]);
        // R^k(1) for k = 0..=3
        assert_eq!(enumerate_monomials(&s, 1, 3).len(), 4);
        // arity 2, exactly one R: R(b), b(R,.), b(.,R)
        assert_eq!(Enumerator::new(&s).count_exact(2, 1), 3);
        let all = enumerate_monomials(&s, 3, 2);
        assert!(all.iter().all(|t| t.unary_count() <= 2 && t.arity() == 3));
        let mut d = all.clone();
        d.dedup();
        assert_eq!(d.len(), all.len());
    }

    #[test]
    fn all_enumerated_are_valid() {
        let s = sig(Mode::Shuffle, &[("b", 2), ("c", 2), ("R", 1)]);
        for t in enumerate_monomials(&s, 4, 1) {
            t.validate(&s).unwrap();
        }
    }

    #[test]
    fn empty_when_no_generators_fit() {
        let s = sig(Mode::Shuffle, &[("R", 1)]);
        assert!(enumerate_monomials(&s, 3, 2).is_empty());
        assert!(enumerate_monomials(&s, 0, 2).is_empty());
    }
}
