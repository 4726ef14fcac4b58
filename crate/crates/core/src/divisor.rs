//! Divisors (embedded sub-patterns) of tree monomials and substitution.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::Coefficient;
use crate::tree::{Path, Tree};

/// An embedding of a pattern into a host monomial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Occurrence {
    pub host: Tree,
    /// Path of the vertex where the pattern's root sits.
    pub root: Path,
    /// Embedded internal vertices, in preorder of the pattern.
    pub vertices: Vec<Path>,
    /// `dangling[i]` is the host subtree glued to pattern leaf `i + 1`.
    pub dangling: Vec<Path>,
}

impl Occurrence {
    /// Sorted vertex set, for comparing occurrences of different patterns.
    pub fn vertex_set(&self) -> Vec<Path> {
        let mut v = self.vertices.clone();
        v.sort();
        v
    }

    pub fn arity(&self) -> usize {
        self.dangling.len()
    }

    pub fn dangling_subtrees(&self) -> Vec<Tree> {
        self.dangling.iter().map(|p| self.host.at(p).expect("valid path").clone()).collect()
    }
}

fn match_at(
    pattern: &Tree,
    host: &Tree,
    path: &mut Path,
    vertices: &mut Vec<Path>,
    dangling: &mut [Option<Path>],
) -> bool {
    match (pattern, host) {
        (Tree::Leaf(l), _) => {
            dangling[*l as usize - 1] = Some(path.clone());
            true
        }
        (Tree::Node(g, pc), Tree::Node(h, hc)) if g == h && pc.len() == hc.len() => {
            vertices.push(path.clone());
            for (i, (p, c)) in pc.iter().zip(hc.iter()).enumerate() {
                path.push(i as u8);
                let ok = match_at(p, c, path, vertices, dangling);
                path.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        _ => false,
    }
}

/// Try to embed `pattern` with its root at `root` in `host`.
pub fn occurrence_at(host: &Tree, pattern: &Tree, root: &[u8]) -> Option<Occurrence> {
    if pattern.is_leaf() {
        return None;
    }
    let sub = host.at(root)?;
    let mut path = root.to_vec();
    let mut vertices = Vec::new();
    let mut dangling = vec![None; pattern.arity()];
    if !match_at(pattern, sub, &mut path, &mut vertices, &mut dangling) {
        return None;
    }
    let dangling: Vec<Path> = dangling.into_iter().collect::<Option<Vec<_>>>()?;
    // Pattern leaf labels must rank the dangling subtrees by their minimal leaves.
    let mins: Vec<u8> = dangling.iter().map(|p| host.at(p).expect("path").min_leaf()).collect();
    if mins.windows(2).any(|w| w[0] >= w[1]) {
        return None;
    }
    Some(Occurrence { host: host.clone(), root: root.to_vec(), vertices, dangling })
}

/// Every embedding of `pattern` in `host`, in preorder of the root vertex.
pub fn find_divisors(host: &Tree, pattern: &Tree) -> Vec<Occurrence> {
    if pattern.arity() > host.arity() || pattern.vertex_count() > host.vertex_count() {
        return Vec::new();
    }
    host.vertex_paths().iter().filter_map(|p| occurrence_at(host, pattern, p)).collect()
}

/// First embedding of `pattern` in `host`, if any.
pub fn first_divisor(host: &Tree, pattern: &Tree) -> Option<Occurrence> {
    if pattern.arity() > host.arity() || pattern.vertex_count() > host.vertex_count() {
        return None;
    }
    host.vertex_paths().iter().find_map(|p| occurrence_at(host, pattern, p))
}

pub fn divides(pattern: &Tree, host: &Tree) -> bool {
    first_divisor(host, pattern).is_some()
}

/// Replace the embedded pattern by `replacement`, extended linearly.
pub fn substitute<C: Coefficient>(host: &Tree, occ: &Occurrence, replacement: &Polynomial<C>) -> Result<Polynomial<C>> {
    if occ.host != *host {
        return Err(Error::StaleOccurrence);
    }
    if replacement.arity() != occ.arity() {
        return Err(Error::Mismatch(format!(
            "replacement of arity {} for an occurrence of arity {}",
            replacement.arity(),
            occ.arity()
        )));
    }
    let subs = occ.dangling_subtrees();
    let mut out = Polynomial::zero(host.arity());
    for (t, c) in replacement.iter() {
        let grafted = t.substitute_leaves(&subs);
        out.add_term(c.clone(), host.replace_at(&occ.root, grafted).canonicalize());
    }
    Ok(out)
}

/// Replace the occurrence by a single monomial.
pub fn substitute_monomial(occ: &Occurrence, replacement: &Tree) -> Tree {
    let subs = occ.dangling_subtrees();
    occ.host.replace_at(&occ.root, replacement.substitute_leaves(&subs)).canonicalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::scalar::Rational;
    use crate::signature::{Mode, Signature};
    use crate::tree::make_monomial;
    use num_traits::One;

    fn ns() -> Signature {
        Signature::with_generators(Mode::Nonsymmetric, &[("mul", 2), ("succ", 2), ("prec", 2), ("R", 1)]).unwrap()
    }

    #[test]
    fn self_divisibility() {
        let s = ns();
        let m = make_monomial("(prec (R 1) (mul 2 3))", &s).unwrap();
        let occ = find_divisors(&m, &m);
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].root, Vec::<u8>::new());
    }

    #[test]
    fn binary_pattern_in_right_comb() {
        let s = ns();
        let host = make_monomial("(mul 1 (mul 2 3))", &s).unwrap();
        let pat = make_monomial("(mul 1 2)", &s).unwrap();
        // Both vertices host the single-vertex pattern.
        assert_eq!(find_divisors(&host, &pat).len(), 2);
    }

    #[test]
    fn generator_mismatch() {
        let s = ns();
        let host = make_monomial("(prec 1 (prec 2 3))", &s).unwrap();
        let pat = make_monomial("(succ 1 2)", &s).unwrap();
        assert!(find_divisors(&host, &pat).is_empty());
    }

    #[test]
    fn shuffle_divisor_respects_leaf_ranking() {
        let s = Signature::with_generators(Mode::Shuffle, &[("b", 2)]).unwrap();
        let host = make_monomial("(b (b 1 3) 2)", &s).unwrap();
        let left_comb = make_monomial("(b (b 1 2) 3)", &s).unwrap();
        let other = make_monomial("(b (b 1 3) 2)", &s).unwrap();
        assert!(find_divisors(&host, &left_comb).is_empty());
        assert_eq!(find_divisors(&host, &other).len(), 1);
    }

    #[test]
    fn eliminate_r_by_succ() {
        let s = ns();
        let host = make_monomial("(mul (R 1) 2)", &s).unwrap();
        let lhs = make_monomial("(mul (R 1) 2)", &s).unwrap();
        let rhs = parse_polynomial::<Rational>("(succ 1 2)", &s).unwrap();
        let occ = &find_divisors(&host, &lhs)[0];
        assert_eq!(substitute(&host, occ, &rhs).unwrap(), rhs);
    }

    #[test]
    fn substitute_identity_returns_host() {
        let s = ns();
        let host = make_monomial("(prec (mul 1 (R 2)) 3)", &s).unwrap();
        let pat = make_monomial("(mul 1 (R 2))", &s).unwrap();
        let occ = &find_divisors(&host, &pat)[0];
        let p = substitute(&host, occ, &Polynomial::<Rational>::monomial(pat.clone())).unwrap();
        assert_eq!(p.coefficient(&host), Rational::one());
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn stale_occurrence() {
        let s = ns();
        let host = make_monomial("(mul 1 2)", &s).unwrap();
        let other = make_monomial("(prec 1 2)", &s).unwrap();
        let occ = find_divisors(&host, &host)[0].clone();
        let p = Polynomial::<Rational>::monomial(host.clone());
        assert_eq!(substitute(&other, &occ, &p), Err(Error::StaleOccurrence));
    }
}
