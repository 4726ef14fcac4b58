//! Tree monomials: planar rooted trees with generator-labelled vertices.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sexpr::{parse_raw_tree, RawTree};
use crate::signature::{GenId, Mode, Signature};

/// Address of a vertex: child indices from the root.
pub type Path = Vec<u8>;

/// A tree monomial. Structural equality, ordering and hashing are those of
/// the canonical form, so two monomials are equal iff they are the same
/// basis element of the free operad.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Tree {
    Leaf(u8),
    Node(GenId, Box<[Tree]>),
}

impl Tree {
    pub fn leaf(label: u8) -> Tree {
        Tree::Leaf(label)
    }

    pub fn node(gen: GenId, children: Vec<Tree>) -> Tree {
        Tree::Node(gen, children.into_boxed_slice())
    }

    pub fn unary(gen: GenId, child: Tree) -> Tree {
        Tree::node(gen, vec![child])
    }

    pub fn binary(gen: GenId, left: Tree, right: Tree) -> Tree {
        Tree::node(gen, vec![left, right])
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf(_))
    }

    pub fn children(&self) -> &[Tree] {
        match self {
            Tree::Leaf(_) => &[],
            Tree::Node(_, c) => c,
        }
    }

    pub fn generator(&self) -> Option<GenId> {
        match self {
            Tree::Leaf(_) => None,
            Tree::Node(g, _) => Some(*g),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(_, c) => c.iter().map(Tree::arity).sum(),
        }
    }

    pub fn min_leaf(&self) -> u8 {
        match self {
            Tree::Leaf(l) => *l,
            Tree::Node(_, c) => c.iter().map(Tree::min_leaf).min().expect("nodes have children"),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(_, c) => 1 + c.iter().map(Tree::vertex_count).sum::<usize>(),
        }
    }

    pub fn unary_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(_, c) => {
                usize::from(c.len() == 1) + c.iter().map(Tree::unary_count).sum::<usize>()
            }
        }
    }

    pub fn binary_count(&self) -> usize {
        self.vertex_count() - self.unary_count()
    }

    /// Leaf labels in planar order.
    pub fn leaves(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8);
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<u8>) {
        match self {
            Tree::Leaf(l) => out.push(*l),
            Tree::Node(_, c) => c.iter().for_each(|t| t.collect_leaves(out)),
        }
    }

    pub fn contains_generator(&self, g: GenId) -> bool {
        match self {
            Tree::Leaf(_) => false,
            Tree::Node(h, c) => *h == g || c.iter().any(|t| t.contains_generator(g)),
        }
    }

    pub fn generators_used(&self, out: &mut Vec<GenId>) {
        if let Tree::Node(g, c) = self {
            if !out.contains(g) {
                out.push(*g);
            }
            c.iter().for_each(|t| t.generators_used(out));
        }
    }

    /// Whether every vertex has children with strictly increasing minimal leaves.
    pub fn is_shuffle_ordered(&self) -> bool {
        match self {
            Tree::Leaf(_) => true,
            Tree::Node(_, c) => {
                c.windows(2).all(|w| w[0].min_leaf() < w[1].min_leaf())
                    && c.iter().all(Tree::is_shuffle_ordered)
            }
        }
    }

    /// Sort children of every vertex by minimal leaf. No sign is introduced.
    pub fn canonicalize(&self) -> Tree {
        match self {
            Tree::Leaf(l) => Tree::Leaf(*l),
            Tree::Node(g, c) => {
                let mut kids: Vec<Tree> = c.iter().map(Tree::canonicalize).collect();
                kids.sort_by_key(Tree::min_leaf);
                Tree::node(*g, kids)
            }
        }
    }

    /// Apply `f` to every leaf label.
    pub fn relabel(&self, f: &impl Fn(u8) -> u8) -> Tree {
        match self {
            Tree::Leaf(l) => Tree::Leaf(f(*l)),
            Tree::Node(g, c) => Tree::node(*g, c.iter().map(|t| t.relabel(f)).collect()),
        }
    }

    /// Relabel leaves order-preservingly onto `1..=k`.
    pub fn standardize(&self) -> Tree {
        let mut labels = self.leaves();
        labels.sort_unstable();
        self.relabel(&|l| labels.binary_search(&l).expect("label present") as u8 + 1)
    }

    /// Replace each leaf `i` by `subs[i-1]` (no relabelling).
    pub fn substitute_leaves(&self, subs: &[Tree]) -> Tree {
        match self {
            Tree::Leaf(l) => subs[*l as usize - 1].clone(),
            Tree::Node(g, c) => Tree::node(*g, c.iter().map(|t| t.substitute_leaves(subs)).collect()),
        }
    }

    pub fn at(&self, path: &[u8]) -> Option<&Tree> {
        let mut t = self;
        for &i in path {
            t = t.children().get(i as usize)?;
        }
        Some(t)
    }

    /// Copy of `self` with the subtree at `path` replaced.
    pub fn replace_at(&self, path: &[u8], new: Tree) -> Tree {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => match self {
                Tree::Leaf(_) => panic!("path leads through a leaf"),
                Tree::Node(g, c) => {
                    let mut kids = c.to_vec();
                    kids[i as usize] = kids[i as usize].replace_at(rest, new);
                    Tree::node(*g, kids)
                }
            },
        }
    }

    /// Paths of all internal vertices in preorder.
    pub fn vertex_paths(&self) -> Vec<Path> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.collect_vertices(&mut cur, &mut out);
        out
    }

    fn collect_vertices(&self, cur: &mut Path, out: &mut Vec<Path>) {
        if let Tree::Node(_, c) = self {
            out.push(cur.clone());
            for (i, t) in c.iter().enumerate() {
                cur.push(i as u8);
                t.collect_vertices(cur, out);
                cur.pop();
            }
        }
    }

    /// Check that this is a valid monomial of `sig`.
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        self.check_arities(sig)?;
        let mut labels = self.leaves();
        let n = labels.len();
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &l)| l as usize != i + 1) {
            return Err(Error::InvalidMonomial(format!(
                "leaf labels must be exactly 1..{n}, found {:?}",
                self.leaves()
            )));
        }
        match sig.mode() {
            Mode::Shuffle if !self.is_shuffle_ordered() => Err(Error::InvalidMonomial(format!(
                "`{}` violates the shuffle condition",
                self.to_sexpr(sig)
            ))),
            Mode::Nonsymmetric if self.leaves().iter().enumerate().any(|(i, &l)| l as usize != i + 1) => {
                Err(Error::InvalidMonomial(format!(
                    "`{}` has leaves out of order for a nonsymmetric monomial",
                    self.to_sexpr(sig)
                )))
            }
            _ => Ok(()),
        }
    }

    fn check_arities(&self, sig: &Signature) -> Result<()> {
        if let Tree::Node(g, c) = self {
            if (g.0 as usize) >= sig.len() {
                return Err(Error::UnknownGenerator(format!("#{}", g.0)));
            }
            if sig.arity(*g) != c.len() {
                return Err(Error::ArityMismatch {
                    name: sig.name(*g).to_string(),
                    expected: sig.arity(*g),
                    found: c.len(),
                });
            }
            c.iter().try_for_each(|t| t.check_arities(sig))?;
        }
        Ok(())
    }

    pub fn to_sexpr(&self, sig: &Signature) -> String {
        let mut s = String::new();
        self.write_sexpr(sig, &mut s);
        s
    }

    fn write_sexpr(&self, sig: &Signature, out: &mut String) {
        match self {
            Tree::Leaf(l) => {
                let _ = write!(out, "{l}");
            }
            Tree::Node(g, c) => {
                out.push('(');
                out.push_str(sig.name(*g));
                for t in c.iter() {
                    out.push(' ');
                    t.write_sexpr(sig, out);
                }
                out.push(')');
            }
        }
    }

    /// Build from raw syntax without checking labels or the mode condition.
    pub fn from_raw(raw: &RawTree, sig: &Signature) -> Result<Tree> {
        match raw {
            RawTree::Leaf { label, line, col } => {
                if *label > u8::MAX as u32 {
                    return Err(Error::Parse { line: *line, col: *col, msg: "leaf label too large".into() });
                }
                Ok(Tree::Leaf(*label as u8))
            }
            RawTree::Node { name, children, line, col } => {
                let g = sig.lookup(name).ok_or_else(|| Error::Parse {
                    line: *line,
                    col: *col,
                    msg: format!("unknown generator `{name}`"),
                })?;
                if sig.arity(g) != children.len() {
                    return Err(Error::Parse {
                        line: *line,
                        col: *col,
                        msg: format!(
                            "generator `{name}` has arity {} but was applied to {} arguments",
                            sig.arity(g),
                            children.len()
                        ),
                    });
                }
                let kids = children.iter().map(|c| Tree::from_raw(c, sig)).collect::<Result<Vec<_>>>()?;
                Ok(Tree::node(g, kids))
            }
        }
    }
}

/// Parse and validate a monomial in the signature's mode.
///
/// Shuffle-mode input must already be written in shuffle order: `(mul 2 1)`
/// is rejected rather than silently reordered, because reordering would
/// change which basis element is meant.
pub fn make_monomial(expr: &str, sig: &Signature) -> Result<Tree> {
    let raw = parse_raw_tree(expr)?;
    let t = Tree::from_raw(&raw, sig)?;
    t.validate(sig)?;
    Ok(t)
}

/// Shuffle composition: insert `inner` at the leaf of `outer` labelled
/// `leaf_label`, giving inner's leaves the global labels `inner_labels`
/// (increasing). Outer's remaining leaves take the complementary labels in
/// order. The assignment must make the minimum of `inner_labels` the new
/// label of the grafting leaf; in nonsymmetric mode only the block
/// `leaf_label..leaf_label+k` is allowed.
pub fn graft(outer: &Tree, leaf_label: usize, inner: &Tree, inner_labels: &[u8], mode: Mode) -> Result<Tree> {
    let m = outer.arity();
    let k = inner.arity();
    let n = m + k - 1;
    if leaf_label == 0 || leaf_label > m {
        return Err(Error::InvalidGraft(format!("leaf {leaf_label} out of range 1..={m}")));
    }
    if inner_labels.len() != k {
        return Err(Error::InvalidGraft(format!(
            "expected {k} labels for the inner monomial, got {}",
            inner_labels.len()
        )));
    }
    if inner_labels.windows(2).any(|w| w[0] >= w[1])
        || inner_labels.iter().any(|&l| l == 0 || l as usize > n)
    {
        return Err(Error::InvalidGraft(format!("labels {inner_labels:?} are not increasing within 1..={n}")));
    }
    let mut outer_labels: Vec<u8> =
        (1..=n as u8).filter(|l| !inner_labels.contains(l) || *l == inner_labels[0]).collect();
    outer_labels.sort_unstable();
    if outer_labels[leaf_label - 1] != inner_labels[0] {
        return Err(Error::InvalidGraft(format!(
            "labels {inner_labels:?} do not form a shuffle at leaf {leaf_label}"
        )));
    }
    if mode == Mode::Nonsymmetric
        && inner_labels.iter().enumerate().any(|(j, &l)| l as usize != leaf_label + j)
    {
        return Err(Error::InvalidGraft("nonsymmetric grafting requires the block assignment".into()));
    }
    let relabeled_inner = inner.relabel(&|l| inner_labels[l as usize - 1]);
    let subs: Vec<Tree> = (1..=m)
        .map(|j| if j == leaf_label { relabeled_inner.clone() } else { Tree::Leaf(outer_labels[j - 1]) })
        .collect();
    Ok(outer.substitute_leaves(&subs).canonicalize())
}

/// All label sets admissible for grafting an arity-`k` monomial at leaf
/// `leaf_label` of an arity-`m` monomial.
pub fn graft_assignments(m: usize, leaf_label: usize, k: usize, mode: Mode) -> Vec<Vec<u8>> {
    let n = m + k - 1;
    if mode == Mode::Nonsymmetric {
        return vec![(leaf_label as u8..(leaf_label + k) as u8).collect()];
    }
    // The minimum is forced to be `leaf_label`; the rest are any k-1 labels above it.
    let above: Vec<u8> = ((leaf_label + 1) as u8..=n as u8).collect();
    itertools::Itertools::combinations(above.into_iter(), k - 1)
        .map(|rest| {
            let mut v = vec![leaf_label as u8];
            v.extend(rest);
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig3(mode: Mode) -> Signature {
        Signature::with_generators(mode, &[("mul", 2), ("R", 1), ("bracket", 2)]).unwrap()
    }

    #[test]
    fn parse_smallest_binary() {
        let s = sig3(Mode::Nonsymmetric);
        let t = make_monomial("(mul 1 2)", &s).unwrap();
        assert_eq!(t, Tree::binary(GenId(0), Tree::leaf(1), Tree::leaf(2)));
    }

    #[test]
    fn parse_bracket_of_r() {
        let s = sig3(Mode::Shuffle);
        let t = make_monomial("(bracket (R 1) 2)", &s).unwrap();
        assert_eq!(t, Tree::binary(GenId(2), Tree::unary(GenId(1), Tree::leaf(1)), Tree::leaf(2)));
        assert_eq!(t.to_sexpr(&s), "(bracket (R 1) 2)");
    }

    #[test]
    fn shuffle_violation_rejected() {
        let s = sig3(Mode::Shuffle);
        assert!(matches!(make_monomial("(mul 2 1)", &s), Err(Error::InvalidMonomial(_))));
    }

    #[test]
    fn label_and_arity_errors() {
        let s = sig3(Mode::Shuffle);
        assert!(make_monomial("(mul 1 1)", &s).is_err());
        assert!(make_monomial("(mul 1 3)", &s).is_err());
        assert!(make_monomial("(mul 1)", &s).is_err());
        assert!(make_monomial("(foo 1 2)", &s).is_err());
        let ns = sig3(Mode::Nonsymmetric);
        assert!(make_monomial("(mul 1 (mul 3 2))", &ns).is_err());
        // Valid as a shuffle monomial, not as a nonsymmetric one.
        assert!(make_monomial("(mul (mul 1 3) 2)", &s).is_ok());
        assert!(make_monomial("(mul (mul 1 3) 2)", &ns).is_err());
    }

    #[test]
    fn graft_identity_and_block() {
        let s = sig3(Mode::Nonsymmetric);
        let m = make_monomial("(mul 1 2)", &s).unwrap();
        assert_eq!(graft(&Tree::leaf(1), 1, &m, &[1, 2], Mode::Nonsymmetric).unwrap(), m);
        let g = graft(&m, 2, &m, &[2, 3], Mode::Nonsymmetric).unwrap();
        assert_eq!(g, make_monomial("(mul 1 (mul 2 3))", &s).unwrap());
        assert!(graft(&m, 2, &m, &[1, 3], Mode::Nonsymmetric).is_err());
        assert!(graft(&m, 3, &m, &[3, 4], Mode::Nonsymmetric).is_err());
    }

    #[test]
    fn shuffle_grafts_of_binary_into_binary() {
        // Every way of composing one binary corolla into another: the three
        // shuffle trees of arity 3.
        let s = sig3(Mode::Shuffle);
        let b = make_monomial("(mul 1 2)", &s).unwrap();
        let mut results = Vec::new();
        for leaf in 1..=2 {
            for labels in graft_assignments(2, leaf, 2, Mode::Shuffle) {
                results.push(graft(&b, leaf, &b, &labels, Mode::Shuffle).unwrap());
            }
        }
        results.sort();
        results.dedup();
        assert_eq!(results.len(), 3);
        let into_leaf2: Vec<_> = graft_assignments(2, 2, 2, Mode::Shuffle);
        assert_eq!(into_leaf2, vec![vec![2, 3]]);
    }

    #[test]
    fn graft_rejects_non_shuffle_assignment() {
        let b = Tree::binary(GenId(0), Tree::leaf(1), Tree::leaf(2));
        assert!(graft(&b, 2, &b, &[1, 3], Mode::Shuffle).is_err());
        assert!(graft(&b, 1, &b, &[2, 3], Mode::Shuffle).is_err());
        assert!(graft(&b, 1, &b, &[1, 3], Mode::Shuffle).is_ok());
    }
}
