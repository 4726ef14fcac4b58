use pbw_core::catalog::{translate, Catalog, Membership, OperadMorphism};
use pbw_core::divisor::{find_divisors, occurrence_at, substitute};
use pbw_core::enumerate::{random_monomial, Enumerator};
use pbw_core::freeness::fringe_factor;
use pbw_core::groebner::{dims_by_rank, interreduce};
use pbw_core::orders::{flag_combinations, search_order, OrderSpec};
use pbw_core::poly::Polynomial;
use pbw_core::rewriting::{check_confluence, Caps, Rewriter};
use pbw_core::signature::{Mode, Signature};
use pbw_core::symmetrize::span_basis;
use pbw_core::tree::{graft, make_monomial, Tree};
use pbw_core::{FpCheck, Rational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sig(mode: Mode) -> Signature {
    Signature::with_generators(mode, &[("mul", 2), ("succ", 2), ("prec", 2), ("R", 1)]).unwrap()
}

fn mode_of(shuffle: bool) -> Mode {
    if shuffle {
        Mode::Shuffle
    } else {
        Mode::Nonsymmetric
    }
}

fn sample(s: &Signature, n: usize, unary: usize, seed: u64) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_monomial(s, n, unary, &mut rng).expect("signature has binary generators")
}

fn poly(terms: &[(i64, Tree)]) -> Polynomial<Rational> {
    let mut p = Polynomial::zero(terms[0].1.arity());
    for (c, t) in terms {
        p.add_term(Rational::from_integer((*c).into()), t.clone());
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn sexpr_round_trip(shuffle: bool, n in 1usize..=6, k in 0usize..=2, seed: u64) {
        let s = sig(mode_of(shuffle));
        let t = sample(&s, n, k, seed);
        prop_assert_eq!(make_monomial(&t.to_sexpr(&s), &s).unwrap(), t);
    }

    #[test]
    fn disjoint_grafts_commute(shuffle: bool, m in 2usize..=4, ka in 1usize..=3, kb in 1usize..=3, seed: u64) {
        let s = sig(mode_of(shuffle));
        let mode = s.mode();
        let outer = sample(&s, m, 1, seed);
        let a = sample(&s, ka, 1, seed ^ 1);
        let b = sample(&s, kb, 1, seed ^ 2);
        let (i, j) = (1 + (seed % (m as u64 - 1)) as usize, m);
        let block = |at: usize, k: usize| (at as u8..(at + k) as u8).collect::<Vec<u8>>();
        let a_first = graft(&outer, i, &a, &block(i, ka), mode).unwrap();
        let a_first = graft(&a_first, j + ka - 1, &b, &block(j + ka - 1, kb), mode).unwrap();
        let b_first = graft(&outer, j, &b, &block(j, kb), mode).unwrap();
        let b_first = graft(&b_first, i, &a, &block(i, ka), mode).unwrap();
        prop_assert_eq!(a_first, b_first);
    }

    #[test]
    fn substitution_is_linear(shuffle: bool, n in 2usize..=5, seed: u64, c1 in -3i64..=3, c2 in -3i64..=3) {
        let s = sig(mode_of(shuffle));
        let host = sample(&s, n, 1, seed);
        let Some(g) = host.generator() else { return Ok(()) };
        let pattern = Tree::node(g, (1..=host.children().len() as u8).map(Tree::leaf).collect());
        let occ = occurrence_at(&host, &pattern, &[]).expect("root matches its own corolla");
        let k = pattern.arity();
        let p = poly(&[(c1, sample(&s, k, 1, seed ^ 3)), (1, sample(&s, k, 0, seed ^ 4))]);
        let q = poly(&[(c2, sample(&s, k, 1, seed ^ 5))]);
        let whole = substitute(&host, &occ, &p.add(&q).unwrap()).unwrap();
        let parts = substitute(&host, &occ, &p).unwrap().add(&substitute(&host, &occ, &q).unwrap()).unwrap();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn occurrences_substitute_back_to_the_host(shuffle: bool, n in 2usize..=6, seed: u64) {
        let s = sig(mode_of(shuffle));
        let host = sample(&s, n, 2, seed);
        let pattern = sample(&s, 2 + (seed % 2) as usize, (seed % 3 == 0) as usize, seed ^ 7);
        for occ in find_divisors(&host, &pattern) {
            let back = substitute(&host, &occ, &Polynomial::<Rational>::monomial(pattern.clone())).unwrap();
            prop_assert_eq!(back, Polynomial::monomial(host.clone()));
        }
    }

    #[test]
    fn fringe_factorization_reassembles(shuffle: bool, n in 1usize..=5, k in 0usize..=2, seed: u64) {
        let s = sig(mode_of(shuffle));
        let m = sample(&s, n, k, seed);
        let p_gens: Vec<_> = ["mul", "succ", "prec"].iter().map(|g| s.require(g).unwrap()).collect();
        prop_assert_eq!(fringe_factor(&m, &p_gens).reassemble(), m);
    }

    #[test]
    fn searched_orders_orient_every_rule(flags in 0usize..72, swap: bool, shuffle: bool) {
        let cat = Catalog::embedded();
        let p = if shuffle { cat.shuffle_presentation::<Rational>("dend").unwrap() } else { cat.presentation("dend").unwrap() };
        let (degree, word_length, prefix, scan, tiebreak) = flag_combinations()[flags % flag_combinations().len()];
        let mut rank: Vec<String> = p.sig.binary().iter().map(|g| p.sig.name(*g).to_string()).collect();
        if swap {
            rank.reverse();
        }
        let start = OrderSpec { rank, degree, word_length, prefix, scan, tiebreak };
        let rules = interreduce(&p.all_relations(), &start.resolve(&p.sig).unwrap()).unwrap();
        let pairs: Vec<(Tree, Polynomial)> = rules.into_iter().map(|r| (r.lhs, r.rhs)).collect();
        // Not every start order is admissible, so the search may come back empty.
        let Some(found) = search_order(&p.sig, &p.sig.binary(), &pairs) else { return Ok(()) };
        let order = found.resolve(&p.sig).unwrap();
        for (lhs, rhs) in &pairs {
            for t in rhs.monomials() {
                prop_assert_eq!(order.compare(lhs, t), std::cmp::Ordering::Greater);
            }
        }
    }

    #[test]
    fn dropping_relations_never_lowers_dimensions(mask in 1u32..(1 << 7)) {
        let p = Catalog::embedded().presentation::<Rational>("tridend").unwrap();
        let all = p.all_relations();
        let some: Vec<_> = all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, r)| r.clone()).collect();
        let full = dims_by_rank(&p.sig, &all, 4, 0);
        let fewer = dims_by_rank(&p.sig, &some, 4, 0);
        for n in 1..=4 {
            prop_assert!(fewer.get(n, 0) >= full.get(n, 0));
        }
    }
}

mod rewriting {
    use super::*;
    use std::sync::OnceLock;

    fn completed() -> &'static Rewriter {
        static RW: OnceLock<Rewriter> = OnceLock::new();
        RW.get_or_init(|| Catalog::embedded().completed_system::<Rational>("rs-rbass", Caps::new(4, 2)).unwrap().rewriter)
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

        #[test]
        fn reduction_strategies_agree(n in 1usize..=4, k in 0usize..=2, seed: u64, c in -2i64..=2) {
            let rw = completed();
            let p = poly(&[(1, sample(&rw.sig, n, k, seed)), (c, sample(&rw.sig, n, k, seed ^ 9))]);
            let canonical = rw.reduce(&p).unwrap();
            prop_assert_eq!(&rw.reduce_randomized(&p, seed).unwrap(), &canonical);
            prop_assert_eq!(rw.reduce(&canonical).unwrap(), canonical);
        }
    }

    #[test]
    fn completed_system_is_confluent_at_caps() {
        assert!(check_confluence(completed(), Caps::new(4, 2)).unwrap().is_confluent());
    }
}

#[test]
fn shuffle_counts_scale_with_generators() {
    for mode in [Mode::Nonsymmetric, Mode::Shuffle] {
        let one = Signature::with_generators(mode, &[("a", 2)]).unwrap();
        let mut base = Enumerator::new(&one);
        for g in 2..=3usize {
            let names: Vec<String> = (0..g).map(|i| format!("g{i}")).collect();
            let gens: Vec<(&str, u8)> = names.iter().map(|n| (n.as_str(), 2)).collect();
            let s = Signature::with_generators(mode, &gens).unwrap();
            let mut en = Enumerator::new(&s);
            for n in 1..=5 {
                assert_eq!(en.count_exact(n, 0), base.count_exact(n, 0) * g.pow(n as u32 - 1), "{mode:?} g={g} n={n}");
            }
        }
    }
}

#[test]
fn orders_are_total_antisymmetric_and_transitive() {
    let s = Signature::with_generators(Mode::Shuffle, &[("a", 2), ("b", 2), ("R", 1)]).unwrap();
    let mut en = Enumerator::new(&s);
    for (degree, word_length, prefix, scan, tiebreak) in flag_combinations() {
        for rank in [vec!["a", "b", "R"], vec!["R", "b", "a"]] {
            let spec = OrderSpec { rank: rank.iter().map(|x| x.to_string()).collect(), degree, word_length, prefix, scan, tiebreak };
            let order = spec.resolve(&s).unwrap();
            for (n, k) in [(3, 0), (3, 1), (4, 0)] {
                let mut ms = en.up_to(n, k);
                ms.retain(|t| t.arity() == n && t.vertex_count() <= 4);
                order.sort_desc(&mut ms);
                for i in 0..ms.len() {
                    for j in i + 1..ms.len() {
                        assert_eq!(order.compare(&ms[i], &ms[j]), std::cmp::Ordering::Greater, "{spec:?}");
                        assert_eq!(order.compare(&ms[j], &ms[i]), std::cmp::Ordering::Less);
                    }
                }
            }
        }
    }
}

#[test]
fn stored_rules_reduce_their_own_relations() {
    let cat = Catalog::embedded();
    for name in ["rs-rbass", "rs-rblie", "rs-rbass0", "rs-rblie0"] {
        let rw: Rewriter = cat.system(name).unwrap();
        for r in &rw.rules {
            assert!(rw.reduce(&r.as_relation()).unwrap().is_zero(), "{name}: {}", r.to_text(&rw.sig));
        }
    }
}

/// The named products of a stored system are images of a morphism; after
/// substituting them every rule must vanish in the defining presentation.
#[test]
fn stored_rules_follow_from_the_defining_relations() {
    let cat = Catalog::embedded();
    for (system, operad, names) in
        [("rs-rbass", "rbass", "beta"), ("rs-rbass0", "rbass0", "beta0"), ("rs-rblie", "rblie", "alpha"), ("rs-rblie0", "rblie0", "alpha0")]
    {
        let rw: Rewriter = cat.system(system).unwrap();
        let p = cat.presentation::<Rational>(operad).unwrap();
        let f = cat.morphism::<Rational>(names).unwrap();
        let images = rw
            .sig
            .ids()
            .map(|g| match f.source.lookup(rw.sig.name(g)) {
                Some(h) => translate(&f.images[h.0 as usize], &f.target, &p.sig).unwrap(),
                None => {
                    let own = p.sig.require(rw.sig.name(g)).unwrap();
                    Polynomial::monomial(Tree::node(own, (1..=rw.sig.arity(g) as u8).map(Tree::leaf).collect()))
                }
            })
            .collect();
        let defs = OperadMorphism::new("defs", rw.sig.clone(), p.sig.clone(), images).unwrap();
        let ideal = Membership::Linear { sig: p.sig.clone(), relations: p.all_relations() };
        for r in rw.rules.iter().filter(|r| r.lhs.arity() <= 3) {
            assert!(ideal.vanishes(&defs.apply(&r.as_relation()), &p.sig).unwrap(), "{system}: {}", r.to_text(&rw.sig));
        }
    }
}

#[test]
fn unary_free_rules_present_the_binary_operad() {
    let cat = Catalog::embedded();
    for (system, operad) in [("rs-rbass", "tridend"), ("rs-rblie", "postlie")] {
        let rw: Rewriter = cat.system(system).unwrap();
        let p = cat.presentation::<Rational>(operad).unwrap();
        let p = if p.sig.mode() == rw.sig.mode() { p } else { cat.shuffle_presentation(operad).unwrap() };
        let unary = rw.sig.unary();
        let free_of_unary = |t: &Tree| !unary.iter().any(|&u| t.contains_generator(u));
        let rules: Vec<Polynomial> = rw
            .rules
            .iter()
            .map(|r| r.as_relation())
            .filter(|rel| rel.monomials().all(free_of_unary))
            .map(|rel| translate(&rel, &rw.sig, &p.sig).unwrap())
            .collect();
        let own = span_basis(&p.all_relations());
        let mut joint = own.clone();
        joint.extend(rules.iter().cloned());
        assert_eq!(span_basis(&rules).len(), own.len(), "{system}");
        assert_eq!(span_basis(&joint).len(), own.len(), "{system}");
    }
}

#[test]
fn modular_ranks_match_rational_ones() {
    let cat = Catalog::embedded();
    for name in ["tridend", "postlie", "auxquotient"] {
        let q = cat.shuffle_presentation::<Rational>(name).unwrap();
        let f = cat.shuffle_presentation::<FpCheck>(name).unwrap();
        assert_eq!(dims_by_rank(&q.sig, &q.all_relations(), 3, 0), dims_by_rank(&f.sig, &f.all_relations(), 3, 0), "{name}");
    }
}
