use pbw_core::catalog::{change_generators, verify_morphism, weight_normalize, Catalog, EntryKind, Membership};
use pbw_core::error::Error;
use pbw_core::groebner::{dims, dims_by_rank, DimTable};
use pbw_core::poly::parse_polynomial;
use pbw_core::presentation::Presentation;
use pbw_core::rewriting::{check_confluence, validate_certificate, Caps};
use pbw_core::scalar::Rational;
use pbw_core::signature::Mode;

fn totals(t: &DimTable) -> Vec<u64> {
    (1..=t.max_arity).map(|a| t.arity_total(a)).collect()
}

fn source_relations(cat: &Catalog, name: &str, mode: Mode) -> Vec<pbw_core::poly::Polynomial> {
    let p: Presentation = if mode == Mode::Shuffle { cat.shuffle_presentation(name).unwrap() } else { cat.presentation(name).unwrap() };
    p.all_relations()
}

#[test]
fn every_entry_loads() {
    let cat = Catalog::embedded();
    for e in cat.list().unwrap() {
        match e.kind {
            EntryKind::Presentation | EntryKind::RewritingSystem => {
                let p: Presentation = cat.presentation(&e.name).unwrap();
                assert!(!p.sig.is_empty(), "{}", e.name);
                cat.order(&e.name).unwrap();
            }
            EntryKind::Morphism => {
                cat.morphism::<Rational>(&e.name).unwrap();
            }
        }
    }
}

#[test]
fn tridend_dimensions() {
    let cat = Catalog::embedded();
    let caps = Caps::new(4, 0);
    let gb = cat.completed::<Rational>("tridend", false, caps).unwrap();
    assert_eq!(gb.rules.len(), 7);
    assert_eq!(totals(&dims(&gb.sig, &gb.rules, 4, 0)), vec![1, 3, 11, 45]);
    let p: Presentation = cat.presentation("tridend").unwrap();
    assert_eq!(totals(&dims_by_rank(&p.sig, &p.relations, 4, 0)), vec![1, 3, 11, 45]);
    let sgb = cat.completed::<Rational>("tridend", true, caps).unwrap();
    assert_eq!(sgb.sig.mode(), Mode::Shuffle);
    assert_eq!(totals(&dims(&sgb.sig, &sgb.rules, 4, 0)), vec![1, 6, 66, 1080]);
}

#[test]
fn truncated_basis_matches_completion() {
    let cat = Catalog::embedded();
    let caps = Caps::new(4, 0);
    for name in ["alttridend", "postpoisson", "comtriass"] {
        let a = cat.completed::<Rational>(name, true, caps).unwrap();
        let b = cat.truncated_gb::<Rational>(name, true, caps).unwrap();
        assert_eq!(dims(&a.sig, &a.rules, 4, 0), dims(&b.sig, &b.rules, 4, 0), "{name}");
    }
}

#[test]
fn stored_systems_miss_one_critical_pair() {
    let cat = Catalog::embedded();
    let caps = Caps::new(4, 2);
    for name in ["rs-rbass", "rs-rblie", "rs-rbass0", "rs-rblie0"] {
        let rw = cat.system::<Rational>(name).unwrap();
        let rep = check_confluence(&rw, caps).unwrap();
        assert_eq!(rep.failures.len(), 1, "{name}");
        // The two normal forms agree in the operad: the system is sound,
        // only incomplete.
        let f = &rep.failures[0];
        let p: Presentation = cat.presentation(name).unwrap();
        let a = parse_polynomial::<Rational>(&f.normal_forms.0, &p.sig).unwrap();
        let b = parse_polynomial::<Rational>(&f.normal_forms.1, &p.sig).unwrap();
        let m = Membership::Linear { sig: p.sig.clone(), relations: p.all_relations() };
        assert!(m.vanishes(&a.sub(&b).unwrap(), &p.sig).unwrap(), "{name}");
    }
}

#[test]
fn completed_systems_are_confluent() {
    let cat = Catalog::embedded();
    let caps = Caps::new(4, 2);
    for name in ["rs-rbass", "rs-rblie", "rs-rbass0", "rs-rblie0"] {
        let kb = cat.completed_system::<Rational>(name, caps).unwrap();
        assert_eq!(kb.added.len(), 4, "{name}");
        let rep = check_confluence(&kb.rewriter, caps).unwrap();
        assert!(rep.is_confluent(), "{name}: {:?}", rep.failures.first());
        validate_certificate(&kb.rewriter, caps, 50, 7).unwrap_or_else(|v| panic!("{name}: {v:?}"));
    }
}

#[test]
fn catalog_morphisms_are_well_defined() {
    let cat = Catalog::embedded();
    for name in ["alpha", "alpha0", "beta", "beta0", "phi", "psi", "alt", "phi-alt"] {
        let f = cat.morphism::<Rational>(name).unwrap();
        let m = cat.membership::<Rational>(&f.target_name, f.target.mode()).unwrap();
        let w = verify_morphism(&f, &source_relations(&cat, &f.source_name, f.source.mode()), &m).unwrap();
        assert!(w.is_none(), "{name}: {w:?}");
    }
}

#[test]
fn phi_factors_through_alternative_generators() {
    let cat = Catalog::embedded();
    let phi = cat.morphism::<Rational>("phi").unwrap();
    let composite = cat.morphism::<Rational>("phi-alt").unwrap().then(&cat.morphism("alt").unwrap()).unwrap();
    for (a, b) in composite.images.iter().zip(&phi.images) {
        assert_eq!(pbw_core::catalog::translate(a, &composite.target, &phi.target).unwrap(), *b);
    }
}

#[test]
fn weight_normalization() {
    for lambda in [-1i64, 1, 2, -3] {
        let l = Rational::from_integer(lambda.into());
        let (f, source, target) = weight_normalize(&l).unwrap();
        let m = Membership::Linear { sig: target.sig.clone(), relations: target.all_relations() };
        assert!(verify_morphism(&f, &source.all_relations(), &m).unwrap().is_none(), "lambda {lambda}");
        if lambda == -1 {
            let r = target.sig.require("R").unwrap();
            let img = &f.images[source.sig.require("R").unwrap().0 as usize];
            assert_eq!(img.len(), 1);
            assert!(img.iter().all(|(t, c)| t.generator() == Some(r) && *c == Rational::from_integer(1.into())));
        }
    }
    assert!(matches!(weight_normalize(&Rational::from_integer(0.into())), Err(Error::ZeroWeight)));
}

#[test]
fn alternative_generators_keep_dimensions() {
    let cat = Catalog::embedded();
    let p: Presentation = cat.shuffle_presentation("tridend").unwrap();
    let names: Vec<String> = p.sig.binary().iter().map(|&g| format!("{}x", p.sig.name(g))).collect();
    // An upper triangular change: each new generator adds the next old one.
    let binary = p.sig.binary();
    let defs: Vec<_> = binary
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let mut text = format!("({} 1 2)", p.sig.name(g));
            if let Some(&h) = binary.get(i + 1) {
                text.push_str(&format!(" + ({} 1 2)", p.sig.name(h)));
            }
            parse_polynomial::<Rational>(&text, &p.sig).unwrap()
        })
        .collect();
    let q = change_generators(&p, &names, &defs).unwrap();
    assert_eq!(totals(&dims_by_rank(&q.sig, &q.relations, 3, 0)), vec![1, 6, 66]);
    let mut singular = defs.clone();
    singular[1] = singular[0].clone();
    assert!(matches!(change_generators(&p, &names, &singular), Err(Error::SingularTransformation)));
}
