//! Built-in presentations, rewriting systems, orders and morphisms.
//!
//! Catalog files live in `catalog/` next to this crate and are embedded at
//! build time. Setting `PBW_CATALOG_DIR` (or calling [`Catalog::from_dir`])
//! reads them from a directory instead.
//!
//! File kinds: `<name>.pres` presentations, `<name>.rules` rewriting systems,
//! `<name>.order.json` orders or termination certificates, `<name>.morph`
//! morphisms.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::groebner::{buchberger, degree_cap, linear_gb, IdealSlice};
use crate::linalg::invert;
use crate::orders::OrderSpec;
use crate::poly::{raw_terms_to_trees, Polynomial};
use crate::presentation::{parse_morphism, parse_presentation, ParsedPresentation, Presentation, SymmetricPresentation};
use crate::rewriting::{complete_rewriting, Caps, KnuthBendix, Rewriter, TerminationCertificate};
use crate::scalar::{Coefficient, Rational};
use crate::signature::{GenId, Mode, Signature, Symmetry};
use crate::symmetrize::{bar_name, span_basis, symmetrize, to_shuffle, ShuffleTable};
use crate::tree::Tree;

pub const CATALOG_ENV: &str = "PBW_CATALOG_DIR";

/// Bound on the size of a rule list grown by completion.
pub const MAX_COMPLETION_RULES: usize = 500;

static EMBEDDED: &[(&str, &str)] = &[
    ("alpha.morph", include_str!("../catalog/alpha.morph")),
    ("alpha0.morph", include_str!("../catalog/alpha0.morph")),
    ("alt.morph", include_str!("../catalog/alt.morph")),
    ("alttridend.order.json", include_str!("../catalog/alttridend.order.json")),
    ("alttridend.pres", include_str!("../catalog/alttridend.pres")),
    ("auxquotient.order.json", include_str!("../catalog/auxquotient.order.json")),
    ("auxquotient.pres", include_str!("../catalog/auxquotient.pres")),
    ("beta.morph", include_str!("../catalog/beta.morph")),
    ("beta0.morph", include_str!("../catalog/beta0.morph")),
    ("comtriass.order.json", include_str!("../catalog/comtriass.order.json")),
    ("comtriass.pres", include_str!("../catalog/comtriass.pres")),
    ("dend.order.json", include_str!("../catalog/dend.order.json")),
    ("dend.pres", include_str!("../catalog/dend.pres")),
    ("lie.order.json", include_str!("../catalog/lie.order.json")),
    ("lie.pres", include_str!("../catalog/lie.pres")),
    ("phi-alt.morph", include_str!("../catalog/phi-alt.morph")),
    ("phi.morph", include_str!("../catalog/phi.morph")),
    ("postlie.order.json", include_str!("../catalog/postlie.order.json")),
    ("postlie.pres", include_str!("../catalog/postlie.pres")),
    ("postpoisson.order.json", include_str!("../catalog/postpoisson.order.json")),
    ("postpoisson.pres", include_str!("../catalog/postpoisson.pres")),
    ("prelie.order.json", include_str!("../catalog/prelie.order.json")),
    ("prelie.pres", include_str!("../catalog/prelie.pres")),
    ("psi.morph", include_str!("../catalog/psi.morph")),
    ("rbass.order.json", include_str!("../catalog/rbass.order.json")),
    ("rbass.pres", include_str!("../catalog/rbass.pres")),
    ("rbass0.order.json", include_str!("../catalog/rbass0.order.json")),
    ("rbass0.pres", include_str!("../catalog/rbass0.pres")),
    ("rblie.order.json", include_str!("../catalog/rblie.order.json")),
    ("rblie.pres", include_str!("../catalog/rblie.pres")),
    ("rblie0.order.json", include_str!("../catalog/rblie0.order.json")),
    ("rblie0.pres", include_str!("../catalog/rblie0.pres")),
    ("rs-rbass.order.json", include_str!("../catalog/rs-rbass.order.json")),
    ("rs-rbass.rules", include_str!("../catalog/rs-rbass.rules")),
    ("rs-rbass0.order.json", include_str!("../catalog/rs-rbass0.order.json")),
    ("rs-rbass0.rules", include_str!("../catalog/rs-rbass0.rules")),
    ("rs-rblie.order.json", include_str!("../catalog/rs-rblie.order.json")),
    ("rs-rblie.rules", include_str!("../catalog/rs-rblie.rules")),
    ("rs-rblie0.order.json", include_str!("../catalog/rs-rblie0.order.json")),
    ("rs-rblie0.rules", include_str!("../catalog/rs-rblie0.rules")),
    ("tridend.order.json", include_str!("../catalog/tridend.order.json")),
    ("tridend.pres", include_str!("../catalog/tridend.pres")),
];

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    Presentation,
    RewritingSystem,
    Morphism,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Entry {
    pub name: String,
    pub kind: EntryKind,
    pub file: String,
}

/// Access to catalog files, embedded or on disk.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    dir: Option<PathBuf>,
}

impl Catalog {
    pub fn embedded() -> Self {
        Catalog { dir: None }
    }

    pub fn from_dir(dir: impl Into<PathBuf>) -> Self {
        Catalog { dir: Some(dir.into()) }
    }

    /// The directory named by `PBW_CATALOG_DIR`, else the embedded files.
    pub fn from_env() -> Self {
        match std::env::var_os(CATALOG_ENV) {
            Some(d) if !d.is_empty() => Self::from_dir(PathBuf::from(d)),
            _ => Self::embedded(),
        }
    }

    /// All files as (file name, contents), sorted by name.
    pub fn files(&self) -> Result<Vec<(String, String)>> {
        match &self.dir {
            None => Ok(EMBEDDED.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect()),
            Some(d) => {
                let mut out = Vec::new();
                let rd = std::fs::read_dir(d).map_err(|e| Error::Catalog(format!("{}: {e}", d.display())))?;
                for e in rd {
                    let e = e.map_err(|e| Error::Catalog(e.to_string()))?;
                    let name = e.file_name().to_string_lossy().to_string();
                    if [".pres", ".rules", ".order.json", ".morph"].iter().any(|s| name.ends_with(s)) {
                        let text = std::fs::read_to_string(e.path()).map_err(|e| Error::Catalog(format!("{name}: {e}")))?;
                        out.push((name, text));
                    }
                }
                out.sort();
                Ok(out)
            }
        }
    }

    pub fn read(&self, file: &str) -> Result<String> {
        match &self.dir {
            None => EMBEDDED
                .iter()
                .find(|(n, _)| *n == file)
                .map(|(_, t)| t.to_string())
                .ok_or_else(|| Error::Catalog(format!("no catalog file `{file}`"))),
            Some(d) => {
                std::fs::read_to_string(d.join(file)).map_err(|e| Error::Catalog(format!("{file}: {e}")))
            }
        }
    }

    fn exists(&self, file: &str) -> bool {
        match &self.dir {
            None => EMBEDDED.iter().any(|(n, _)| *n == file),
            Some(d) => d.join(file).is_file(),
        }
    }

    pub fn list(&self) -> Result<Vec<Entry>> {
        let mut out = Vec::new();
        for (file, _) in self.files()? {
            let (name, kind) = if let Some(n) = file.strip_suffix(".pres") {
                (n, EntryKind::Presentation)
            } else if let Some(n) = file.strip_suffix(".rules") {
                (n, EntryKind::RewritingSystem)
            } else if let Some(n) = file.strip_suffix(".morph") {
                (n, EntryKind::Morphism)
            } else {
                continue;
            };
            out.push(Entry { name: name.to_string(), kind, file: file.clone() });
        }
        Ok(out)
    }

    /// Source text of an entry, whatever its kind.
    pub fn show(&self, name: &str) -> Result<String> {
        for ext in ["pres", "rules", "morph"] {
            let f = format!("{name}.{ext}");
            if self.exists(&f) {
                return self.read(&f);
            }
        }
        Err(Error::Catalog(format!("no catalog entry `{name}`")))
    }

    fn entry_text(&self, name: &str) -> Result<String> {
        for ext in ["pres", "rules"] {
            let f = format!("{name}.{ext}");
            if self.exists(&f) {
                return self.read(&f);
            }
        }
        Err(Error::Catalog(format!("no presentation or rewriting system `{name}`")))
    }

    pub fn parsed<C: Coefficient>(&self, name: &str) -> Result<ParsedPresentation<C>> {
        parse_presentation(&self.entry_text(name)?).map_err(|e| Error::Catalog(format!("{name}: {e}")))
    }

    /// The entry in its native world: nonsymmetric presentations stay
    /// nonsymmetric, symmetric ones are converted to shuffle form.
    pub fn presentation<C: Coefficient>(&self, name: &str) -> Result<Presentation<C>> {
        match self.parsed(name)? {
            ParsedPresentation::Plain(p) => Ok(p),
            ParsedPresentation::Symmetric(s) => to_shuffle(&s),
        }
    }

    /// The entry as a shuffle presentation.
    pub fn shuffle_presentation<C: Coefficient>(&self, name: &str) -> Result<Presentation<C>> {
        let p = self.presentation(name)?;
        if p.sig.mode() == Mode::Shuffle {
            Ok(p)
        } else {
            symmetrize(&p)
        }
    }

    pub fn symmetric<C: Coefficient>(&self, name: &str) -> Result<SymmetricPresentation<C>> {
        match self.parsed(name)? {
            ParsedPresentation::Symmetric(s) => Ok(s),
            ParsedPresentation::Plain(_) => Err(Error::Catalog(format!("`{name}` is not a symmetric presentation"))),
        }
    }

    /// The order stored with an entry. Certificates yield their order.
    pub fn order(&self, name: &str) -> Result<OrderSpec> {
        let text = self.read(&format!("{name}.order.json"))?;
        match TerminationCertificate::from_json(&text) {
            Ok(c) => Ok(c.order_spec().clone()),
            Err(_) => OrderSpec::from_json(&text),
        }
    }

    /// Order for the shuffle form of a nonsymmetric entry: each opposite
    /// generator ranks just above its original.
    pub fn shuffle_order(&self, name: &str) -> Result<OrderSpec> {
        let spec = self.order(name)?;
        if let ParsedPresentation::Plain(p) = self.parsed::<Rational>(name)? {
            if p.sig.mode() == Mode::Nonsymmetric {
                let rank = spec
                    .rank
                    .iter()
                    .flat_map(|g| {
                        let binary = p.sig.lookup(g).map(|id| p.sig.arity(id) == 2).unwrap_or(false);
                        if binary { vec![g.clone(), bar_name(g)] } else { vec![g.clone()] }
                    })
                    .collect();
                return Ok(spec.with_rank(rank));
            }
        }
        Ok(spec)
    }

    pub fn certificate(&self, name: &str) -> Result<TerminationCertificate> {
        TerminationCertificate::from_json(&self.read(&format!("{name}.order.json"))?)
    }

    pub fn has_system(&self, name: &str) -> bool {
        self.exists(&format!("{name}.rules"))
    }

    /// A stored rewriting system with its certificate.
    pub fn system<C: Coefficient>(&self, name: &str) -> Result<Rewriter<C>> {
        let p: Presentation<C> = self.presentation(name)?;
        Rewriter::new(p.sig, p.rules, self.certificate(name)?)
    }

    /// Gröbner basis of a presentation under its stored order, in its
    /// native world or in shuffle form, complete for monomials within caps.
    pub fn completed<C: Coefficient>(&self, name: &str, shuffle: bool, caps: Caps) -> Result<Rewriter<C>> {
        let (p, spec) = if shuffle {
            (self.shuffle_presentation::<C>(name)?, self.shuffle_order(name)?)
        } else {
            (self.presentation::<C>(name)?, self.order(name)?)
        };
        let c = buchberger(&p.sig, &p.all_relations(), &spec, degree_cap(caps))?;
        Rewriter::new(p.sig, c.rules, TerminationCertificate::AdmissibleOrder { order: spec })
    }

    /// Gröbner basis truncated at caps, by linear algebra on ideal slices.
    pub fn truncated_gb<C: Coefficient>(&self, name: &str, shuffle: bool, caps: Caps) -> Result<Rewriter<C>> {
        let (p, spec) = if shuffle {
            (self.shuffle_presentation::<C>(name)?, self.shuffle_order(name)?)
        } else {
            (self.presentation::<C>(name)?, self.order(name)?)
        };
        let rules = linear_gb(&p.sig, &p.all_relations(), &spec, caps.arity, caps.unary)?;
        Rewriter::new(p.sig, rules, TerminationCertificate::AdmissibleOrder { order: spec })
    }

    /// A stored rewriting system completed at caps under its own measure.
    pub fn completed_system<C: Coefficient>(&self, name: &str, caps: Caps) -> Result<KnuthBendix<C>> {
        complete_rewriting(&self.system(name)?, caps, MAX_COMPLETION_RULES)
    }

    /// Resolve a morphism file against its source and target entries.
    pub fn morphism<C: Coefficient>(&self, name: &str) -> Result<OperadMorphism<C>> {
        let raw = parse_morphism(&self.read(&format!("{name}.morph"))?).map_err(|e| Error::Catalog(format!("{name}: {e}")))?;
        let src: ParsedPresentation<C> = self.parsed(&raw.source)?;
        let tgt: ParsedPresentation<C> = self.parsed(&raw.target)?;
        let nonsymmetric = |p: &ParsedPresentation<C>| matches!(p, ParsedPresentation::Plain(q) if q.sig.mode() == Mode::Nonsymmetric);
        let mut images: BTreeMap<String, (Vec<crate::sexpr::RawTerm>, usize)> = BTreeMap::new();
        for (g, terms, line) in raw.images {
            if images.insert(g.clone(), (terms, line)).is_some() {
                return Err(Error::Catalog(format!("{name}: generator `{g}` mapped twice")));
            }
        }
        let mut out = if nonsymmetric(&src) && nonsymmetric(&tgt) {
            let (ParsedPresentation::Plain(s), ParsedPresentation::Plain(t)) = (&src, &tgt) else { unreachable!() };
            let mut imgs = Vec::new();
            for g in s.sig.generators() {
                let (terms, line) = images
                    .remove(&g.name)
                    .ok_or_else(|| Error::Catalog(format!("{name}: no image for `{}`", g.name)))?;
                let trees = raw_terms_to_trees::<C>(&terms, &t.sig).map_err(|e| Error::Catalog(format!("{name}: {e}")))?;
                for (_, tr) in &trees {
                    tr.validate(&t.sig).map_err(|e| Error::Catalog(format!("{name} line {line}: {e}")))?;
                }
                imgs.push(image_polynomial(trees, g.arity as usize, name, &g.name)?);
            }
            OperadMorphism::new(name, s.sig.clone(), t.sig.clone(), imgs)?
        } else {
            let src_view = primary_generators(&src)?;
            let tgt_view = primary_generators(&tgt)?;
            let src_sig = self.shuffle_presentation::<C>(&raw.source)?.sig;
            let tgt_sig = self.shuffle_presentation::<C>(&raw.target)?.sig;
            let table = ShuffleTable::new(&tgt_view)?;
            let mut raw_sig = Signature::new(Mode::Shuffle);
            for (g, a, _) in &tgt_view {
                raw_sig.add(g, *a)?;
            }
            let mut by_name: BTreeMap<String, Polynomial<C>> = BTreeMap::new();
            for (g, arity, sym) in &src_view {
                let (terms, line) =
                    images.remove(g).ok_or_else(|| Error::Catalog(format!("{name}: no image for `{g}`")))?;
                let trees = raw_terms_to_trees::<C>(&terms, &raw_sig).map_err(|e| Error::Catalog(format!("{name} line {line}: {e}")))?;
                let img = table.convert_terms(&trees);
                let img = translate(&img, &table.sig, &tgt_sig)?;
                if img.arity() != *arity as usize && !img.is_zero() {
                    return Err(Error::Catalog(format!("{name}: image of `{g}` has the wrong arity")));
                }
                if *arity == 2 && *sym == Symmetry::None {
                    let swapped: Vec<(C, Tree)> = trees.iter().map(|(c, t)| (c.clone(), t.relabel(&|l| 3 - l))).collect();
                    let bar = translate(&table.convert_terms(&swapped), &table.sig, &tgt_sig)?;
                    by_name.insert(bar_name(g), bar);
                }
                by_name.insert(g.clone(), img);
            }
            let imgs = src_sig
                .generators()
                .iter()
                .map(|g| {
                    by_name
                        .remove(&g.name)
                        .map(|p| if p.is_zero() { Polynomial::zero(g.arity as usize) } else { p })
                        .ok_or_else(|| Error::Catalog(format!("{name}: no image for `{}`", g.name)))
                })
                .collect::<Result<Vec<_>>>()?;
            OperadMorphism::new(name, src_sig, tgt_sig, imgs)?
        };
        if let Some(g) = images.keys().next() {
            return Err(Error::Catalog(format!("{name}: `{g}` is not a generator of `{}`", raw.source)));
        }
        out.source_name = raw.source;
        out.target_name = raw.target;
        Ok(out)
    }

    /// Checks ideal membership in the target of a morphism: by reduction in
    /// a stored rewriting system `rs-<target>` of the same world when there
    /// is one, by exact linear algebra otherwise.
    pub fn membership<C: Coefficient>(&self, target: &str, mode: Mode) -> Result<Membership<C>> {
        let rs = format!("rs-{target}");
        if self.has_system(&rs) {
            let rw: Rewriter<C> = self.system(&rs)?;
            if rw.sig.mode() == mode {
                return Ok(Membership::Rewriting(rw));
            }
        }
        let p: Presentation<C> =
            if mode == Mode::Shuffle { self.shuffle_presentation(target)? } else { self.presentation(target)? };
        Ok(Membership::Linear { sig: p.sig.clone(), relations: p.all_relations() })
    }
}

fn image_polynomial<C: Coefficient>(trees: Vec<(C, Tree)>, arity: usize, name: &str, g: &str) -> Result<Polynomial<C>> {
    let p = Polynomial::from_terms(trees[0].1.arity(), trees).map_err(|e| Error::Catalog(format!("{name}: {e}")))?;
    if p.arity() != arity && !p.is_zero() {
        return Err(Error::Catalog(format!("{name}: image of `{g}` has the wrong arity")));
    }
    Ok(if p.is_zero() { Polynomial::zero(arity) } else { p })
}

/// Generators of an entry as symmetric operations: (name, arity, symmetry).
/// In shuffle presentations a generator `g` with a partner `gbar` counts as
/// one operation without symmetry; others need a symmetry tag.
pub fn primary_generators<C: Coefficient>(p: &ParsedPresentation<C>) -> Result<Vec<(String, u8, Symmetry)>> {
    match p {
        ParsedPresentation::Symmetric(s) => Ok(s.generators.iter().map(|g| (g.name.clone(), g.arity, g.symmetry)).collect()),
        ParsedPresentation::Plain(q) if q.sig.mode() == Mode::Nonsymmetric => {
            Ok(q.sig.generators().iter().map(|g| (g.name.clone(), g.arity, Symmetry::None)).collect())
        }
        ParsedPresentation::Plain(q) => {
            let mut out = Vec::new();
            for g in q.sig.generators() {
                if let Some(base) = g.name.strip_suffix("bar") {
                    if q.sig.lookup(base).is_some() {
                        continue;
                    }
                }
                let sym = if g.arity == 1 || q.sig.lookup(&bar_name(&g.name)).is_some() {
                    Symmetry::None
                } else {
                    q.tag(&g.name).ok_or_else(|| {
                        Error::Catalog(format!("generator `{}` has no opposite and no symmetry tag", g.name))
                    })?
                };
                out.push((g.name.clone(), g.arity, sym));
            }
            Ok(out)
        }
    }
}

/// Rename generators between signatures that share names.
pub fn translate<C: Coefficient>(p: &Polynomial<C>, from: &Signature, to: &Signature) -> Result<Polynomial<C>> {
    let map: Vec<Option<GenId>> = from.generators().iter().map(|g| to.lookup(&g.name)).collect();
    for (g, m) in from.generators().iter().zip(&map) {
        if m.is_none() && p.monomials().any(|t| t.contains_generator(g.id)) {
            return Err(Error::Catalog(format!("generator `{}` is missing from the target", g.name)));
        }
    }
    Ok(p.map_monomials(|t| rename(t, &map)))
}

fn rename(t: &Tree, map: &[Option<GenId>]) -> Tree {
    match t {
        Tree::Leaf(l) => Tree::Leaf(*l),
        Tree::Node(g, kids) => Tree::node(map[g.0 as usize].expect("checked"), kids.iter().map(|k| rename(k, map)).collect()),
    }
}

/// How to decide whether a polynomial vanishes in a target operad.
pub enum Membership<C> {
    Rewriting(Rewriter<C>),
    Linear { sig: Signature, relations: Vec<Polynomial<C>> },
}

impl<C: Coefficient> Membership<C> {
    pub fn sig(&self) -> &Signature {
        match self {
            Membership::Rewriting(rw) => &rw.sig,
            Membership::Linear { sig, .. } => sig,
        }
    }

    /// Whether `p`, written over `from`, is zero in the target.
    pub fn vanishes(&self, p: &Polynomial<C>, from: &Signature) -> Result<bool> {
        let q = translate(p, from, self.sig())?;
        if q.is_zero() {
            return Ok(true);
        }
        match self {
            Membership::Rewriting(rw) => Ok(rw.reduce(&q)?.is_zero()),
            Membership::Linear { sig, relations } => {
                let k = q.monomials().map(|t| t.unary_count()).max().unwrap_or(0);
                Ok(IdealSlice::new(sig, relations, q.arity(), k).contains(&q))
            }
        }
    }
}

/// A morphism of free operads given by generator images.
#[derive(Clone, Debug)]
pub struct OperadMorphism<C = Rational> {
    pub name: String,
    pub source_name: String,
    pub target_name: String,
    pub source: Signature,
    pub target: Signature,
    /// Indexed by source generator id.
    pub images: Vec<Polynomial<C>>,
}

impl<C: Coefficient> OperadMorphism<C> {
    pub fn new(name: &str, source: Signature, target: Signature, images: Vec<Polynomial<C>>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Config("one image per source generator is required".into()));
        }
        for (g, p) in source.generators().iter().zip(&images) {
            if p.arity() != g.arity as usize {
                return Err(Error::Mismatch(format!("image of `{}` has arity {}", g.name, p.arity())));
            }
        }
        if source.mode() != target.mode() {
            return Err(Error::Mismatch("source and target live in different worlds".into()));
        }
        Ok(OperadMorphism {
            name: name.to_string(),
            source_name: String::new(),
            target_name: String::new(),
            source,
            target,
            images,
        })
    }

    /// Image of a monomial. Leaf labels are kept.
    pub fn apply_tree(&self, t: &Tree) -> Polynomial<C> {
        match t {
            Tree::Leaf(l) => Polynomial::monomial(Tree::Leaf(*l)),
            Tree::Node(g, kids) => {
                let kid_images: Vec<Polynomial<C>> = kids.iter().map(|k| self.apply_tree(k)).collect();
                let mut out = Polynomial::zero(t.arity());
                let img = &self.images[g.0 as usize];
                for (shape, c) in img.iter() {
                    // Expand the product of the children's images.
                    let mut partial: Vec<(C, Vec<Tree>)> = vec![(c.clone(), Vec::new())];
                    for ki in &kid_images {
                        let mut next = Vec::new();
                        for (pc, pv) in &partial {
                            for (u, d) in ki.iter() {
                                let mut v = pv.clone();
                                v.push(u.clone());
                                next.push((pc.clone() * d.clone(), v));
                            }
                        }
                        partial = next;
                    }
                    for (pc, subs) in partial {
                        out.add_term(pc, shape.substitute_leaves(&subs).canonicalize());
                    }
                }
                out
            }
        }
    }

    pub fn apply(&self, p: &Polynomial<C>) -> Polynomial<C> {
        let mut out = Polynomial::zero(p.arity());
        for (t, c) in p.iter() {
            out.add_scaled(c, &self.apply_tree(t)).expect("same arity");
        }
        out
    }

    /// `other` after `self`.
    pub fn then(&self, other: &OperadMorphism<C>) -> Result<OperadMorphism<C>> {
        let images = self
            .images
            .iter()
            .map(|p| Ok(other.apply(&translate(p, &self.target, &other.source)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut m = OperadMorphism::new(&format!("{}.{}", other.name, self.name), self.source.clone(), other.target.clone(), images)?;
        m.source_name = self.source_name.clone();
        m.target_name = other.target_name.clone();
        Ok(m)
    }

    /// Shuffle form of a morphism between nonsymmetric operads.
    pub fn symmetrized(&self) -> Result<OperadMorphism<C>> {
        if self.source.mode() != Mode::Nonsymmetric {
            return Ok(self.clone());
        }
        let src = crate::symmetrize::nonsymmetric_table(&self.source)?;
        let tgt = crate::symmetrize::nonsymmetric_table(&self.target)?;
        let mut images = vec![Polynomial::zero(1); src.sig.len()];
        for (g, img) in self.source.generators().iter().zip(&self.images) {
            let terms: Vec<(C, Tree)> = img.iter().map(|(t, c)| (c.clone(), t.clone())).collect();
            let (id, bar, _) = src.entries[g.id.0 as usize];
            images[id.0 as usize] = tgt.convert_terms(&terms);
            if let Some(b) = bar {
                let swapped: Vec<(C, Tree)> = terms.iter().map(|(c, t)| (c.clone(), t.relabel(&|l| 3 - l))).collect();
                images[b.0 as usize] = tgt.convert_terms(&swapped);
            }
        }
        let mut m = OperadMorphism::new(&self.name, src.sig, tgt.sig, images)?;
        m.source_name = self.source_name.clone();
        m.target_name = self.target_name.clone();
        Ok(m)
    }

    /// If each generator maps to a single generator with coefficient one
    /// (after `normalize`), that generator.
    pub fn generator_map(&self, normalize: impl Fn(&Polynomial<C>) -> Result<Polynomial<C>>) -> Result<Vec<GenId>> {
        let mut out = Vec::new();
        for (g, img) in self.source.generators().iter().zip(&self.images) {
            let p = normalize(img)?;
            let single = (p.len() == 1).then(|| p.iter().next().expect("one term")).and_then(|(t, c)| {
                let standard: Vec<Tree> = (1..=g.arity).map(Tree::leaf).collect();
                (c.is_one() && t.children() == standard.as_slice()).then(|| t.generator()).flatten()
            });
            match single {
                Some(h) => out.push(h),
                None => {
                    return Err(Error::Config(format!(
                        "image of `{}` under `{}` is not a single generator of the target",
                        g.name, self.name
                    )))
                }
            }
        }
        Ok(out)
    }
}

/// Outcome of checking a morphism: the first relation whose image does not
/// vanish, if any.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MorphismWitness {
    pub relation: String,
    pub image: String,
}

pub fn verify_morphism<C: Coefficient>(
    f: &OperadMorphism<C>,
    source_relations: &[Polynomial<C>],
    target: &Membership<C>,
) -> Result<Option<MorphismWitness>> {
    for r in source_relations {
        let img = f.apply(r);
        if !target.vanishes(&img, &f.target)? {
            return Ok(Some(MorphismWitness { relation: r.to_sexpr(&f.source), image: img.to_sexpr(&f.target) }));
        }
    }
    Ok(None)
}

/// Rewrite a shuffle presentation in new binary generators. `defs[i]` is
/// the new generator `names[i]` as a combination of the old binary
/// generators `(g 1 2)`; unary generators are kept.
pub fn change_generators<C: Coefficient>(
    pres: &Presentation<C>,
    names: &[String],
    defs: &[Polynomial<C>],
) -> Result<Presentation<C>> {
    let old = pres.sig.binary();
    if names.len() != old.len() || defs.len() != old.len() {
        return Err(Error::SingularTransformation);
    }
    let standard = |g: GenId| Tree::binary(g, Tree::leaf(1), Tree::leaf(2));
    let mut matrix = Vec::new();
    for d in defs {
        if d.monomials().any(|t| t.vertex_count() != 1 || !old.iter().any(|&g| standard(g) == *t)) {
            return Err(Error::Config("definitions must combine the old binary generators".into()));
        }
        matrix.push(old.iter().map(|&g| d.coefficient(&standard(g))).collect::<Vec<C>>());
    }
    let inv = invert(&matrix).ok_or(Error::SingularTransformation)?;
    let mut sig = Signature::new(pres.sig.mode());
    let new_ids: Vec<GenId> = names.iter().map(|n| sig.add(n, 2)).collect::<Result<_>>()?;
    for u in pres.sig.unary() {
        sig.add(pres.sig.name(u), 1)?;
    }
    let mut images = Vec::new();
    for g in pres.sig.ids() {
        if pres.sig.arity(g) == 1 {
            let u = sig.require(pres.sig.name(g))?;
            images.push(Polynomial::monomial(Tree::unary(u, Tree::leaf(1))));
        } else {
            let j = old.iter().position(|&h| h == g).expect("binary");
            let mut p = Polynomial::zero(2);
            for (i, id) in new_ids.iter().enumerate() {
                p.add_term(inv[j][i].clone(), standard(*id));
            }
            images.push(p);
        }
    }
    let f = OperadMorphism::new("change", pres.sig.clone(), sig.clone(), images)?;
    let mut by_arity: BTreeMap<usize, Vec<Polynomial<C>>> = BTreeMap::new();
    for r in &pres.relations {
        by_arity.entry(r.arity()).or_default().push(f.apply(r));
    }
    let mut out = Presentation::new(&pres.name, sig);
    for polys in by_arity.values() {
        out.relations.extend(span_basis(polys));
    }
    Ok(out)
}

/// Shuffle presentation of Rota-Baxter Lie algebras of weight `lambda`.
pub fn rblie_weight<C: Coefficient>(lambda: &C) -> Result<Presentation<C>> {
    let mut sp = SymmetricPresentation::new("rblie-weight");
    sp.add_generator("bracket", 2, Symmetry::Antisymmetric)?;
    sp.add_generator("R", 1, Symmetry::None)?;
    let b = sp.sig.require("bracket")?;
    let r = sp.sig.require("R")?;
    let (l1, l2, l3) = (Tree::leaf(1), Tree::leaf(2), Tree::leaf(3));
    let br = |x: Tree, y: Tree| Tree::binary(b, x, y);
    let rr = |x: Tree| Tree::unary(r, x);
    let one = C::one();
    sp.add_relation(vec![
        (one.clone(), br(br(l1.clone(), l2.clone()), l3.clone())),
        (-one.clone(), br(br(l1.clone(), l3.clone()), l2.clone())),
        (-one.clone(), br(l1.clone(), br(l2.clone(), l3.clone()))),
    ])?;
    sp.add_relation(vec![
        (one.clone(), br(rr(l1.clone()), rr(l2.clone()))),
        (-one.clone(), rr(br(rr(l1.clone()), l2.clone()))),
        (-one.clone(), rr(br(l1.clone(), rr(l2.clone())))),
        (-lambda.clone(), rr(br(l1, l2))),
    ])?;
    to_shuffle(&sp)
}

/// The rescaling `R -> -lambda R` from weight `lambda` to weight `-1`.
pub fn weight_normalize<C: Coefficient>(lambda: &C) -> Result<(OperadMorphism<C>, Presentation<C>, Presentation<C>)> {
    if lambda.is_zero() {
        return Err(Error::ZeroWeight);
    }
    let source = rblie_weight(lambda)?;
    let target = rblie_weight(&-C::one())?;
    let b = target.sig.require("bracket")?;
    let r = target.sig.require("R")?;
    let images = source
        .sig
        .ids()
        .map(|g| {
            if source.sig.name(g) == "R" {
                Polynomial::term(-lambda.clone(), Tree::unary(r, Tree::leaf(1)))
            } else {
                Polynomial::monomial(Tree::binary(b, Tree::leaf(1), Tree::leaf(2)))
            }
        })
        .collect();
    let f = OperadMorphism::new("weight", source.sig.clone(), target.sig.clone(), images)?;
    Ok((f, source, target))
}
