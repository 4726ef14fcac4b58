//! Presentations and the line-oriented presentation file format.
//!
//! ```text
//! # tridendriform operad
//! name tridend
//! mode nonsymmetric
//! gen mul arity 2
//! gen succ arity 2
//! gen prec arity 2
//! rel: (prec (prec 1 2) 3) - (prec 1 (prec 2 3)) - (prec 1 (succ 2 3)) - (prec 1 (mul 2 3))
//! rule: (mul (R 1) 2) -> (succ 1 2)
//! ```
//!
//! In `mode symmetric` files generators carry a `sym`, `antisym` or `nosym`
//! tag and relation terms may list their arguments in any order.

use crate::error::{Error, Result};
use crate::poly::{raw_terms_to_trees, Polynomial};
use crate::rewriting::RewriteRule;
use crate::scalar::{Coefficient, Rational};
use crate::sexpr::{tokenize, Cursor, RawTerm, Tok};
use crate::signature::{Mode, Signature, Symmetry};
use crate::tree::Tree;

/// A presentation of a shuffle or nonsymmetric operad. Rewriting-system
/// files populate `rules` instead of (or besides) `relations`.
#[derive(Clone, Debug)]
pub struct Presentation<C = Rational> {
    pub name: String,
    pub sig: Signature,
    pub relations: Vec<Polynomial<C>>,
    pub rules: Vec<RewriteRule<C>>,
    /// Symmetry of shuffle generators that stand for a symmetric or
    /// antisymmetric operation. Only used when resolving morphisms.
    pub tags: Vec<(String, Symmetry)>,
}

impl<C: Coefficient> Presentation<C> {
    pub fn new(name: &str, sig: Signature) -> Self {
        Presentation { name: name.to_string(), sig, relations: Vec::new(), rules: Vec::new(), tags: Vec::new() }
    }

    pub fn tag(&self, name: &str) -> Option<Symmetry> {
        self.tags.iter().find(|t| t.0 == name).map(|t| t.1)
    }

    /// Relations together with every rule read as `lhs - rhs`.
    pub fn all_relations(&self) -> Vec<Polynomial<C>> {
        self.relations.iter().cloned().chain(self.rules.iter().map(|r| r.as_relation())).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("name {}\nmode {}\n", self.name, self.sig.mode().as_str());
        for g in self.sig.generators() {
            match self.tag(&g.name) {
                Some(t) => s.push_str(&format!("gen {} arity {} {}\n", g.name, g.arity, t.as_str())),
                None => s.push_str(&format!("gen {} arity {}\n", g.name, g.arity)),
            }
        }
        for r in &self.relations {
            s.push_str(&format!("rel: {}\n", r.to_sexpr(&self.sig)));
        }
        for r in &self.rules {
            s.push_str(&format!("rule: {}\n", r.to_text(&self.sig)));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricGenerator {
    pub name: String,
    pub arity: u8,
    pub symmetry: Symmetry,
}

/// A presentation of a symmetric operad. Relation terms are trees whose
/// leaves are a permutation of `1..=n`, in any planar order.
#[derive(Clone, Debug)]
pub struct SymmetricPresentation<C = Rational> {
    pub name: String,
    pub generators: Vec<SymmetricGenerator>,
    /// Names resolve through this signature; its mode is not enforced.
    pub sig: Signature,
    pub relations: Vec<Vec<(C, Tree)>>,
}

impl<C: Coefficient> SymmetricPresentation<C> {
    pub fn new(name: &str) -> Self {
        SymmetricPresentation {
            name: name.to_string(),
            generators: Vec::new(),
            sig: Signature::new(Mode::Shuffle),
            relations: Vec::new(),
        }
    }

    pub fn add_generator(&mut self, name: &str, arity: u8, symmetry: Symmetry) -> Result<()> {
        if arity == 1 && symmetry != Symmetry::None {
            return Err(Error::Config(format!("unary generator `{name}` cannot carry a symmetry")));
        }
        self.sig.add(name, arity)?;
        self.generators.push(SymmetricGenerator { name: name.to_string(), arity, symmetry });
        Ok(())
    }

    pub fn symmetry(&self, name: &str) -> Option<Symmetry> {
        self.generators.iter().find(|g| g.name == name).map(|g| g.symmetry)
    }

    /// Add a relation after checking that each term's leaves are a
    /// permutation of the same `1..=n`.
    pub fn add_relation(&mut self, terms: Vec<(C, Tree)>) -> Result<()> {
        check_permutation_terms(&terms)?;
        self.relations.push(terms);
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("name {}\nmode symmetric\n", self.name);
        for g in &self.generators {
            s.push_str(&format!("gen {} arity {} {}\n", g.name, g.arity, g.symmetry.as_str()));
        }
        for r in &self.relations {
            s.push_str("rel: ");
            for (i, (c, t)) in r.iter().enumerate() {
                let neg = c.is_negative();
                let mag = if neg { -c.clone() } else { c.clone() };
                match (i, neg) {
                    (0, true) => s.push('-'),
                    (0, false) => {}
                    (_, true) => s.push_str(" - "),
                    (_, false) => s.push_str(" + "),
                }
                if !mag.is_one() {
                    s.push_str(&format!("{mag} "));
                }
                s.push_str(&t.to_sexpr(&self.sig));
            }
            s.push('\n');
        }
        s
    }
}

fn check_permutation_terms<C>(terms: &[(C, Tree)]) -> Result<()> {
    let Some(n) = terms.first().map(|t| t.1.arity()) else {
        return Err(Error::InvalidMonomial("empty relation".into()));
    };
    for (_, t) in terms {
        let mut l = t.leaves();
        l.sort_unstable();
        if l != (1..=n as u8).collect::<Vec<_>>() {
            return Err(Error::InvalidMonomial(format!("leaves {:?} are not a permutation of 1..{n}", t.leaves())));
        }
    }
    Ok(())
}

/// Result of parsing a presentation file.
#[derive(Clone, Debug)]
pub enum ParsedPresentation<C = Rational> {
    Plain(Presentation<C>),
    Symmetric(SymmetricPresentation<C>),
}

impl<C: Coefficient> ParsedPresentation<C> {
    pub fn name(&self) -> &str {
        match self {
            ParsedPresentation::Plain(p) => &p.name,
            ParsedPresentation::Symmetric(p) => &p.name,
        }
    }
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Attach a line/column to errors that do not carry one.
fn locate(e: Error, line: usize, col: usize) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => perr(line, col, other.to_string()),
    }
}

/// Strip a trailing `#` comment.
fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Split `keyword rest`; returns the keyword, the rest and its column.
fn split_keyword(line: &str) -> Option<(&str, &str, usize)> {
    let start = line.len() - line.trim_start().len();
    let body = &line[start..];
    if body.is_empty() {
        return None;
    }
    let kw_end = body.find(char::is_whitespace).unwrap_or(body.len());
    let (kw, rest) = body.split_at(kw_end);
    let rest_col = start + kw_end + 1;
    Some((kw, rest, rest_col))
}

fn parse_poly_tokens(text: &str, line: usize, col: usize) -> Result<Vec<RawTerm>> {
    let toks = tokenize(text, line, col)?;
    let mut cur = Cursor::new(&toks, (line, col + text.chars().count()));
    let p = cur.polynomial()?;
    if !cur.at_end() {
        let (l, c) = cur.here();
        return Err(perr(l, c, "unexpected input after polynomial"));
    }
    Ok(p)
}

/// Parse a presentation file.
pub fn parse_presentation<C: Coefficient>(text: &str) -> Result<ParsedPresentation<C>> {
    let mut name = String::from("unnamed");
    let mut mode: Option<(&str, usize)> = None;
    let mut gens: Vec<(String, u8, Symmetry, usize)> = Vec::new();
    let mut rels: Vec<(&str, usize, usize)> = Vec::new();
    let mut rules: Vec<(&str, usize, usize)> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw_line);
        let Some((kw, rest, col)) = split_keyword(line) else { continue };
        match kw {
            "name" => {
                let n = rest.trim();
                if n.is_empty() || n.contains(char::is_whitespace) {
                    return Err(perr(lineno, col, "expected a single name"));
                }
                name = n.to_string();
            }
            "mode" => {
                if mode.is_some() {
                    return Err(perr(lineno, 1, "mode declared twice"));
                }
                mode = Some((rest.trim(), lineno));
            }
            "gen" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                if !(words.len() == 3 || words.len() == 4) || words[1] != "arity" {
                    return Err(perr(lineno, col, "expected `gen <name> arity <1|2> [sym|antisym|nosym]`"));
                }
                let arity = match words[2] {
                    "1" => 1,
                    "2" => 2,
                    other => return Err(perr(lineno, col, format!("arity must be 1 or 2, found `{other}`"))),
                };
                let sym = match words.get(3) {
                    None => Symmetry::None,
                    Some(w) => Symmetry::parse(w).ok_or_else(|| perr(lineno, col, format!("unknown symmetry tag `{w}`")))?,
                };
                gens.push((words[0].to_string(), arity, sym, lineno));
            }
            "rel:" => rels.push((rest, lineno, col)),
            "rule:" => rules.push((rest, lineno, col)),
            other => return Err(perr(lineno, 1, format!("unknown directive `{other}`"))),
        }
    }
    let Some((mode_word, mode_line)) = mode else {
        return Err(perr(1, 1, "missing `mode` line"));
    };
    match mode_word {
        "symmetric" => {
            let mut sp = SymmetricPresentation::new(&name);
            for (g, a, s, l) in &gens {
                sp.add_generator(g, *a, *s).map_err(|e| locate(e, *l, 1))?;
            }
            if let Some((_, l, _)) = rules.first() {
                return Err(perr(*l, 1, "rules are not supported in symmetric presentations"));
            }
            for (body, l, c) in rels {
                let raw = parse_poly_tokens(body, l, c)?;
                let terms = raw_terms_to_trees::<C>(&raw, &sp.sig)?;
                let merged = merge_terms(terms);
                if merged.is_empty() {
                    return Err(perr(l, c, "relation is zero"));
                }
                sp.add_relation(merged).map_err(|e| locate(e, l, c))?;
            }
            Ok(ParsedPresentation::Symmetric(sp))
        }
        "shuffle" | "nonsymmetric" => {
            let m = if mode_word == "shuffle" { Mode::Shuffle } else { Mode::Nonsymmetric };
            let mut sig = Signature::new(m);
            let mut tags = Vec::new();
            for (g, a, s, l) in &gens {
                if *s != Symmetry::None {
                    if m == Mode::Nonsymmetric {
                        return Err(perr(*l, 1, "symmetry tags are not allowed in nonsymmetric mode"));
                    }
                    tags.push((g.clone(), *s));
                }
                sig.add(g, *a).map_err(|e| locate(e, *l, 1))?;
            }
            let mut pres = Presentation::new(&name, sig);
            pres.tags = tags;
            for (body, l, c) in rels {
                let p = parse_checked_polynomial::<C>(body, l, c, &pres.sig)?;
                if p.is_zero() {
                    return Err(perr(l, c, "relation is zero"));
                }
                pres.relations.push(p);
            }
            for (body, l, c) in rules {
                let r = parse_rule::<C>(body, l, c, &pres.sig)?;
                pres.rules.push(r);
            }
            Ok(ParsedPresentation::Plain(pres))
        }
        other => Err(perr(mode_line, 1, format!("unknown mode `{other}`"))),
    }
}

/// Parse a file that must describe a shuffle or nonsymmetric presentation.
pub fn parse_plain<C: Coefficient>(text: &str) -> Result<Presentation<C>> {
    match parse_presentation(text)? {
        ParsedPresentation::Plain(p) => Ok(p),
        ParsedPresentation::Symmetric(_) => Err(Error::Config("expected a shuffle or nonsymmetric presentation".into())),
    }
}

fn merge_terms<C: Coefficient>(terms: Vec<(C, Tree)>) -> Vec<(C, Tree)> {
    let mut out: Vec<(C, Tree)> = Vec::new();
    for (c, t) in terms {
        match out.iter_mut().find(|(_, u)| *u == t) {
            Some(e) => e.0 = e.0.clone() + c,
            None => out.push((c, t)),
        }
    }
    out.retain(|(c, _)| !c.is_zero());
    out
}

fn to_polynomial<C: Coefficient>(raw: &[RawTerm], sig: &Signature, line: usize, col: usize) -> Result<Polynomial<C>> {
    let terms = raw_terms_to_trees::<C>(raw, sig)?;
    for ((_, r), (_, t)) in raw.iter().zip(&terms) {
        let (l, c) = r.position();
        t.validate(sig).map_err(|e| locate(e, l, c))?;
    }
    let arity = terms[0].1.arity();
    Polynomial::from_terms(arity, terms).map_err(|e| locate(e, line, col))
}

fn parse_checked_polynomial<C: Coefficient>(text: &str, line: usize, col: usize, sig: &Signature) -> Result<Polynomial<C>> {
    let raw = parse_poly_tokens(text, line, col)?;
    to_polynomial(&raw, sig, line, col)
}

fn parse_rule<C: Coefficient>(text: &str, line: usize, col: usize, sig: &Signature) -> Result<RewriteRule<C>> {
    let toks = tokenize(text, line, col)?;
    let mut cur = Cursor::new(&toks, (line, col + text.chars().count()));
    let lhs_raw = cur.tree()?;
    match cur.next().map(|t| &t.tok) {
        Some(Tok::Arrow) => {}
        _ => return Err(perr(line, col, "expected `lhs -> rhs`")),
    }
    let zero_rhs = matches!(cur.remaining(), [t] if t.tok == Tok::Atom("0".into()));
    let rhs = if zero_rhs { None } else { Some(cur.polynomial()?) };
    if !zero_rhs && !cur.at_end() {
        let (l, c) = cur.here();
        return Err(perr(l, c, "unexpected input after rule"));
    }
    let (l0, c0) = lhs_raw.position();
    let lhs = Tree::from_raw(&lhs_raw, sig)?;
    lhs.validate(sig).map_err(|e| locate(e, l0, c0))?;
    let rhs = match rhs {
        Some(raw) => to_polynomial(&raw, sig, line, col)?,
        None => Polynomial::zero(lhs.arity()),
    };
    RewriteRule::new(lhs, rhs).map_err(|e| locate(e, line, col))
}

/// A morphism file before its images are resolved against presentations.
#[derive(Clone, Debug)]
pub struct RawMorphism {
    pub name: String,
    pub source: String,
    pub target: String,
    /// (generator name, image terms, line)
    pub images: Vec<(String, Vec<RawTerm>, usize)>,
}

/// Parse a morphism file: `name`, `source`, `target` and `map g -> poly`
/// lines.
pub fn parse_morphism(text: &str) -> Result<RawMorphism> {
    let (mut name, mut source, mut target) = (None, None, None);
    let mut images = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw_line);
        let Some((kw, rest, col)) = split_keyword(line) else { continue };
        let word = || {
            let w = rest.trim();
            if w.is_empty() || w.contains(char::is_whitespace) {
                Err(perr(lineno, col, format!("expected a single word after `{kw}`")))
            } else {
                Ok(w.to_string())
            }
        };
        match kw {
            "name" => name = Some(word()?),
            "source" => source = Some(word()?),
            "target" => target = Some(word()?),
            "map" => {
                let Some(arrow) = rest.find("->") else {
                    return Err(perr(lineno, col, "expected `map <generator> -> <polynomial>`"));
                };
                let g = rest[..arrow].trim();
                if g.is_empty() || g.contains(char::is_whitespace) {
                    return Err(perr(lineno, col, "expected a generator name before `->`"));
                }
                let body_col = col + arrow + 2;
                let terms = parse_poly_tokens(&rest[arrow + 2..], lineno, body_col)?;
                images.push((g.to_string(), terms, lineno));
            }
            other => return Err(perr(lineno, 1, format!("unknown directive `{other}`"))),
        }
    }
    let missing = |what: &str| Error::Parse { line: 1, col: 1, msg: format!("missing `{what}` line") };
    Ok(RawMorphism {
        name: name.unwrap_or_else(|| "unnamed".into()),
        source: source.ok_or_else(|| missing("source"))?,
        target: target.ok_or_else(|| missing("target"))?,
        images,
    })
}
