//! Tokenizer and raw syntax for the prefix S-expression grammar.
//!
//! Monomials are written `(genname child child)` with leaves as decimal
//! integers. Polynomials are sums of optionally-weighted monomials:
//! `(prec 1 (succ 2 3)) - 1/2 (mul (mul 1 2) 3)`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::scalar::parse_rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Open,
    Close,
    Plus,
    Minus,
    Star,
    Arrow,
    Atom(String),
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(text: &str, line: usize, col0: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        let simple = match c {
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Some(Tok::Arrow)
            }
            '-' => Some(Tok::Minus),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, line, col });
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() && !"()+-*".contains(chars[i]) {
            i += 1;
        }
        out.push(Token { tok: Tok::Atom(chars[start..i].iter().collect()), line, col });
    }
    Ok(out)
}

/// Tree as written, before generator names are resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTree {
    Leaf { label: u32, line: usize, col: usize },
    Node { name: String, children: Vec<RawTree>, line: usize, col: usize },
}

impl RawTree {
    pub fn position(&self) -> (usize, usize) {
        match self {
            RawTree::Leaf { line, col, .. } | RawTree::Node { line, col, .. } => (*line, *col),
        }
    }
}

/// One term of a raw polynomial.
pub type RawTerm = ((BigInt, BigInt), RawTree);

pub struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    end: (usize, usize),
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Token], end: (usize, usize)) -> Self {
        Cursor { toks, pos: 0, end }
    }

    pub fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + k)
    }

    pub fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    pub fn remaining(&self) -> &'a [Token] {
        &self.toks[self.pos.min(self.toks.len())..]
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    pub fn tree(&mut self) -> Result<RawTree> {
        let (line, col) = self.here();
        match self.next().map(|t| &t.tok) {
            Some(Tok::Atom(a)) => {
                let label: u32 = a
                    .parse()
                    .map_err(|_| err(line, col, format!("expected a leaf label, found `{a}`")))?;
                if label == 0 {
                    return Err(err(line, col, "leaf labels start at 1"));
                }
                Ok(RawTree::Leaf { label, line, col })
            }
            Some(Tok::Open) => {
                let (nl, nc) = self.here();
                let name = match self.next().map(|t| &t.tok) {
                    Some(Tok::Atom(a)) => a.clone(),
                    _ => return Err(err(nl, nc, "expected a generator name after `(`")),
                };
                let mut children = Vec::new();
                loop {
                    match self.peek().map(|t| &t.tok) {
                        Some(Tok::Close) => {
                            self.next();
                            break;
                        }
                        None => {
                            let (l, c) = self.here();
                            return Err(err(l, c, "unclosed `(`"));
                        }
                        _ => children.push(self.tree()?),
                    }
                }
                Ok(RawTree::Node { name, children, line, col })
            }
            Some(t) => Err(err(line, col, format!("unexpected token {t:?}"))),
            None => Err(err(line, col, "unexpected end of input")),
        }
    }

    /// Parse a polynomial; stops at end of input or at `->`.
    pub fn polynomial(&mut self) -> Result<Vec<RawTerm>> {
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            match self.peek().map(|t| &t.tok) {
                None | Some(Tok::Arrow) => break,
                _ => {}
            }
            let mut negative = false;
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) if !first => {
                    self.next();
                }
                Some(Tok::Minus) => {
                    self.next();
                    negative = true;
                }
                Some(_) if first => {}
                _ => {
                    let (l, c) = self.here();
                    return Err(err(l, c, "expected `+` or `-` between terms"));
                }
            }
            first = false;
            let mut coeff = (BigInt::from(1), BigInt::from(1));
            if let Some(Tok::Atom(a)) = self.peek().map(|t| &t.tok) {
                let followed = matches!(
                    self.peek_at(1).map(|t| &t.tok),
                    Some(Tok::Open) | Some(Tok::Star) | Some(Tok::Atom(_))
                );
                if followed || a.contains('/') {
                    let (l, c) = self.here();
                    coeff = parse_rational(a)
                        .ok_or_else(|| err(l, c, format!("malformed coefficient `{a}`")))?;
                    self.next();
                    if let Some(Tok::Star) = self.peek().map(|t| &t.tok) {
                        self.next();
                    }
                }
            }
            if negative {
                coeff.0 = -coeff.0;
            }
            let tree = self.tree()?;
            terms.push((coeff, tree));
        }
        if terms.is_empty() {
            let (l, c) = self.here();
            return Err(err(l, c, "empty polynomial"));
        }
        Ok(terms)
    }
}

pub fn parse_raw_tree(text: &str) -> Result<RawTree> {
    let toks = tokenize(text, 1, 1)?;
    let mut cur = Cursor::new(&toks, (1, text.len() + 1));
    let t = cur.tree()?;
    if !cur.at_end() {
        let (l, c) = cur.here();
        return Err(err(l, c, "trailing input after monomial"));
    }
    Ok(t)
}

pub fn parse_raw_polynomial(text: &str) -> Result<Vec<RawTerm>> {
    let toks = tokenize(text, 1, 1)?;
    let mut cur = Cursor::new(&toks, (1, text.len() + 1));
    let p = cur.polynomial()?;
    if !cur.at_end() {
        let (l, c) = cur.here();
        return Err(err(l, c, "trailing input after polynomial"));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_forms() {
        let p = parse_raw_polynomial("-(a 1 2) + 1/2 (b 1 2) - 3*(c 1 2)").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[0].0 .0, BigInt::from(-1));
        assert_eq!(p[1].0, (BigInt::from(1), BigInt::from(2)));
        assert_eq!(p[2].0 .0, BigInt::from(-3));
    }

    #[test]
    fn bare_leaf_term() {
        let p = parse_raw_polynomial("1").unwrap();
        assert!(matches!(p[0].1, RawTree::Leaf { label: 1, .. }));
    }

    #[test]
    fn bad_coefficient_reports_position() {
        match parse_raw_polynomial("(a 1 2) + 1/0 (a 1 2)") {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 11),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unclosed_paren() {
        assert!(parse_raw_tree("(a 1 (b 2 3)").is_err());
    }
}
