//! Recursive-descent parser for the `.lso` formula syntax.
//!
//! Precedence from tightest: `!`, `&`, `|`, `->` (right-associative),
//! `<->`. Quantifier bodies extend as far right as possible.

use std::collections::HashMap;

use super::ast::*;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Lt,
    Gt,
    Colon,
    EqSign,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let tok = if text[i..].starts_with("<->") {
            i += 3;
            Tok::DArrow
        } else if text[i..].starts_with("->") {
            i += 2;
            Tok::Arrow
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Int(text[start..i].parse().map_err(|_| Error::Syntax { pos: start, msg: "integer too large".into() })?)
        } else {
            i += 1;
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '~' => Tok::Tilde,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                ':' => Tok::Colon,
                '=' => Tok::EqSign,
                '!' => Tok::Bang,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                _ => return Err(Error::Syntax { pos: start, msg: format!("unexpected character {c:?}") }),
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

fn quantifier(word: &str) -> Option<(Quant, bool, bool)> {
    // (kind, node-restricted, second-order)
    Some(match word {
        "E" => (Quant::Exists, false, false),
        "A" => (Quant::Forall, false, false),
        "EN" => (Quant::Exists, true, false),
        "AN" => (Quant::Forall, true, false),
        "E2" => (Quant::Exists, false, true),
        "A2" => (Quant::Forall, false, true),
        _ => return None,
    })
}

fn indexed(word: &str, prefix: &str) -> Option<usize> {
    let rest = word.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|&i| i >= 1)
}

fn is_fo_var(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase())
        && !matches!(s, "true" | "false")
        && indexed(s, "bit").is_none()
        && indexed(s, "link").is_none()
}

fn is_so_var(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase()) && quantifier(s).is_none()
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.here(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Option<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Some(s)
            }
            _ => None,
        }
    }

    fn fo_var(&mut self) -> Result<String> {
        let at = self.here();
        match self.ident() {
            Some(v) if is_fo_var(&v) => Ok(v),
            _ => Err(Error::Syntax { pos: at, msg: "expected a first-order variable".into() }),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::DArrow) {
            let rhs = self.implication()?;
            lhs = iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.conjunction()?;
            lhs = or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            lhs = and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Bang) {
            return Ok(not(self.unary()?));
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(f);
        }
        let start = self.pos;
        let word = match self.ident() {
            Some(w) => w,
            None => return self.err("expected a formula"),
        };
        if let Some((q, node, second)) = quantifier(&word) {
            return if second { self.so_quantifier(q) } else { self.fo_quantifier(q, node) };
        }
        match word.as_str() {
            "true" => return Ok(tt()),
            "false" => return Ok(ff()),
            _ => {}
        }
        if let Some(i) = indexed(&word, "bit") {
            self.expect(Tok::LParen, "'('")?;
            let x = self.fo_var()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(Formula::Bit(i, x));
        }
        if let Some(i) = indexed(&word, "link") {
            self.expect(Tok::LParen, "'('")?;
            let x = self.fo_var()?;
            self.expect(Tok::Comma, "','")?;
            let y = self.fo_var()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(Formula::Link(i, x, y));
        }
        if is_so_var(&word) {
            self.expect(Tok::LParen, "'('")?;
            let mut args = vec![self.fo_var()?];
            while self.eat(&Tok::Comma) {
                args.push(self.fo_var()?);
            }
            self.expect(Tok::RParen, "')'")?;
            return Ok(Formula::Rel(word, args));
        }
        if is_fo_var(&word) {
            self.expect(Tok::EqSign, "'='")?;
            let y = self.fo_var()?;
            return Ok(Formula::Eq(word, y));
        }
        self.pos = start;
        self.err(format!("unexpected {word:?}"))
    }

    fn fo_quantifier(&mut self, q: Quant, node: bool) -> Result<Formula> {
        let radius = if self.eat(&Tok::Lt) {
            let r = match self.peek() {
                Some(Tok::Int(r)) => *r,
                _ => return self.err("expected a radius"),
            };
            self.pos += 1;
            self.expect(Tok::Gt, "'>'")?;
            Some(r)
        } else {
            None
        };
        let var = self.fo_var()?;
        let range = if self.eat(&Tok::Tilde) {
            let anchor_pos = self.here();
            let anchor = self.fo_var()?;
            if anchor == var {
                return Err(Error::Syntax { pos: anchor_pos, msg: format!("bounded quantifier binds its own anchor {var}") });
            }
            match radius {
                Some(r) => Range::Within(anchor, r),
                None => Range::Adjacent(anchor),
            }
        } else {
            if radius.is_some() {
                return self.err("radius needs an anchor: Q <r> y ~ x");
            }
            Range::All
        };
        self.expect(Tok::Dot, "'.'")?;
        let body = self.formula()?;
        Ok(Formula::Fo { q, var, range, node, body: Box::new(body) })
    }

    fn so_quantifier(&mut self, q: Quant) -> Result<Formula> {
        let var = match self.ident() {
            Some(v) if is_so_var(&v) => v,
            _ => return self.err("expected a relation variable"),
        };
        self.expect(Tok::Colon, "':'")?;
        let arity = match self.peek() {
            Some(Tok::Int(k)) if *k >= 1 => *k,
            _ => return self.err("expected a positive arity"),
        };
        self.pos += 1;
        self.expect(Tok::Dot, "'.'")?;
        let body = self.formula()?;
        Ok(Formula::So { q, var, arity, body: Box::new(body) })
    }
}

pub fn parse(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    check_arities(&f)?;
    Ok(f)
}

/// Every relation variable must be used with one arity, matching its binder.
pub fn check_arities(f: &Formula) -> Result<()> {
    fn go(f: &Formula, scope: &mut Vec<(String, usize)>, free: &mut HashMap<String, usize>) -> Result<()> {
        match f {
            Formula::Rel(name, args) => {
                let expected = scope.iter().rev().find(|(n, _)| n == name).map(|(_, k)| *k);
                let expected = match expected {
                    Some(k) => k,
                    None => *free.entry(name.clone()).or_insert(args.len()),
                };
                if expected != args.len() {
                    return Err(Error::ArityMismatch { var: name.clone(), expected, found: args.len() });
                }
                Ok(())
            }
            Formula::Not(a) => go(a, scope, free),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                go(a, scope, free)?;
                go(b, scope, free)
            }
            Formula::Fo { body, .. } => go(body, scope, free),
            Formula::So { var, arity, body, .. } => {
                scope.push((var.clone(), *arity));
                let r = go(body, scope, free);
                scope.pop();
                r
            }
            _ => Ok(()),
        }
    }
    go(f, &mut Vec::new(), &mut HashMap::new())
}
