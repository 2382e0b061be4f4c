//! Textual grammar for polynomials.
//!
//! ```text
//! poly   := term (('+'|'-') term)*
//! term   := coeff? factor ('*' factor)*  | coeff
//! factor := var | 's(' word ')' | '(' poly ')' | factor '^' int
//! word   := var ('*'? var)*
//! var    := [A-Za-z][A-Za-z0-9]*
//! coeff  := int | int '/' int | decimal
//! ```
//!
//! Inside `s(...)` juxtaposed names such as `x1x2` are segmented greedily
//! against the declared variable names; `*` separators are always accepted.
//! Printing always emits `*` separators, so print → parse is the identity on
//! canonical forms.

use super::coeff::{rat_from_str, Coeff, Rat};
use super::poly::{NcStatePoly, StatePoly};
use super::word::{NcWord, Var};
use num_traits::One;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

/// Maps variable names to indices. Names are matched case sensitively.
#[derive(Debug, Clone, Default)]
pub struct VarTable {
    names: Vec<String>,
    index: HashMap<String, Var>,
}

impl VarTable {
    pub fn new(names: impl IntoIterator<Item = String>) -> Self {
        let mut t = VarTable::default();
        for n in names {
            t.insert(&n);
        }
        t
    }

    pub fn insert(&mut self, name: &str) -> Var {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.names.len() as Var;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    pub fn get(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Greedy longest-match segmentation of a juxtaposed word like `x1x2`.
    fn segment(&self, text: &str) -> Option<Vec<Var>> {
        let mut out = Vec::new();
        let mut rest = text;
        'outer: while !rest.is_empty() {
            // longest declared name that prefixes `rest`
            let mut best: Option<(usize, Var)> = None;
            for (name, &v) in &self.index {
                if rest.starts_with(name.as_str())
                    && best.map(|(l, _)| name.len() > l).unwrap_or(true)
                {
                    best = Some((name.len(), v));
                }
            }
            if let Some((l, v)) = best {
                out.push(v);
                rest = &rest[l..];
                continue 'outer;
            }
            return None;
        }
        Some(out)
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next_tok(&mut self) -> Result<Tok, ParseError> {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.bump(c);
            } else if c == '#' {
                while let Some(c) = self.peek_char() {
                    if c == '\n' {
                        break;
                    }
                    self.bump(c);
                }
            } else {
                break;
            }
        }
        let c = match self.peek_char() {
            None => return Ok(Tok::Eof),
            Some(c) => c,
        };
        match c {
            '+' => {
                self.bump(c);
                Ok(Tok::Plus)
            }
            '-' => {
                self.bump(c);
                Ok(Tok::Minus)
            }
            '*' => {
                self.bump(c);
                Ok(Tok::Star)
            }
            '^' => {
                self.bump(c);
                Ok(Tok::Caret)
            }
            '(' => {
                self.bump(c);
                Ok(Tok::LParen)
            }
            ')' => {
                self.bump(c);
                Ok(Tok::RParen)
            }
            c if c.is_ascii_digit() => {
                let start = self.pos;
                while let Some(c) = self.peek_char() {
                    if c.is_ascii_digit() || c == '.' || c == '/' {
                        // `p/q` only when followed by a digit; a slash not
                        // followed by a digit belongs to the caller.
                        if c == '/' {
                            let next = self.src[self.pos + 1..].chars().next();
                            if !next.map(|d| d.is_ascii_digit()).unwrap_or(false) {
                                break;
                            }
                        }
                        self.bump(c);
                    } else {
                        break;
                    }
                }
                Ok(Tok::Number(self.src[start..self.pos].to_string()))
            }
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while let Some(c) = self.peek_char() {
                    if c.is_ascii_alphanumeric() {
                        self.bump(c);
                    } else {
                        break;
                    }
                }
                Ok(Tok::Ident(self.src[start..self.pos].to_string()))
            }
            other => Err(self.error(format!("unexpected character '{}'", other))),
        }
    }
}

pub(crate) struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    vars: &'a VarTable,
    /// Named sub-polynomials usable as factors (the DSL's macros).
    pub macros: HashMap<String, NcStatePoly<Rat>>,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str, vars: &'a VarTable) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let tok = lexer.next_tok()?;
        Ok(Parser {
            lexer,
            tok,
            vars,
            macros: HashMap::new(),
        })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        self.tok = self.lexer.next_tok()?;
        Ok(())
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        self.lexer.error(msg)
    }

    pub fn parse_poly(&mut self) -> Result<NcStatePoly<Rat>, ParseError> {
        let mut acc;
        let mut negate = false;
        match self.tok {
            Tok::Minus => {
                negate = true;
                self.advance()?;
            }
            Tok::Plus => {
                self.advance()?;
            }
            _ => {}
        }
        acc = self.parse_term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.tok {
                Tok::Plus => {
                    self.advance()?;
                    let t = self.parse_term()?;
                    acc = acc.add(&t);
                }
                Tok::Minus => {
                    self.advance()?;
                    let t = self.parse_term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<NcStatePoly<Rat>, ParseError> {
        let mut acc = NcStatePoly::one();
        let mut any = false;
        loop {
            match &self.tok {
                Tok::Number(n) => {
                    let c = rat_from_str(n)
                        .ok_or_else(|| self.error(format!("bad coefficient '{}'", n)))?;
                    self.advance()?;
                    acc = acc.scale(&c);
                    any = true;
                }
                Tok::Ident(_) | Tok::LParen => {
                    let f = self.parse_factor()?;
                    acc = acc.mul(&f);
                    any = true;
                }
                Tok::Star => {
                    self.advance()?;
                }
                _ => break,
            }
            // A term ends at +, -, ), or EOF; factors may be juxtaposed or
            // separated by '*'.
            match self.tok {
                Tok::Plus | Tok::Minus | Tok::RParen | Tok::Eof => break,
                _ => {}
            }
        }
        if !any {
            return Err(self.error("expected a term"));
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<NcStatePoly<Rat>, ParseError> {
        let mut base = match self.tok.clone() {
            Tok::LParen => {
                self.advance()?;
                let p = self.parse_poly()?;
                if self.tok != Tok::RParen {
                    return Err(self.error("expected ')'"));
                }
                self.advance()?;
                p
            }
            Tok::Ident(name) if name == "s" => {
                self.advance()?;
                if self.tok != Tok::LParen {
                    return Err(self.error("expected '(' after 's'"));
                }
                self.advance()?;
                let w = self.parse_word()?;
                if self.tok != Tok::RParen {
                    return Err(self.error("expected ')' closing s(...)"));
                }
                self.advance()?;
                NcStatePoly::sigma_of(w)
            }
            Tok::Ident(name) => {
                self.advance()?;
                if let Some(v) = self.vars.get(&name) {
                    NcStatePoly::var(v)
                } else if let Some(p) = self.macros.get(&name) {
                    p.clone()
                } else if let Some(letters) = self.vars.segment(&name) {
                    NcStatePoly::monomial(
                        super::word::NcsWord::from_word(NcWord::from_letters(letters)),
                        Rat::one(),
                    )
                } else {
                    return Err(self.error(format!("unknown variable '{}'", name)));
                }
            }
            _ => return Err(self.error("expected a factor")),
        };
        while self.tok == Tok::Caret {
            self.advance()?;
            let k = match &self.tok {
                Tok::Number(n) => n
                    .parse::<u32>()
                    .map_err(|_| self.error("exponent must be a nonnegative integer"))?,
                _ => return Err(self.error("expected an integer exponent")),
            };
            self.advance()?;
            base = base.pow(k);
        }
        Ok(base)
    }

    fn parse_word(&mut self) -> Result<NcWord, ParseError> {
        let mut letters: Vec<Var> = Vec::new();
        loop {
            match self.tok.clone() {
                Tok::Ident(name) => {
                    self.advance()?;
                    if let Some(v) = self.vars.get(&name) {
                        letters.push(v);
                    } else if let Some(seg) = self.vars.segment(&name) {
                        letters.extend(seg);
                    } else {
                        return Err(self.error(format!("unknown letters '{}'", name)));
                    }
                    // optional exponent on a single letter
                    if self.tok == Tok::Caret {
                        self.advance()?;
                        let k = match &self.tok {
                            Tok::Number(n) => n
                                .parse::<u32>()
                                .map_err(|_| self.error("bad exponent"))?,
                            _ => return Err(self.error("expected an integer exponent")),
                        };
                        self.advance()?;
                        let last = *letters.last().unwrap();
                        if k == 0 {
                            letters.pop();
                        } else {
                            for _ in 1..k {
                                letters.push(last);
                            }
                        }
                    }
                }
                Tok::Star => {
                    self.advance()?;
                }
                _ => break,
            }
        }
        if letters.is_empty() {
            return Err(self.error("empty word inside s(...)"));
        }
        Ok(NcWord::from_letters(letters))
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        if self.tok != Tok::Eof {
            return Err(self.error(format!("unexpected trailing input {:?}", self.tok)));
        }
        Ok(())
    }
}

/// Parses an nc state polynomial with rational coefficients.
pub fn parse_nc_state_poly(src: &str, vars: &VarTable) -> Result<NcStatePoly<Rat>, ParseError> {
    let mut p = Parser::new(src, vars)?;
    let poly = p.parse_poly()?;
    p.expect_eof()?;
    Ok(poly)
}

/// Parses a state polynomial (rejects free word tails).
pub fn parse_state_poly(src: &str, vars: &VarTable) -> Result<StatePoly<Rat>, ParseError> {
    let p = parse_nc_state_poly(src, vars)?;
    p.as_state_poly().ok_or(ParseError {
        line: 1,
        col: 1,
        msg: "polynomial has free (non-s) letters but a state polynomial was expected".into(),
    })
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

fn write_word(out: &mut String, w: &NcWord, vars: &VarTable) {
    for (i, &v) in w.letters().iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        out.push_str(vars.name(v));
    }
}

fn write_monomial(out: &mut String, m: &super::word::NcsWord, vars: &VarTable) {
    let mut first = true;
    for s in m.scalar.factors() {
        if !first {
            out.push('*');
        }
        out.push_str("s(");
        write_word(out, s.rep(), vars);
        out.push(')');
        first = false;
    }
    if !m.tail.is_empty() {
        if !first {
            out.push('*');
        }
        write_word(out, &m.tail, vars);
        first = false;
    }
    if first {
        out.push('1');
    }
}

/// Renders the polynomial in the parser grammar. Terms appear in the
/// canonical monomial order.
pub fn print_nc_state_poly<C: Coeff>(p: &NcStatePoly<C>, vars: &VarTable) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let cs = format!("{}", c);
        let (neg, mag) = match cs.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, cs),
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut mono = String::new();
        write_monomial(&mut mono, m, vars);
        if mono == "1" {
            out.push_str(&mag);
        } else if mag == "1" {
            out.push_str(&mono);
        } else {
            let _ = write!(out, "{}*{}", mag, mono);
        }
    }
    out
}

/// Renders a state polynomial in the parser grammar.
pub fn print_state_poly<C: Coeff>(p: &StatePoly<C>, vars: &VarTable) -> String {
    print_nc_state_poly(&p.lift(), vars)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vt() -> VarTable {
        VarTable::new(["x1", "x2", "y1", "y2"].map(String::from))
    }

    #[test]
    fn parse_simple() {
        let vars = vt();
        let p = parse_nc_state_poly("s(x1*x2) - s(x1)*s(x2)", &vars).unwrap();
        assert_eq!(p.num_terms(), 2);
        let q = parse_nc_state_poly("x1*x2*x1 - s(x2)*x1 + s(x1x2) - s(x1)s(x2)", &vars).unwrap();
        assert_eq!(q.num_terms(), 4);
    }

    #[test]
    fn juxtaposed_words_segment() {
        let vars = vt();
        let a = parse_nc_state_poly("s(x1x2)", &vars).unwrap();
        let b = parse_nc_state_poly("s(x1*x2)", &vars).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn powers_and_parens() {
        let vars = vt();
        let p = parse_nc_state_poly("(s(x1y2)+s(x2y1))^2", &vars).unwrap();
        assert_eq!(p.degree(), Some(4));
        assert_eq!(p.num_terms(), 3);
        let q = parse_nc_state_poly("s(x1^2)", &vars).unwrap();
        assert_eq!(q.degree(), Some(2));
    }

    #[test]
    fn rational_and_decimal_coeffs() {
        let vars = vt();
        let p = parse_nc_state_poly("1/8 * s(x1) - 0.5*x2", &vars).unwrap();
        let printed = print_nc_state_poly(&p, &vars);
        let back = parse_nc_state_poly(&printed, &vars).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn print_parse_roundtrip() {
        let vars = vt();
        for src in [
            "s(x1*x2)*x1*x2 + 3*x1 - 2",
            "1",
            "0",
            "-s(x1) + s(x2)^2",
            "s(x1*x2*x1) - 7/3",
        ] {
            let p = parse_nc_state_poly(src, &vars).unwrap();
            let printed = print_nc_state_poly(&p, &vars);
            let back = parse_nc_state_poly(&printed, &vars).unwrap();
            assert_eq!(p, back, "roundtrip through {:?}", printed);
        }
    }

    #[test]
    fn errors_carry_position() {
        let vars = vt();
        let err = parse_nc_state_poly("s(x1 +", &vars).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.col > 1);
        assert!(parse_nc_state_poly("zz", &vars).is_err());
        assert!(parse_state_poly("x1", &vars).is_err());
    }
}
