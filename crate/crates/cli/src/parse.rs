//! Lexer and recursive-descent parsers for the three formula languages.
//!
//! Binary connectives, loosest first: `<->`, `->` (right associative),
//! `|`, `&`. In the term-modal language the scope forms `forall x.`,
//! `exists x.`, `K[t]`, `<K[t]>` and `[A:e]` extend as far right as
//! possible. In the hybrid and KDL languages the modal prefixes bind as
//! tightly as `!`.

use std::collections::BTreeSet;
use std::fmt;

use dtml_core::kdl::KdlFormula;
use dtml_core::{Formula, HybridFormula, Signature, Term, XSTAR};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    /// Moves an error found in a snippet that starts at `line:col` of a
    /// larger text.
    pub fn shifted(mut self, line: usize, col: usize) -> Self {
        if self.line == 1 {
            self.col += col - 1;
        }
        self.line += line - 1;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Bang,
    Amp,
    Bar,
    Arrow,
    Iff,
    Eq,
    Neq,
    Lt,
    Gt,
    At,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::At => "@",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("!=") {
            (Tok::Neq, 2)
        } else if is_ident_char(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ':' => Tok::Colon,
                '!' => Tok::Bang,
                '&' => Tok::Amp,
                '|' => Tok::Bar,
                '=' => Tok::Eq,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '@' => Tok::At,
                _ => return Err(ParseError::new(line, col, format!("unexpected character `{c}`"))),
            };
            (tok, 1)
        };
        out.push(Spanned {
            tok,
            line: start_line,
            col: start_col,
        });
        i += len;
        col += len;
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: Option<&'a Signature>,
    nominals: &'a BTreeSet<String>,
    /// Update names accepted inside `[..]` in KDL formulas; `None` accepts
    /// any.
    updates: Option<&'a BTreeSet<String>>,
}

impl<'a> Parser<'a> {
    fn new(text: &str) -> Result<Self, ParseError> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            sig: None,
            nominals: &EMPTY,
            updates: None,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::new(t.line, t.col, message)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error_here(format!("expected {wanted}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let t = self.bump();
                Ok((s, t.line, t.col))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn finish<T>(&mut self, value: T) -> Result<T, ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(value)
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// The binary layers, shared by all three languages.
    fn binary<T: Clone>(
        &mut self,
        unary: &mut impl FnMut(&mut Self) -> Result<T, ParseError>,
        ops: &Connectives<T>,
    ) -> Result<T, ParseError> {
        let mut left = self.implication(unary, ops)?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let right = self.implication(unary, ops)?;
            left = (ops.iff)(left, right);
        }
        Ok(left)
    }

    fn implication<T: Clone>(
        &mut self,
        unary: &mut impl FnMut(&mut Self) -> Result<T, ParseError>,
        ops: &Connectives<T>,
    ) -> Result<T, ParseError> {
        let left = self.disjunction(unary, ops)?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.implication(unary, ops)?;
            return Ok((ops.implies)(left, right));
        }
        Ok(left)
    }

    fn disjunction<T: Clone>(
        &mut self,
        unary: &mut impl FnMut(&mut Self) -> Result<T, ParseError>,
        ops: &Connectives<T>,
    ) -> Result<T, ParseError> {
        let mut left = self.conjunction(unary, ops)?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.conjunction(unary, ops)?;
            left = (ops.or)(left, right);
        }
        Ok(left)
    }

    fn conjunction<T: Clone>(
        &mut self,
        unary: &mut impl FnMut(&mut Self) -> Result<T, ParseError>,
        ops: &Connectives<T>,
    ) -> Result<T, ParseError> {
        let mut left = unary(self)?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = unary(self)?;
            left = (ops.and)(left, right);
        }
        Ok(left)
    }

    // term-modal language

    fn tml(&mut self) -> Result<Formula, ParseError> {
        self.binary(&mut |p: &mut Self| p.tml_unary(), &TML)
    }

    fn tml_unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.tml_unary()?))
            }
            Tok::Ident(k) if k == "forall" || k == "exists" => {
                self.bump();
                let (x, line, col) = self.ident("a variable")?;
                if x == XSTAR || self.is_constant(&x) {
                    return Err(ParseError::new(line, col, format!("cannot bind `{x}`")));
                }
                self.expect(Tok::Dot)?;
                let body = self.tml()?;
                Ok(if k == "forall" {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                })
            }
            Tok::Ident(k) if k == "K" && *self.peek_at(1) == Tok::LBrack => {
                self.bump();
                let t = self.bracketed_term()?;
                Ok(Formula::know(t, self.tml()?))
            }
            Tok::Lt => {
                self.bump();
                match self.peek() {
                    Tok::Ident(k) if k == "K" => {
                        self.bump();
                    }
                    _ => return Err(self.unexpected("`K`")),
                }
                let t = self.bracketed_term()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::possible(t, self.tml()?))
            }
            Tok::LBrack => {
                self.bump();
                let (action, _, _) = self.ident("an action model name")?;
                self.expect(Tok::Colon)?;
                let (event, _, _) = self.ident("an event name")?;
                self.expect(Tok::RBrack)?;
                Ok(Formula::action(action, event, self.tml()?))
            }
            _ => self.tml_atom(),
        }
    }

    fn bracketed_term(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::LBrack)?;
        let t = self.term()?;
        self.expect(Tok::RBrack)?;
        Ok(t)
    }

    fn is_constant(&self, name: &str) -> bool {
        match self.sig {
            Some(sig) => sig.is_constant(name),
            None => name.ends_with('_'),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (name, line, col) = self.ident("a term")?;
        if let Some(sig) = self.sig {
            if sig.is_constant(&name) {
                return Ok(Term::cst(name));
            }
            if name.ends_with('_') {
                return Err(ParseError::new(line, col, format!("undeclared constant `{name}`")));
            }
            if sig.is_predicate(&name) {
                return Err(ParseError::new(line, col, format!("`{name}` is a predicate, not a term")));
            }
        } else if name.ends_with('_') {
            return Ok(Term::cst(name));
        }
        if matches!(name.as_str(), "true" | "false" | "forall" | "exists" | "K" | "N") {
            return Err(ParseError::new(line, col, format!("`{name}` is reserved")));
        }
        Ok(Term::var(name))
    }

    fn tml_atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let phi = self.tml()?;
                self.expect(Tok::RParen)?;
                Ok(phi)
            }
            Tok::Ident(k) if k == "true" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(k) if k == "false" => {
                self.bump();
                Ok(Formula::bottom())
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::LParen => {
                let t = self.bump();
                self.bump();
                if let Some(sig) = self.sig {
                    if name != "N" && !sig.is_predicate(&name) {
                        return Err(ParseError::new(t.line, t.col, format!("undeclared predicate `{name}`")));
                    }
                }
                let first = self.term()?;
                if name == "N" {
                    self.expect(Tok::Comma)?;
                    let second = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Formula::net(first, second));
                }
                self.expect(Tok::RParen)?;
                Ok(Formula::pred(name, first))
            }
            Tok::Ident(_) => {
                let left = self.term()?;
                let negate = match self.peek() {
                    Tok::Eq => false,
                    Tok::Neq => true,
                    _ => return Err(self.unexpected("`=` or `!=`")),
                };
                self.bump();
                let right = self.term()?;
                let eq = Formula::eq(left, right);
                Ok(if negate { Formula::not(eq) } else { eq })
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    // hybrid language

    fn hybrid(&mut self) -> Result<HybridFormula, ParseError> {
        self.binary(&mut |p: &mut Self| p.hybrid_unary(), &HYBRID)
    }

    fn hybrid_unary(&mut self) -> Result<HybridFormula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(HybridFormula::not(self.hybrid_unary()?))
            }
            Tok::At => {
                self.bump();
                let i = self.nominal()?;
                Ok(HybridFormula::at(i, self.hybrid_unary()?))
            }
            Tok::Ident(k) if matches!(k.as_str(), "K" | "N" | "U") => {
                self.bump();
                let a = self.hybrid_unary()?;
                Ok(match k.as_str() {
                    "K" => HybridFormula::know(a),
                    "N" => HybridFormula::neighbor(a),
                    _ => HybridFormula::univ(a),
                })
            }
            Tok::LParen => {
                self.bump();
                let phi = self.hybrid()?;
                self.expect(Tok::RParen)?;
                Ok(phi)
            }
            Tok::Ident(k) if k == "true" => {
                self.bump();
                Ok(HybridFormula::Top)
            }
            Tok::Ident(k) if k == "false" => {
                self.bump();
                Ok(HybridFormula::not(HybridFormula::Top))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(if self.nominals.contains(&name) {
                    HybridFormula::nominal(name)
                } else {
                    HybridFormula::prop(name)
                })
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn nominal(&mut self) -> Result<String, ParseError> {
        let (i, line, col) = self.ident("a nominal")?;
        if !self.nominals.contains(&i) {
            return Err(ParseError::new(line, col, format!("undeclared nominal `{i}`")));
        }
        Ok(i)
    }

    // KDL

    fn kdl(&mut self) -> Result<KdlFormula, ParseError> {
        self.binary(&mut |p: &mut Self| p.kdl_unary(), &KDL)
    }

    fn kdl_unary(&mut self) -> Result<KdlFormula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(KdlFormula::not(self.kdl_unary()?))
            }
            Tok::At => {
                self.bump();
                let i = self.nominal()?;
                Ok(KdlFormula::at(i, self.kdl_unary()?))
            }
            Tok::Ident(k) if matches!(k.as_str(), "K" | "N") => {
                self.bump();
                let a = self.kdl_unary()?;
                Ok(if k == "K" {
                    KdlFormula::know(a)
                } else {
                    KdlFormula::neighbor(a)
                })
            }
            Tok::LBrack => {
                self.bump();
                let (u, line, col) = self.ident("an update name")?;
                if let Some(known) = self.updates {
                    if !known.contains(&u) {
                        return Err(ParseError::new(line, col, format!("undeclared update `{u}`")));
                    }
                }
                self.expect(Tok::RBrack)?;
                Ok(KdlFormula::dynamic(u, self.kdl_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let phi = self.kdl()?;
                self.expect(Tok::RParen)?;
                Ok(phi)
            }
            Tok::Ident(k) if k == "true" => {
                self.bump();
                Ok(KdlFormula::Top)
            }
            Tok::Ident(k) if k == "false" => {
                self.bump();
                Ok(KdlFormula::not(KdlFormula::Top))
            }
            Tok::Ident(name) => {
                let t = self.bump();
                if *self.peek() == Tok::Eq {
                    self.bump();
                    let (z, _, _) = self.ident("a feature value")?;
                    return Ok(KdlFormula::feature(name, z));
                }
                if self.nominals.contains(&name) {
                    Ok(KdlFormula::nominal(name))
                } else {
                    Err(ParseError::new(
                        t.line,
                        t.col,
                        format!("`{name}` is neither a nominal nor followed by `=value`"),
                    ))
                }
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

struct Connectives<T> {
    iff: fn(T, T) -> T,
    implies: fn(T, T) -> T,
    or: fn(T, T) -> T,
    and: fn(T, T) -> T,
}

const TML: Connectives<Formula> = Connectives {
    iff: Formula::iff,
    implies: Formula::implies,
    or: Formula::or,
    and: Formula::and,
};

fn hybrid_iff(a: HybridFormula, b: HybridFormula) -> HybridFormula {
    HybridFormula::and(HybridFormula::implies(a.clone(), b.clone()), HybridFormula::implies(b, a))
}

const HYBRID: Connectives<HybridFormula> = Connectives {
    iff: hybrid_iff,
    implies: HybridFormula::implies,
    or: HybridFormula::or,
    and: HybridFormula::and,
};

fn kdl_implies(a: KdlFormula, b: KdlFormula) -> KdlFormula {
    KdlFormula::not(KdlFormula::and(a, KdlFormula::not(b)))
}

fn kdl_iff(a: KdlFormula, b: KdlFormula) -> KdlFormula {
    KdlFormula::and(kdl_implies(a.clone(), b.clone()), kdl_implies(b, a))
}

const KDL: Connectives<KdlFormula> = Connectives {
    iff: kdl_iff,
    implies: kdl_implies,
    or: KdlFormula::or,
    and: KdlFormula::and,
};

/// Parses a term-modal formula. With a signature, constants and
/// predicates must be declared in it; without one, identifiers ending in
/// `_` are constants.
pub fn parse_formula(text: &str, sig: Option<&Signature>) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    p.sig = sig;
    let phi = p.tml()?;
    let phi = p.finish(phi)?;
    if let Some(sig) = sig {
        sig.check_formula(&phi).map_err(|e| ParseError::new(1, 1, e.to_string()))?;
    }
    Ok(phi)
}

/// Parses a formula of the hybrid language; identifiers in `nominals` are
/// nominals, any other identifier is a proposition.
pub fn parse_hybrid(text: &str, nominals: &BTreeSet<String>) -> Result<HybridFormula, ParseError> {
    let mut p = Parser::new(text)?;
    p.nominals = nominals;
    let phi = p.hybrid()?;
    p.finish(phi)
}

/// Parses a KDL formula. `updates`, when given, lists the update names
/// that may appear in `[..]`.
pub fn parse_kdl(
    text: &str,
    nominals: &BTreeSet<String>,
    updates: Option<&BTreeSet<String>>,
) -> Result<KdlFormula, ParseError> {
    let mut p = Parser::new(text)?;
    p.nominals = nominals;
    p.updates = updates;
    let phi = p.kdl()?;
    p.finish(phi)
}
