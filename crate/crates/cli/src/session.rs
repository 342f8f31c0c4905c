//! Session files: declarations and named bindings.
//!
//! ```text
//! session   := { statement }
//! statement := "param" ident { "," ident } ";"
//!            | "exp" eatom ";"
//!            | "resonate" eatom "=" expr ";"
//!            | "let" ident "=" rhs ";"
//! rhs       := "[" expr "," expr "]"
//!            | word
//!            | field
//! field     := fterm { ("+" | "-") fterm }        (a polynomial when no term has dX/dY)
//! fterm     := product [ "dX" | "dY" ] | "dX" | "dY"
//! expr      := product { ("+" | "-") product }
//! product   := unary { ("*" | "/") unary }         (division by constants only)
//! unary     := "-" unary | power
//! power     := atom [ "^" integer ]
//! atom      := integer | "X" | "Y" | ident | eatom | "(" expr ")"
//! eatom     := "E" "[" ( "1" | ident [ "^" integer ] { "*" ident [ "^" integer ] } ) "]"
//! word      := "id" | letter { "*" letter }
//! letter    := "elemX" "(" expr ")" | "elemY" "(" expr ")"
//!            | "affine" "(" expr "," expr "," expr "," expr ";" expr "," expr ")"
//! ```
//!
//! Identifiers in expressions are declared parameters or earlier polynomial
//! bindings. `#` starts a comment.

use std::fmt;

use isotrope::automorphism::{AutWord, Letter, PolyMap};
use isotrope::coeff::{Coeff, Monomial, ParamTable, Symbol};
use isotrope::derivation::Derivation;
use isotrope::linalg::Mat;
use isotrope::poly::Poly2;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

const KEYWORDS: &[&str] = &["param", "exp", "resonate", "let", "id", "elemX", "elemY", "affine"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown symbol `{name}`")]
    UnknownSymbol { pos: Pos, name: String },
    #[error("{pos}: `{name}` is already declared")]
    DuplicateName { pos: Pos, name: String },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownSymbol { pos, .. }
            | ParseError::DuplicateName { pos, .. }
            | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}

/// A bound value.
#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    Poly(Poly2),
    Derivation(Derivation),
    Map(PolyMap),
    Word(AutWord),
}

impl Binding {
    pub fn kind(&self) -> &'static str {
        match self {
            Binding::Poly(_) => "polynomial",
            Binding::Derivation(_) => "derivation",
            Binding::Map(_) => "map",
            Binding::Word(_) => "word",
        }
    }
}

/// Canonical text; reads back to an equal value.
impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Poly(p) => write!(f, "{p}"),
            Binding::Derivation(d) if d.is_zero() => f.write_str("0 dX"),
            Binding::Derivation(d) => write!(f, "{d}"),
            Binding::Map(m) => write!(f, "{m}"),
            Binding::Word(w) => write!(f, "{w}"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Session {
    pub table: ParamTable,
    bindings: Vec<(String, Binding)>,
}

impl Session {
    pub fn new() -> Session {
        Session::default()
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, b)| b)
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&str, &Binding)> {
        self.bindings.iter().map(|(n, b)| (n.as_str(), b))
    }

    /// Adds a binding, registering any exponential symbols it mentions.
    pub fn bind(&mut self, name: &str, value: Binding) -> Result<(), String> {
        if self.get(name).is_some() || self.table.param(name).is_some() {
            return Err(format!("`{name}` is already declared"));
        }
        for s in binding_symbols(&value) {
            match s.exp_atom() {
                Some(atom) => {
                    self.table.ensure_exp(atom.clone()).map_err(|e| e.to_string())?;
                }
                None if self.table.param(s.name()).is_none() => {
                    return Err(format!("unknown symbol `{s}`"));
                }
                None => {}
            }
        }
        self.bindings.push((name.to_string(), value));
        Ok(())
    }

    /// Parses a standalone expression (a polynomial or a field) against this
    /// session's declarations.
    pub fn parse_value(&mut self, text: &str) -> Result<Binding, ParseError> {
        let toks = lex(text)?;
        let mut p = Parser { toks, i: 0, s: self };
        let v = p.rhs()?;
        p.expect_eof()?;
        Ok(v)
    }

    /// A polynomial expression.
    pub fn parse_poly(&mut self, text: &str) -> Result<Poly2, ParseError> {
        match self.parse_value(text)? {
            Binding::Poly(p) => Ok(p),
            other => Err(ParseError::Invalid {
                pos: Pos { line: 1, col: 1 },
                msg: format!("expected a polynomial, got a {}", other.kind()),
            }),
        }
    }

    /// A constant expression.
    pub fn parse_coeff(&mut self, text: &str) -> Result<Coeff, ParseError> {
        self.parse_poly(text)?.as_constant().ok_or_else(|| ParseError::Invalid {
            pos: Pos { line: 1, col: 1 },
            msg: format!("expected a constant, got `{text}`"),
        })
    }
}

/// Free symbols of a binding.
fn binding_symbols(b: &Binding) -> Vec<Symbol> {
    let polys: Vec<&Poly2> = match b {
        Binding::Poly(p) => vec![p],
        Binding::Derivation(d) => vec![&d.p_x, &d.p_y],
        Binding::Map(m) => vec![&m.f, &m.g],
        Binding::Word(w) => {
            let mut out = Vec::new();
            for l in w.letters() {
                let ps: Vec<Poly2> = match l {
                    Letter::ElemX(p) | Letter::ElemY(p) => vec![p.clone()],
                    Letter::Affine { m, v } => (0..2)
                        .flat_map(|i| (0..2).map(move |j| (i, j)))
                        .map(|(i, j)| Poly2::constant(m.get(i, j).clone()))
                        .chain(v.iter().map(|c| Poly2::constant(c.clone())))
                        .collect(),
                };
                out.extend(ps.iter().flat_map(Poly2::symbols));
            }
            return out;
        }
    };
    polys.into_iter().flat_map(Poly2::symbols).collect()
}

/// The session as source text: declarations, then bindings in order.
impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.table.params();
        if !params.is_empty() {
            let names: Vec<&str> = params.iter().map(|s| s.name()).collect();
            writeln!(f, "param {};", names.join(", "))?;
        }
        for e in self.table.exp_symbols() {
            writeln!(f, "exp {e};")?;
        }
        for (e, v) in self.table.resonances() {
            writeln!(f, "resonate {e} = {v};")?;
        }
        for (n, b) in &self.bindings {
            writeln!(f, "let {n} = {b};")?;
        }
        Ok(())
    }
}

pub fn parse(text: &str) -> Result<Session, ParseError> {
    let toks = lex(text)?;
    let mut s = Session::new();
    let mut p = Parser { toks, i: 0, s: &mut s };
    while !p.at_eof() {
        p.statement()?;
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push((Tok::Num(s.parse().expect("digits")), pos));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push((Tok::Ident(s), pos));
        } else if "+-*/^()[],;=".contains(c) {
            chars.next();
            col += 1;
            out.push((Tok::Punct(c), pos));
        } else {
            return Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

enum Val {
    P(Poly2),
    D(Derivation),
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    s: &'a mut Session,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn invalid<T>(pos: Pos, msg: impl fmt::Display) -> Result<T, ParseError> {
        Err(ParseError::Invalid {
            pos,
            msg: msg.to_string(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.is_punct(c) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`, found {}", self.peek()))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            self.syntax(format!("unexpected {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(ParseError::Syntax {
                pos: p,
                msg: format!("expected a name, found {t}"),
            }),
        }
    }

    /// A name for a new parameter or binding.
    fn fresh_name(&mut self) -> Result<(String, Pos), ParseError> {
        let (name, pos) = self.ident()?;
        if KEYWORDS.contains(&name.as_str()) || !isotrope::coeff::is_valid_param_name(&name) {
            return Err(ParseError::Syntax {
                pos,
                msg: format!("`{name}` is reserved"),
            });
        }
        if self.s.get(&name).is_some() || self.s.table.param(&name).is_some() {
            return Err(ParseError::DuplicateName { pos, name });
        }
        Ok((name, pos))
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let (kw, pos) = self.ident()?;
        match kw.as_str() {
            "param" => loop {
                let (name, _) = self.fresh_name()?;
                self.s.table.declare_param(&name).expect("checked name");
                if self.is_punct(',') {
                    self.bump();
                } else {
                    return self.expect(';');
                }
            },
            "exp" => {
                let (atom, at) = self.eatom()?;
                if let Err(e) = self.s.table.declare_exp(atom.clone()) {
                    let name = Symbol::exp(atom).name().to_string();
                    return Err(match e {
                        isotrope::coeff::CoeffError::DuplicateSymbol(_) => ParseError::DuplicateName { pos: at, name },
                        other => ParseError::Invalid {
                            pos: at,
                            msg: other.to_string(),
                        },
                    });
                }
                self.expect(';')
            }
            "resonate" => {
                let (atom, at) = self.eatom()?;
                let sym = Symbol::exp(atom);
                if !self.s.table.exp_symbols().contains(&sym) {
                    return Err(ParseError::UnknownSymbol {
                        pos: at,
                        name: sym.name().to_string(),
                    });
                }
                self.expect('=')?;
                let vpos = self.pos();
                let v = self.constant()?;
                if let Err(e) = self.s.table.set_resonance(sym, v) {
                    return Self::invalid(vpos, e);
                }
                self.expect(';')
            }
            "let" => {
                let (name, npos) = self.fresh_name()?;
                self.expect('=')?;
                let v = self.rhs()?;
                self.expect(';')?;
                if let Err(msg) = self.s.bind(&name, v) {
                    return Self::invalid(npos, msg);
                }
                Ok(())
            }
            other => Err(ParseError::Syntax {
                pos,
                msg: format!("expected `param`, `exp`, `resonate` or `let`, found `{other}`"),
            }),
        }
    }

    fn starts_word(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => matches!(s.as_str(), "id" | "elemX" | "elemY" | "affine"),
            _ => false,
        }
    }

    fn rhs(&mut self) -> Result<Binding, ParseError> {
        if self.is_punct('[') {
            self.bump();
            let f = self.expr()?;
            self.expect(',')?;
            let g = self.expr()?;
            self.expect(']')?;
            return Ok(Binding::Map(PolyMap::new(f, g)));
        }
        if self.starts_word() {
            return self.word().map(Binding::Word);
        }
        Ok(match self.field()? {
            Val::P(p) => Binding::Poly(p),
            Val::D(d) => Binding::Derivation(d),
        })
    }

    fn word(&mut self) -> Result<AutWord, ParseError> {
        let start = self.pos();
        if self.is_ident("id") {
            self.bump();
            return Ok(AutWord::identity());
        }
        let mut letters = vec![self.letter()?];
        while self.is_punct('*') {
            self.bump();
            letters.push(self.letter()?);
        }
        AutWord::new(letters).or_else(|e| Self::invalid(start, e))
    }

    fn letter(&mut self) -> Result<Letter, ParseError> {
        let (name, pos) = self.ident()?;
        self.expect('(')?;
        let l = match name.as_str() {
            "elemX" => Letter::ElemX(self.expr()?),
            "elemY" => Letter::ElemY(self.expr()?),
            "affine" => {
                let mut c = Vec::new();
                for sep in [',', ',', ',', ';', ','] {
                    c.push(self.constant()?);
                    self.expect(sep)?;
                }
                c.push(self.constant()?);
                let v = [c[4].clone(), c[5].clone()];
                let m = Mat::from_rows(vec![vec![c[0].clone(), c[1].clone()], vec![c[2].clone(), c[3].clone()]]);
                Letter::Affine { m, v }
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("expected `elemX`, `elemY` or `affine`, found `{other}`"),
                })
            }
        };
        self.expect(')')?;
        if let Err(e) = l.validate() {
            return Self::invalid(pos, e);
        }
        Ok(l)
    }

    fn constant(&mut self) -> Result<Coeff, ParseError> {
        let pos = self.pos();
        let p = self.expr()?;
        match p.as_constant() {
            Some(c) => Ok(c),
            None => Self::invalid(pos, format!("expected a constant, got `{p}`")),
        }
    }

    fn can_start_operand(&self) -> bool {
        match self.peek() {
            Tok::Num(_) => true,
            Tok::Ident(s) => !matches!(s.as_str(), "dX" | "dY"),
            Tok::Punct(c) => matches!(c, '(' | '-'),
            Tok::Eof => false,
        }
    }

    /// Checks that an operator at `op` has a right operand.
    fn operand_after(&self, op: Pos, c: char) -> Result<(), ParseError> {
        if self.can_start_operand() {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: op,
                msg: format!("`{c}` is missing its right operand"),
            })
        }
    }

    fn field(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.fterm()?;
        while let Tok::Punct(c @ ('+' | '-')) = *self.peek() {
            let (_, op) = self.bump();
            self.operand_after(op, c)?;
            let tpos = self.pos();
            let t = self.fterm()?;
            acc = match (acc, t, c) {
                (Val::P(a), Val::P(b), '+') => Val::P(&a + &b),
                (Val::P(a), Val::P(b), _) => Val::P(&a - &b),
                (Val::D(a), Val::D(b), '+') => Val::D(&a + &b),
                (Val::D(a), Val::D(b), _) => Val::D(&a - &b),
                _ => return Self::invalid(tpos, "cannot add a polynomial and a derivation"),
            };
        }
        Ok(acc)
    }

    fn fterm(&mut self) -> Result<Val, ParseError> {
        // A bare `dX` stands for `1 dX`.
        let bare = self.is_ident("dX") || self.is_ident("dY");
        let p = if bare { Poly2::one() } else { self.product()? };
        if self.is_ident("dX") {
            self.bump();
            return Ok(Val::D(Derivation::new(p, Poly2::zero())));
        }
        if self.is_ident("dY") {
            self.bump();
            return Ok(Val::D(Derivation::new(Poly2::zero(), p)));
        }
        Ok(Val::P(p))
    }

    fn expr(&mut self) -> Result<Poly2, ParseError> {
        let mut acc = self.product()?;
        while let Tok::Punct(c @ ('+' | '-')) = *self.peek() {
            let (_, op) = self.bump();
            self.operand_after(op, c)?;
            let t = self.product()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Poly2, ParseError> {
        let mut acc = self.unary()?;
        while let Tok::Punct(c @ ('*' | '/')) = *self.peek() {
            let (_, op) = self.bump();
            self.operand_after(op, c)?;
            let rpos = self.pos();
            let r = self.unary()?;
            acc = if c == '*' {
                &acc * &r
            } else {
                let Some(d) = r.as_constant() else {
                    return Self::invalid(rpos, format!("cannot divide by the non-constant `{r}`"));
                };
                match d.inv() {
                    Ok(inv) => acc.scale(&inv),
                    Err(_) => return Self::invalid(rpos, "division by zero"),
                }
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly2, ParseError> {
        if self.is_punct('-') {
            let (_, op) = self.bump();
            self.operand_after(op, '-')?;
            return Ok(-&self.unary()?);
        }
        let base = self.atom()?;
        if self.is_punct('^') {
            self.bump();
            let e = self.exponent()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        match self.bump() {
            (Tok::Num(n), p) => n.to_u32().map_or_else(|| Self::invalid(p, format!("exponent {n} is too large")), Ok),
            (t, p) => Err(ParseError::Syntax {
                pos: p,
                msg: format!("expected a nonnegative integer exponent, found {t}"),
            }),
        }
    }

    fn atom(&mut self) -> Result<Poly2, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Poly2::constant(Coeff::rational(BigRational::from_integer(n))))
            }
            Tok::Punct('(') => {
                self.bump();
                let p = self.expr()?;
                self.expect(')')?;
                Ok(p)
            }
            Tok::Ident(s) if s == "X" => {
                self.bump();
                Ok(Poly2::x())
            }
            Tok::Ident(s) if s == "Y" => {
                self.bump();
                Ok(Poly2::y())
            }
            Tok::Ident(s) if s == "E" => {
                let (atom, at) = self.eatom()?;
                match self.s.table.ensure_exp(atom) {
                    Ok(sym) => Ok(Poly2::constant(Coeff::symbol(sym))),
                    Err(e) => Self::invalid(at, e),
                }
            }
            Tok::Ident(s) => {
                self.bump();
                if let Some(sym) = self.s.table.param(&s) {
                    return Ok(Poly2::constant(Coeff::symbol(sym)));
                }
                match self.s.get(&s) {
                    Some(Binding::Poly(p)) => Ok(p.clone()),
                    Some(b) => Self::invalid(pos, format!("`{s}` is a {}, not a polynomial", b.kind())),
                    None => Err(ParseError::UnknownSymbol { pos, name: s }),
                }
            }
            t => self.syntax(format!("expected an expression, found {t}")),
        }
    }

    /// `E[...]`; every factor must be a declared parameter.
    fn eatom(&mut self) -> Result<(Monomial, Pos), ParseError> {
        let (name, pos) = self.ident()?;
        if name != "E" {
            return Err(ParseError::Syntax {
                pos,
                msg: format!("expected `E[...]`, found `{name}`"),
            });
        }
        self.expect('[')?;
        if let Tok::Num(n) = self.peek().clone() {
            if n == BigInt::from(1) {
                self.bump();
                self.expect(']')?;
                return Ok((Monomial::one(), pos));
            }
            return self.syntax("the only numeric exponential atom is `1`");
        }
        let mut pairs = Vec::new();
        loop {
            let (p, ppos) = self.ident()?;
            let Some(sym) = self.s.table.param(&p) else {
                return Err(ParseError::UnknownSymbol { pos: ppos, name: p });
            };
            let e = if self.is_punct('^') {
                self.bump();
                self.exponent()?
            } else {
                1
            };
            if e.is_zero() {
                return Self::invalid(ppos, "zero exponent in an exponential atom");
            }
            pairs.push((sym, e));
            if self.is_punct('*') {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(']')?;
        Ok((Monomial::from_pairs(pairs), pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly2 {
        Poly2::x()
    }
    fn y() -> Poly2 {
        Poly2::y()
    }

    #[test]
    fn type3_session() {
        let s = parse("param a; let D = a*X dX + (2*a*Y + X^2) dY;").unwrap();
        let a = Coeff::param("a");
        let want = Derivation::new(x().scale(&a), &y().scale(&(&a * &Coeff::int(2))) + &x().pow(2));
        assert_eq!(s.get("D"), Some(&Binding::Derivation(want)));
    }

    #[test]
    fn polynomial_binding() {
        let s = parse("let f = X^2 - 1;").unwrap();
        assert_eq!(s.get("f"), Some(&Binding::Poly(&x().pow(2) - &Poly2::one())));
    }

    #[test]
    fn dangling_operator_points_at_it() {
        let e = parse("let D = X dX +").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { .. }), "{e}");
        assert_eq!(e.pos(), Pos { line: 1, col: 14 });
    }

    #[test]
    fn error_positions_span_lines() {
        let e = parse("param a;\nlet f = a*Z;").unwrap_err();
        assert_eq!(
            e,
            ParseError::UnknownSymbol {
                pos: Pos { line: 2, col: 11 },
                name: "Z".into()
            }
        );
    }

    #[test]
    fn duplicates_and_reserved_names() {
        assert!(matches!(parse("param a, a;"), Err(ParseError::DuplicateName { .. })));
        assert!(matches!(parse("let f = X; let f = Y;"), Err(ParseError::DuplicateName { .. })));
        assert!(matches!(parse("param a; let a = X;"), Err(ParseError::DuplicateName { .. })));
        assert!(matches!(parse("param b; exp E[b]; exp E[b];"), Err(ParseError::DuplicateName { .. })));
        assert!(matches!(parse("param X;"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("let id = X;"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn semantic_errors() {
        assert!(matches!(parse("let f = X / Y;"), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse("let f = X / 0;"), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse("let D = X + Y dY;"), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse("let w = elemX(X);"), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse("let w = affine(1, 1, 1, 1; 0, 0);"), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse("resonate E[b] = 1;"), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse("param b; exp E[b]; resonate E[b] = 0;"), Err(ParseError::Invalid { .. })));
    }

    #[test]
    fn printing() {
        let s = parse(
            "param b;\nlet f = 2*X^2 + Y;\nlet D = (X^3 - 1) dY;\nlet m = [X + 1, E[b]*Y];\nlet z = 0 dX;",
        )
        .unwrap();
        let shown: Vec<String> = s.bindings().map(|(_, b)| b.to_string()).collect();
        assert_eq!(shown, ["2*X^2 + Y", "(X^3 - 1) dY", "[X + 1, E[b]*Y]", "0 dX"]);
        assert_eq!(
            s.to_string(),
            "param b;\nexp E[b];\nlet f = 2*X^2 + Y;\nlet D = (X^3 - 1) dY;\nlet m = [X + 1, E[b]*Y];\nlet z = 0 dX;\n"
        );
    }

    #[test]
    fn words_and_resonances() {
        let text = "param b, t;\nexp E[b*t];\nresonate E[b*t] = 1;\nlet w = elemY(X^2) * affine(1, 2, 0, 1; 1/2, -b);\n";
        let s = parse(text).unwrap();
        assert_eq!(s.to_string(), text);
        assert!(matches!(s.get("w"), Some(Binding::Word(w)) if w.len() == 2));
        assert!(s.table.has_resonances());
    }

    #[test]
    fn bindings_can_be_reused() {
        let s = parse("let f = X^2; let D = f*Y dY; let g = f^2 - f;").unwrap();
        assert_eq!(s.get("g"), Some(&Binding::Poly(&x().pow(4) - &x().pow(2))));
        assert!(matches!(parse("let D = X dY; let g = D + 1;"), Err(ParseError::Invalid { .. })));
    }

    #[test]
    fn bare_partials() {
        let s = parse("let D = dX - Y dY;").unwrap();
        assert_eq!(s.get("D"), Some(&Binding::Derivation(Derivation::new(Poly2::one(), -&y()))));
    }

    #[test]
    fn rational_function_coefficients_round_trip() {
        let text = "param a, b;\nlet f = (a + 1)/(b - 2)*X^2 - a/b^2*Y + (a - 1) dX;";
        assert!(parse(text).is_err());
        let text = "param a, b;\nlet D = (a + 1)/(b - 2)*X^2 dX + (a - 1) dY;\nlet f = -a/b^2*Y + 1/E[a];\n";
        let s = parse(text).unwrap();
        let again = parse(&s.to_string()).unwrap();
        let pairs: Vec<_> = s.bindings().zip(again.bindings()).collect();
        assert_eq!(pairs.len(), 2);
        for ((n1, b1), (n2, b2)) in pairs {
            assert_eq!((n1, b1), (n2, b2));
        }
    }
}
