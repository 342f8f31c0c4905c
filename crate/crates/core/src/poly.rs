//! Sparse polynomials in `X`, `Y` over [`Coeff`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::coeff::{Coeff, CoeffError, ParamTable, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected a polynomial in X alone, got {0}")]
    NotUnivariate(String),
    #[error("polynomial division by zero")]
    DivisionByZero,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

/// Exponent pair of `X^x Y^y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exp2 {
    pub x: u32,
    pub y: u32,
}

impl Exp2 {
    pub fn new(x: u32, y: u32) -> Self {
        Exp2 { x, y }
    }

    pub fn degree(self) -> u32 {
        self.x + self.y
    }
}

/// Graded lexicographic with `X > Y`.
impl Ord for Exp2 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.x.cmp(&other.x))
    }
}

impl PartialOrd for Exp2 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    terms: BTreeMap<Exp2, Coeff>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn one() -> Self {
        Poly2::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Poly2::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Poly2::monomial(Coeff::one(), 1, 0)
    }

    pub fn y() -> Self {
        Poly2::monomial(Coeff::one(), 0, 1)
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::X => Poly2::x(),
            Var::Y => Poly2::y(),
        }
    }

    /// `c X^i Y^j`.
    pub fn monomial(c: Coeff, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Exp2::new(i, j), c);
        }
        Poly2 { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exp2, Coeff)>) -> Self {
        let mut p = Poly2::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exp2, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.degree() == 0)
    }

    /// The value of a polynomial free of `X` and `Y`.
    pub fn as_constant(&self) -> Option<Coeff> {
        self.is_constant().then(|| self.coeff_of(0, 0))
    }

    pub fn coeff_of(&self, i: u32, j: u32) -> Coeff {
        self.terms
            .get(&Exp2::new(i, j))
            .cloned()
            .unwrap_or_else(Coeff::zero)
    }

    /// Terms in descending grlex order.
    pub fn terms(&self) -> impl Iterator<Item = (Exp2, &Coeff)> {
        self.terms.iter().rev().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(Exp2, &Coeff)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|e| e.x).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> u32 {
        self.terms.keys().map(|e| e.y).max().unwrap_or(0)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        match v {
            Var::X => self.deg_x(),
            Var::Y => self.deg_y(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> Poly2 {
        if c.is_zero() {
            return Poly2::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly2 {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly2 {
        let mut acc = Poly2::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial(&self, v: Var) -> Poly2 {
        let mut out = Poly2::zero();
        for (e, c) in &self.terms {
            let (k, e2) = match v {
                Var::X if e.x > 0 => (e.x, Exp2::new(e.x - 1, e.y)),
                Var::Y if e.y > 0 => (e.y, Exp2::new(e.x, e.y - 1)),
                _ => continue,
            };
            out.add_term(e2, c * &Coeff::int(k as i64));
        }
        out
    }

    /// Evaluates at `X = ix`, `Y = iy` (the ring endomorphism `X ↦ ix, Y ↦ iy`).
    pub fn substitute(&self, ix: &Poly2, iy: &Poly2) -> Poly2 {
        if self.is_constant() {
            return self.clone();
        }
        let xs = powers(ix, self.deg_x());
        let ys = powers(iy, self.deg_y());
        let mut out = Poly2::zero();
        // Group by X exponent so each X power is multiplied once.
        let mut by_x: BTreeMap<u32, Poly2> = BTreeMap::new();
        for (e, c) in &self.terms {
            let slot = by_x.entry(e.x).or_default();
            *slot = &*slot + &ys[e.y as usize].scale(c);
        }
        for (i, inner) in by_x {
            out = &out + &(&xs[i as usize] * &inner);
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn try_map_coeffs<E>(
        &self,
        f: impl Fn(&Coeff) -> Result<Coeff, E>,
    ) -> Result<Poly2, E> {
        let mut out = Poly2::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, f(c)?);
        }
        Ok(out)
    }

    pub fn substitute_param(&self, s: Symbol, value: &Coeff) -> Result<Poly2, CoeffError> {
        self.try_map_coeffs(|c| c.substitute(s, value))
    }

    pub fn resonate(&self, table: &ParamTable) -> Result<Poly2, CoeffError> {
        if !table.has_resonances() {
            return Ok(self.clone());
        }
        self.try_map_coeffs(|c| c.resonate(table))
    }

    /// Parameter and exponential symbols occurring in coefficients.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self.terms.values().flat_map(Coeff::symbols).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn swap_xy(&self) -> Poly2 {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (Exp2::new(e.y, e.x), c.clone()))
                .collect(),
        }
    }

    /// True when `Y` does not occur.
    pub fn is_in_x_only(&self) -> bool {
        self.terms.keys().all(|e| e.y == 0)
    }

    /// True when `X` does not occur.
    pub fn is_in_y_only(&self) -> bool {
        self.terms.keys().all(|e| e.x == 0)
    }

    /// Coefficients of a polynomial in `X` alone, lowest degree first.
    pub fn uni_coeffs(&self) -> Result<Vec<Coeff>, PolyError> {
        self.require_univariate()?;
        let mut out = vec![Coeff::zero(); self.deg_x() as usize + 1];
        for (e, c) in &self.terms {
            out[e.x as usize] = c.clone();
        }
        Ok(out)
    }

    /// `Σ c_k v^k`.
    pub fn from_uni(coeffs: &[Coeff], v: Var) -> Poly2 {
        Poly2::from_terms(coeffs.iter().enumerate().map(|(k, c)| {
            let k = k as u32;
            let e = match v {
                Var::X => Exp2::new(k, 0),
                Var::Y => Exp2::new(0, k),
            };
            (e, c.clone())
        }))
    }

    fn require_univariate(&self) -> Result<(), PolyError> {
        if self.is_in_x_only() {
            Ok(())
        } else {
            Err(PolyError::NotUnivariate(self.to_string()))
        }
    }

    /// Evaluates a polynomial in `X` alone at a scalar.
    pub fn eval_uni(&self, at: &Coeff) -> Result<Coeff, PolyError> {
        let cs = self.uni_coeffs()?;
        Ok(cs.iter().rev().fold(Coeff::zero(), |acc, c| &(&acc * at) + c))
    }

    /// Value at the point `(x, y)`.
    pub fn eval(&self, x: &Coeff, y: &Coeff) -> Coeff {
        let xs = scalar_powers(x, self.deg_x());
        let ys = scalar_powers(y, self.deg_y());
        let mut out = Coeff::zero();
        for (e, c) in &self.terms {
            out = &out + &(&(c * &xs[e.x as usize]) * &ys[e.y as usize]);
        }
        out
    }

    pub fn uni_derivative(&self) -> Result<Poly2, PolyError> {
        self.require_univariate()?;
        Ok(self.partial(Var::X))
    }

    pub fn uni_monic(&self) -> Result<Poly2, PolyError> {
        self.require_univariate()?;
        match self.leading() {
            None => Ok(Poly2::zero()),
            Some((_, c)) => Ok(self.scale(&c.inv()?)),
        }
    }

    /// Quotient and remainder of univariate division.
    pub fn uni_div_rem(&self, d: &Poly2) -> Result<(Poly2, Poly2), PolyError> {
        self.require_univariate()?;
        d.require_univariate()?;
        let (de, dc) = d.leading().ok_or(PolyError::DivisionByZero)?;
        let dinv = dc.inv()?;
        let mut q = Poly2::zero();
        let mut r = self.clone();
        while let Some((re, rc)) = r.leading() {
            if re.x < de.x {
                break;
            }
            let t = Poly2::monomial(rc * &dinv, re.x - de.x, 0);
            r = &r - &(&t * d);
            q = &q + &t;
        }
        Ok((q, r))
    }

    /// Monic gcd of univariate polynomials (zero when both are zero).
    pub fn uni_gcd(a: &Poly2, b: &Poly2) -> Result<Poly2, PolyError> {
        let mut a = a.clone();
        let mut b = b.clone();
        a.require_univariate()?;
        b.require_univariate()?;
        while !b.is_zero() {
            let (_, r) = a.uni_div_rem(&b)?;
            a = b;
            b = r;
        }
        a.uni_monic()
    }

    pub fn uni_lcm(a: &Poly2, b: &Poly2) -> Result<Poly2, PolyError> {
        if a.is_zero() || b.is_zero() {
            return Ok(Poly2::zero());
        }
        let g = Poly2::uni_gcd(a, b)?;
        let (q, _) = a.uni_div_rem(&g)?;
        (&q * b).uni_monic()
    }

    /// `p / gcd(p, p')`, monic.
    pub fn uni_squarefree_part(&self) -> Result<Poly2, PolyError> {
        if self.is_zero() {
            return Ok(Poly2::zero());
        }
        let g = Poly2::uni_gcd(self, &self.uni_derivative()?)?;
        let (q, _) = self.uni_div_rem(&g)?;
        q.uni_monic()
    }

    /// Displays with custom names for `X` and `Y`.
    pub fn display_with<'a>(&'a self, x: &'a str, y: &'a str) -> impl fmt::Display + 'a {
        Named { p: self, x, y }
    }
}

fn scalar_powers(base: &Coeff, n: u32) -> Vec<Coeff> {
    let mut out = vec![Coeff::one()];
    for k in 1..=n as usize {
        let next = &out[k - 1] * base;
        out.push(next);
    }
    out
}

fn powers(base: &Poly2, n: u32) -> Vec<Poly2> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(Poly2::one());
    for k in 1..=n as usize {
        let next = &out[k - 1] * base;
        out.push(next);
    }
    out
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        let mut out = Poly2::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(Exp2::new(e1.x + e2.x, e1.y + e2.y), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        Poly2 {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Poly2 {
            type Output = Poly2;
            fn $m(self, rhs: Poly2) -> Poly2 { (&self).$m(&rhs) }
        }
        impl $tr<&Poly2> for Poly2 {
            type Output = Poly2;
            fn $m(self, rhs: &Poly2) -> Poly2 { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        -&self
    }
}

impl From<Coeff> for Poly2 {
    fn from(c: Coeff) -> Self {
        Poly2::constant(c)
    }
}

struct Named<'a> {
    p: &'a Poly2,
    x: &'a str,
    y: &'a str,
}

fn write_monomial(f: &mut fmt::Formatter<'_>, e: Exp2, x: &str, y: &str) -> fmt::Result {
    let mut first = true;
    for (name, k) in [(x, e.x), (y, e.y)] {
        if k == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(name)?;
        if k > 1 {
            write!(f, "^{k}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.p.terms().enumerate() {
            let s = c.to_string();
            // A bare constant term can be spliced in as is, sign included.
            let (neg, body) = if c.needs_parens() && e.degree() > 0 {
                (false, format!("({s})"))
            } else {
                match s.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, s),
                }
            };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if e.degree() == 0 {
                f.write_str(&body)?;
            } else if body == "1" {
                write_monomial(f, e, self.x, self.y)?;
            } else {
                write!(f, "{body}*")?;
                write_monomial(f, e, self.x, self.y)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.display_with("X", "Y"), f)
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
