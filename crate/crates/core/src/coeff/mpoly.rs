//! Sparse multivariate polynomials over the rationals in parameter symbols.
//!
//! These are the numerators and denominators of [`super::Coeff`]. The only
//! nontrivial algorithm here is the gcd (recursive primitive PRS), which
//! keeps coefficient fractions reduced and therefore canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::symbol::Symbol;

/// A power product of symbols, sorted by symbol name, without zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(Symbol, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(s: Symbol) -> Self {
        let mut v = SmallVec::new();
        v.push((s, 1));
        Monomial(v)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, u32)>) -> Self {
        let mut m = Monomial::one();
        for (s, e) in pairs {
            m = m.mul(&Monomial::power(s, e));
        }
        m
    }

    fn power(s: Symbol, e: u32) -> Self {
        let mut v = SmallVec::new();
        if e > 0 {
            v.push((s, e));
        }
        Monomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, s: Symbol) -> u32 {
        self.0
            .iter()
            .find(|(t, _)| *t == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = self.0[i];
            let (b, eb) = other.0[j];
            match a.cmp(&b) {
                Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
                Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::new();
        let mut j = 0;
        for &(a, ea) in &self.0 {
            if j < other.0.len() && other.0[j].0 < a {
                return None;
            }
            let eb = if j < other.0.len() && other.0[j].0 == a {
                j += 1;
                other.0[j - 1].1
            } else {
                0
            };
            match ea.cmp(&eb) {
                Ordering::Less => return None,
                Ordering::Equal => {}
                Ordering::Greater => out.push((a, ea - eb)),
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes the symbol `s`, returning its exponent.
    fn split(&self, s: Symbol) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(t, k)| {
                if *t == s {
                    e = *k;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (e, Monomial(rest))
    }

    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(a, ea)), Some(&(b, eb))) => match a.cmp(&b) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (None, None) => return Ordering::Equal,
            }
        }
    }
}

/// Graded lexicographic order; symbols earlier by name are more significant.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "{s}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Polynomial over ℚ in symbols; terms keyed by monomial in grlex order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        MPoly::term(c, Monomial::one())
    }

    pub fn var(s: Symbol) -> Self {
        MPoly::term(BigRational::one(), Monomial::var(s))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The rational value of a polynomial without symbols.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(Monomial::is_one)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Sorted, deduplicated list of symbols present.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self.terms.keys().flat_map(|m| m.iter().map(|(s, _)| s)).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &BigRational) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(n, k)| (n.mul(m), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
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

    /// Scales so that the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> MPoly {
        match self.leading() {
            None => MPoly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Rational content and primitive integer part: `self = content * prim`,
    /// where `prim` has coprime integer coefficients and positive leading one.
    pub fn integer_primitive(&self) -> (BigRational, MPoly) {
        if self.is_zero() {
            return (BigRational::zero(), MPoly::zero());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = num_integer::lcm(den_lcm, c.denom().clone());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_integer::gcd(num_gcd, n);
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        (content.clone(), self.scale(&content.recip()))
    }

    /// Formal partial derivative with respect to a symbol (treated as an
    /// independent indeterminate).
    pub fn partial(&self, s: Symbol) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(s);
            if e > 0 {
                let m2 = rest.mul(&Monomial::power(s, e - 1));
                out.add_term(m2, c * BigRational::from_integer(e.into()));
            }
        }
        out
    }

    /// Coefficients with respect to `s`: index `k` holds the coefficient of `s^k`.
    pub fn to_univariate(&self, s: Symbol) -> Vec<MPoly> {
        let mut out: Vec<MPoly> = vec![MPoly::zero(); self.degree_in(s) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(s);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_univariate(s: Symbol, coeffs: &[MPoly]) -> MPoly {
        let mut out = MPoly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let shift = Monomial::power(s, k as u32);
            for (m, v) in &c.terms {
                out.add_term(m.mul(&shift), v.clone());
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        let (dm, dc) = d.leading()?;
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = MPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc / dc;
            rem = &rem - &d.mul_term(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Exact square root, if `self` is the square of a polynomial.
    ///
    /// Terms of the root are peeled off from the top: when `p = q²` and
    /// `q_k` is the sum of the `k` largest terms of `q`, the leading term of
    /// `p - q_k²` is `2 lead(q) t_{k+1}`.
    pub fn sqrt(&self) -> Option<MPoly> {
        let Some((m, c)) = self.leading() else {
            return Some(MPoly::zero());
        };
        let half = Monomial(
            m.iter()
                .map(|(s, e)| (e % 2 == 0).then_some((s, e / 2)))
                .collect::<Option<_>>()?,
        );
        let root_c = rational_sqrt(c)?;
        let two_lead = &root_c * BigRational::from_integer(2.into());
        let mut q = MPoly::term(root_c, half.clone());
        let mut last = half.clone();
        loop {
            let r = self - &(&q * &q);
            let Some((rm, rc)) = r.leading() else {
                return Some(q);
            };
            let tm = rm.div(&half)?;
            if tm >= last {
                return None;
            }
            q.add_term(tm.clone(), rc / &two_lead);
            last = tm;
        }
    }

    /// Greatest common divisor, normalized to be monic (1 for coprime inputs).
    pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() || a == b {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return MPoly::one();
        }
        if a.num_terms() <= b.num_terms() {
            if b.exact_div(a).is_some() {
                return a.monic();
            }
        } else if a.exact_div(b).is_some() {
            return b.monic();
        }
        let sa = a.symbols();
        let sb = b.symbols();
        if let Some(&x) = sa.iter().find(|s| !sb.contains(s)) {
            return MPoly::gcd(&content(&a.to_univariate(x)), b);
        }
        if let Some(&x) = sb.iter().find(|s| !sa.contains(s)) {
            return MPoly::gcd(a, &content(&b.to_univariate(x)));
        }
        let x = sa[0];
        let ua = a.to_univariate(x);
        let ub = b.to_univariate(x);
        let ca = content(&ua);
        let cb = content(&ub);
        let g = MPoly::gcd(&ca, &cb);
        let pa = divide_all(&ua, &ca);
        let pb = divide_all(&ub, &cb);
        let h = primitive_prs(pa, pb);
        (&g * &MPoly::from_univariate(x, &h)).monic()
    }
}

fn trim(u: &mut Vec<MPoly>) {
    while u.len() > 1 && u.last().is_some_and(MPoly::is_zero) {
        u.pop();
    }
}

fn is_zero_uni(u: &[MPoly]) -> bool {
    u.iter().all(MPoly::is_zero)
}

fn content(u: &[MPoly]) -> MPoly {
    let mut g = MPoly::zero();
    for c in u {
        if c.is_zero() {
            continue;
        }
        g = MPoly::gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide_all(u: &[MPoly], c: &MPoly) -> Vec<MPoly> {
    u.iter()
        .map(|k| k.exact_div(c).expect("content divides every coefficient"))
        .collect()
}

fn primitive(u: &[MPoly]) -> Vec<MPoly> {
    let c = content(u);
    let mut v = divide_all(u, &c);
    trim(&mut v);
    v
}

/// Pseudo-remainder of `a` by `b` as univariate polynomials with polynomial
/// coefficients (without the final `lc^e` correction, irrelevant for gcds).
fn pseudo_rem(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let n = b.len() - 1;
    let lc = &b[n];
    let mut r: Vec<MPoly> = a.to_vec();
    trim(&mut r);
    while !is_zero_uni(&r) && r.len() - 1 >= n {
        let d = r.len() - 1;
        let t = r[d].clone();
        for c in r.iter_mut() {
            *c = &*c * lc;
        }
        for (j, bj) in b.iter().enumerate() {
            r[j + d - n] = &r[j + d - n] - &(&t * bj);
        }
        debug_assert!(r[d].is_zero());
        r.pop();
        trim(&mut r);
    }
    r
}

fn primitive_prs(a: Vec<MPoly>, b: Vec<MPoly>) -> Vec<MPoly> {
    let (mut r0, mut r1) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    trim(&mut r0);
    trim(&mut r1);
    loop {
        let r = pseudo_rem(&r0, &r1);
        if is_zero_uni(&r) {
            return primitive(&r1);
        }
        if r.len() == 1 {
            return vec![MPoly::one()];
        }
        r0 = r1;
        r1 = primitive(&r);
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        if self.is_zero() || rhs.is_zero() {
            return MPoly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

/// Square root of a nonnegative rational square.
pub(crate) fn rational_sqrt(c: &BigRational) -> Option<BigRational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    (&n * &n == *c.numer() && &d * &d == *c.denom()).then(|| BigRational::new(n, d))
}

pub(crate) fn fmt_rational(c: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                fmt_rational(&a, f)?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                fmt_rational(&a, f)?;
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn v(name: &str) -> MPoly {
        MPoly::var(Symbol::param(name))
    }

    fn c(n: i64) -> MPoly {
        MPoly::constant(q(n))
    }

    #[test]
    fn grlex_order() {
        let a = Symbol::param("a");
        let b = Symbol::param("b");
        let ma = Monomial::var(a);
        let mb = Monomial::var(b);
        let mab = ma.mul(&mb);
        assert!(ma > mb);
        assert!(mab > ma);
        assert!(Monomial::from_pairs([(b, 2)]) < mab);
        assert!(Monomial::from_pairs([(a, 2)]) > mab);
    }

    #[test]
    fn monomial_division() {
        let a = Symbol::param("a");
        let b = Symbol::param("b");
        let m = Monomial::from_pairs([(a, 2), (b, 1)]);
        assert_eq!(m.div(&Monomial::var(a)), Some(Monomial::from_pairs([(a, 1), (b, 1)])));
        assert_eq!(m.div(&Monomial::from_pairs([(b, 2)])), None);
        assert_eq!(m.div(&Monomial::var(Symbol::param("c"))), None);
        assert_eq!(Monomial::var(b).div(&Monomial::var(a)), None);
    }

    #[test]
    fn gcd_of_difference_of_squares() {
        let a = v("a");
        let b = v("b");
        let p = &(&a * &a) - &(&b * &b);
        let d = &a - &b;
        assert_eq!(MPoly::gcd(&p, &d), d.monic());
        let s = &a + &b;
        assert_eq!(p.exact_div(&d), Some(s));
    }

    #[test]
    fn gcd_with_hidden_common_factor() {
        let a = v("a");
        let b = v("b");
        let t = v("t");
        // (a*t + b) * (a - 2) and (a*t + b) * (b^2 + t)
        let common = &(&a * &t) + &b;
        let p = &common * &(&a - &c(2));
        let r = &common * &(&(&b * &b) + &t);
        assert_eq!(MPoly::gcd(&p, &r), common.monic());
        assert!(MPoly::gcd(&(&a - &c(2)), &(&(&b * &b) + &t)).is_one());
    }

    #[test]
    fn gcd_is_monic_and_rational_scaled() {
        let a = v("a");
        let p = (&a - &c(1)).scale(&q(6));
        let r = (&(&a - &c(1)) * &(&a + &c(3))).scale(&q(4));
        assert_eq!(MPoly::gcd(&p, &r), &a - &c(1));
    }

    #[test]
    fn square_roots() {
        let a = v("a");
        let b = v("b");
        let q = &(&a.scale(&q(3)) - &b) + &c(2);
        assert_eq!((&q * &q).sqrt(), Some(q.clone()));
        assert_eq!((&(&q * &q) + &c(1)).sqrt(), None);
        assert_eq!(a.sqrt(), None);
        assert_eq!(c(-4).sqrt(), None);
        assert_eq!(c(9).scale(&BigRational::new(1.into(), 4.into())).sqrt(), Some(MPoly::constant(BigRational::new(3.into(), 2.into()))));
    }

    #[test]
    fn display() {
        let a = v("a");
        let b = v("b");
        let p = &(&(&a * &a).scale(&q(3)) - &b.scale(&BigRational::new(1.into(), 2.into()))) + &c(1);
        assert_eq!(p.to_string(), "3*a^2 - 1/2*b + 1");
        assert_eq!((-&a).to_string(), "-a");
    }
}
