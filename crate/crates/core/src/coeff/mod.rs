//! Exact scalars: the rational function field ℚ(params, E's).
//!
//! Every implemented statement is a polynomial identity in its parameters,
//! so working over ℚ(params) instead of an algebraically closed field loses
//! nothing: ℚ(params) embeds into ℂ for generic parameter values. The
//! exponential symbols `E[m]` stand for `e^m` and are free transcendentals
//! unless a resonance assigns them a value. Since this is a field, the
//! Laurent behaviour of `E[m]` (negative powers) comes for free.

mod mpoly;
mod symbol;
mod table;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use mpoly::{MPoly, Monomial};
pub use symbol::{is_valid_param_name, Symbol};
pub use table::ParamTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("denominator vanishes after substitution")]
    ZeroAfterSubstitution,
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent {0} is not a polynomial in the parameters")]
    NonPolynomialExponent(String),
    #[error("exponent {0} has a non-integer coefficient; only integer multiples can be exponentiated")]
    NonIntegerExponent(String),
    #[error("exponent {0} contains an exponential symbol")]
    NestedExponential(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
    #[error("`{0}` is not an exponential symbol")]
    NotExponential(String),
    #[error("invalid resonance value for {0}: must be nonzero and free of exponential symbols")]
    InvalidResonance(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Rat(BigRational),
    /// Reduced fraction with at least one symbol; `den` is monic.
    Frac { num: MPoly, den: MPoly },
}

/// An element of ℚ(params, E's) in canonical reduced form.
///
/// Structural equality is mathematical equality: numerator and denominator
/// are coprime and the denominator is monic in the grlex order on symbols.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coeff(Repr);

impl Default for Coeff {
    fn default() -> Self {
        Coeff::zero()
    }
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff(Repr::Rat(BigRational::zero()))
    }

    pub fn one() -> Self {
        Coeff(Repr::Rat(BigRational::one()))
    }

    pub fn int(n: i64) -> Self {
        Coeff(Repr::Rat(BigRational::from_integer(n.into())))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Coeff(Repr::Rat(BigRational::new(n.into(), d.into())))
    }

    pub fn rational(q: BigRational) -> Self {
        Coeff(Repr::Rat(q))
    }

    pub fn symbol(s: Symbol) -> Self {
        Coeff::from_poly(MPoly::var(s))
    }

    /// Shorthand for the parameter symbol `name`.
    pub fn param(name: &str) -> Self {
        Coeff::symbol(Symbol::param(name))
    }

    pub fn from_poly(p: MPoly) -> Self {
        match p.as_constant() {
            Some(c) => Coeff(Repr::Rat(c)),
            None => Coeff(Repr::Frac {
                num: p,
                den: MPoly::one(),
            }),
        }
    }

    /// Builds the canonical form of `num / den`.
    pub fn normalize(num: MPoly, den: MPoly) -> Result<Self, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Coeff::zero());
        }
        if let Some(d) = den.as_constant() {
            return Ok(Coeff::from_poly(num.scale(&d.recip())));
        }
        let g = MPoly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        Ok(Coeff::from_reduced(num, den))
    }

    /// Assembles an already coprime fraction, normalizing the denominator.
    fn from_reduced(num: MPoly, den: MPoly) -> Self {
        let lc = den.leading_coeff();
        let (num, den) = if lc.is_one() {
            (num, den)
        } else {
            let inv = lc.recip();
            (num.scale(&inv), den.scale(&inv))
        };
        if den.is_one() {
            Coeff::from_poly(num)
        } else {
            Coeff(Repr::Frac { num, den })
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Rat(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Rat(q) if q.is_one())
    }

    /// The rational value when no symbol occurs.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(q) => Some(q),
            Repr::Frac { .. } => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .and_then(|q| q.numer().to_i64())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0, Repr::Rat(_))
    }

    pub fn numer(&self) -> MPoly {
        match &self.0 {
            Repr::Rat(q) => MPoly::constant(q.clone()),
            Repr::Frac { num, .. } => num.clone(),
        }
    }

    pub fn denom(&self) -> MPoly {
        match &self.0 {
            Repr::Rat(_) => MPoly::one(),
            Repr::Frac { den, .. } => den.clone(),
        }
    }

    /// True when the denominator is 1.
    pub fn is_polynomial(&self) -> bool {
        match &self.0 {
            Repr::Rat(_) => true,
            Repr::Frac { den, .. } => den.is_one(),
        }
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        match &self.0 {
            Repr::Rat(_) => Vec::new(),
            Repr::Frac { num, den } => {
                let mut s = num.symbols();
                s.extend(den.symbols());
                s.sort();
                s.dedup();
                s
            }
        }
    }

    pub fn contains_exp(&self) -> bool {
        self.symbols().iter().any(Symbol::is_exp)
    }

    /// Sign of the leading numerator coefficient; used for printing.
    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Rat(q) => q.is_negative(),
            Repr::Frac { num, .. } => num.leading_coeff().is_negative(),
        }
    }

    pub fn inv(&self) -> Result<Coeff, CoeffError> {
        match &self.0 {
            Repr::Rat(q) if q.is_zero() => Err(CoeffError::DivisionByZero),
            Repr::Rat(q) => Ok(Coeff(Repr::Rat(q.recip()))),
            Repr::Frac { num, den } => Ok(Coeff::from_reduced(den.clone(), num.clone())),
        }
    }

    pub fn checked_div(&self, rhs: &Coeff) -> Result<Coeff, CoeffError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: i64) -> Coeff {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        match &self.0 {
            Repr::Rat(q) => Coeff(Repr::Rat(num_traits::pow(q.clone(), e as usize))),
            Repr::Frac { num, den } => {
                let e = e as u32;
                Coeff(Repr::Frac {
                    num: num.pow(e),
                    den: den.pow(e),
                })
            }
        }
    }

    /// A square root in the field, if one exists. The sign is chosen so
    /// the numerator's leading coefficient is positive.
    pub fn sqrt(&self) -> Option<Coeff> {
        match &self.0 {
            Repr::Rat(q) => mpoly::rational_sqrt(q).map(Coeff::rational),
            Repr::Frac { num, den } => {
                let r = (num * den).sqrt()?;
                Coeff::normalize(r, den.clone()).ok()
            }
        }
    }

    /// Replaces symbols by values. `f` returns `None` to keep a symbol.
    pub fn map_symbols(
        &self,
        f: &dyn Fn(Symbol) -> Result<Option<Coeff>, CoeffError>,
    ) -> Result<Coeff, CoeffError> {
        match &self.0 {
            Repr::Rat(_) => Ok(self.clone()),
            Repr::Frac { num, den } => {
                let n = eval_mpoly(num, f)?;
                let d = eval_mpoly(den, f)?;
                if d.is_zero() {
                    return Err(CoeffError::ZeroAfterSubstitution);
                }
                n.checked_div(&d)
            }
        }
    }

    /// Substitutes `value` for the symbol `s`.
    ///
    /// Substituting a parameter also rewrites the exponential symbols whose
    /// atom mentions it, e.g. `E[b*t]` at `t = t + s` becomes
    /// `E[b*s]*E[b*t]` and at `t = 0` becomes 1.
    pub fn substitute(&self, s: Symbol, value: &Coeff) -> Result<Coeff, CoeffError> {
        self.map_symbols(&|u| {
            if u == s {
                return Ok(Some(value.clone()));
            }
            match u.exp_atom() {
                Some(atom) if !s.is_exp() && atom.exponent(s) > 0 => {
                    let a = Coeff::from_poly(MPoly::term(BigRational::one(), atom.clone()));
                    Ok(Some(Coeff::exp_of(&a.substitute(s, value)?)?))
                }
                _ => Ok(None),
            }
        })
    }

    /// `e^λ` as a product of exponential symbols, using `e^(nλ) = E[λ]^n`
    /// and `e^(λ+μ) = e^λ e^μ` over the monomials of `λ`.
    pub fn exp_of(lambda: &Coeff) -> Result<Coeff, CoeffError> {
        if !lambda.is_polynomial() {
            return Err(CoeffError::NonPolynomialExponent(lambda.to_string()));
        }
        if lambda.contains_exp() {
            return Err(CoeffError::NestedExponential(lambda.to_string()));
        }
        let mut out = Coeff::one();
        for (m, c) in lambda.numer().terms() {
            if !c.is_integer() {
                return Err(CoeffError::NonIntegerExponent(lambda.to_string()));
            }
            let k = c
                .numer()
                .to_i64()
                .ok_or_else(|| CoeffError::NonIntegerExponent(lambda.to_string()))?;
            out = &out * &Coeff::symbol(Symbol::exp(m.clone())).pow(k);
        }
        Ok(out)
    }

    /// Derivative with respect to the parameter `s`, with
    /// `d/ds E[m] = (dm/ds) E[m]` for exponential symbols.
    pub fn derivative(&self, s: Symbol) -> Coeff {
        match &self.0 {
            Repr::Rat(_) => Coeff::zero(),
            Repr::Frac { num, den } => {
                let dn = total_derivative(num, s);
                let dd = total_derivative(den, s);
                let top = &(&dn * den) - &(num * &dd);
                Coeff::normalize(top, den * den).expect("nonzero denominator")
            }
        }
    }

    /// Coefficient of `s¹` in the Taylor expansion at `s = 0`.
    pub fn taylor_linear(&self, s: Symbol) -> Result<Coeff, CoeffError> {
        self.derivative(s).substitute(s, &Coeff::zero())
    }

    /// Applies every resonance declared in `table`.
    pub fn resonate(&self, table: &ParamTable) -> Result<Coeff, CoeffError> {
        if !table.has_resonances() {
            return Ok(self.clone());
        }
        self.map_symbols(&|u| Ok(table.resonance(u).cloned()))
    }

    /// True when printing as a factor of a product needs parentheses.
    pub(crate) fn needs_parens(&self) -> bool {
        match &self.0 {
            Repr::Rat(_) => false,
            Repr::Frac { num, den } => den.is_one() && num.num_terms() > 1,
        }
    }
}

fn eval_mpoly(
    p: &MPoly,
    f: &dyn Fn(Symbol) -> Result<Option<Coeff>, CoeffError>,
) -> Result<Coeff, CoeffError> {
    let mut cache: Vec<(Symbol, Coeff)> = Vec::new();
    let mut acc = MPoly::zero();
    let mut rest = Coeff::zero();
    for (m, c) in p.terms() {
        let mut kept = Monomial::one();
        let mut val = Coeff::rational(c.clone());
        for (s, e) in m.iter() {
            let v = match cache.iter().find(|(t, _)| *t == s) {
                Some((_, v)) => Some(v.clone()),
                None => {
                    let v = f(s)?;
                    if let Some(v) = &v {
                        cache.push((s, v.clone()));
                    }
                    v
                }
            };
            match v {
                Some(v) => val = &val * &v.pow(e as i64),
                None => kept = kept.mul(&Monomial::from_pairs([(s, e)])),
            }
        }
        if let Some(q) = val.as_rational() {
            acc = &acc + &MPoly::term(q.clone(), kept);
        } else {
            rest = &rest + &(&val * &Coeff::from_poly(MPoly::term(BigRational::one(), kept)));
        }
    }
    Ok(&Coeff::from_poly(acc) + &rest)
}

fn total_derivative(p: &MPoly, s: Symbol) -> MPoly {
    let mut out = p.partial(s);
    for u in p.symbols() {
        if let Some(atom) = u.exp_atom() {
            let inner = MPoly::term(BigRational::one(), atom.clone()).partial(s);
            if !inner.is_zero() {
                out = &out + &(&(&p.partial(u) * &inner) * &MPoly::var(u));
            }
        }
    }
    out
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::int(n)
    }
}

impl From<BigRational> for Coeff {
    fn from(q: BigRational) -> Self {
        Coeff::rational(q)
    }
}

impl From<Symbol> for Coeff {
    fn from(s: Symbol) -> Self {
        Coeff::symbol(s)
    }
}

fn parts(c: &Coeff) -> (MPoly, MPoly) {
    (c.numer(), c.denom())
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        if let (Repr::Rat(a), Repr::Rat(b)) = (&self.0, &rhs.0) {
            return Coeff(Repr::Rat(a + b));
        }
        let (n1, d1) = parts(self);
        let (n2, d2) = parts(rhs);
        if d1 == d2 {
            if d1.is_one() {
                return Coeff::from_poly(&n1 + &n2);
            }
            return Coeff::normalize(&n1 + &n2, d1).expect("nonzero denominator");
        }
        // A polynomial plus a reduced fraction stays reduced.
        if d1.is_one() {
            return Coeff::from_reduced(&(&n1 * &d2) + &n2, d2);
        }
        if d2.is_one() {
            return Coeff::from_reduced(&n1 + &(&n2 * &d1), d1);
        }
        // With g = gcd(d1, d2) and coprime cofactors, any common factor of
        // the sum and d1 * d2 / g divides g.
        let g = MPoly::gcd(&d1, &d2);
        let (c1, c2) = if g.is_one() {
            (d1.clone(), d2.clone())
        } else {
            (
                d1.exact_div(&g).expect("gcd divides"),
                d2.exact_div(&g).expect("gcd divides"),
            )
        };
        let num = &(&n1 * &c2) + &(&n2 * &c1);
        if num.is_zero() {
            return Coeff::zero();
        }
        let den = &d1 * &c2;
        if g.is_one() {
            return Coeff::from_reduced(num, den);
        }
        let h = MPoly::gcd(&num, &g);
        if h.is_one() {
            Coeff::from_reduced(num, den)
        } else {
            Coeff::from_reduced(
                num.exact_div(&h).expect("gcd divides"),
                den.exact_div(&h).expect("gcd divides"),
            )
        }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        self + &(-rhs)
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => return Coeff(Repr::Rat(a * b)),
            (Repr::Rat(a), _) | (_, Repr::Rat(a)) if a.is_zero() => return Coeff::zero(),
            _ => {}
        }
        let (n1, d1) = parts(self);
        let (n2, d2) = parts(rhs);
        if d1.is_one() && d2.is_one() {
            return Coeff::from_poly(&n1 * &n2);
        }
        // Cross-cancel; both denominators are monic so their product is too.
        let g1 = MPoly::gcd(&n1, &d2);
        let g2 = MPoly::gcd(&n2, &d1);
        let cut = |p: &MPoly, g: &MPoly| {
            if g.is_one() {
                p.clone()
            } else {
                p.exact_div(g).expect("gcd divides")
            }
        };
        let num = &cut(&n1, &g1) * &cut(&n2, &g2);
        let den = &cut(&d1, &g2) * &cut(&d2, &g1);
        Coeff::from_reduced(num, den)
    }
}

impl Div for &Coeff {
    type Output = Coeff;
    fn div(self, rhs: &Coeff) -> Coeff {
        self.checked_div(rhs).expect("division by zero coefficient")
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match &self.0 {
            Repr::Rat(q) => Coeff(Repr::Rat(-q)),
            Repr::Frac { num, den } => Coeff(Repr::Frac {
                num: -num,
                den: den.clone(),
            }),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Coeff {
            type Output = Coeff;
            fn $m(self, rhs: Coeff) -> Coeff { (&self).$m(&rhs) }
        }
        impl $tr<&Coeff> for Coeff {
            type Output = Coeff;
            fn $m(self, rhs: &Coeff) -> Coeff { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

impl std::iter::Sum for Coeff {
    fn sum<I: Iterator<Item = Coeff>>(iter: I) -> Coeff {
        iter.fold(Coeff::zero(), |a, b| &a + &b)
    }
}

fn is_bare_power(p: &MPoly) -> bool {
    match p.leading() {
        Some((m, c)) => p.num_terms() == 1 && c.is_one() && m.iter().count() == 1,
        None => false,
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(q) => mpoly::fmt_rational(q, f),
            Repr::Frac { num, den } if den.is_one() => write!(f, "{num}"),
            Repr::Frac { num, den } => {
                if num.num_terms() > 1 {
                    write!(f, "({num})")?;
                } else {
                    write!(f, "{num}")?;
                }
                if is_bare_power(den) {
                    write!(f, "/{den}")
                } else {
                    write!(f, "/({den})")
                }
            }
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Factorial as a coefficient.
pub fn factorial(n: u32) -> Coeff {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Coeff::rational(BigRational::from_integer(acc))
}
