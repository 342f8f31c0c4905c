//! Isotropy groups of the normal forms.
//!
//! A [`Form`] names one of the normal-form derivations. For each form there is
//! a parametrized family of automorphisms commuting with the derivation
//! ([`Target::Derivation`]) or with its exponential ([`Target::Exponential`]).
//! Families are described by a [`FamilySpec`], instantiated from an
//! [`Instance`] by [`family_map`], and checked by [`iso_family`] /
//! [`iso_family_exp`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::automorphism::{commutes_with_automorphism, commutes_with_derivation, PolyMap};
use crate::coeff::{Coeff, CoeffError, ParamTable};
use crate::derivation::{Derivation, DEFAULT_CAP};
use crate::expmap::{exp_lfd, ExpError};
use crate::poly::{Poly2, PolyError, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsoError {
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("expected a polynomial in X alone, got {0}")]
    NotUnivariate(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("parameter {0} must be nonzero")]
    ZeroParameter(String),
    #[error("missing parameter {0}")]
    MissingParameter(String),
    #[error("unexpected parameter {0}")]
    UnexpectedParameter(String),
    #[error("parameter {name} must be {expected}")]
    WrongKind { name: String, expected: String },
    #[error("resonance state does not match the family branch: {0}")]
    ResonanceMismatch(String),
    #[error("invalid normal form: {0}")]
    InvalidForm(String),
    #[error("family member {0} does not commute")]
    Postcondition(String),
    #[error(transparent)]
    Exp(#[from] ExpError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Solutions of `f(αX + β) = γ f(X)` for a univariate `f` of degree `d`.
///
/// For `d ≥ 1`: `β = c(1 - α)`, `γ = α^d` and `α^m = 1`, where `c` is the
/// center (the shift killing the `X^{d-1}` term) and `m` is the gcd of the
/// gaps `d - k` over the support of the centered polynomial (`m = 0` leaves
/// `α` free). For `d = 0`: `γ = 1` and `α`, `β` are free.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryConstraint {
    pub degree: u32,
    pub center: Coeff,
    pub exponent: u32,
}

impl SymmetryConstraint {
    pub fn alpha_allowed(&self, alpha: &Coeff) -> bool {
        !alpha.is_zero() && (self.exponent == 0 || alpha.pow(self.exponent as i64).is_one())
    }

    /// `β` forced by `α`, or `None` when `β` is free.
    pub fn beta_for(&self, alpha: &Coeff) -> Option<Coeff> {
        (self.degree > 0).then(|| &self.center * &(&Coeff::one() - alpha))
    }

    pub fn gamma_for(&self, alpha: &Coeff) -> Coeff {
        alpha.pow(self.degree as i64)
    }

    pub fn admits(&self, alpha: &Coeff, beta: &Coeff, gamma: &Coeff) -> bool {
        self.alpha_allowed(alpha)
            && self.beta_for(alpha).is_none_or(|b| &b == beta)
            && &self.gamma_for(alpha) == gamma
    }

    /// The rational `α` allowed, or `None` when every nonzero `α` is.
    pub fn rational_alphas(&self) -> Option<Vec<BigRational>> {
        match self.exponent {
            0 => None,
            m if m % 2 == 0 => Some(vec![BigRational::one(), -BigRational::one()]),
            _ => Some(vec![BigRational::one()]),
        }
    }
}

impl fmt::Display for SymmetryConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            return f.write_str("gamma = 1; alpha, beta free");
        }
        write!(f, "center = {}; beta = center*(1 - alpha); gamma = alpha^{}; ", self.center, self.degree)?;
        match self.exponent {
            0 => f.write_str("alpha free"),
            m => write!(f, "alpha^{m} = 1"),
        }
    }
}

/// The affine symmetries `f(αX + β) = γ f(X)` of a univariate `f`.
pub fn affine_symmetries(f: &Poly2) -> Result<SymmetryConstraint, IsoError> {
    if f.is_zero() {
        return Err(IsoError::ZeroPolynomial);
    }
    if !f.is_in_x_only() {
        return Err(IsoError::NotUnivariate(f.to_string()));
    }
    let a = f.uni_coeffs()?;
    let d = a.len() - 1;
    if d == 0 {
        return Ok(SymmetryConstraint {
            degree: 0,
            center: Coeff::zero(),
            exponent: 0,
        });
    }
    let center = -(&a[d - 1] / &(&a[d] * &Coeff::int(d as i64)));
    let shifted = f.substitute(&(&Poly2::x() + &Poly2::constant(center.clone())), &Poly2::y());
    let g = shifted.uni_coeffs()?;
    let exponent = (0..d)
        .filter(|&k| !g[k].is_zero())
        .fold(0usize, |acc, k| acc.gcd(&(d - k)));
    Ok(SymmetryConstraint {
        degree: d as u32,
        center,
        exponent: exponent as u32,
    })
}

/// Normal forms of locally finite derivations in two variables.
#[derive(Clone, Debug, PartialEq)]
pub enum Form {
    /// `f(X) ∂/∂Y`
    Type1 { f: Poly2 },
    /// `∂/∂X + bY ∂/∂Y`
    Type2 { b: Coeff },
    /// `aX ∂/∂X + (amY + X^m) ∂/∂Y`
    Type3 { a: Coeff, m: u32 },
    /// `λX ∂/∂X + λY ∂/∂Y`
    Scalar { lambda: Coeff },
    /// `aX ∂/∂X + bY ∂/∂Y` with `a ≠ b`
    Diagonal { a: Coeff, b: Coeff },
    /// `(λX + Y) ∂/∂X + λY ∂/∂Y`
    JordanBlock { lambda: Coeff },
}

impl Form {
    pub fn tag(&self) -> &'static str {
        match self {
            Form::Type1 { .. } => "type1",
            Form::Type2 { .. } => "type2",
            Form::Type3 { .. } => "type3",
            Form::Scalar { .. } => "scalar",
            Form::Diagonal { .. } => "diagonal",
            Form::JordanBlock { .. } => "jordan-block",
        }
    }

    pub fn derivation(&self) -> Derivation {
        let (x, y) = (Poly2::x(), Poly2::y());
        match self {
            Form::Type1 { f } => Derivation::new(Poly2::zero(), f.clone()),
            Form::Type2 { b } => Derivation::new(Poly2::one(), y.scale(b)),
            Form::Type3 { a, m } => {
                Derivation::new(x.scale(a), &y.scale(&(a * &Coeff::int(*m as i64))) + &x.pow(*m))
            }
            Form::Scalar { lambda } => Derivation::new(x.scale(lambda), y.scale(lambda)),
            Form::Diagonal { a, b } => Derivation::new(x.scale(a), y.scale(b)),
            Form::JordanBlock { lambda } => Derivation::new(&x.scale(lambda) + &y, y.scale(lambda)),
        }
    }

    pub fn validate(&self) -> Result<(), IsoError> {
        let nonzero = |c: &Coeff, name: &str| {
            if c.is_zero() {
                Err(IsoError::ZeroParameter(name.to_string()))
            } else {
                Ok(())
            }
        };
        match self {
            Form::Type1 { f } => affine_symmetries(f).map(|_| ()),
            Form::Type2 { .. } => Ok(()),
            Form::Type3 { a, m } => {
                if *m == 0 {
                    return Err(IsoError::InvalidForm("type3 needs m >= 1".into()));
                }
                nonzero(a, "a")
            }
            Form::Scalar { lambda } | Form::JordanBlock { lambda } => nonzero(lambda, "lambda"),
            Form::Diagonal { a, b } => {
                nonzero(a, "a")?;
                nonzero(b, "b")?;
                if a == b {
                    return Err(IsoError::InvalidForm("diagonal needs a != b, use scalar".into()));
                }
                Ok(())
            }
        }
    }
}

/// Which action the family is the isotropy group of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Derivation,
    Exponential,
}

/// `Proven` is the parametrization checked to commute. `Stated` is the
/// commonly quoted alternative, kept for comparison where the two differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Proven,
    Stated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    Nonzero,
    Arbitrary,
    /// Nonzero with `α^m = 1`.
    RootOfUnity(u32),
    /// Determined by the other slots.
    Derived,
    PolyX,
    PolyY,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub name: &'static str,
    pub kind: SlotKind,
}

const fn slot(name: &'static str, kind: SlotKind) -> Slot {
    Slot { name, kind }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(Coeff),
    Poly(Poly2),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(c) => write!(f, "{c}"),
            Value::Poly(p) => write!(f, "{p}"),
        }
    }
}

pub type Instance = BTreeMap<String, Value>;

/// The concrete shape of a family.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// `(αX + β, γY + p(X))` with `f(αX + β) = γ f(X)`
    Type1 { f: Poly2, constraint: SymmetryConstraint },
    /// `(X + β, γY)`
    Translation,
    /// `(X + r(Y), αY + β)`
    ShearY,
    /// `(X + shift, αY + β)`
    ShearYStated,
    /// `(cX, c^m Y + βX^m)`
    Type3 { m: u32 },
    /// `(α^m X, αY + βX^m)`
    Type3Stated { m: u32 },
    /// `(αX + βY, γX + δY)` invertible
    Linear,
    /// `(αX, βY)`, plus `γX^k` in `ρ(Y)` (or `γY^k` in `ρ(X)`) at a resonance
    Diagonal { enlarge: Option<(Var, u32)> },
    /// `(αX + βY, αY)`
    Jordan,
    /// `(αX + γY, βY)`
    JordanStated,
}

impl Shape {
    pub fn slots(&self) -> Vec<Slot> {
        use SlotKind::*;
        match self {
            Shape::Type1 { constraint, .. } => {
                let alpha = match constraint.exponent {
                    0 => Nonzero,
                    m => RootOfUnity(m),
                };
                let beta = if constraint.degree == 0 { Arbitrary } else { Derived };
                vec![slot("alpha", alpha), slot("beta", beta), slot("gamma", Derived), slot("p", PolyX)]
            }
            Shape::Translation => vec![slot("beta", Arbitrary), slot("gamma", Nonzero)],
            Shape::ShearY => vec![slot("alpha", Nonzero), slot("beta", Arbitrary), slot("r", PolyY)],
            Shape::ShearYStated => vec![slot("alpha", Nonzero), slot("beta", Arbitrary), slot("shift", Arbitrary)],
            Shape::Type3 { .. } => vec![slot("c", Nonzero), slot("beta", Arbitrary)],
            Shape::Type3Stated { .. } => vec![slot("alpha", Nonzero), slot("beta", Arbitrary)],
            Shape::Linear => vec![
                slot("alpha", Arbitrary),
                slot("beta", Arbitrary),
                slot("gamma", Arbitrary),
                slot("delta", Arbitrary),
            ],
            Shape::Diagonal { enlarge } => {
                let mut v = vec![slot("alpha", Nonzero), slot("beta", Nonzero)];
                if enlarge.is_some() {
                    v.push(slot("gamma", Arbitrary));
                }
                v
            }
            Shape::Jordan => vec![slot("alpha", Nonzero), slot("beta", Arbitrary)],
            Shape::JordanStated => vec![slot("alpha", Nonzero), slot("beta", Nonzero), slot("gamma", Arbitrary)],
        }
    }

    /// Displayed parametrization.
    pub fn describe(&self) -> String {
        match self {
            Shape::Type1 { f, .. } => format!("[alpha*X + beta, gamma*Y + p(X)] with f(alpha*X + beta) = gamma*f(X), f = {f}"),
            Shape::Translation => "[X + beta, gamma*Y]".into(),
            Shape::ShearY => "[X + r(Y), alpha*Y + beta]".into(),
            Shape::ShearYStated => "[X + shift, alpha*Y + beta]".into(),
            Shape::Type3 { m } => format!("[c*X, c^{m}*Y + beta*X^{m}]"),
            Shape::Type3Stated { m } => format!("[alpha^{m}*X, alpha*Y + beta*X^{m}]"),
            Shape::Linear => "[alpha*X + beta*Y, gamma*X + delta*Y] with alpha*delta - beta*gamma != 0".into(),
            Shape::Diagonal { enlarge: None } => "[alpha*X, beta*Y]".into(),
            Shape::Diagonal { enlarge: Some((Var::Y, k)) } => format!("[alpha*X, beta*Y + gamma*X^{k}]"),
            Shape::Diagonal { enlarge: Some((Var::X, k)) } => format!("[alpha*X + gamma*Y^{k}, beta*Y]"),
            Shape::Jordan => "[alpha*X + beta*Y, alpha*Y]".into(),
            Shape::JordanStated => "[alpha*X + gamma*Y, beta*Y]".into(),
        }
    }
}

/// A parametrized isotropy family.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub form: Form,
    pub target: Target,
    pub variant: Variant,
    pub shape: Shape,
    /// Set when the exponential of a type 2 form sits on the `e^b = 1` branch.
    pub resonant_branch: bool,
    /// Weight analysis of a diagonal form with rational weight ratio.
    pub resonances: Option<DiagResonances>,
}

impl FamilySpec {
    pub fn slots(&self) -> Vec<Slot> {
        self.shape.slots()
    }

    pub fn constraint(&self) -> Option<&SymmetryConstraint> {
        match &self.shape {
            Shape::Type1 { constraint, .. } => Some(constraint),
            _ => None,
        }
    }

    /// Whether the stated and proven parametrizations of this family differ.
    pub fn has_stated_variant(&self) -> bool {
        matches!(
            (&self.form, self.target),
            (Form::Type3 { .. }, Target::Derivation) | (Form::JordanBlock { .. }, Target::Exponential)
        ) || (self.resonant_branch && matches!(self.form, Form::Type2 { .. }))
    }

    /// Fills [`SlotKind::Derived`] slots from the others.
    pub fn complete(&self, inst: &mut Instance) -> Result<(), IsoError> {
        if let Shape::Type1 { constraint, .. } = &self.shape {
            let alpha = scalar(inst, "alpha")?;
            if let Some(beta) = constraint.beta_for(&alpha) {
                inst.insert("beta".into(), Value::Scalar(beta));
            }
            inst.insert("gamma".into(), Value::Scalar(constraint.gamma_for(&alpha)));
        }
        Ok(())
    }

    /// Reads the slot values back off a map of this family's shape. The map
    /// is a member iff instantiating the result reproduces it.
    pub fn extract(&self, m: &PolyMap) -> Instance {
        let (f, g) = (&m.f, &m.g);
        let s = |c: Coeff| Value::Scalar(c);
        let mut out = Instance::new();
        let mut put = |k: &str, v: Value| {
            out.insert(k.to_string(), v);
        };
        match &self.shape {
            Shape::Type1 { .. } => {
                let gamma = g.coeff_of(0, 1);
                put("alpha", s(f.coeff_of(1, 0)));
                put("beta", s(f.coeff_of(0, 0)));
                put("p", Value::Poly(g - &Poly2::y().scale(&gamma)));
                put("gamma", s(gamma));
            }
            Shape::Translation => {
                put("beta", s(f.coeff_of(0, 0)));
                put("gamma", s(g.coeff_of(0, 1)));
            }
            Shape::ShearY | Shape::ShearYStated => {
                put("alpha", s(g.coeff_of(0, 1)));
                put("beta", s(g.coeff_of(0, 0)));
                if self.shape == Shape::ShearY {
                    put("r", Value::Poly(f - &Poly2::x()));
                } else {
                    put("shift", s(f.coeff_of(0, 0)));
                }
            }
            Shape::Type3 { m } => {
                put("c", s(f.coeff_of(1, 0)));
                put("beta", s(g.coeff_of(*m, 0)));
            }
            Shape::Type3Stated { m } => {
                put("alpha", s(g.coeff_of(0, 1)));
                put("beta", s(g.coeff_of(*m, 0)));
            }
            Shape::Linear => {
                put("alpha", s(f.coeff_of(1, 0)));
                put("beta", s(f.coeff_of(0, 1)));
                put("gamma", s(g.coeff_of(1, 0)));
                put("delta", s(g.coeff_of(0, 1)));
            }
            Shape::Diagonal { enlarge } => {
                put("alpha", s(f.coeff_of(1, 0)));
                put("beta", s(g.coeff_of(0, 1)));
                match enlarge {
                    Some((Var::Y, k)) => put("gamma", s(g.coeff_of(*k, 0))),
                    Some((Var::X, k)) => put("gamma", s(f.coeff_of(0, *k))),
                    None => {}
                }
            }
            Shape::Jordan => {
                put("alpha", s(f.coeff_of(1, 0)));
                put("beta", s(f.coeff_of(0, 1)));
            }
            Shape::JordanStated => {
                put("alpha", s(f.coeff_of(1, 0)));
                put("gamma", s(f.coeff_of(0, 1)));
                put("beta", s(g.coeff_of(0, 1)));
            }
        }
        out
    }

    /// Whether `m` is an instance of this family.
    pub fn is_member(&self, m: &PolyMap) -> bool {
        family_map(self, &self.extract(m)).is_ok_and(|r| &r == m)
    }
}

fn scalar(inst: &Instance, name: &str) -> Result<Coeff, IsoError> {
    match inst.get(name) {
        Some(Value::Scalar(c)) => Ok(c.clone()),
        Some(Value::Poly(p)) => p.as_constant().ok_or_else(|| IsoError::WrongKind {
            name: name.to_string(),
            expected: "a scalar".into(),
        }),
        None => Err(IsoError::MissingParameter(name.to_string())),
    }
}

fn poly(inst: &Instance, name: &str) -> Result<Poly2, IsoError> {
    match inst.get(name) {
        Some(Value::Poly(p)) => Ok(p.clone()),
        Some(Value::Scalar(c)) => Ok(Poly2::constant(c.clone())),
        None => Err(IsoError::MissingParameter(name.to_string())),
    }
}

/// `Some(k)` when `r` is an integer `≥ 2`.
fn integer_ratio(r: &Coeff) -> Option<u32> {
    let k = r.as_integer()?;
    (k >= 2).then(|| u32::try_from(k).ok()).flatten()
}

/// The family for `form`, on the branch selected by `table`'s resonances.
pub fn family_spec(form: &Form, target: Target, variant: Variant, table: &ParamTable) -> Result<FamilySpec, IsoError> {
    form.validate()?;
    let stated = variant == Variant::Stated;
    let mut resonant_branch = false;
    let mut resonances = None;
    let shape = match form {
        Form::Type1 { f } => Shape::Type1 {
            f: f.clone(),
            constraint: affine_symmetries(f)?,
        },
        Form::Type2 { b } => {
            let trivial = match target {
                Target::Derivation => b.is_zero(),
                Target::Exponential => Coeff::exp_of(b)?.resonate(table)?.is_one(),
            };
            resonant_branch = trivial && target == Target::Exponential;
            match (trivial, stated && resonant_branch) {
                (false, _) => Shape::Translation,
                (true, false) => Shape::ShearY,
                (true, true) => Shape::ShearYStated,
            }
        }
        Form::Type3 { m, .. } if stated && target == Target::Derivation => Shape::Type3Stated { m: *m },
        Form::Type3 { m, .. } => Shape::Type3 { m: *m },
        Form::Scalar { .. } => Shape::Linear,
        Form::Diagonal { a, b } => {
            let ratio = (b / a).as_rational().cloned();
            let enlarge = ratio.as_ref().and_then(|r| {
                let r = Coeff::rational(r.clone());
                integer_ratio(&r)
                    .map(|k| (Var::Y, k))
                    .or_else(|| integer_ratio(&r.inv().ok()?).map(|k| (Var::X, k)))
            });
            resonances = ratio.map(|r| diag_resonances(&BigRational::one(), &r)).transpose()?;
            Shape::Diagonal { enlarge }
        }
        Form::JordanBlock { .. } if stated && target == Target::Exponential => Shape::JordanStated,
        Form::JordanBlock { .. } => Shape::Jordan,
    };
    Ok(FamilySpec {
        form: form.clone(),
        target,
        variant,
        shape,
        resonant_branch,
        resonances,
    })
}

/// Instantiates the family. Slot domains and constraints are enforced; the
/// commutation itself is not checked here.
pub fn family_map(spec: &FamilySpec, inst: &Instance) -> Result<PolyMap, IsoError> {
    let slots = spec.slots();
    for k in inst.keys() {
        if !slots.iter().any(|s| s.name == k) {
            if matches!(spec.form, Form::Type2 { .. }) && spec.target == Target::Exponential {
                return Err(IsoError::ResonanceMismatch(format!(
                    "parameter {k} does not belong to the {} branch",
                    if spec.resonant_branch { "e^b = 1" } else { "e^b != 1" }
                )));
            }
            return Err(IsoError::UnexpectedParameter(k.clone()));
        }
    }
    for s in &slots {
        match s.kind {
            SlotKind::Nonzero | SlotKind::RootOfUnity(_) => {
                if scalar(inst, s.name)?.is_zero() {
                    return Err(IsoError::ZeroParameter(s.name.to_string()));
                }
            }
            SlotKind::Arbitrary | SlotKind::Derived => {
                scalar(inst, s.name)?;
            }
            SlotKind::PolyX | SlotKind::PolyY => {
                let p = poly(inst, s.name)?;
                let ok = if s.kind == SlotKind::PolyX { p.is_in_x_only() } else { p.is_in_y_only() };
                if !ok {
                    return Err(IsoError::WrongKind {
                        name: s.name.to_string(),
                        expected: format!("a polynomial in {}", if s.kind == SlotKind::PolyX { "X" } else { "Y" }),
                    });
                }
            }
        }
    }
    let sc = |name: &str| scalar(inst, name).expect("checked above");
    let (x, y) = (Poly2::x(), Poly2::y());
    let k = |c: Coeff| Poly2::constant(c);
    let map = match &spec.shape {
        Shape::Type1 { f, constraint } => {
            let (alpha, beta, gamma) = (sc("alpha"), sc("beta"), sc("gamma"));
            if !constraint.admits(&alpha, &beta, &gamma) {
                return Err(IsoError::ConstraintViolated(format!(
                    "f(alpha*X + beta) != gamma*f(X) for f = {f}, (alpha, beta, gamma) = ({alpha}, {beta}, {gamma})"
                )));
            }
            PolyMap::new(&x.scale(&alpha) + &k(beta), &y.scale(&gamma) + &poly(inst, "p")?)
        }
        Shape::Translation => PolyMap::new(&x + &k(sc("beta")), y.scale(&sc("gamma"))),
        Shape::ShearY => PolyMap::new(&x + &poly(inst, "r")?, &y.scale(&sc("alpha")) + &k(sc("beta"))),
        Shape::ShearYStated => PolyMap::new(&x + &k(sc("shift")), &y.scale(&sc("alpha")) + &k(sc("beta"))),
        Shape::Type3 { m } => {
            let c = sc("c");
            PolyMap::new(x.scale(&c), &y.scale(&c.pow(*m as i64)) + &x.pow(*m).scale(&sc("beta")))
        }
        Shape::Type3Stated { m } => {
            let a = sc("alpha");
            PolyMap::new(x.scale(&a.pow(*m as i64)), &y.scale(&a) + &x.pow(*m).scale(&sc("beta")))
        }
        Shape::Linear => {
            let (a, b, c, d) = (sc("alpha"), sc("beta"), sc("gamma"), sc("delta"));
            if (&(&a * &d) - &(&b * &c)).is_zero() {
                return Err(IsoError::ConstraintViolated("alpha*delta - beta*gamma = 0".into()));
            }
            PolyMap::new(&x.scale(&a) + &y.scale(&b), &x.scale(&c) + &y.scale(&d))
        }
        Shape::Diagonal { enlarge } => {
            let mut f = x.scale(&sc("alpha"));
            let mut g = y.scale(&sc("beta"));
            match enlarge {
                Some((Var::Y, k)) => g = &g + &x.pow(*k).scale(&sc("gamma")),
                Some((Var::X, k)) => f = &f + &y.pow(*k).scale(&sc("gamma")),
                None => {}
            }
            PolyMap::new(f, g)
        }
        Shape::Jordan => {
            let a = sc("alpha");
            PolyMap::new(&x.scale(&a) + &y.scale(&sc("beta")), y.scale(&a))
        }
        Shape::JordanStated => PolyMap::new(&x.scale(&sc("alpha")) + &y.scale(&sc("gamma")), y.scale(&sc("beta"))),
    };
    Ok(map)
}

/// A member of the isotropy group of `form`'s derivation.
pub fn iso_family(form: &Form, variant: Variant, inst: &Instance) -> Result<PolyMap, IsoError> {
    let spec = family_spec(form, Target::Derivation, variant, &ParamTable::new())?;
    let m = family_map(&spec, inst)?;
    if !commutes_with_derivation(&m, &form.derivation()) {
        return Err(IsoError::Postcondition(m.to_string()));
    }
    Ok(m)
}

/// `exp` of the form's derivation under `table`'s resonances.
pub fn form_exponential(form: &Form, table: &ParamTable) -> Result<PolyMap, IsoError> {
    Ok(exp_lfd(&form.derivation(), table, DEFAULT_CAP)?)
}

/// A member of the isotropy group of `exp` of `form`'s derivation.
pub fn iso_family_exp(form: &Form, variant: Variant, inst: &Instance, table: &ParamTable) -> Result<PolyMap, IsoError> {
    let spec = family_spec(form, Target::Exponential, variant, table)?;
    let m = family_map(&spec, inst)?.resonate(table)?;
    let psi = form_exponential(form, table)?;
    if !commutes_with_automorphism(&m, &psi) {
        return Err(IsoError::Postcondition(m.to_string()));
    }
    Ok(m)
}

/// Exponent pairs `(m, n)` solving a weight equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    Finite(Vec<(u64, u64)>),
    /// `base + k·direction` for `k ≥ 0`.
    Line { base: (u64, u64), direction: (u64, u64) },
}

impl Support {
    pub fn is_finite(&self) -> bool {
        matches!(self, Support::Finite(_))
    }

    pub fn contains(&self, p: (u64, u64)) -> bool {
        match self {
            Support::Finite(v) => v.contains(&p),
            Support::Line { base, direction } => {
                let (dm, dn) = *direction;
                let (Some(km), Some(kn)) = (p.0.checked_sub(base.0), p.1.checked_sub(base.1)) else {
                    return false;
                };
                let k = if dm != 0 { km / dm } else { kn / dn };
                km == k * dm && kn == k * dn
            }
        }
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Finite(v) => {
                f.write_str("{")?;
                for (i, (m, n)) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "({m}, {n})")?;
                }
                f.write_str("}")
            }
            Support::Line { base, direction } => write!(
                f,
                "{{({}, {}) + k*({}, {}) | k >= 0}}",
                base.0, base.1, direction.0, direction.1
            ),
        }
    }
}

/// Monomials `X^m Y^n` allowed in `ρ(X)` and `ρ(Y)` for `ρ` commuting with
/// `aX ∂/∂X + bY ∂/∂Y`: the solutions of `ma + nb = a` and `ma + nb = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagResonances {
    pub x_support: Support,
    pub y_support: Support,
}

impl DiagResonances {
    /// Whether the supports go beyond `X ↦ X`, `Y ↦ Y`.
    pub fn is_resonant(&self) -> bool {
        self.x_support != Support::Finite(vec![(1, 0)]) || self.y_support != Support::Finite(vec![(0, 1)])
    }

    /// Whether `m` uses only allowed monomials and at least one resonant one.
    /// A map commuting with the diagonal derivation outside `(αX, βY)` is
    /// explained by this.
    pub fn explains(&self, m: &PolyMap) -> bool {
        let within = |p: &Poly2, s: &Support| p.terms().all(|(e, _)| s.contains((e.x as u64, e.y as u64)));
        let extra = |p: &Poly2, main: (u32, u32)| p.terms().any(|(e, _)| (e.x, e.y) != main);
        within(&m.f, &self.x_support)
            && within(&m.g, &self.y_support)
            && (extra(&m.f, (1, 0)) || extra(&m.g, (0, 1)))
    }
}

impl fmt::Display for DiagResonances {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rho(X): {}\nrho(Y): {}", self.x_support, self.y_support)
    }
}

/// Solves `ma + nb = a` and `ma + nb = b` over `m, n ≥ 0` for nonzero rationals.
pub fn diag_resonances(a: &BigRational, b: &BigRational) -> Result<DiagResonances, IsoError> {
    if a.is_zero() {
        return Err(IsoError::ZeroParameter("a".into()));
    }
    if b.is_zero() {
        return Err(IsoError::ZeroParameter("b".into()));
    }
    // Clear denominators: A m + B n = T over the integers.
    let l = a.denom().lcm(b.denom());
    let ai = (a * BigRational::from_integer(l.clone())).to_integer();
    let bi = (b * BigRational::from_integer(l)).to_integer();
    Ok(DiagResonances {
        x_support: solve_weights(&ai, &bi, &ai),
        y_support: solve_weights(&ai, &bi, &bi),
    })
}

fn solve_weights(a: &BigInt, b: &BigInt, t: &BigInt) -> Support {
    let to_u64 = |v: &BigInt| v.to_u64().expect("exponent fits in u64");
    if a.signum() == b.signum() {
        // Bounded: both terms have the sign of t.
        let mut out = Vec::new();
        let mut m = BigInt::zero();
        while (&m * a).abs() <= t.abs() {
            let rest = t - &m * a;
            if rest.is_multiple_of(b) {
                let n = &rest / b;
                if !n.is_negative() {
                    out.push((to_u64(&m), to_u64(&n)));
                }
            }
            m += 1;
        }
        return Support::Finite(out);
    }
    // Opposite signs: n = (t - m a) / b grows with m, so the first
    // nonnegative solution is the base and the kernel gives the direction.
    let g = a.gcd(b);
    let direction = ((b / &g).abs(), (a / &g).abs());
    let mut m = BigInt::zero();
    loop {
        let rest = t - &m * a;
        if rest.is_multiple_of(b) {
            let n = &rest / b;
            if !n.is_negative() {
                return Support::Line {
                    base: (to_u64(&m), to_u64(&n)),
                    direction: (to_u64(&direction.0), to_u64(&direction.1)),
                };
            }
        }
        m += 1;
    }
}
