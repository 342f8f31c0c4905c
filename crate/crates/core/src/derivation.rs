//! Derivations `P ∂/∂X + Q ∂/∂Y` of the polynomial ring in `X`, `Y`.
//!
//! A derivation is determined by its values on the generators, so local
//! finiteness, local nilpotency and semisimplicity are all decided on the
//! span of the iterates of `X` and `Y`: every element of the ring is a
//! polynomial in the generators and Leibniz propagates the finiteness.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

use crate::coeff::{Coeff, CoeffError, ParamTable, Symbol};
use crate::linalg::{Echelon, Insert, Mat};
use crate::poly::{Poly2, PolyError, Var};

pub const DEFAULT_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("iterates of {generator} did not stabilize within {cap} steps (degrees {trace:?})")]
    NotStabilizedWithinCap {
        generator: String,
        cap: usize,
        trace: Vec<u32>,
    },
    #[error("Newton step for the semisimple part hit a singular matrix; specialize the parameters")]
    NonInvertibleNewtonStep,
    #[error("Newton iteration did not converge within {0} steps")]
    NewtonDidNotConverge(usize),
    #[error("iteration cap must be at least 1")]
    InvalidCap,
    #[error("Jordan decomposition postcondition failed: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Derivation {
    pub p_x: Poly2,
    pub p_y: Poly2,
}

impl Derivation {
    pub fn new(p_x: Poly2, p_y: Poly2) -> Self {
        Derivation { p_x, p_y }
    }

    pub fn zero() -> Self {
        Derivation::default()
    }

    /// `∂/∂X` or `∂/∂Y`.
    pub fn partial(v: Var) -> Self {
        match v {
            Var::X => Derivation::new(Poly2::one(), Poly2::zero()),
            Var::Y => Derivation::new(Poly2::zero(), Poly2::one()),
        }
    }

    /// The linear derivation `X ↦ m00 X + m01 Y`, `Y ↦ m10 X + m11 Y`.
    pub fn linear(m: &Mat) -> Self {
        assert_eq!(m.size(), 2, "linear derivations have 2x2 matrices");
        let row = |i: usize| {
            &Poly2::x().scale(m.get(i, 0)) + &Poly2::y().scale(m.get(i, 1))
        };
        Derivation::new(row(0), row(1))
    }

    pub fn is_zero(&self) -> bool {
        self.p_x.is_zero() && self.p_y.is_zero()
    }

    pub fn image(&self, v: Var) -> &Poly2 {
        match v {
            Var::X => &self.p_x,
            Var::Y => &self.p_y,
        }
    }

    /// `D(p) = P ∂p/∂X + Q ∂p/∂Y`.
    pub fn apply(&self, p: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        if !self.p_x.is_zero() {
            let dx = p.partial(Var::X);
            if !dx.is_zero() {
                out = &self.p_x * &dx;
            }
        }
        if !self.p_y.is_zero() {
            let dy = p.partial(Var::Y);
            if !dy.is_zero() {
                out = &out + &(&self.p_y * &dy);
            }
        }
        out
    }

    /// `D^k(p)`.
    pub fn apply_n(&self, p: &Poly2, k: usize) -> Poly2 {
        let mut v = p.clone();
        for _ in 0..k {
            if v.is_zero() {
                break;
            }
            v = self.apply(&v);
        }
        v
    }

    /// `q(D)(p)` for a univariate `q` (in `X`, read as `T`).
    pub fn apply_poly(&self, q: &Poly2, p: &Poly2) -> Result<Poly2, PolyError> {
        let cs = q.uni_coeffs()?;
        let mut out = Poly2::zero();
        let mut v = p.clone();
        for c in &cs {
            out = &out + &v.scale(c);
            v = self.apply(&v);
        }
        Ok(out)
    }

    /// `[D1, D2] = D1 D2 - D2 D1`, computed on the generators.
    pub fn bracket(d1: &Derivation, d2: &Derivation) -> Derivation {
        Derivation::new(
            &d1.apply(&d2.p_x) - &d2.apply(&d1.p_x),
            &d1.apply(&d2.p_y) - &d2.apply(&d1.p_y),
        )
    }

    pub fn scale(&self, c: &Coeff) -> Derivation {
        Derivation::new(self.p_x.scale(c), self.p_y.scale(c))
    }

    /// `a·D` for a ring element `a`.
    pub fn mul_poly(&self, a: &Poly2) -> Derivation {
        Derivation::new(a * &self.p_x, a * &self.p_y)
    }

    pub fn substitute_param(&self, s: Symbol, v: &Coeff) -> Result<Derivation, CoeffError> {
        Ok(Derivation::new(
            self.p_x.substitute_param(s, v)?,
            self.p_y.substitute_param(s, v)?,
        ))
    }

    pub fn resonate(&self, table: &ParamTable) -> Result<Derivation, CoeffError> {
        Ok(Derivation::new(
            self.p_x.resonate(table)?,
            self.p_y.resonate(table)?,
        ))
    }

    /// The 2x2 matrix when `D` is linear and homogeneous.
    pub fn as_linear(&self) -> Option<Mat> {
        let lin = |p: &Poly2| {
            p.terms()
                .all(|(e, _)| e.degree() == 1)
                .then(|| [p.coeff_of(1, 0), p.coeff_of(0, 1)])
        };
        let [a, b] = lin(&self.p_x)?;
        let [c, d] = lin(&self.p_y)?;
        Some(Mat::from_rows(vec![vec![a, b], vec![c, d]]))
    }
}

impl Add for &Derivation {
    type Output = Derivation;
    fn add(self, rhs: &Derivation) -> Derivation {
        Derivation::new(&self.p_x + &rhs.p_x, &self.p_y + &rhs.p_y)
    }
}

impl Sub for &Derivation {
    type Output = Derivation;
    fn sub(self, rhs: &Derivation) -> Derivation {
        Derivation::new(&self.p_x - &rhs.p_x, &self.p_y - &rhs.p_y)
    }
}

impl Neg for &Derivation {
    type Output = Derivation;
    fn neg(self) -> Derivation {
        Derivation::new(-&self.p_x, -&self.p_y)
    }
}

fn fmt_component(f: &mut fmt::Formatter<'_>, p: &Poly2, first: bool, d: &str) -> fmt::Result {
    let s = p.to_string();
    // A lone constant like `a + 1` still needs grouping.
    let compound = s.contains(' ') && !s.starts_with('(');
    if p.num_terms() > 1 || compound {
        if !first {
            f.write_str(" + ")?;
        }
        return write!(f, "({s}) {d}");
    }
    match (first, s.strip_prefix('-')) {
        (true, _) => write!(f, "{s} {d}"),
        (false, Some(rest)) => write!(f, " - {rest} {d}"),
        (false, None) => write!(f, " + {s} {d}"),
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        if !self.p_x.is_zero() {
            fmt_component(f, &self.p_x, true, "dX")?;
            first = false;
        }
        if !self.p_y.is_zero() {
            fmt_component(f, &self.p_y, first, "dY")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The cyclic subspace spanned by the iterates of one polynomial.
#[derive(Clone, Debug)]
pub struct IterSpan {
    pub generator: Poly2,
    /// `g, D(g), ..., D^{k-1}(g)`.
    pub basis: Vec<Poly2>,
    /// Matrix of `D` on `basis`; column `j` holds the coordinates of `D(basis[j])`.
    pub companion: Mat,
    /// Monic annihilating polynomial of least degree, in `X` standing for `T`.
    pub min_poly: Poly2,
    /// Total degree of every computed iterate.
    pub trace: Vec<u32>,
}

/// Iterates `D` on `g` until the iterates become linearly dependent.
pub fn iter_span(d: &Derivation, g: &Poly2, cap: usize) -> Result<IterSpan, DerivationError> {
    if cap == 0 {
        return Err(DerivationError::InvalidCap);
    }
    let mut ech = Echelon::new();
    let mut basis = Vec::new();
    let mut trace = Vec::new();
    let mut v = g.clone();
    for _ in 0..=cap {
        trace.push(v.total_degree());
        match ech.insert(&v) {
            Insert::Independent(_) => {
                let next = d.apply(&v);
                basis.push(v);
                v = next;
            }
            Insert::Dependent(comb) => {
                let k = basis.len();
                // D^k g = Σ c_i D^i g  ⇒  T^k - Σ c_i T^i
                let mut mp: Vec<Coeff> = comb.iter().map(|c| -c).collect();
                mp.push(Coeff::one());
                let mut cols: Vec<Vec<Coeff>> = (0..k)
                    .map(|j| {
                        let mut col = vec![Coeff::zero(); k];
                        if j + 1 < k {
                            col[j + 1] = Coeff::one();
                        }
                        col
                    })
                    .collect();
                if k > 0 {
                    cols[k - 1] = comb;
                }
                return Ok(IterSpan {
                    generator: g.clone(),
                    basis,
                    companion: Mat::from_columns(cols),
                    min_poly: Poly2::from_uni(&mp, Var::X),
                    trace,
                });
            }
        }
    }
    Err(DerivationError::NotStabilizedWithinCap {
        generator: g.to_string(),
        cap,
        trace,
    })
}

/// Local-finiteness report on the generators.
#[derive(Clone, Debug)]
pub struct LfReport {
    pub x_span: IterSpan,
    pub y_span: IterSpan,
    /// lcm of the two cyclic minimal polynomials, in `X` standing for `T`.
    pub min_poly: Poly2,
    pub is_lnd: bool,
    pub is_semisimple: bool,
    pub cap_used: usize,
}

impl LfReport {
    /// Always true: a report exists only for locally finite derivations.
    pub fn is_lf(&self) -> bool {
        true
    }
}

/// Decides local finiteness on `X` and `Y` and classifies the result.
pub fn classify_lf(d: &Derivation, cap: usize) -> Result<LfReport, DerivationError> {
    let x_span = iter_span(d, &Poly2::x(), cap)?;
    let y_span = iter_span(d, &Poly2::y(), cap)?;
    let min_poly = Poly2::uni_lcm(&x_span.min_poly, &y_span.min_poly)?;
    let k = min_poly.deg_x();
    let is_lnd = min_poly == Poly2::monomial(Coeff::one(), k, 0);
    let g = Poly2::uni_gcd(&min_poly, &min_poly.uni_derivative()?)?;
    let is_semisimple = g.is_constant();
    let cap_used = x_span.trace.len().max(y_span.trace.len());
    Ok(LfReport {
        x_span,
        y_span,
        min_poly,
        is_lnd,
        is_semisimple,
        cap_used,
    })
}

/// The basis `V_X + V_Y` of generator iterates and `D`'s matrix on it.
#[derive(Clone, Debug)]
pub struct GeneratorSpan {
    pub basis: Vec<Poly2>,
    pub matrix: Mat,
    /// Coordinates of `X` and `Y` in `basis`.
    pub x_coords: Vec<Coeff>,
    pub y_coords: Vec<Coeff>,
}

pub fn generator_span(d: &Derivation, cap: usize) -> Result<GeneratorSpan, DerivationError> {
    let x_span = iter_span(d, &Poly2::x(), cap)?;
    let mut ech = Echelon::new();
    let mut basis = Vec::new();
    for b in &x_span.basis {
        ech.insert(b);
        basis.push(b.clone());
    }
    let mut v = Poly2::y();
    let mut trace = Vec::new();
    loop {
        trace.push(v.total_degree());
        if trace.len() > cap + 1 {
            return Err(DerivationError::NotStabilizedWithinCap {
                generator: "Y".into(),
                cap,
                trace,
            });
        }
        match ech.insert(&v) {
            Insert::Independent(_) => {
                let next = d.apply(&v);
                basis.push(v);
                v = next;
            }
            Insert::Dependent(_) => break,
        }
    }
    let mut cols = Vec::with_capacity(basis.len());
    for b in &basis {
        let col = ech
            .coordinates(&d.apply(b))
            .expect("generator span is invariant");
        cols.push(col);
    }
    let coords = |p: &Poly2| ech.coordinates(p).expect("generator lies in span");
    Ok(GeneratorSpan {
        x_coords: coords(&Poly2::x()),
        y_coords: coords(&Poly2::y()),
        matrix: Mat::from_columns(cols),
        basis,
    })
}

/// Jordan–Chevalley parts of a locally finite derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct Jordan {
    pub semisimple: Derivation,
    pub nilpotent: Derivation,
}

/// `D = D_s + D_n` with `D_s` semisimple, `D_n` locally nilpotent, `[D_s, D_n] = 0`.
///
/// The semisimple part of `D`'s matrix on `V_X + V_Y` is found by the Newton
/// iteration `S ← S - q(S) q'(S)^{-1}` started at the matrix itself, where `q`
/// is the squarefree part of the minimal polynomial. This stays inside the
/// coefficient field: no eigenvalues are needed.
pub fn jordan(d: &Derivation, cap: usize) -> Result<Jordan, DerivationError> {
    let report = classify_lf(d, cap)?;
    if report.is_lnd {
        return Ok(Jordan {
            semisimple: Derivation::zero(),
            nilpotent: d.clone(),
        });
    }
    if report.is_semisimple {
        return Ok(Jordan {
            semisimple: d.clone(),
            nilpotent: Derivation::zero(),
        });
    }
    let span = generator_span(d, cap)?;
    let q = report.min_poly.uni_squarefree_part()?;
    let qc = q.uni_coeffs()?;
    let dqc = q.uni_derivative()?.uni_coeffs()?;
    let mut s = span.matrix.clone();
    let mut converged = false;
    for _ in 0..cap.max(8) {
        let qs = s.eval_poly(&qc);
        if qs.is_zero() {
            converged = true;
            break;
        }
        let inv = s
            .eval_poly(&dqc)
            .inverse()
            .ok_or(DerivationError::NonInvertibleNewtonStep)?;
        s = &s - &(&qs * &inv);
    }
    if !converged {
        return Err(DerivationError::NewtonDidNotConverge(cap.max(8)));
    }
    let read = |coords: &[Coeff]| {
        let image = s.mul_vec(coords);
        let mut out = Poly2::zero();
        for (c, b) in image.iter().zip(&span.basis) {
            if !c.is_zero() {
                out = &out + &b.scale(c);
            }
        }
        out
    };
    let semisimple = Derivation::new(read(&span.x_coords), read(&span.y_coords));
    let nilpotent = d - &semisimple;
    let parts = Jordan {
        semisimple,
        nilpotent,
    };
    check_jordan(d, &parts, cap)?;
    Ok(parts)
}

fn check_jordan(d: &Derivation, j: &Jordan, cap: usize) -> Result<(), DerivationError> {
    let fail = |m: &str| Err(DerivationError::Postcondition(m.to_string()));
    if &(&j.semisimple + &j.nilpotent) != d {
        return fail("parts do not sum to D");
    }
    if !Derivation::bracket(&j.semisimple, &j.nilpotent).is_zero() {
        return fail("parts do not commute");
    }
    if !classify_lf(&j.nilpotent, cap)?.is_lnd {
        return fail("nilpotent part is not locally nilpotent");
    }
    if !classify_lf(&j.semisimple, cap)?.is_semisimple {
        return fail("semisimple part is not semisimple");
    }
    Ok(())
}

/// The conjugacy representatives of nonzero locally finite derivations.
#[derive(Clone, Debug, PartialEq)]
pub enum NormalForm {
    /// `f(X) ∂/∂Y`
    Type1 { f: Poly2 },
    /// `∂/∂X + bY ∂/∂Y`
    Type2 { b: Coeff },
    /// `aX ∂/∂X + (amY + X^m) ∂/∂Y`, `m ≥ 2`
    Type3 { a: Coeff, m: u32 },
    /// `(aX + bY) ∂/∂X + (cX + dY) ∂/∂Y`, matrix `[[a, b], [c, d]]`
    Linear(Mat),
    Unrecognized,
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalForm::Type1 { f: p } => write!(f, "type1 f = {p}"),
            NormalForm::Type2 { b } => write!(f, "type2 b = {b}"),
            NormalForm::Type3 { a, m } => write!(f, "type3 a = {a}, m = {m}"),
            NormalForm::Linear(m) => write!(f, "linear {m}"),
            NormalForm::Unrecognized => f.write_str("unrecognized"),
        }
    }
}

/// Literal match against the normal-form shapes; no conjugator search.
pub fn recognize_normal_form(d: &Derivation) -> NormalForm {
    let (px, py) = (&d.p_x, &d.p_y);
    if px.is_zero() && !py.is_zero() && py.is_in_x_only() {
        return NormalForm::Type1 { f: py.clone() };
    }
    if px == &Poly2::one() {
        let b = py.coeff_of(0, 1);
        if py == &Poly2::y().scale(&b) {
            return NormalForm::Type2 { b };
        }
    }
    let a = px.coeff_of(1, 0);
    if !a.is_zero() && px == &Poly2::x().scale(&a) {
        for (e, c) in py.terms() {
            if e.y == 0 && e.x >= 2 && c.is_one() {
                let m = e.x;
                let expect = &Poly2::y().scale(&(&a * &Coeff::int(m as i64)))
                    + &Poly2::monomial(Coeff::one(), m, 0);
                if py == &expect {
                    return NormalForm::Type3 { a, m };
                }
            }
        }
    }
    match d.as_linear() {
        Some(m) => NormalForm::Linear(m),
        None => NormalForm::Unrecognized,
    }
}
