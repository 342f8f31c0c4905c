//! Polynomial maps of the plane and words in affine and elementary
//! (de Jonquières) generators.
//!
//! Conventions. A [`PolyMap`] `(f, g)` is the endomorphism `X ↦ f, Y ↦ g`;
//! as a ring map it sends `p` to `p(f, g)`. [`compose`]`(m1, m2)` is the
//! plane-map composition `m1 ∘ m2` (apply `m2` first), computed by
//! substituting `m2` into the components of `m1`; on ring elements this is
//! `p ↦ m2(m1(p))`.
//!
//! Isotropy membership is checked on the generators only. This is enough:
//! `φD` and `Dφ` are both `φ`-twisted derivations (`δ(ab) = φ(a)δ(b) + φ(b)δ(a)`),
//! and such a map is determined by its values on `X` and `Y`.

use std::fmt;

use thiserror::Error;

use crate::coeff::{Coeff, CoeffError, ParamTable, Symbol};
use crate::derivation::Derivation;
use crate::linalg::Mat;
use crate::poly::{Poly2, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error("affine letter has singular matrix (det = {0})")]
    SingularAffine(String),
    #[error("elemX takes a polynomial in Y alone, got {0}")]
    ElemXNotInY(String),
    #[error("elemY takes a polynomial in X alone, got {0}")]
    ElemYNotInX(String),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMap {
    pub f: Poly2,
    pub g: Poly2,
}

impl PolyMap {
    pub fn new(f: Poly2, g: Poly2) -> Self {
        PolyMap { f, g }
    }

    pub fn identity() -> Self {
        PolyMap::new(Poly2::x(), Poly2::y())
    }

    /// `(m00 X + m01 Y + v0, m10 X + m11 Y + v1)`.
    pub fn affine(m: &Mat, v: &[Coeff; 2]) -> Self {
        let row = |i: usize| {
            &(&Poly2::x().scale(m.get(i, 0)) + &Poly2::y().scale(m.get(i, 1)))
                + &Poly2::constant(v[i].clone())
        };
        PolyMap::new(row(0), row(1))
    }

    pub fn is_identity(&self) -> bool {
        self.f == Poly2::x() && self.g == Poly2::y()
    }

    pub fn component(&self, v: Var) -> &Poly2 {
        match v {
            Var::X => &self.f,
            Var::Y => &self.g,
        }
    }

    /// The point `(f(x, y), g(x, y))`.
    pub fn eval(&self, x: &Coeff, y: &Coeff) -> (Coeff, Coeff) {
        (self.f.eval(x, y), self.g.eval(x, y))
    }

    pub fn degree(&self) -> u32 {
        self.f.total_degree().max(self.g.total_degree())
    }

    /// The ring map `p ↦ p(f, g)`.
    pub fn apply(&self, p: &Poly2) -> Poly2 {
        p.substitute(&self.f, &self.g)
    }

    pub fn substitute_param(&self, s: Symbol, v: &Coeff) -> Result<PolyMap, CoeffError> {
        Ok(PolyMap::new(
            self.f.substitute_param(s, v)?,
            self.g.substitute_param(s, v)?,
        ))
    }

    pub fn resonate(&self, table: &ParamTable) -> Result<PolyMap, CoeffError> {
        Ok(PolyMap::new(self.f.resonate(table)?, self.g.resonate(table)?))
    }

    /// `∂f/∂X ∂g/∂Y - ∂f/∂Y ∂g/∂X`.
    pub fn jacobian_det(&self) -> Poly2 {
        &(&self.f.partial(Var::X) * &self.g.partial(Var::Y))
            - &(&self.f.partial(Var::Y) * &self.g.partial(Var::X))
    }

    /// The Jacobian determinant when it is free of `X` and `Y`.
    ///
    /// A nonzero constant Jacobian is necessary for invertibility; it is
    /// never used here as a proof of it.
    pub fn jacobian_constant(&self) -> Option<Coeff> {
        self.jacobian_det().as_constant()
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.f, self.g)
    }
}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Plane-map composition `m1 ∘ m2`.
pub fn compose(m1: &PolyMap, m2: &PolyMap) -> PolyMap {
    PolyMap::new(m2.apply(&m1.f), m2.apply(&m1.g))
}

/// Whether `compose(m1, m2)` is the identity, without expanding it.
///
/// The difference from the identity has degree at most `N = deg m1 · deg m2`
/// in each variable, so it is zero iff it vanishes on `{0..N}²`.
pub fn compose_is_identity(m1: &PolyMap, m2: &PolyMap) -> bool {
    let n = (m1.degree().max(1) * m2.degree().max(1)) as i64;
    (0..=n).all(|i| {
        (0..=n).all(|j| {
            let (x, y) = (Coeff::int(i), Coeff::int(j));
            let (u, v) = m2.eval(&x, &y);
            m1.eval(&u, &v) == (x, y)
        })
    })
}

/// `m ∘ D(X) = D(m(X))` and likewise for `Y`, as ring maps.
pub fn commutes_with_derivation(m: &PolyMap, d: &Derivation) -> bool {
    m.apply(&d.p_x) == d.apply(&m.f) && m.apply(&d.p_y) == d.apply(&m.g)
}

pub fn commutes_with_automorphism(m: &PolyMap, psi: &PolyMap) -> bool {
    compose(m, psi) == compose(psi, m)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Letter {
    /// `(M (X, Y)ᵀ + v)`
    Affine { m: Mat, v: [Coeff; 2] },
    /// `(X + p(Y), Y)`
    ElemX(Poly2),
    /// `(X, Y + q(X))`
    ElemY(Poly2),
}

fn det2(m: &Mat) -> Coeff {
    &(m.get(0, 0) * m.get(1, 1)) - &(m.get(0, 1) * m.get(1, 0))
}

impl Letter {
    /// Checks the letter's shape and invertibility.
    pub fn validate(&self) -> Result<(), AutError> {
        match self {
            Letter::Affine { m, .. } => {
                assert_eq!(m.size(), 2, "affine letters use 2x2 matrices");
                let d = det2(m);
                if d.is_zero() {
                    return Err(AutError::SingularAffine(d.to_string()));
                }
            }
            Letter::ElemX(p) if !p.is_in_y_only() => {
                return Err(AutError::ElemXNotInY(p.to_string()));
            }
            Letter::ElemY(q) if !q.is_in_x_only() => {
                return Err(AutError::ElemYNotInX(q.to_string()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn to_map(&self) -> PolyMap {
        match self {
            Letter::Affine { m, v } => PolyMap::affine(m, v),
            Letter::ElemX(p) => PolyMap::new(&Poly2::x() + p, Poly2::y()),
            Letter::ElemY(q) => PolyMap::new(Poly2::x(), &Poly2::y() + q),
        }
    }

    pub fn inverse(&self) -> Result<Letter, AutError> {
        match self {
            Letter::Affine { m, v } => {
                let inv = m.inverse().ok_or_else(|| AutError::SingularAffine(det2(m).to_string()))?;
                let w = inv.mul_vec(v);
                Ok(Letter::Affine {
                    m: inv,
                    v: [-&w[0], -&w[1]],
                })
            }
            Letter::ElemX(p) => Ok(Letter::ElemX(-p)),
            Letter::ElemY(q) => Ok(Letter::ElemY(-q)),
        }
    }

    fn try_map_coeffs(&self, f: &dyn Fn(&Coeff) -> Result<Coeff, CoeffError>) -> Result<Letter, CoeffError> {
        Ok(match self {
            Letter::Affine { m, v } => {
                let mut out = Mat::zeros(2);
                for i in 0..2 {
                    for j in 0..2 {
                        out.set(i, j, f(m.get(i, j))?);
                    }
                }
                Letter::Affine {
                    m: out,
                    v: [f(&v[0])?, f(&v[1])?],
                }
            }
            Letter::ElemX(p) => Letter::ElemX(p.try_map_coeffs(f)?),
            Letter::ElemY(q) => Letter::ElemY(q.try_map_coeffs(f)?),
        })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Affine { m, v } => write!(
                f,
                "affine({}, {}, {}, {}; {}, {})",
                m.get(0, 0),
                m.get(0, 1),
                m.get(1, 0),
                m.get(1, 1),
                v[0],
                v[1]
            ),
            Letter::ElemX(p) => write!(f, "elemX({p})"),
            Letter::ElemY(q) => write!(f, "elemY({q})"),
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An automorphism as a product of generators; always invertible.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct AutWord {
    letters: Vec<Letter>,
}

impl AutWord {
    pub fn identity() -> Self {
        AutWord::default()
    }

    pub fn new(letters: Vec<Letter>) -> Result<Self, AutError> {
        for l in &letters {
            l.validate()?;
        }
        Ok(AutWord { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Word product: `w1 * w2` flattens to `flatten(w1) ∘ flatten(w2)`.
    pub fn concat(&self, other: &AutWord) -> AutWord {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        AutWord { letters }
    }

    /// Composition of the letters; the leftmost letter is applied last.
    pub fn flatten(&self) -> PolyMap {
        let mut out = PolyMap::identity();
        for l in self.letters.iter().rev() {
            out = compose(&l.to_map(), &out);
        }
        out
    }

    /// Reversed word of letterwise inverses.
    pub fn invert(&self) -> Result<AutWord, AutError> {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(Letter::inverse)
            .collect::<Result<_, _>>()?;
        Ok(AutWord { letters })
    }

    /// Applies resonances to every coefficient and re-checks invertibility.
    pub fn resonate(&self, table: &ParamTable) -> Result<AutWord, AutError> {
        let letters = self
            .letters
            .iter()
            .map(|l| l.try_map_coeffs(&|c| c.resonate(table)))
            .collect::<Result<Vec<_>, _>>()?;
        AutWord::new(letters)
    }
}

impl fmt::Display for AutWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("id");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for AutWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The transported derivation `E` with `exp(E) = φ ∘ exp(D) ∘ φ⁻¹` as plane
/// maps, where `φ = flatten(w)`.
///
/// On generators `E(X) = D(f)(φ⁻¹)`, `E(Y) = D(g)(φ⁻¹)` with `φ = (f, g)`:
/// the vector field of `D` pushed forward along `φ`. This is a left action:
/// `conjugate(w1 * w2, D) = conjugate(w1, conjugate(w2, D))`.
pub fn conjugate(w: &AutWord, d: &Derivation) -> Result<Derivation, AutError> {
    let phi = w.flatten();
    let inv = w.invert()?.flatten();
    Ok(conjugate_by_maps(&phi, &inv, d))
}

/// [`conjugate`] for a map whose inverse is already known.
pub fn conjugate_by_maps(phi: &PolyMap, phi_inv: &PolyMap, d: &Derivation) -> Derivation {
    Derivation::new(
        phi_inv.apply(&d.apply(&phi.f)),
        phi_inv.apply(&d.apply(&phi.g)),
    )
}
