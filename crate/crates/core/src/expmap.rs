//! Exponentials of locally finite derivations.
//!
//! `exp(D)` is returned as the plane map whose components are the images of
//! `X` and `Y`. Locally nilpotent inputs use the finite series; everything
//! else goes through the Jordan decomposition, `exp(D) = exp(D_n) ∘ exp(D_s)`,
//! with `exp(D_s)` computed on diagonal or linear shapes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::automorphism::{compose, PolyMap};
use crate::coeff::{factorial, Coeff, CoeffError, Monomial, ParamTable, Symbol};
use crate::derivation::{classify_lf, generator_span, jordan, Derivation, DerivationError};
use crate::linalg::Mat;
use crate::poly::{Poly2, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpError {
    #[error("derivation is not locally nilpotent: {0}")]
    NotLocallyNilpotent(String),
    #[error("cannot exponentiate semisimple part {0}: only diagonal or linear shapes are supported, conjugate first")]
    UnsupportedShape(String),
    #[error("eigenvalues of {0} are not in the coefficient field")]
    EigenvaluesNotInField(String),
    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// `Σ D^j(g) / j!`, or `None` if the iterates do not vanish within `cap` steps.
fn nilpotent_series(d: &Derivation, g: &Poly2, cap: usize) -> Option<Poly2> {
    let mut term = g.clone();
    let mut sum = Poly2::zero();
    for j in 0..=cap {
        if term.is_zero() {
            return Some(sum);
        }
        sum = &sum + &term.scale(&factorial(j as u32).inv().expect("nonzero"));
        term = d.apply(&term);
    }
    term.is_zero().then_some(sum)
}

/// `exp(D)` for locally nilpotent `D` as a finite sum.
pub fn exp_lnd(d: &Derivation, cap: usize) -> Result<PolyMap, ExpError> {
    let f = nilpotent_series(d, &Poly2::x(), cap);
    let g = nilpotent_series(d, &Poly2::y(), cap);
    match (f, g) {
        (Some(f), Some(g)) => Ok(PolyMap::new(f, g)),
        _ => {
            // Distinguish "not LND" from "not even locally finite".
            classify_lf(d, cap)?;
            Err(ExpError::NotLocallyNilpotent(d.to_string()))
        }
    }
}

/// Eigenvalues of a 2×2 matrix, when the discriminant is a square.
fn eigenvalues(m: &Mat) -> Result<(Coeff, Coeff), ExpError> {
    let tr = m.trace();
    let det = &(m.get(0, 0) * m.get(1, 1)) - &(m.get(0, 1) * m.get(1, 0));
    let disc = &(&tr * &tr) - &(&Coeff::int(4) * &det);
    let s = disc
        .sqrt()
        .ok_or_else(|| ExpError::EigenvaluesNotInField(m.to_string()))?;
    let half = Coeff::ratio(1, 2);
    Ok((&(&tr + &s) * &half, &(&tr - &s) * &half))
}

/// `exp(M)` for a 2×2 matrix, acting on the column `(X, Y)`.
///
/// Distinct eigenvalues use the Lagrange idempotents, a double eigenvalue
/// uses `E_λ (I + (M - λI))`.
pub fn exp_linear(m: &Mat) -> Result<PolyMap, ExpError> {
    assert_eq!(m.size(), 2, "exp_linear expects a 2x2 matrix");
    let (l1, l2) = eigenvalues(m)?;
    let id = Mat::identity(2);
    let e1 = Coeff::exp_of(&l1)?;
    let out = if l1 == l2 {
        let n = m - &id.scale(&l1);
        (&id + &n).scale(&e1)
    } else {
        let e2 = Coeff::exp_of(&l2)?;
        let diff = &l1 - &l2;
        let p1 = (m - &id.scale(&l2)).scale(&diff.inv()?);
        let p2 = &id - &p1;
        &p1.scale(&e1) + &p2.scale(&e2)
    };
    Ok(PolyMap::affine(&out, &[Coeff::zero(), Coeff::zero()]))
}

/// Weights `(λ, μ)` when `D = λX ∂/∂X + μY ∂/∂Y`.
pub fn diagonal_weights(d: &Derivation) -> Option<(Coeff, Coeff)> {
    let weight = |v: Var| -> Option<Coeff> {
        let p = d.image(v);
        if p.is_zero() {
            return Some(Coeff::zero());
        }
        let (i, j) = match v {
            Var::X => (1, 0),
            Var::Y => (0, 1),
        };
        (p.num_terms() == 1).then(|| p.coeff_of(i, j)).filter(|c| !c.is_zero())
    };
    Some((weight(Var::X)?, weight(Var::Y)?))
}

/// `exp` of a semisimple derivation that is diagonal or linear.
pub fn exp_semi(d: &Derivation) -> Result<PolyMap, ExpError> {
    if let Some((l, m)) = diagonal_weights(d) {
        return Ok(PolyMap::new(
            Poly2::x().scale(&Coeff::exp_of(&l)?),
            Poly2::y().scale(&Coeff::exp_of(&m)?),
        ));
    }
    match d.as_linear() {
        Some(m) => exp_linear(&m),
        None => Err(ExpError::UnsupportedShape(d.to_string())),
    }
}

/// `exp(D)` of a locally finite derivation, with the resonances of `table`
/// applied to the result.
pub fn exp_lfd(d: &Derivation, table: &ParamTable, cap: usize) -> Result<PolyMap, ExpError> {
    flow_at(d, &Coeff::one(), table, cap)
}

/// `exp(tD)` for a parameter `t`.
pub fn flow(d: &Derivation, t: Symbol, table: &ParamTable, cap: usize) -> Result<PolyMap, ExpError> {
    flow_at(d, &Coeff::symbol(t), table, cap)
}

/// `exp(τD)` for an arbitrary time `τ`.
///
/// The Jordan parts of `τD` are `τ` times those of `D`, so the decomposition
/// is done once over the coefficients of `D`.
pub fn flow_at(d: &Derivation, time: &Coeff, table: &ParamTable, cap: usize) -> Result<PolyMap, ExpError> {
    let parts = jordan(d, cap)?;
    let (s, n) = (parts.semisimple.scale(time), parts.nilpotent.scale(time));
    let map = if s.is_zero() {
        exp_lnd(&n, cap)?
    } else if n.is_zero() {
        exp_semi(&s)?
    } else {
        compose(&exp_lnd(&n, cap)?, &exp_semi(&s)?)
    };
    Ok(map.resonate(table)?)
}

/// Eigenvalue data of the semisimple part of a derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Eigenvalues of `D_s` on the generator span, without repetition.
    pub eigenvalues: Vec<Coeff>,
    /// `(weight of X, weight of Y)` when `D_s` is diagonal.
    pub generator_weights: Option<(Coeff, Coeff)>,
    /// Whether every eigenvalue is an ℕ-combination of the generator weights.
    pub monoid_closure: bool,
}

impl Spectrum {
    pub fn empty() -> Spectrum {
        Spectrum {
            eigenvalues: Vec::new(),
            generator_weights: None,
            monoid_closure: true,
        }
    }
}

fn push_unique(v: &mut Vec<Coeff>, c: Coeff) {
    if !v.contains(&c) {
        v.push(c);
    }
}

/// Spectrum of `D_s` on the span of the iterates of `X` and `Y`.
pub fn spectrum(d: &Derivation, cap: usize) -> Result<Spectrum, ExpError> {
    let parts = jordan(d, cap)?;
    let s = &parts.semisimple;
    if let Some((wx, wy)) = diagonal_weights(s) {
        // Monomials are eigenvectors of a diagonal D_s, and the span is a sum
        // of its weight spaces, so the eigenvalues are the monomial weights.
        let span = generator_span(d, cap)?;
        let mut eigenvalues = Vec::new();
        for b in &span.basis {
            for (e, _) in b.terms() {
                let w = &(&wx * &Coeff::int(e.x as i64)) + &(&wy * &Coeff::int(e.y as i64));
                push_unique(&mut eigenvalues, w);
            }
        }
        return Ok(Spectrum {
            eigenvalues,
            generator_weights: Some((wx, wy)),
            monoid_closure: true,
        });
    }
    match s.as_linear() {
        Some(m) => {
            let (l1, l2) = eigenvalues(&m)?;
            let mut eigenvalues = vec![l1];
            push_unique(&mut eigenvalues, l2);
            Ok(Spectrum {
                eigenvalues,
                generator_weights: None,
                monoid_closure: false,
            })
        }
        None => Err(ExpError::UnsupportedShape(s.to_string())),
    }
}

/// A pair `(m, n) ∈ ℤ²` with `m w_X + n w_Y ≠ 0` but `exp(m w_X + n w_Y) = 1`
/// under the resonances of `table`, if one exists.
///
/// Any such pair is a difference of two elements of the monoid
/// `ℕ w_X + ℕ w_Y`, so its existence is exactly non-injectivity of `exp` on
/// the monoid. Free exponential symbols are treated as independent
/// transcendentals; `E[λ] = 1` is read as `λ = 2πi` and `E[λ] = -1` as
/// `λ = πi`. Other resonance values are not roots of unity and pin nothing.
pub fn spectrum_collision(
    s: &Spectrum,
    table: &ParamTable,
) -> Result<Option<(BigInt, BigInt)>, ExpError> {
    let Some((wx, wy)) = &s.generator_weights else {
        if s.eigenvalues.is_empty() {
            return Ok(None);
        }
        return Err(ExpError::UnsupportedSpectrum(
            "semisimple part is not diagonal".to_string(),
        ));
    };
    for w in [wx, wy] {
        if !w.is_polynomial() || w.contains_exp() {
            return Err(ExpError::UnsupportedSpectrum(format!("weight {w}")));
        }
    }
    // Coordinates of each weight along the monomials ("atoms") it mentions.
    let (nx, ny) = (wx.numer(), wy.numer());
    let mut atoms: Vec<Monomial> = nx.terms().chain(ny.terms()).map(|(m, _)| m.clone()).collect();
    atoms.sort();
    atoms.dedup();
    let coord = |p: &crate::coeff::MPoly, m: &Monomial| -> BigRational {
        p.terms()
            .find(|(n, _)| *n == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    };
    let mut free_rows = Vec::new();
    // (cx, cy, multiple of πi the atom stands for)
    let mut torsion_rows = Vec::new();
    for a in &atoms {
        let row = (coord(&nx, a), coord(&ny, a));
        match table.resonance(Symbol::exp(a.clone())) {
            Some(v) if v.is_one() => torsion_rows.push((row, 2)),
            Some(v) if *v == Coeff::int(-1) => torsion_rows.push((row, 1)),
            _ => free_rows.push(row),
        }
    }
    // Lattice of (m, n) killing every free coordinate.
    let basis: Vec<(BigInt, BigInt)> = match free_rows.iter().find(|(a, b)| !a.is_zero() || !b.is_zero()) {
        None => vec![(BigInt::one(), BigInt::zero()), (BigInt::zero(), BigInt::one())],
        Some((a, b)) => {
            let dir = primitive(&[b.clone(), -a.clone()]);
            let dir = (dir[0].clone(), dir[1].clone());
            let kills = |(cx, cy): &(BigRational, BigRational)| {
                (cx * BigRational::from_integer(dir.0.clone()) + cy * BigRational::from_integer(dir.1.clone()))
                    .is_zero()
            };
            if !free_rows.iter().all(kills) {
                return Ok(None);
            }
            vec![dir]
        }
    };
    for (m, n) in basis {
        let (mq, nq) = (BigRational::from_integer(m.clone()), BigRational::from_integer(n.clone()));
        let mut nonzero = false;
        let mut phase = BigRational::zero();
        for ((cx, cy), k) in &torsion_rows {
            let c = cx * &mq + cy * &nq;
            nonzero |= !c.is_zero();
            phase += c * BigRational::from_integer((*k).into());
        }
        if nonzero {
            // exp(z ω) = exp(z · phase · πi) = 1 once z · phase is even.
            let z = (phase / BigRational::from_integer(2.into())).denom().clone();
            return Ok(Some((m * &z, n * &z)));
        }
    }
    Ok(None)
}

/// Whether `exp` is injective on the ℕ-combinations of the generator weights.
pub fn spectrum_injective(s: &Spectrum, table: &ParamTable) -> Result<bool, ExpError> {
    Ok(spectrum_collision(s, table)?.is_none())
}

/// Scales a rational vector to a primitive integer vector.
fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    ints.into_iter().map(|c| c / &g * &sign).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::commutes_with_derivation;
    use crate::derivation::DEFAULT_CAP;

    fn c(n: i64) -> Coeff {
        Coeff::int(n)
    }
    fn x() -> Poly2 {
        Poly2::x()
    }
    fn y() -> Poly2 {
        Poly2::y()
    }
    fn e(atom: &str) -> Coeff {
        let mut t = ParamTable::new();
        let parts: Vec<(Symbol, u32)> = atom.split('*').map(|p| (t.declare_param(p).unwrap(), 1)).collect();
        Coeff::symbol(Symbol::exp(Monomial::from_pairs(parts)))
    }
    fn param(name: &str) -> Coeff {
        Coeff::param(name)
    }

    #[test]
    fn lnd_examples() {
        let f = &x().pow(3) - &Poly2::one();
        let d = Derivation::new(Poly2::zero(), f.clone());
        assert_eq!(exp_lnd(&d, DEFAULT_CAP).unwrap(), PolyMap::new(x(), &y() + &f));
        let dy = Derivation::partial(Var::Y);
        assert_eq!(exp_lnd(&dy, DEFAULT_CAP).unwrap(), PolyMap::new(x(), &y() + &Poly2::one()));
        assert!(exp_lnd(&Derivation::zero(), DEFAULT_CAP).unwrap().is_identity());
        let inv = exp_lnd(&d.scale(&c(-1)), DEFAULT_CAP).unwrap();
        assert!(compose(&exp_lnd(&d, DEFAULT_CAP).unwrap(), &inv).is_identity());
        let euler = Derivation::new(x(), Poly2::zero());
        assert!(matches!(exp_lnd(&euler, DEFAULT_CAP), Err(ExpError::NotLocallyNilpotent(_))));
    }

    #[test]
    fn linear_examples() {
        let l = param("lam");
        let block = Mat::from_rows(vec![vec![l.clone(), c(1)], vec![c(0), l.clone()]]);
        let el = e("lam");
        assert_eq!(
            exp_linear(&block).unwrap(),
            PolyMap::new((&x() + &y()).scale(&el), y().scale(&el))
        );
        let (l1, l2) = (param("l1"), param("l2"));
        let diag = Mat::from_rows(vec![vec![l1, c(0)], vec![c(0), l2]]);
        assert_eq!(
            exp_linear(&diag).unwrap(),
            PolyMap::new(x().scale(&e("l1")), y().scale(&e("l2")))
        );
        assert!(exp_linear(&Mat::zeros(2)).unwrap().is_identity());
        let swap = Mat::from_rows(vec![vec![c(0), c(1)], vec![c(1), c(0)]]);
        let e1 = Coeff::symbol(Symbol::exp(Monomial::one()));
        let half = Coeff::ratio(1, 2);
        let cosh = &(&e1 + &e1.inv().unwrap()) * &half;
        let sinh = &(&e1 - &e1.inv().unwrap()) * &half;
        assert_eq!(
            exp_linear(&swap).unwrap(),
            PolyMap::new(&x().scale(&cosh) + &y().scale(&sinh), &x().scale(&sinh) + &y().scale(&cosh))
        );
        let irrational = Mat::from_rows(vec![vec![c(0), c(1)], vec![c(2), c(0)]]);
        assert!(matches!(exp_linear(&irrational), Err(ExpError::EigenvaluesNotInField(_))));
    }

    #[test]
    fn lfd_examples() {
        let b = param("b");
        let t2 = Derivation::new(Poly2::one(), y().scale(&b));
        let table = ParamTable::new();
        assert_eq!(
            exp_lfd(&t2, &table, DEFAULT_CAP).unwrap(),
            PolyMap::new(&x() + &Poly2::one(), y().scale(&e("b")))
        );
        let a = param("a");
        let m = 3;
        let t3 = Derivation::new(x().scale(&a), &y().scale(&(&a * &c(m))) + &x().pow(m as u32));
        let ea_m = e("a").pow(m);
        assert_eq!(
            exp_lfd(&t3, &table, DEFAULT_CAP).unwrap(),
            PolyMap::new(x().scale(&e("a")), &y().scale(&ea_m) + &x().pow(m as u32).scale(&ea_m))
        );
        // λX∂/∂X with E_λ = 1 exponentiates to the identity.
        let mut res = ParamTable::new();
        let lam = res.declare_param("lam").unwrap();
        let el = res.declare_exp(Monomial::var(lam)).unwrap();
        res.set_resonance(el, c(1)).unwrap();
        let d = Derivation::new(x().scale(&Coeff::symbol(lam)), Poly2::zero());
        assert!(exp_lfd(&d, &res, DEFAULT_CAP).unwrap().is_identity());
        assert!(!exp_lfd(&d, &table, DEFAULT_CAP).unwrap().is_identity());
    }

    #[test]
    fn flow_examples() {
        let table = ParamTable::new();
        let t = Symbol::param("t");
        let b = param("b");
        let d = Derivation::new(Poly2::one(), y().scale(&b));
        assert_eq!(
            flow(&d, t, &table, DEFAULT_CAP).unwrap(),
            PolyMap::new(&x() + &Poly2::constant(Coeff::symbol(t)), y().scale(&e("b*t")))
        );
        let f = &x().pow(2) + &x();
        let lnd = Derivation::new(Poly2::zero(), f.clone());
        assert_eq!(
            flow(&lnd, t, &table, DEFAULT_CAP).unwrap(),
            PolyMap::new(x(), &y() + &f.scale(&Coeff::symbol(t)))
        );
        let a = param("a");
        let t3 = Derivation::new(x().scale(&a), &y().scale(&(&a * &c(2))) + &x().pow(2));
        let fl = flow(&t3, t, &table, DEFAULT_CAP).unwrap();
        let eat = e("a*t");
        let eamt = eat.pow(2);
        assert_eq!(
            fl,
            PolyMap::new(
                x().scale(&eat),
                (&y() + &x().pow(2).scale(&Coeff::symbol(t))).scale(&eamt)
            )
        );
        assert!(commutes_with_derivation(&fl, &t3));
    }

    #[test]
    fn flow_group_law_on_type2() {
        let table = ParamTable::new();
        let (t, s) = (Symbol::param("t"), Symbol::param("s"));
        let d = Derivation::new(Poly2::one(), y().scale(&param("b")));
        let sum = &Coeff::symbol(t) + &Coeff::symbol(s);
        let lhs = flow_at(&d, &sum, &table, DEFAULT_CAP).unwrap();
        let rhs = compose(
            &flow(&d, t, &table, DEFAULT_CAP).unwrap(),
            &flow(&d, s, &table, DEFAULT_CAP).unwrap(),
        );
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn spectra() {
        let a = param("a");
        let t3 = Derivation::new(x().scale(&a), &y().scale(&(&a * &c(2))) + &x().pow(2));
        let s = spectrum(&t3, DEFAULT_CAP).unwrap();
        assert_eq!(s.generator_weights, Some((a.clone(), &a * &c(2))));
        assert_eq!(s.eigenvalues, vec![a.clone(), &a * &c(2)]);
        assert!(spectrum_injective(&s, &ParamTable::new()).unwrap());

        let mut res = ParamTable::new();
        let lam = res.declare_param("lam").unwrap();
        let el = res.declare_exp(Monomial::var(lam)).unwrap();
        let d = Derivation::new(x().scale(&Coeff::symbol(lam)), Poly2::zero());
        let s = spectrum(&d, DEFAULT_CAP).unwrap();
        assert!(spectrum_injective(&s, &res).unwrap());
        res.set_resonance(el, c(1)).unwrap();
        assert_eq!(
            spectrum_collision(&s, &res).unwrap(),
            Some((BigInt::from(1), BigInt::from(0)))
        );
        res.set_resonance(el, c(-1)).unwrap();
        assert_eq!(
            spectrum_collision(&s, &res).unwrap(),
            Some((BigInt::from(2), BigInt::from(0)))
        );
        assert!(spectrum_injective(&Spectrum::empty(), &res).unwrap());

        let lin = Derivation::linear(&Mat::from_rows(vec![vec![c(0), c(1)], vec![c(1), c(0)]]));
        let s = spectrum(&lin, DEFAULT_CAP).unwrap();
        assert!(matches!(spectrum_injective(&s, &res), Err(ExpError::UnsupportedSpectrum(_))));
    }

    #[test]
    fn rational_weights_collide_only_at_zero() {
        let mut t = ParamTable::new();
        let d = Derivation::new(x(), y().scale(&c(2)));
        let s = spectrum(&d, DEFAULT_CAP).unwrap();
        assert!(spectrum_injective(&s, &t).unwrap());
        let one = t.declare_exp(Monomial::one()).unwrap();
        t.set_resonance(one, c(1)).unwrap();
        assert_eq!(
            spectrum_collision(&s, &t).unwrap(),
            Some((BigInt::from(1), BigInt::from(0)))
        );
    }
}
