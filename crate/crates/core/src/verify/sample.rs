//! Seeded random inputs for the property suites.
//!
//! Scalars are rationals `p/q` with `p ∈ [-9, 9]`, `q ∈ [1, 9]`. Polynomial
//! slots have degree at most 4. Words have at most 4 letters, and the
//! product of the degrees of their elementary letters is at most 4 so that
//! flattened maps stay small.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automorphism::{AutWord, Letter};
use crate::coeff::Coeff;
use crate::isotropy::{FamilySpec, Instance, SlotKind, Value};
use crate::linalg::Mat;
use crate::poly::{Poly2, Var};

pub const MAX_POLY_DEGREE: u32 = 4;
pub const MAX_WORD_LEN: usize = 4;
pub const WORD_DEGREE_BUDGET: u32 = 2;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    /// Independent stream number `index` of the generator seeded by `seed`.
    pub fn new(seed: u64, index: u64) -> Sampler {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Sampler { rng }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    pub fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items[self.rng.random_range(0..items.len())].clone()
    }

    pub fn rational(&mut self) -> Coeff {
        Coeff::ratio(self.int(-9, 9), self.int(1, 9))
    }

    pub fn nonzero_rational(&mut self) -> Coeff {
        let n = loop {
            let n = self.int(-9, 9);
            if n != 0 {
                break n;
            }
        };
        Coeff::ratio(n, self.int(1, 9))
    }

    /// A polynomial in one variable of degree exactly `deg`.
    pub fn poly_of_degree(&mut self, v: Var, deg: u32) -> Poly2 {
        let mut cs: Vec<Coeff> = (0..deg).map(|_| if self.coin() { self.rational() } else { Coeff::zero() }).collect();
        cs.push(self.nonzero_rational());
        Poly2::from_uni(&cs, v)
    }

    /// A polynomial in one variable of degree at most `max_deg`, possibly zero.
    pub fn poly_in(&mut self, v: Var, max_deg: u32) -> Poly2 {
        if self.int(0, 5) == 0 {
            return Poly2::zero();
        }
        let d = self.int(0, max_deg as i64) as u32;
        self.poly_of_degree(v, d)
    }

    pub fn nonzero_poly_in(&mut self, v: Var, max_deg: u32) -> Poly2 {
        let d = self.int(0, max_deg as i64) as u32;
        self.poly_of_degree(v, d)
    }

    /// A nonzero `f(X)` of degree at most 4. Half the time `f` is built as
    /// `κ X^r h(X^m)` shifted by a center, so it has nontrivial symmetries.
    pub fn univariate(&mut self) -> Poly2 {
        if self.coin() {
            return self.nonzero_poly_in(Var::X, MAX_POLY_DEGREE);
        }
        let m = self.int(2, 3) as u32;
        let r = self.int(0, 2) as u32;
        let mut g = Poly2::zero();
        let mut e = r;
        while e <= MAX_POLY_DEGREE {
            if e == r || self.coin() {
                g = &g + &Poly2::monomial(self.nonzero_rational(), e, 0);
            }
            e += m;
        }
        let shift = &Poly2::x() - &Poly2::constant(self.rational());
        g.substitute(&shift, &Poly2::y())
    }

    pub fn matrix(&mut self) -> Mat {
        Mat::from_rows(vec![
            vec![self.rational(), self.rational()],
            vec![self.rational(), self.rational()],
        ])
    }

    pub fn invertible_matrix(&mut self) -> Mat {
        loop {
            let m = self.matrix();
            if m.inverse().is_some() {
                return m;
            }
        }
    }

    pub fn affine_letter(&mut self, translate: bool) -> Letter {
        let m = self.invertible_matrix();
        let v = if translate {
            [self.rational(), self.rational()]
        } else {
            [Coeff::zero(), Coeff::zero()]
        };
        Letter::Affine { m, v }
    }

    /// One letter, spending the degree of an elementary letter from `budget`.
    pub fn letter(&mut self, budget: &mut u32) -> Letter {
        if *budget < 2 || self.int(0, 2) == 0 {
            return self.affine_letter(true);
        }
        let d = self.int(2, *budget as i64) as u32;
        *budget /= d;
        if self.coin() {
            Letter::ElemX(self.poly_of_degree(Var::Y, d))
        } else {
            Letter::ElemY(self.poly_of_degree(Var::X, d))
        }
    }

    pub fn word(&mut self) -> AutWord {
        self.word_within(WORD_DEGREE_BUDGET)
    }

    /// A word whose elementary letters have degree product at most `budget`.
    pub fn word_within(&mut self, budget: u32) -> AutWord {
        let len = self.int(1, MAX_WORD_LEN as i64) as usize;
        let mut budget = budget;
        let letters = (0..len).map(|_| self.letter(&mut budget)).collect();
        AutWord::new(letters).expect("sampled letters are valid")
    }

    /// A word of linear letters (no translations).
    pub fn linear_word(&mut self) -> AutWord {
        let len = self.int(1, 2) as usize;
        let letters = (0..len).map(|_| self.affine_letter(false)).collect();
        AutWord::new(letters).expect("sampled letters are valid")
    }

    /// Random values for every free slot of `spec`, derived slots filled in.
    pub fn instance(&mut self, spec: &FamilySpec) -> Instance {
        let mut inst = Instance::new();
        for slot in spec.slots() {
            let v = match slot.kind {
                SlotKind::Nonzero => Value::Scalar(self.nonzero_rational()),
                SlotKind::Arbitrary => Value::Scalar(self.rational()),
                SlotKind::RootOfUnity(_) => {
                    let alphas = spec
                        .constraint()
                        .and_then(|c| c.rational_alphas())
                        .unwrap_or_else(|| vec![num_rational::BigRational::from_integer(1.into())]);
                    Value::Scalar(Coeff::rational(self.pick(&alphas)))
                }
                SlotKind::Derived => continue,
                SlotKind::PolyX => Value::Poly(self.poly_in(Var::X, MAX_POLY_DEGREE)),
                SlotKind::PolyY => Value::Poly(self.poly_in(Var::Y, MAX_POLY_DEGREE)),
            };
            inst.insert(slot.name.to_string(), v);
        }
        spec.complete(&mut inst).expect("alpha was sampled");
        inst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<i64> = {
            let mut s = Sampler::new(7, 3);
            (0..8).map(|_| s.int(0, 1000)).collect()
        };
        let b: Vec<i64> = {
            let mut s = Sampler::new(7, 3);
            (0..8).map(|_| s.int(0, 1000)).collect()
        };
        let c: Vec<i64> = {
            let mut s = Sampler::new(7, 4);
            (0..8).map(|_| s.int(0, 1000)).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn words_respect_the_degree_budget() {
        for i in 0..50 {
            let mut s = Sampler::new(1, i);
            let w = s.word();
            assert!(w.len() <= MAX_WORD_LEN);
            let m = w.flatten();
            assert!(m.f.total_degree() <= WORD_DEGREE_BUDGET);
            assert!(m.g.total_degree() <= WORD_DEGREE_BUDGET);
            assert!(m.jacobian_constant().is_some_and(|c| !c.is_zero()));
        }
    }

    #[test]
    fn univariate_samples_are_nonzero_and_small() {
        for i in 0..50 {
            let f = Sampler::new(2, i).univariate();
            assert!(!f.is_zero());
            assert!(f.is_in_x_only());
            assert!(f.deg_x() <= MAX_POLY_DEGREE);
        }
    }
}
