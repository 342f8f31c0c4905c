//! Exact computations with derivations and automorphisms of `K[X, Y]`, where
//! `K` is the field of rational functions in declared parameters and formal
//! exponentials `E[...]`.

pub mod automorphism;
pub mod coeff;
pub mod derivation;
pub mod expmap;
pub mod isotropy;
pub mod linalg;
pub mod poly;
pub mod verify;

use thiserror::Error;

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Coeff(#[from] coeff::CoeffError),
    #[error(transparent)]
    Poly(#[from] poly::PolyError),
    #[error(transparent)]
    Derivation(#[from] derivation::DerivationError),
    #[error(transparent)]
    Automorphism(#[from] automorphism::AutError),
    #[error(transparent)]
    Exp(#[from] expmap::ExpError),
    #[error(transparent)]
    Isotropy(#[from] isotropy::IsoError),
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
}

impl Error {
    /// Whether a local-finiteness search ran out of iterations.
    pub fn is_cap_exceeded(&self) -> bool {
        use derivation::DerivationError as D;
        use expmap::ExpError as X;
        use isotropy::IsoError as I;
        let d = |e: &D| matches!(e, D::NotStabilizedWithinCap { .. });
        let x = |e: &X| matches!(e, X::Derivation(inner) if d(inner));
        match self {
            Error::Derivation(e) => d(e),
            Error::Exp(e) => x(e),
            Error::Isotropy(I::Exp(e)) => x(e),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::{classify_lf, Derivation};
    use crate::poly::Poly2;

    #[test]
    fn cap_exceeded_is_recognized_through_wrappers() {
        let d = Derivation::new(Poly2::x().pow(2), Poly2::zero());
        let e: Error = classify_lf(&d, 8).unwrap_err().into();
        assert!(e.is_cap_exceeded());
        let e: Error = expmap::exp_lfd(&d, &coeff::ParamTable::new(), 8).unwrap_err().into();
        assert!(e.is_cap_exceeded());
        let e: Error = isotropy::IsoError::ZeroPolynomial.into();
        assert!(!e.is_cap_exceeded());
    }
}
