use isotrope::automorphism::{AutWord, Letter};
use isotrope::coeff::{Coeff, Symbol};
use isotrope::derivation::Derivation;
use isotrope::expmap::flow;
use isotrope::poly::{Poly2, Var};
use isotrope::verify::sample::Sampler;
use isotrope_cli::session::{parse, Binding, Session};
use proptest::prelude::*;

/// A rational function coefficient in the session's parameters.
fn coeff(s: &mut Sampler, params: &[Coeff]) -> Coeff {
    let mut c = s.rational();
    for p in params {
        if s.coin() {
            c = &c + &(p * &s.nonzero_rational());
        }
    }
    if s.int(0, 3) == 0 {
        let p = s.pick(params);
        let den = &p + &s.nonzero_rational();
        c = &c / &den;
    }
    c
}

fn poly(s: &mut Sampler, params: &[Coeff]) -> Poly2 {
    let mut p = Poly2::zero();
    for _ in 0..s.int(0, 4) {
        let (i, j) = (s.int(0, 3) as u32, s.int(0, 3) as u32);
        p = &p + &Poly2::monomial(coeff(s, params), i, j);
    }
    p
}

fn random_session(seed: u64) -> Session {
    let mut s = Sampler::new(seed, 0);
    let mut session = Session::new();
    let names = ["a", "b", "t"];
    let params: Vec<Coeff> = names
        .iter()
        .map(|n| Coeff::symbol(session.table.declare_param(n).unwrap()))
        .collect();
    let p = poly(&mut s, &params);
    session.bind("p", Binding::Poly(p)).unwrap();
    let d = Derivation::new(poly(&mut s, &params), poly(&mut s, &params));
    session.bind("d", Binding::Derivation(d)).unwrap();
    let m = isotrope::automorphism::PolyMap::new(poly(&mut s, &params), poly(&mut s, &params));
    session.bind("m", Binding::Map(m)).unwrap();
    let mut letters = s.word().letters().to_vec();
    let q = &Poly2::monomial(coeff(&mut s, &params), 2, 0) + &Poly2::constant(coeff(&mut s, &params));
    letters.push(Letter::ElemY(q));
    session.bind("w", Binding::Word(AutWord::new(letters).unwrap())).unwrap();
    // Exponential coefficients from a diagonal flow.
    let (k1, k2) = (s.int(-3, 3), s.int(1, 3));
    let diag = Derivation::new(
        Poly2::monomial(&params[0] * &Coeff::int(k1), 1, 0),
        Poly2::monomial(Coeff::int(k2), 0, 1),
    );
    let t = Symbol::param("t");
    let fl = flow(&diag, t, &session.table, 64).unwrap();
    session.bind("flow", Binding::Map(fl)).unwrap();
    if s.coin() {
        let e = session.table.exp_symbols()[0];
        session.table.set_resonance(e, Coeff::int(1)).unwrap();
    }
    session
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_then_parse_rebinds_equal_values(seed in any::<u64>()) {
        let original = random_session(seed);
        let text = original.to_string();
        let again = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        let a: Vec<_> = original.bindings().collect();
        let b: Vec<_> = again.bindings().collect();
        prop_assert_eq!(a, b, "{}", text);
        prop_assert_eq!(original.table.params(), again.table.params());
        prop_assert_eq!(original.table.exp_symbols(), again.table.exp_symbols());
        let ra: Vec<_> = original.table.resonances().collect();
        let rb: Vec<_> = again.table.resonances().collect();
        prop_assert_eq!(ra, rb);
        prop_assert_eq!(again.to_string(), text);
    }

    #[test]
    fn single_values_round_trip(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, 1);
        let f = s.univariate();
        let w = s.word();
        let d = isotrope::automorphism::conjugate(&w, &Derivation::new(Poly2::zero(), f.clone())).unwrap();
        for b in [Binding::Poly(f), Binding::Derivation(d), Binding::Map(w.flatten()), Binding::Word(w)] {
            let mut session = Session::new();
            let text = b.to_string();
            let back = session.parse_value(&text).map_err(|e| TestCaseError::fail(format!("{e}: {text}")))?;
            prop_assert_eq!(back, b);
        }
    }
}

#[test]
fn univariate_poly_in_y_round_trips() {
    let mut session = Session::new();
    let p = Poly2::from_uni(&[Coeff::int(-1), Coeff::zero(), Coeff::ratio(3, 4)], Var::Y);
    assert_eq!(session.parse_value(&p.to_string()).unwrap(), Binding::Poly(p));
}
