//! The property checks behind each suite. Every check draws its inputs from
//! a [`Sampler`] and returns the first counterexample it finds.

use std::fmt::Display;

use num_rational::BigRational;
use num_traits::One;

use super::sample::Sampler;
use super::Failure;
use crate::automorphism::{
    commutes_with_automorphism, commutes_with_derivation, compose, compose_is_identity, conjugate, PolyMap,
};
use crate::coeff::{Coeff, Monomial, ParamTable, Symbol};
use crate::derivation::{classify_lf, jordan, Derivation, DerivationError, DEFAULT_CAP};
use crate::expmap::{exp_lfd, exp_lnd, flow, flow_at, spectrum, spectrum_injective};
use crate::isotropy::{
    affine_symmetries, diag_resonances, family_map, family_spec, form_exponential, iso_family, iso_family_exp,
    FamilySpec, Form, Instance, IsoError, Support, Target, Value, Variant,
};
use crate::linalg::Mat;
use crate::poly::{Poly2, Var};

pub type Outcome = Result<(), Failure>;

fn fail(inputs: impl Display, expected: impl Display, got: impl Display) -> Failure {
    Failure {
        sample: 0,
        inputs: inputs.to_string(),
        expected: expected.to_string(),
        got: got.to_string(),
    }
}

fn check(ok: bool, inputs: impl Display, expected: impl Display, got: impl Display) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(fail(inputs, expected, got))
    }
}

trait OrFail<T> {
    fn or_fail(self, inputs: &str, expected: &str) -> Result<T, Failure>;
}

impl<T, E: Display> OrFail<T> for Result<T, E> {
    fn or_fail(self, inputs: &str, expected: &str) -> Result<T, Failure> {
        self.map_err(|e| fail(inputs, expected, format!("error: {e}")))
    }
}

fn show(inst: &Instance) -> String {
    inst.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ")
}

fn param(name: &str) -> Coeff {
    Coeff::param(name)
}

fn x() -> Poly2 {
    Poly2::x()
}

fn y() -> Poly2 {
    Poly2::y()
}

fn scalar(c: Coeff) -> Value {
    Value::Scalar(c)
}

fn instance(pairs: &[(&str, Value)]) -> Instance {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// A table declaring `names` and an exponential `E[name] = 1` for each of `resonant`.
fn table_with(names: &[&str], resonant: &[&str]) -> ParamTable {
    let mut t = ParamTable::new();
    for n in names {
        t.declare_param(n).expect("valid name");
    }
    for n in resonant {
        let p = t.param(n).expect("declared");
        let e = t.declare_exp(Monomial::var(p)).expect("fresh");
        t.set_resonance(e, Coeff::one()).expect("valid resonance");
    }
    t
}

/// A valid instance of the family, resampling when a sampled tuple
/// violates a constraint (a singular linear map, say).
fn sample_member(s: &mut Sampler, spec: &FamilySpec, inputs: &str) -> Result<(Instance, PolyMap), Failure> {
    let mut last = None;
    for _ in 0..32 {
        let inst = s.instance(spec);
        match family_map(spec, &inst) {
            Ok(m) => return Ok((inst, m)),
            Err(IsoError::ConstraintViolated(e)) => last = Some(e),
            Err(e) => return Err(fail(format!("{inputs}; instance = {}", show(&inst)), "a family member", e)),
        }
    }
    Err(fail(inputs, "a family member", format!("no valid instance: {}", last.unwrap_or_default())))
}

/// Random words outside the family must not commute. A commuting
/// non-member is accepted only when the diagonal weight analysis explains
/// it by a resonance.
fn sharpness(s: &mut Sampler, spec: &FamilySpec, inputs: &str, commutes: impl Fn(&PolyMap) -> bool) -> Outcome {
    for _ in 0..16 {
        let w = s.word();
        let m = w.flatten();
        if spec.is_member(&m) {
            continue;
        }
        if commutes(&m) && !spec.resonances.as_ref().is_some_and(|r| r.explains(&m)) {
            return Err(fail(
                format!("{inputs}; word = {w}; map = {m}"),
                "a non-member that does not commute",
                "commutes",
            ));
        }
        return Ok(());
    }
    Ok(())
}

fn derivation_family(s: &mut Sampler, form: Form) -> Outcome {
    let d = form.derivation();
    let inputs = format!("D = {d}");
    let spec = family_spec(&form, Target::Derivation, Variant::Proven, &ParamTable::new()).or_fail(&inputs, "a family")?;
    let (inst, _) = sample_member(s, &spec, &inputs)?;
    iso_family(&form, Variant::Proven, &inst)
        .or_fail(&format!("{inputs}; instance = {}", show(&inst)), "a commuting member")?;
    sharpness(s, &spec, &inputs, |m| commutes_with_derivation(m, &d))
}

pub fn iso_type1(s: &mut Sampler) -> Outcome {
    let f = s.univariate();
    derivation_family(s, Form::Type1 { f })
}

pub fn iso_type2(s: &mut Sampler) -> Outcome {
    let b = if s.int(0, 3) == 0 { Coeff::zero() } else { s.nonzero_rational() };
    derivation_family(s, Form::Type2 { b })
}

pub fn iso_type3(s: &mut Sampler) -> Outcome {
    let a = s.nonzero_rational();
    let m = s.int(1, 4) as u32;
    derivation_family(s, Form::Type3 { a, m })
}

pub fn iso_scalar(s: &mut Sampler) -> Outcome {
    let lambda = s.nonzero_rational();
    derivation_family(s, Form::Scalar { lambda })
}

pub fn iso_diagonal(s: &mut Sampler) -> Outcome {
    let a = s.nonzero_rational();
    let b = match s.int(0, 3) {
        0 => &a * &Coeff::int(s.int(2, 3)),
        1 => &a / &Coeff::int(s.int(2, 3)),
        _ => loop {
            let b = s.nonzero_rational();
            if b != a {
                break b;
            }
        },
    };
    derivation_family(s, Form::Diagonal { a, b })
}

pub fn iso_jordan_block(s: &mut Sampler) -> Outcome {
    let lambda = s.nonzero_rational();
    derivation_family(s, Form::JordanBlock { lambda })
}

/// Proof form `(cX, c^m Y + βX^m)` commutes for symbolic `a, c, β`; the
/// displayed `(α^m X, αY + βX^m)` does not.
pub fn type3_parametrization(_: &mut Sampler) -> Outcome {
    let table = ParamTable::new();
    for m in 2..=4 {
        let form = Form::Type3 { a: param("a"), m };
        let d = form.derivation();
        let inputs = format!("D = {d}");
        let proven = family_spec(&form, Target::Derivation, Variant::Proven, &table).or_fail(&inputs, "a family")?;
        let inst = instance(&[("c", scalar(param("c"))), ("beta", scalar(param("beta")))]);
        let m1 = family_map(&proven, &inst).or_fail(&inputs, "a map")?;
        check(commutes_with_derivation(&m1, &d), format!("{inputs}; map = {m1}"), "commutes", "does not commute")?;
        let stated = family_spec(&form, Target::Derivation, Variant::Stated, &table).or_fail(&inputs, "a family")?;
        let inst = instance(&[("alpha", scalar(param("alpha"))), ("beta", scalar(param("beta")))]);
        let m2 = family_map(&stated, &inst).or_fail(&inputs, "a map")?;
        check(
            !commutes_with_derivation(&m2, &d),
            format!("{inputs}; map = {m2}"),
            "the displayed form fails to commute",
            "commutes",
        )?;
    }
    Ok(())
}

/// `(X, Y + X^k)` commutes with `X ∂/∂X + kY ∂/∂Y` and with `(λX, λ^k Y)`.
pub fn diagonal_resonance(_: &mut Sampler) -> Outcome {
    let one = BigRational::one();
    for k in 2..=4u32 {
        let d = Derivation::new(x(), y().scale(&Coeff::int(k as i64)));
        let rho = PolyMap::new(x(), &y() + &x().pow(k));
        let inputs = format!("D = {d}; map = {rho}");
        check(commutes_with_derivation(&rho, &d), &inputs, "commutes", "does not commute")?;
        let psi = PolyMap::new(x().scale(&Coeff::int(2)), y().scale(&Coeff::int(2).pow(k as i64)));
        check(commutes_with_automorphism(&rho, &psi), format!("{inputs}; psi = {psi}"), "commutes", "does not commute")?;
        let r = diag_resonances(&one, &BigRational::from_integer(k.into())).or_fail(&inputs, "supports")?;
        let want = Support::Finite(vec![(0, 1), (k as u64, 0)]);
        check(r.y_support == want, &inputs, &want, &r.y_support)?;
        check(r.explains(&rho), &inputs, "resonance explains the map", "not explained")?;
    }
    Ok(())
}

fn taylor_linear(p: &Poly2, t: Symbol) -> Result<Poly2, String> {
    p.try_map_coeffs(|c| c.taylor_linear(t)).map_err(|e| e.to_string())
}

fn symbolic_forms(s: &mut Sampler) -> Vec<Form> {
    vec![
        Form::Type1 {
            f: &x().pow(2) + &Poly2::constant(param("a")),
        },
        Form::Type2 { b: param("b") },
        Form::Type3 {
            a: param("a"),
            m: s.int(1, 3) as u32,
        },
        Form::Scalar { lambda: param("l") },
        Form::Diagonal {
            a: param("a"),
            b: param("b"),
        },
        Form::JordanBlock { lambda: param("l") },
    ]
}

/// The `t¹` coefficient of `exp(tD)` is `(D(X), D(Y))`, so the flow is
/// nontrivial whenever `D` is.
pub fn nontrivial_isotropy(s: &mut Sampler) -> Outcome {
    let t = Symbol::param("t");
    let table = ParamTable::new();
    for form in symbolic_forms(s) {
        let d = form.derivation();
        let inputs = format!("D = {d}");
        let fl = flow(&d, t, &table, DEFAULT_CAP).or_fail(&inputs, "a flow")?;
        let lin = (taylor_linear(&fl.f, t), taylor_linear(&fl.g, t));
        let (lf, lg) = match lin {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return Err(fail(&inputs, "a t-linear coefficient", e)),
        };
        let want = PolyMap::new(d.p_x.clone(), d.p_y.clone());
        let got = PolyMap::new(lf, lg);
        check(got == want, format!("{inputs}; flow = {fl}"), &want, &got)?;
        check(!fl.is_identity() && !d.is_zero(), &inputs, "a nontrivial flow", &fl)?;
        let at0 = fl.substitute_param(t, &Coeff::zero()).or_fail(&inputs, "flow at 0")?;
        check(at0.is_identity(), &inputs, "identity at t = 0", &at0)?;
    }
    Ok(())
}

pub fn flow_group_law(s: &mut Sampler) -> Outcome {
    let (t, u) = (Symbol::param("t"), Symbol::param("s"));
    let table = ParamTable::new();
    let choice = s.int(0, 6);
    let d = if choice == 6 {
        let f = s.univariate();
        let w = s.linear_word();
        conjugate(&w, &Derivation::new(Poly2::zero(), f)).or_fail("conjugation", "a derivation")?
    } else if choice == 0 {
        Derivation::new(Poly2::zero(), s.univariate())
    } else {
        symbolic_forms(s)[choice as usize].derivation()
    };
    let inputs = format!("D = {d}");
    let sum = &Coeff::symbol(t) + &Coeff::symbol(u);
    let lhs = flow_at(&d, &sum, &table, DEFAULT_CAP).or_fail(&inputs, "flow at t + s")?;
    let ft = flow(&d, t, &table, DEFAULT_CAP).or_fail(&inputs, "flow at t")?;
    let fs = flow(&d, u, &table, DEFAULT_CAP).or_fail(&inputs, "flow at s")?;
    let rhs = compose(&ft, &fs);
    check(lhs == rhs, &inputs, &lhs, &rhs)
}

/// Grid checks of `compose(m1, m2) = id` cost `(deg m1 · deg m2)²`
/// evaluations; above this degree product the suite relies on the chain below.
const DIRECT_INVERSE_DEGREE: u32 = 16;

/// `exp(D)` inverts to `exp(-D)` and transports along words:
/// `φ exp(D) φ⁻¹ = exp(φ D φ⁻¹)`.
///
/// For a conjugate `E = φ D φ⁻¹` the composite `exp(E) exp(-E)` can have
/// degree in the hundreds. It is certified instead by
/// `exp(±E) = φ exp(±D) φ⁻¹`, `φ⁻¹ φ = id` and `exp(D) exp(-D) = id`.
pub fn lnd_exp(s: &mut Sampler) -> Outcome {
    let f = s.univariate();
    let d = Derivation::new(Poly2::zero(), f);
    let w = s.word();
    let inputs = format!("D = {d}; word = {w}");
    let e = conjugate(&w, &d).or_fail(&inputs, "a conjugate")?;
    let cap = DEFAULT_CAP;
    let exp = |g: &Derivation| exp_lnd(g, cap).or_fail(&inputs, "exp");
    let (fwd, back) = (exp(&d)?, exp(&-&d)?);
    check(
        compose(&fwd, &back).is_identity(),
        &inputs,
        "exp(-D) inverse to exp(D)",
        format!("exp(D) = {fwd}; exp(-D) = {back}"),
    )?;
    let phi = w.flatten();
    let phi_inv = w.invert().or_fail(&inputs, "an inverse")?.flatten();
    let mid = compose(&phi_inv, &phi);
    check(mid.is_identity(), &inputs, "identity", &mid)?;
    let transport = |m: &PolyMap| compose(&phi, &compose(m, &phi_inv));
    let (efwd, eback) = (exp(&e)?, exp(&-&e)?);
    for (m, want) in [(&fwd, &efwd), (&back, &eback)] {
        let got = transport(m);
        check(&got == want, format!("{inputs}; conjugate = {e}"), want, &got)?;
    }
    if efwd.degree() * eback.degree() <= DIRECT_INVERSE_DEGREE {
        check(
            compose_is_identity(&efwd, &eback),
            format!("{inputs}; conjugate = {e}"),
            "exp(-E) inverse to exp(E)",
            format!("exp(E) = {efwd}; exp(-E) = {eback}"),
        )?;
    }
    Ok(())
}

/// The transport identity for non-nilpotent normal forms under linear words.
pub fn conjugation_exp(s: &mut Sampler) -> Outcome {
    let table = ParamTable::new();
    let forms = symbolic_forms(s);
    let form = forms[s.int(1, 5) as usize].clone();
    let d = form.derivation();
    let w = s.linear_word();
    let inputs = format!("D = {d}; word = {w}");
    let e = conjugate(&w, &d).or_fail(&inputs, "a conjugate")?;
    let phi = w.flatten();
    let phi_inv = w.invert().or_fail(&inputs, "an inverse")?.flatten();
    let lhs = compose(&phi, &compose(&exp_lfd(&d, &table, DEFAULT_CAP).or_fail(&inputs, "exp")?, &phi_inv));
    let rhs = exp_lfd(&e, &table, DEFAULT_CAP).or_fail(&format!("{inputs}; conjugate = {e}"), "exp")?;
    check(lhs == rhs, &inputs, &lhs, &rhs)
}

/// For `D = f(X) ∂/∂Y`, commuting with `D` and with `exp(D)` agree.
pub fn lnd_exp_isotropy(s: &mut Sampler) -> Outcome {
    let f = s.univariate();
    let form = Form::Type1 { f };
    let d = form.derivation();
    let inputs = format!("D = {d}");
    let psi = exp_lnd(&d, DEFAULT_CAP).or_fail(&inputs, "exp")?;
    let spec = family_spec(&form, Target::Derivation, Variant::Proven, &ParamTable::new()).or_fail(&inputs, "a family")?;
    let mut maps: Vec<(String, PolyMap)> = (0..50)
        .map(|_| {
            let w = s.word();
            (w.to_string(), w.flatten())
        })
        .collect();
    for _ in 0..10 {
        let (inst, m) = sample_member(s, &spec, &inputs)?;
        maps.push((show(&inst), m));
    }
    for (origin, m) in maps {
        let a = commutes_with_derivation(&m, &d);
        let b = commutes_with_automorphism(&m, &psi);
        check(a == b, format!("{inputs}; map = {m} ({origin})"), "agreement", format!("derivation {a}, exponential {b}"))?;
    }
    Ok(())
}

/// `[D', D] = 0` puts `exp(D')` in the isotropy of `D`; a nonzero bracket
/// keeps it out.
pub fn commuting_exp(s: &mut Sampler) -> Outcome {
    let f = s.univariate();
    let d = Derivation::new(Poly2::zero(), f);
    let g = s.poly_in(Var::X, 4);
    let dp = d.mul_poly(&g);
    let inputs = format!("D = {d}; D' = {dp}");
    let e = exp_lnd(&dp, DEFAULT_CAP).or_fail(&inputs, "exp")?;
    check(commutes_with_derivation(&e, &d), &inputs, "exp(D') commutes with D", "does not commute")?;
    for _ in 0..16 {
        let h = s.nonzero_poly_in(Var::X, 3);
        let w = s.word();
        let other = conjugate(&w, &Derivation::new(Poly2::zero(), h)).or_fail(&inputs, "a conjugate")?;
        if Derivation::bracket(&other, &d).is_zero() {
            continue;
        }
        let inputs = format!("D = {d}; D' = {other}");
        let e = exp_lnd(&other, DEFAULT_CAP).or_fail(&inputs, "exp")?;
        return check(!commutes_with_derivation(&e, &d), &inputs, "exp(D') does not commute with D", "commutes");
    }
    Ok(())
}

/// `exp(aD)` for kernel elements `a` lies in the isotropy of `D` and adds up.
pub fn kernel_subgroup(s: &mut Sampler) -> Outcome {
    let f = s.univariate();
    let d = Derivation::new(Poly2::zero(), f);
    let a1 = s.poly_in(Var::X, 3);
    let a2 = s.poly_in(Var::X, 3);
    let inputs = format!("D = {d}; a1 = {a1}; a2 = {a2}");
    let e1 = exp_lnd(&d.mul_poly(&a1), DEFAULT_CAP).or_fail(&inputs, "exp")?;
    let e2 = exp_lnd(&d.mul_poly(&a2), DEFAULT_CAP).or_fail(&inputs, "exp")?;
    let e12 = exp_lnd(&d.mul_poly(&(&a1 + &a2)), DEFAULT_CAP).or_fail(&inputs, "exp")?;
    check(commutes_with_derivation(&e1, &d), &inputs, "exp(a1 D) commutes with D", "does not commute")?;
    let prod = compose(&e1, &e2);
    check(prod == e12, &inputs, &e12, &prod)
}

/// With an injective spectrum the two isotropy groups agree on samples; a
/// resonance breaks injectivity and the equality.
pub fn spectrum_criterion(s: &mut Sampler) -> Outcome {
    let (form, name) = if s.coin() {
        (Form::Type2 { b: param("b") }, "b")
    } else {
        (
            Form::Type3 {
                a: param("a"),
                m: s.int(1, 4) as u32,
            },
            "a",
        )
    };
    let d = form.derivation();
    let inputs = format!("D = {d}");
    let free = table_with(&[name], &[]);
    let sp = spectrum(&d, DEFAULT_CAP).or_fail(&inputs, "a spectrum")?;
    let inj = spectrum_injective(&sp, &free).or_fail(&inputs, "a verdict")?;
    check(inj, &inputs, "injective without resonances", "not injective")?;
    let psi = exp_lfd(&d, &free, DEFAULT_CAP).or_fail(&inputs, "exp")?;
    let spec = family_spec(&form, Target::Derivation, Variant::Proven, &free).or_fail(&inputs, "a family")?;
    let (_, member) = sample_member(s, &spec, &inputs)?;
    let mut maps = vec![member];
    maps.extend((0..5).map(|_| s.word().flatten()));
    for m in maps {
        let a = commutes_with_derivation(&m, &d);
        let b = commutes_with_automorphism(&m, &psi);
        check(a == b, format!("{inputs}; map = {m}"), "agreement", format!("derivation {a}, exponential {b}"))?;
    }
    let res = table_with(&[name], &[name]);
    let inj = spectrum_injective(&sp, &res).or_fail(&inputs, "a verdict")?;
    check(!inj, format!("{inputs}; E[{name}] = 1"), "not injective", "injective")?;
    let psi = exp_lfd(&d, &res, DEFAULT_CAP).or_fail(&inputs, "exp")?;
    let witness = match &form {
        Form::Type3 { m, .. } => PolyMap::new(x(), &y() + &x().pow(m + 1)),
        _ => PolyMap::new(&x() + &y().pow(2), y()),
    };
    let ok = commutes_with_automorphism(&witness, &psi) && !commutes_with_derivation(&witness, &d);
    check(
        ok,
        format!("{inputs}; E[{name}] = 1; map = {witness}"),
        "commutes with exp(D) but not with D",
        "no separation",
    )
}

/// `λX ∂/∂X` with `E[λ] = 1`: the exponential is the identity, so the swap
/// commutes with it but not with the derivation.
pub fn resonant_semisimple(_: &mut Sampler) -> Outcome {
    let table = table_with(&["lam"], &["lam"]);
    let d = Derivation::new(x().scale(&param("lam")), Poly2::zero());
    let inputs = format!("D = {d}; E[lam] = 1");
    let psi = exp_lfd(&d, &table, DEFAULT_CAP).or_fail(&inputs, "exp")?;
    check(psi.is_identity(), &inputs, "identity", &psi)?;
    let swap = PolyMap::new(y(), x());
    check(commutes_with_automorphism(&swap, &psi), &inputs, "swap commutes with exp(D)", "does not")?;
    check(!commutes_with_derivation(&swap, &d), &inputs, "swap does not commute with D", "commutes")?;
    let sp = spectrum(&d, DEFAULT_CAP).or_fail(&inputs, "a spectrum")?;
    let inj = spectrum_injective(&sp, &table).or_fail(&inputs, "a verdict")?;
    check(!inj, &inputs, "not injective", "injective")
}

/// Soundness and sharpness of the isotropy families of exponentials, with
/// symbolic eigenvalues.
pub fn iso_exp(s: &mut Sampler) -> Outcome {
    let (form, table) = match s.int(0, 6) {
        0 => (Form::Type1 { f: s.univariate() }, ParamTable::new()),
        1 => (Form::Type2 { b: param("b") }, table_with(&["b"], &[])),
        2 => (Form::Type2 { b: param("b") }, table_with(&["b"], &["b"])),
        3 => (
            Form::Type3 {
                a: param("a"),
                m: s.int(2, 4) as u32,
            },
            table_with(&["a"], &[]),
        ),
        4 => (
            Form::Diagonal {
                a: param("l1"),
                b: param("l2"),
            },
            table_with(&["l1", "l2"], &[]),
        ),
        5 => (Form::Scalar { lambda: param("l") }, table_with(&["l"], &[])),
        _ => (Form::JordanBlock { lambda: param("l") }, table_with(&["l"], &[])),
    };
    let resonances: Vec<String> = table.resonances().map(|(e, v)| format!("{e} = {v}")).collect();
    let inputs = format!("D = {}; resonances = [{}]", form.derivation(), resonances.join(", "));
    let psi = form_exponential(&form, &table).or_fail(&inputs, "exp")?;
    let inputs = format!("{inputs}; psi = {psi}");
    let spec = family_spec(&form, Target::Exponential, Variant::Proven, &table).or_fail(&inputs, "a family")?;
    let (inst, _) = sample_member(s, &spec, &inputs)?;
    iso_family_exp(&form, Variant::Proven, &inst, &table)
        .or_fail(&format!("{inputs}; instance = {}", show(&inst)), "a commuting member")?;
    sharpness(s, &spec, &inputs, |m| commutes_with_automorphism(m, &psi))
}

/// Displayed exponential families that differ from the verified ones: the
/// Jordan block family needs equal diagonal entries, and the `e^b = 1`
/// family misses the shears `X + r(Y)`.
pub fn stated_forms(_: &mut Sampler) -> Outcome {
    let table = table_with(&["l"], &[]);
    let form = Form::JordanBlock { lambda: param("l") };
    let inputs = format!("D = {}", form.derivation());
    let bad = instance(&[
        ("alpha", scalar(Coeff::int(2))),
        ("beta", scalar(Coeff::int(3))),
        ("gamma", scalar(Coeff::int(1))),
    ]);
    let r = iso_family_exp(&form, Variant::Stated, &bad, &table);
    check(
        matches!(r, Err(IsoError::Postcondition(_))),
        format!("{inputs}; instance = {}", show(&bad)),
        "displayed member with alpha != beta fails to commute",
        format!("{r:?}"),
    )?;
    let good = instance(&[("alpha", scalar(param("al"))), ("beta", scalar(param("be")))]);
    iso_family_exp(&form, Variant::Proven, &good, &table).or_fail(&inputs, "verified member commutes")?;

    let table = table_with(&["b"], &["b"]);
    let form = Form::Type2 { b: param("b") };
    let inputs = format!("D = {}; E[b] = 1", form.derivation());
    let psi = form_exponential(&form, &table).or_fail(&inputs, "exp")?;
    let shear = PolyMap::new(&x() + &y().pow(2), y());
    check(commutes_with_automorphism(&shear, &psi), &inputs, "the shear commutes", "does not")?;
    let stated = family_spec(&form, Target::Exponential, Variant::Stated, &table).or_fail(&inputs, "a family")?;
    let proven = family_spec(&form, Target::Exponential, Variant::Proven, &table).or_fail(&inputs, "a family")?;
    check(!stated.is_member(&shear), &inputs, "shear outside the displayed family", "inside")?;
    check(proven.is_member(&shear), &inputs, "shear inside the verified family", "outside")
}

fn closed_form_jordan(m: &Mat) -> (Mat, Mat) {
    let tr = m.trace();
    let det = &(m.get(0, 0) * m.get(1, 1)) - &(m.get(0, 1) * m.get(1, 0));
    let disc = &(&tr * &tr) - &(&Coeff::int(4) * &det);
    if disc.is_zero() {
        let s = Mat::identity(2).scale(&(&tr * &Coeff::ratio(1, 2)));
        let n = m - &s;
        (s, n)
    } else {
        (m.clone(), Mat::zeros(2))
    }
}

pub fn jordan_decomposition(s: &mut Sampler) -> Outcome {
    let m = if s.coin() {
        s.matrix()
    } else {
        // A repeated eigenvalue, so the nilpotent part is usually nonzero.
        let p = s.invertible_matrix();
        let l = s.rational();
        let j = Mat::from_rows(vec![vec![l.clone(), s.rational()], vec![Coeff::zero(), l]]);
        &(&p * &j) * &p.inverse().expect("invertible")
    };
    let d = Derivation::linear(&m);
    let inputs = format!("M = {m}");
    let parts = jordan(&d, DEFAULT_CAP).or_fail(&inputs, "a decomposition")?;
    let (sm, nm) = closed_form_jordan(&m);
    let want = (Derivation::linear(&sm), Derivation::linear(&nm));
    check(
        parts.semisimple == want.0 && parts.nilpotent == want.1,
        &inputs,
        format!("{} + {}", want.0, want.1),
        format!("{} + {}", parts.semisimple, parts.nilpotent),
    )?;

    let b = s.nonzero_rational();
    let d = Form::Type2 { b: b.clone() }.derivation();
    let parts = jordan(&d, DEFAULT_CAP).or_fail(&format!("D = {d}"), "a decomposition")?;
    let want = (Derivation::new(Poly2::zero(), y().scale(&b)), Derivation::partial(Var::X));
    check(
        parts.semisimple == want.0 && parts.nilpotent == want.1,
        format!("D = {d}"),
        format!("{} + {}", want.0, want.1),
        format!("{} + {}", parts.semisimple, parts.nilpotent),
    )?;

    let a = s.nonzero_rational();
    let k = s.int(1, 4) as u32;
    let d = Form::Type3 { a: a.clone(), m: k }.derivation();
    let parts = jordan(&d, DEFAULT_CAP).or_fail(&format!("D = {d}"), "a decomposition")?;
    let want = (
        Derivation::new(x().scale(&a), y().scale(&(&a * &Coeff::int(k as i64)))),
        Derivation::new(Poly2::zero(), x().pow(k)),
    );
    check(
        parts.semisimple == want.0 && parts.nilpotent == want.1,
        format!("D = {d}"),
        format!("{} + {}", want.0, want.1),
        format!("{} + {}", parts.semisimple, parts.nilpotent),
    )
}

/// `T^n + c_{n-1} T^{n-1} + ...` from the roots `r`.
fn poly_from_roots(roots: &[Coeff]) -> Poly2 {
    roots
        .iter()
        .fold(Poly2::one(), |acc, r| &acc * &(&x() - &Poly2::constant(r.clone())))
}

pub fn lf_detection(s: &mut Sampler) -> Outcome {
    let d = Derivation::new(x().pow(2), Poly2::zero());
    let inputs = format!("D = {d}; cap = 16");
    match classify_lf(&d, 16) {
        Err(DerivationError::NotStabilizedWithinCap { trace, .. }) => {
            check(trace.windows(2).all(|w| w[0] < w[1]), &inputs, "strictly increasing degrees", format!("{trace:?}"))?
        }
        other => return Err(fail(&inputs, "not stabilized within the cap", format!("{other:?}"))),
    }
    let (form, want) = match s.int(0, 3) {
        0 => {
            let f = s.univariate();
            (Form::Type1 { f }, poly_from_roots(&[Coeff::zero(), Coeff::zero()]))
        }
        1 => {
            let b = s.rational();
            let roots = if b.is_zero() { vec![Coeff::zero(); 2] } else { vec![Coeff::zero(), Coeff::zero(), b.clone()] };
            (Form::Type2 { b }, poly_from_roots(&roots))
        }
        2 => {
            let a = s.nonzero_rational();
            let m = s.int(1, 4) as u32;
            let am = &a * &Coeff::int(m as i64);
            let roots = if m == 1 { vec![a.clone(), a.clone()] } else { vec![a.clone(), am.clone(), am] };
            (Form::Type3 { a, m }, poly_from_roots(&roots))
        }
        _ => {
            let m = s.matrix();
            let scalar = m.get(0, 1).is_zero() && m.get(1, 0).is_zero() && m.get(0, 0) == m.get(1, 1);
            let want = if scalar {
                poly_from_roots(&[m.get(0, 0).clone()])
            } else {
                let det = &(m.get(0, 0) * m.get(1, 1)) - &(m.get(0, 1) * m.get(1, 0));
                &(&x().pow(2) - &x().scale(&m.trace())) + &Poly2::constant(det)
            };
            let d = Derivation::linear(&m);
            let inputs = format!("D = {d}");
            let r = classify_lf(&d, DEFAULT_CAP).or_fail(&inputs, "locally finite")?;
            return check(r.min_poly == want, &inputs, &want, &r.min_poly);
        }
    };
    let d = form.derivation();
    let inputs = format!("D = {d}");
    let r = classify_lf(&d, DEFAULT_CAP).or_fail(&inputs, "locally finite")?;
    check(r.min_poly == want, &inputs, &want, &r.min_poly)
}

/// `f(αX + β) = γ f(X)` holds on the solver's solutions and fails off them.
pub fn affine_symmetry_solver(s: &mut Sampler) -> Outcome {
    let f = s.univariate();
    let inputs = format!("f = {f}");
    let c = affine_symmetries(&f).or_fail(&inputs, "a constraint")?;
    let holds = |alpha: &Coeff, beta: &Coeff, gamma: &Coeff| {
        let sub = f.substitute(&(&x().scale(alpha) + &Poly2::constant(beta.clone())), &y());
        sub == f.scale(gamma)
    };
    let alpha = match c.rational_alphas() {
        Some(v) => Coeff::rational(s.pick(&v)),
        None => s.nonzero_rational(),
    };
    let beta = c.beta_for(&alpha).unwrap_or_else(|| s.rational());
    let gamma = c.gamma_for(&alpha);
    check(
        holds(&alpha, &beta, &gamma),
        format!("{inputs}; ({alpha}, {beta}, {gamma})"),
        "a symmetry",
        "equation fails",
    )?;
    if c.exponent > 0 {
        let two = Coeff::int(2);
        let (b2, g2) = (c.beta_for(&two).expect("degree >= 1"), c.gamma_for(&two));
        check(!holds(&two, &b2, &g2), format!("{inputs}; alpha = 2"), "no symmetry", "equation holds")?;
    }
    if c.degree > 0 {
        let shifted = &beta + &Coeff::one();
        check(
            !holds(&alpha, &shifted, &gamma),
            format!("{inputs}; ({alpha}, {shifted}, {gamma})"),
            "no symmetry",
            "equation holds",
        )?;
    }
    Ok(())
}
