//! Subcommands.

use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use isotrope::automorphism::{commutes_with_automorphism, commutes_with_derivation, conjugate, AutWord, PolyMap};
use isotrope::coeff::{Coeff, Symbol};
use isotrope::derivation::{classify_lf, jordan, recognize_normal_form, Derivation, DEFAULT_CAP};
use isotrope::expmap::{exp_lfd, flow};
use isotrope::isotropy::{
    affine_symmetries, diag_resonances, family_map, family_spec, Form, Instance, SlotKind, Target, Value, Variant,
};
use isotrope::poly::Poly2;
use isotrope::verify::{run_suite, SUITES};

use crate::session::{parse, Binding, Session};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "isotrope", version, about = "Derivations, automorphisms and isotropy groups of K[X, Y]")]
pub struct Cli {
    /// Session file with declarations and bindings (`-` reads stdin).
    #[arg(long, global = true)]
    pub session: Option<PathBuf>,
    /// Iteration cap for local-finiteness searches.
    #[arg(long, global = true, env = "ISOTROPE_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide local finiteness on the generators and report the minimal polynomial.
    CheckLf { derivation: String },
    /// Normal-form shape and local-finiteness class.
    Classify { derivation: String },
    /// Semisimple and locally nilpotent parts.
    Jordan { derivation: String },
    /// exp(D), with the session's resonances applied.
    Exp { derivation: String },
    /// exp(tD) for a parameter t.
    Flow {
        derivation: String,
        #[arg(short = 't', long = "time", default_value = "t")]
        time: String,
    },
    /// Lie bracket [D1, D2].
    Bracket { first: String, second: String },
    /// The derivation transported along a word.
    Conjugate { word: String, derivation: String },
    /// Whether a map commutes with a derivation, or with an automorphism.
    IsotropyCheck {
        map: String,
        target: String,
        /// Compare against exp(D) instead of D.
        #[arg(long)]
        exp: bool,
    },
    /// The isotropy family of a normal form.
    IsotropyFamily {
        #[arg(long, value_enum)]
        form: FormKind,
        /// Form parameters, e.g. `f=X^3 - X` or `a=2, m=3`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, value_enum, default_value_t = TargetKind::Derivation)]
        target: TargetKind,
        /// Use the displayed parametrization where it differs.
        #[arg(long)]
        stated: bool,
        /// Slot values to instantiate, e.g. `alpha=2, beta=1`.
        #[arg(long)]
        instance: Option<String>,
        /// A map to test for membership.
        #[arg(long)]
        member: Option<String>,
    },
    /// Solutions of f(alpha*X + beta) = gamma*f(X).
    AffineSymmetries {
        #[arg(long)]
        poly: String,
    },
    /// Monomials resonating with the weights of a*X dX + b*Y dY.
    DiagResonances { a: String, b: String },
    /// Run property suites.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// One JSON report per line.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormKind {
    Type1,
    Type2,
    Type3,
    Scalar,
    Diagonal,
    JordanBlock,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TargetKind {
    Derivation,
    Exp,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct CmdError {
    pub code: i32,
    pub msg: String,
}

impl CmdError {
    fn usage(msg: impl Into<String>) -> CmdError {
        CmdError {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
}

impl<E: Into<isotrope::Error>> From<E> for CmdError {
    fn from(e: E) -> CmdError {
        let e: isotrope::Error = e.into();
        let code = if e.is_cap_exceeded() { EXIT_CAP } else { EXIT_USAGE };
        CmdError { code, msg: e.to_string() }
    }
}

fn io_error(e: io::Error) -> CmdError {
    CmdError::usage(e.to_string())
}

pub fn load_session(path: Option<&PathBuf>) -> Result<Session, CmdError> {
    let Some(path) = path else {
        return Ok(Session::new());
    };
    let (text, label) = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_error)?;
        (s, "<stdin>".to_string())
    } else {
        let s = std::fs::read_to_string(path).map_err(|e| CmdError::usage(format!("{}: {e}", path.display())))?;
        (s, path.display().to_string())
    };
    parse(&text).map_err(|e| CmdError::usage(format!("{label}:{e}")))
}

/// A session binding by name, or an inline expression.
fn value(s: &mut Session, arg: &str) -> Result<Binding, CmdError> {
    if let Some(b) = s.get(arg) {
        return Ok(b.clone());
    }
    s.parse_value(arg).map_err(|e| CmdError::usage(format!("`{arg}`: {e}")))
}

fn derivation(s: &mut Session, arg: &str) -> Result<Derivation, CmdError> {
    match value(s, arg)? {
        Binding::Derivation(d) => Ok(d),
        b => Err(CmdError::usage(format!("`{arg}` is a {}, expected a derivation", b.kind()))),
    }
}

fn word(s: &mut Session, arg: &str) -> Result<AutWord, CmdError> {
    match value(s, arg)? {
        Binding::Word(w) => Ok(w),
        b => Err(CmdError::usage(format!("`{arg}` is a {}, expected a word", b.kind()))),
    }
}

fn map(s: &mut Session, arg: &str) -> Result<PolyMap, CmdError> {
    match value(s, arg)? {
        Binding::Map(m) => Ok(m),
        Binding::Word(w) => Ok(w.flatten()),
        b => Err(CmdError::usage(format!("`{arg}` is a {}, expected a map or a word", b.kind()))),
    }
}

/// `name=expr` pairs separated by top-level commas.
fn assignments(text: &str) -> Result<Vec<(String, String)>, CmdError> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
        .into_iter()
        .filter(|p| !p.trim().is_empty())
        .map(|p| match p.split_once('=') {
            Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
            None => Err(CmdError::usage(format!("expected name=value, got `{}`", p.trim()))),
        })
        .collect()
}

fn take(args: &mut Vec<(String, String)>, name: &str) -> Result<String, CmdError> {
    match args.iter().position(|(k, _)| k == name) {
        Some(i) => Ok(args.remove(i).1),
        None => Err(CmdError::usage(format!("missing form parameter `{name}`"))),
    }
}

fn coeff(s: &mut Session, text: &str) -> Result<Coeff, CmdError> {
    s.parse_coeff(text).map_err(|e| CmdError::usage(format!("`{text}`: {e}")))
}

fn poly(s: &mut Session, text: &str) -> Result<Poly2, CmdError> {
    s.parse_poly(text).map_err(|e| CmdError::usage(format!("`{text}`: {e}")))
}

fn build_form(s: &mut Session, kind: FormKind, params: &str) -> Result<Form, CmdError> {
    let mut args = assignments(params)?;
    let form = match kind {
        FormKind::Type1 => Form::Type1 {
            f: poly(s, &take(&mut args, "f")?)?,
        },
        FormKind::Type2 => Form::Type2 {
            b: coeff(s, &take(&mut args, "b")?)?,
        },
        FormKind::Type3 => {
            let a = coeff(s, &take(&mut args, "a")?)?;
            let m = take(&mut args, "m")?;
            let m = m.parse().map_err(|_| CmdError::usage(format!("m must be a positive integer, got `{m}`")))?;
            Form::Type3 { a, m }
        }
        FormKind::Scalar => Form::Scalar {
            lambda: coeff(s, &take(&mut args, "lambda")?)?,
        },
        FormKind::Diagonal => Form::Diagonal {
            a: coeff(s, &take(&mut args, "a")?)?,
            b: coeff(s, &take(&mut args, "b")?)?,
        },
        FormKind::JordanBlock => Form::JordanBlock {
            lambda: coeff(s, &take(&mut args, "lambda")?)?,
        },
    };
    if let Some((k, _)) = args.first() {
        return Err(CmdError::usage(format!("unexpected form parameter `{k}`")));
    }
    Ok(form)
}

fn describe_kind(k: SlotKind) -> String {
    match k {
        SlotKind::Nonzero => "nonzero scalar".into(),
        SlotKind::Arbitrary => "scalar".into(),
        SlotKind::RootOfUnity(m) => format!("nonzero scalar with alpha^{m} = 1"),
        SlotKind::Derived => "determined by alpha".into(),
        SlotKind::PolyX => "polynomial in X".into(),
        SlotKind::PolyY => "polynomial in Y".into(),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Runs one command, writing results to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CmdError> {
    let mut s = load_session(cli.session.as_ref())?;
    let cap = cli.cap;
    let w = |out: &mut dyn Write, text: String| writeln!(out, "{text}").map_err(io_error);
    match &cli.command {
        Command::CheckLf { derivation: d } => {
            let d = derivation(&mut s, d)?;
            let r = classify_lf(&d, cap)?;
            w(out, "locally finite: yes".into())?;
            w(out, format!("minimal polynomial: {}", r.min_poly.display_with("T", "Y")))?;
            w(out, format!("degree trace X: {:?}", r.x_span.trace))?;
            w(out, format!("degree trace Y: {:?}", r.y_span.trace))?;
            w(out, format!("locally nilpotent: {}", yes(r.is_lnd)))?;
            w(out, format!("semisimple: {}", yes(r.is_semisimple)))?;
        }
        Command::Classify { derivation: d } => {
            let d = derivation(&mut s, d)?;
            w(out, format!("normal form: {}", recognize_normal_form(&d)))?;
            let r = classify_lf(&d, cap)?;
            let class = match (r.is_lnd, r.is_semisimple) {
                (true, _) => "locally nilpotent",
                (false, true) => "semisimple",
                (false, false) => "locally finite, neither nilpotent nor semisimple",
            };
            w(out, format!("class: {class}"))?;
        }
        Command::Jordan { derivation: d } => {
            let d = derivation(&mut s, d)?;
            let j = jordan(&d, cap)?;
            w(out, format!("semisimple: {}", Binding::Derivation(j.semisimple)))?;
            w(out, format!("nilpotent: {}", Binding::Derivation(j.nilpotent)))?;
        }
        Command::Exp { derivation: d } => {
            let d = derivation(&mut s, d)?;
            w(out, exp_lfd(&d, &s.table, cap)?.to_string())?;
        }
        Command::Flow { derivation: d, time } => {
            let d = derivation(&mut s, d)?;
            if !isotrope::coeff::is_valid_param_name(time) {
                return Err(CmdError::usage(format!("`{time}` is not a parameter name")));
            }
            w(out, flow(&d, Symbol::param(time), &s.table, cap)?.to_string())?;
        }
        Command::Bracket { first, second } => {
            let (a, b) = (derivation(&mut s, first)?, derivation(&mut s, second)?);
            w(out, Binding::Derivation(Derivation::bracket(&a, &b)).to_string())?;
        }
        Command::Conjugate { word: wd, derivation: d } => {
            let (wd, d) = (word(&mut s, wd)?, derivation(&mut s, d)?);
            w(out, Binding::Derivation(conjugate(&wd, &d)?).to_string())?;
        }
        Command::IsotropyCheck { map: m, target, exp } => {
            let m = map(&mut s, m)?;
            let ok = match value(&mut s, target)? {
                Binding::Derivation(d) if *exp => commutes_with_automorphism(&m, &exp_lfd(&d, &s.table, cap)?),
                Binding::Derivation(d) => commutes_with_derivation(&m, &d),
                Binding::Map(psi) => commutes_with_automorphism(&m, &psi),
                Binding::Word(psi) => commutes_with_automorphism(&m, &psi.flatten()),
                Binding::Poly(_) => return Err(CmdError::usage("the target must be a derivation, a map or a word")),
            };
            w(out, if ok { "commutes" } else { "does not commute" }.into())?;
            if !ok {
                return Ok(EXIT_VERIFICATION);
            }
        }
        Command::IsotropyFamily {
            form,
            params,
            target,
            stated,
            instance,
            member,
        } => {
            let form = build_form(&mut s, *form, params)?;
            let target = match target {
                TargetKind::Derivation => Target::Derivation,
                TargetKind::Exp => Target::Exponential,
            };
            let variant = if *stated { Variant::Stated } else { Variant::Proven };
            let spec = family_spec(&form, target, variant, &s.table)?;
            w(out, format!("derivation: {}", form.derivation()))?;
            w(out, format!("family: {}", spec.shape.describe()))?;
            for slot in spec.slots() {
                w(out, format!("  {}: {}", slot.name, describe_kind(slot.kind)))?;
            }
            if let Some(c) = spec.constraint() {
                w(out, format!("constraint: {c}"))?;
            }
            if spec.resonant_branch {
                w(out, "branch: resonant (E[b] = 1)".into())?;
            }
            if let Some(r) = &spec.resonances {
                w(out, format!("resonances: {r}"))?;
            }
            if spec.has_stated_variant() {
                w(out, "note: the displayed and verified parametrizations differ for this family".into())?;
            }
            if let Some(text) = instance {
                let mut inst = Instance::new();
                for (k, v) in assignments(text)? {
                    let v = match s.parse_poly(&v) {
                        Ok(p) if p.is_constant() => Value::Scalar(p.as_constant().expect("constant")),
                        Ok(p) => Value::Poly(p),
                        Err(e) => return Err(CmdError::usage(format!("`{v}`: {e}"))),
                    };
                    inst.insert(k, v);
                }
                spec.complete(&mut inst)?;
                w(out, format!("instance: {}", family_map(&spec, &inst)?))?;
            }
            if let Some(m) = member {
                let m = map(&mut s, m)?;
                let ok = spec.is_member(&m);
                w(out, format!("member: {}", yes(ok)))?;
                if !ok {
                    return Ok(EXIT_VERIFICATION);
                }
            }
        }
        Command::AffineSymmetries { poly: p } => {
            let p = poly(&mut s, p)?;
            w(out, affine_symmetries(&p)?.to_string())?;
        }
        Command::DiagResonances { a, b } => {
            let rational = |s: &mut Session, t: &str| -> Result<_, CmdError> {
                let c = coeff(s, t)?;
                c.as_rational()
                    .cloned()
                    .ok_or_else(|| CmdError::usage(format!("`{t}` must be a rational number")))
            };
            let (a, b) = (rational(&mut s, a)?, rational(&mut s, b)?);
            w(out, diag_resonances(&a, &b)?.to_string())?;
        }
        Command::Verify {
            suite,
            seed,
            samples,
            json,
        } => {
            let names: Vec<&str> = if suite == "all" {
                SUITES.iter().map(|s| s.name).collect()
            } else {
                vec![suite.as_str()]
            };
            let mut all_passed = true;
            for name in names {
                let r = run_suite(name, *seed, *samples)?;
                all_passed &= r.passed();
                w(out, if *json { r.to_json() } else { r.to_string() })?;
            }
            if !all_passed {
                return Ok(EXIT_VERIFICATION);
            }
        }
    }
    Ok(EXIT_OK)
}
