//! Named, seeded property suites.
//!
//! Sample `i` of a run with seed `s` draws from stream `i` of a ChaCha8
//! generator seeded with `s`, so samples are independent of each other and
//! of the thread that runs them. Reports list failures by sample index.

pub mod sample;
pub mod suites;

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use sample::Sampler;
use suites::Outcome;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("unknown suite {0}; known suites: {1}")]
    UnknownSuite(String, String),
}

/// A counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub sample: usize,
    pub inputs: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub failures: Vec<Failure>,
    pub ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// The report without its wall time; equal across replays.
    pub fn fingerprint(&self) -> String {
        SuiteReport { ms: 0, ..self.clone() }.to_json()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {} (seed {}, {} samples, {} failures, {} ms)",
            self.suite,
            self.seed,
            self.samples,
            self.failures.len(),
            self.ms
        )?;
        for fl in &self.failures {
            write!(
                f,
                "\n  sample {}: {}\n    expected: {}\n    got: {}",
                fl.sample, fl.inputs, fl.expected, fl.got
            )?;
        }
        Ok(())
    }
}

pub struct Suite {
    pub name: &'static str,
    pub summary: &'static str,
    /// Fixed suites run a single sample regardless of the requested count.
    pub sampled: bool,
    check: fn(&mut Sampler) -> Outcome,
}

const fn suite(name: &'static str, summary: &'static str, sampled: bool, check: fn(&mut Sampler) -> Outcome) -> Suite {
    Suite {
        name,
        summary,
        sampled,
        check,
    }
}

pub static SUITES: &[Suite] = &[
    suite("iso-type1", "isotropy of f(X) dY: soundness and sharpness", true, suites::iso_type1),
    suite("iso-type2", "isotropy of dX + bY dY: soundness and sharpness", true, suites::iso_type2),
    suite("iso-type3", "isotropy of aX dX + (amY + X^m) dY: soundness and sharpness", true, suites::iso_type3),
    suite("type3-parametrization", "proof form of the type 3 family commutes, displayed form does not", false, suites::type3_parametrization),
    suite("iso-scalar", "isotropy of a(X dX + Y dY): soundness and sharpness", true, suites::iso_scalar),
    suite("iso-diagonal", "isotropy of aX dX + bY dY, with resonant enlargements", true, suites::iso_diagonal),
    suite("diagonal-resonance", "(X, Y + X^k) commutes with X dX + kY dY", false, suites::diagonal_resonance),
    suite("iso-jordan-block", "isotropy of (aX + Y) dX + aY dY: soundness and sharpness", true, suites::iso_jordan_block),
    suite("affine-symmetries", "solutions of f(aX + b) = c f(X) hold and non-solutions fail", true, suites::affine_symmetry_solver),
    suite("nontrivial-isotropy", "t-linear term of exp(tD) is D, so exp(tD) is a nontrivial symmetry", false, suites::nontrivial_isotropy),
    suite("flow-group-law", "exp((t + s)D) = exp(tD) exp(sD)", true, suites::flow_group_law),
    suite("lnd-exp", "exp(D) exp(-D) = id and transport of exp along words", true, suites::lnd_exp),
    suite("conjugation-exp", "transport of exp along linear words for normal forms", true, suites::conjugation_exp),
    suite("lnd-exp-isotropy", "for LND D, commuting with D and with exp(D) agree", true, suites::lnd_exp_isotropy),
    suite("commuting-exp", "[D', D] = 0 gives exp(D') in the isotropy of D, and conversely", true, suites::commuting_exp),
    suite("kernel-subgroup", "exp(aD) for kernel elements a is an additive subgroup of the isotropy", true, suites::kernel_subgroup),
    suite("spectrum-criterion", "injective spectrum makes the isotropy of D and exp(D) agree", true, suites::spectrum_criterion),
    suite("resonant-semisimple", "lam X dX with E[lam] = 1 has identity exponential", false, suites::resonant_semisimple),
    suite("iso-exp", "isotropy of exponential automorphisms: soundness and sharpness", true, suites::iso_exp),
    suite("stated-forms", "displayed exponential families that differ from the verified ones", false, suites::stated_forms),
    suite("jordan-decomposition", "Jordan parts of 2x2 linear derivations and normal forms", true, suites::jordan_decomposition),
    suite("lf-detection", "local finiteness and minimal polynomials of normal forms", true, suites::lf_detection),
];

pub fn find_suite(name: &str) -> Result<&'static Suite, VerifyError> {
    SUITES.iter().find(|s| s.name == name).ok_or_else(|| {
        VerifyError::UnknownSuite(
            name.to_string(),
            SUITES.iter().map(|s| s.name).collect::<Vec<_>>().join(", "),
        )
    })
}

fn run_one(suite: &Suite, seed: u64, index: usize) -> Outcome {
    let mut s = Sampler::new(seed, index as u64);
    let check = suite.check;
    match catch_unwind(AssertUnwindSafe(|| check(&mut s))) {
        Ok(r) => r,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(Failure {
                sample: index,
                inputs: format!("seed {seed}, sample {index}"),
                expected: "no panic".into(),
                got: msg,
            })
        }
    }
}

/// Re-runs one sample of a suite.
pub fn run_sample(name: &str, seed: u64, index: usize) -> Result<Outcome, VerifyError> {
    let suite = find_suite(name)?;
    Ok(run_one(suite, seed, index).map_err(|mut f| {
        f.sample = index;
        f
    }))
}

pub fn run_suite(name: &str, seed: u64, samples: usize) -> Result<SuiteReport, VerifyError> {
    let suite = find_suite(name)?;
    let samples = if suite.sampled { samples } else { 1 };
    let start = Instant::now();
    let mut failures: Vec<Failure> = (0..samples)
        .into_par_iter()
        .filter_map(|i| {
            run_one(suite, seed, i).err().map(|mut f| {
                f.sample = i;
                f
            })
        })
        .collect();
    failures.sort_by_key(|f| f.sample);
    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        samples,
        failures,
        ms: start.elapsed().as_millis() as u64,
    })
}
