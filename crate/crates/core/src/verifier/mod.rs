//! Executable soundness checks: sufficiency predicates on observation sets,
//! sampled equivalence on the intersection of legal domains, and the
//! divide-and-conquer equation itself.

mod enough;
mod equiv;
mod props;
mod sample;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use enough::{
    enough_basic, enough_for, enough_rep, enough_struct, is_table, table_witnesses, NotRepresentative,
    Representative,
};
pub use equiv::{equiv_by_intersection_sample, EmptyIntersection, EquivOutcome, ATTEMPT_CAP};
pub use props::{anti_elimination, check_equiv_cap, enough_observations, AntiElimination, PropertyError, TheoremCheck};
pub use sample::{sample_one, sample_pair};

use crate::dsl::RunOps;
use crate::inputgen::gen_input_pairs;
use crate::oracle::{observe, CommandHandle, CommandOps, ExecError, Observation};
use crate::synth::{prepare, Composite};

/// One element of an observation set: two partial outputs and the output
/// on the concatenated input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutputTuple {
    pub y1: Vec<u8>,
    pub y2: Vec<u8>,
    pub y12: Vec<u8>,
}

impl OutputTuple {
    pub fn new(y1: &[u8], y2: &[u8], y12: &[u8]) -> Self {
        OutputTuple {
            y1: y1.to_vec(),
            y2: y2.to_vec(),
            y12: y12.to_vec(),
        }
    }
}

impl From<&Observation> for OutputTuple {
    fn from(o: &Observation) -> Self {
        OutputTuple::new(&o.y1, &o.y2, &o.y12)
    }
}

/// `g(y1, y2) = y12` holds for every tuple, with both sides legal.
pub fn bool_sat(g: &Composite, y: &[OutputTuple], ops: &dyn RunOps) -> bool {
    y.iter().all(|t| {
        g.in_domain(&t.y1, ops) && g.in_domain(&t.y2, ops) && g.eval(&t.y1, &t.y2, ops).is_ok_and(|v| v == t.y12)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DncOutcome {
    Holds { checked: usize },
    Violation {
        x1: Vec<u8>,
        x2: Vec<u8>,
        y12: Vec<u8>,
        combined: Result<Vec<u8>, String>,
    },
}

impl DncOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, DncOutcome::Holds { .. })
    }
}

/// Checks `f(x1 ++ x2) = g(f(x1), f(x2))` on every pair.
pub fn check_dnc(
    f: &CommandHandle,
    g: &Composite,
    pairs: &[(Vec<u8>, Vec<u8>)],
) -> Result<DncOutcome, ExecError> {
    let ops = CommandOps::new(f);
    for p in pairs {
        let o = observe(f, p)?;
        let combined = g.eval(&o.y1, &o.y2, &ops).map_err(|e| e.to_string());
        if combined.as_ref().ok() != Some(&o.y12) {
            return Ok(DncOutcome::Violation {
                x1: p.0.clone(),
                x2: p.1.clone(),
                y12: o.y12,
                combined,
            });
        }
    }
    Ok(DncOutcome::Holds { checked: pairs.len() })
}

/// Printable ASCII as is, everything else as `\xNN` (backslash included).
pub fn hex_escape(s: &[u8]) -> String {
    let mut out = String::with_capacity(s.len());
    for &b in s {
        if (0x20..0x7f).contains(&b) && b != b'\\' {
            out.push(b as char);
        } else {
            out.push_str(&format!("\\x{b:02x}"));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub x1: String,
    pub x2: String,
    pub expected: String,
    pub combined: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberCheck {
    pub left: String,
    pub right: String,
    /// `equivalent`, `counterexample` or `empty-intersection`.
    pub verdict: String,
    pub samples: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: String,
    pub combiner: String,
    pub pairs: usize,
    pub dnc_holds: bool,
    pub counterexample: Option<Counterexample>,
    pub enough_basic: bool,
    pub enough_struct: bool,
    pub is_table: bool,
    /// Present when the combiner is one of the representatives.
    pub enough_for: Option<bool>,
    pub bool_sat: bool,
    /// Pairwise sampled equivalence of composite members.
    pub members: Vec<MemberCheck>,
    pub method: &'static str,
}

impl VerifyReport {
    pub fn verdict(&self) -> &'static str {
        if self.dnc_holds && self.members.iter().all(|m| m.verdict != "counterexample") {
            "holds"
        } else {
            "violated"
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("command rejects every probe input")]
    Unsupported,
    #[error(transparent)]
    Synth(#[from] crate::synth::SynthError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Gen(#[from] crate::inputgen::GenError),
}

fn render(r: &Result<Vec<u8>, String>) -> String {
    match r {
        Ok(v) => hex_escape(v),
        Err(e) => format!("<error: {e}>"),
    }
}

/// Runs `f` on `samples` generated pairs, checks `g` against every
/// observation, and evaluates the sufficiency predicates on what was seen.
pub fn verify(f: &CommandHandle, g: &Composite, samples: usize, seed: u64) -> Result<VerifyReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prep = prepare(f, &mut rng)?.ok_or(VerifyError::Unsupported)?;
    let pairs = gen_input_pairs(&prep.seed_shape, samples, &prep.dict, &mut rng)?;
    let ops = CommandOps::new(&prep.command);
    let dnc = check_dnc(&prep.command, g, &pairs)?;
    let observations: Vec<OutputTuple> = pairs
        .iter()
        .map(|p| observe(&prep.command, p).map(|o| OutputTuple::from(&o)))
        .collect::<Result<_, _>>()?;
    let counterexample = match &dnc {
        DncOutcome::Holds { .. } => None,
        DncOutcome::Violation { x1, x2, y12, combined } => Some(Counterexample {
            x1: hex_escape(x1),
            x2: hex_escape(x2),
            expected: hex_escape(y12),
            combined: render(combined),
        }),
    };
    let enough_for = g.as_single().and_then(|c| enough_for(c, &observations).ok());
    let mut members = Vec::new();
    for (i, a) in g.members().iter().enumerate() {
        for b in &g.members()[i + 1..] {
            let (ca, cb) = (Composite::single(a.clone()), Composite::single(b.clone()));
            let check = match equiv_by_intersection_sample(&ca, &cb, 500, &mut rng, &ops) {
                Ok(EquivOutcome::Equivalent { samples }) => MemberCheck {
                    left: a.to_string(),
                    right: b.to_string(),
                    verdict: "equivalent".into(),
                    samples,
                    counterexample: None,
                },
                Ok(EquivOutcome::Counterexample { y1, y2, v1, v2 }) => MemberCheck {
                    left: a.to_string(),
                    right: b.to_string(),
                    verdict: "counterexample".into(),
                    samples: 0,
                    counterexample: Some(Counterexample {
                        x1: hex_escape(&y1),
                        x2: hex_escape(&y2),
                        expected: render(&v1),
                        combined: render(&v2),
                    }),
                },
                Err(_) => MemberCheck {
                    left: a.to_string(),
                    right: b.to_string(),
                    verdict: "empty-intersection".into(),
                    samples: 0,
                    counterexample: None,
                },
            };
            members.push(check);
        }
    }
    Ok(VerifyReport {
        command: f.text().to_string(),
        combiner: g.to_string(),
        pairs: pairs.len(),
        dnc_holds: dnc.holds(),
        counterexample,
        enough_basic: enough_basic(&observations),
        enough_struct: enough_struct(&observations),
        is_table: is_table(&observations),
        enough_for,
        bool_sat: bool_sat(g, &observations, &ops),
        members,
        method: "sampled",
    })
}
