use rand::Rng;
use thiserror::Error;

use super::sample::sample_pair;
use crate::dsl::RunOps;
use crate::synth::Composite;

/// Draws that may be spent looking for pairs legal for both sides.
pub const ATTEMPT_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivOutcome {
    /// No disagreement on `samples` legal pairs.
    Equivalent { samples: usize },
    Counterexample {
        y1: Vec<u8>,
        y2: Vec<u8>,
        v1: Result<Vec<u8>, String>,
        v2: Result<Vec<u8>, String>,
    },
}

impl EquivOutcome {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivOutcome::Equivalent { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no pair legal for both {0} and {1} found in {ATTEMPT_CAP} attempts")]
pub struct EmptyIntersection(pub String, pub String);

fn draw<R: Rng>(g: &Composite, rng: &mut R) -> (Vec<u8>, Vec<u8>) {
    let m = &g.members()[rng.gen_range(0..g.members().len())];
    sample_pair(m, rng)
}

/// Samples pairs from both sides' domain generators, keeps those legal for
/// both combiners, and compares the outputs.
///
/// Stops after `sample_count` legal pairs or [`ATTEMPT_CAP`] draws beyond
/// the requested count, whichever comes first. Outputs agree when both
/// evaluations fail or both succeed with the same bytes.
pub fn equiv_by_intersection_sample<R: Rng>(
    g1: &Composite,
    g2: &Composite,
    sample_count: usize,
    rng: &mut R,
    ops: &dyn RunOps,
) -> Result<EquivOutcome, EmptyIntersection> {
    let legal = |y: &[u8]| g1.in_domain(y, ops) && g2.in_domain(y, ops);
    let mut samples = 0;
    let mut attempts = 0;
    while samples < sample_count && attempts < ATTEMPT_CAP + sample_count {
        attempts += 1;
        let (y1, y2) = if rng.gen_bool(0.5) { draw(g1, rng) } else { draw(g2, rng) };
        if !(legal(&y1) && legal(&y2)) {
            continue;
        }
        samples += 1;
        let v1 = g1.eval(&y1, &y2, ops).map_err(|e| e.to_string());
        let v2 = g2.eval(&y1, &y2, ops).map_err(|e| e.to_string());
        let agree = match (&v1, &v2) {
            (Ok(a), Ok(b)) => a == b,
            (Err(_), Err(_)) => true,
            _ => false,
        };
        if !agree {
            return Ok(EquivOutcome::Counterexample { y1, y2, v1, v2 });
        }
    }
    if samples == 0 && sample_count > 0 {
        return Err(EmptyIntersection(g1.to_string(), g2.to_string()));
    }
    Ok(EquivOutcome::Equivalent { samples })
}
