//! Randomized checks of the soundness results: sufficiency implies sampled
//! equivalence, and correct combiners are never eliminated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::enough::{enough_rep, Representative};
use super::equiv::{equiv_by_intersection_sample, EquivOutcome};
use super::sample::sample_pair;
use super::{bool_sat, OutputTuple};
use crate::dsl::{eval_unchecked, in_domain, Combiner, NoCommand, OpClass};
use crate::enumerate::CandidateSet;
use crate::inputgen::{gen_input_pairs, random_shape, GenError};
use crate::oracle::{observe, CommandHandle, CommandOps, ExecError};
use crate::synth::{prepare, Composite, SynthError};

/// Draws legal tuples for `rep` until the sufficiency condition holds.
/// Returns the shortest such prefix, or `None` after `max_draws`.
pub fn enough_observations<R: Rng>(rep: Representative, rng: &mut R, max_draws: usize) -> Option<Vec<OutputTuple>> {
    let g = rep.combiner();
    let mut y = Vec::new();
    for _ in 0..max_draws {
        let (y1, y2) = sample_pair(&g, rng);
        if !(in_domain(&g, &y1, &NoCommand) && in_domain(&g, &y2, &NoCommand)) {
            continue;
        }
        let Ok(y12) = eval_unchecked(&g, &y1, &y2, &NoCommand) else {
            continue;
        };
        y.push(OutputTuple::new(&y1, &y2, &y12));
        if enough_rep(rep, &y) {
            return Some(y);
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct TheoremCheck {
    pub rep: Representative,
    pub tuples: usize,
    /// Same-class candidates plausible for the observations.
    pub survivors: usize,
    /// Survivors whose domain never met the representative's in sampling.
    pub empty_intersections: usize,
    pub counterexamples: Vec<(Combiner, EquivOutcome)>,
}

impl TheoremCheck {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn plausible(c: &Combiner, y: &[OutputTuple]) -> bool {
    y.iter().all(|t| {
        in_domain(c, &t.y1, &NoCommand)
            && in_domain(c, &t.y2, &NoCommand)
            && eval_unchecked(c, &t.y1, &t.y2, &NoCommand).is_ok_and(|v| v == t.y12)
    })
}

/// Builds a sufficient observation set for `rep`, filters the same-class
/// members of `candidates` with it, and samples each survivor for
/// equivalence with the representative.
pub fn check_equiv_cap(
    rep: Representative,
    candidates: &CandidateSet,
    samples: usize,
    seed: u64,
) -> Option<TheoremCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = enough_observations(rep, &mut rng, 20_000)?;
    let class = if rep.is_structural() { OpClass::Struct } else { OpClass::Rec };
    let survivors: Vec<&Combiner> = candidates
        .members()
        .par_iter()
        .filter(|c| c.class() == class && plausible(c, &y))
        .collect();
    let g = Composite::single(rep.combiner());
    let outcomes: Vec<(Combiner, Option<EquivOutcome>)> = survivors
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let out = equiv_by_intersection_sample(&Composite::single((*c).clone()), &g, samples, &mut rng, &NoCommand);
            ((*c).clone(), out.ok())
        })
        .collect();
    let mut check = TheoremCheck {
        rep,
        tuples: y.len(),
        survivors: survivors.len(),
        empty_intersections: 0,
        counterexamples: Vec::new(),
    };
    for (c, out) in outcomes {
        match out {
            None => check.empty_intersections += 1,
            Some(o @ EquivOutcome::Counterexample { .. }) => check.counterexamples.push((c, o)),
            Some(EquivOutcome::Equivalent { .. }) => {}
        }
    }
    Some(check)
}

#[derive(Debug, Clone, Default)]
pub struct AntiElimination {
    pub pairs: usize,
    /// Pairs whose outputs left the combiner's legal domain.
    pub illegal: usize,
    /// Pairs on which the combiner disagreed with the command.
    pub eliminated: usize,
    pub first_failure: Option<OutputTuple>,
}

impl AntiElimination {
    pub fn holds(&self) -> bool {
        self.illegal == 0 && self.eliminated == 0
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PropertyError {
    #[error("command rejects every probe input")]
    Unsupported,
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// Runs `f` on `pairs` generated input pairs (random shapes, the command's
/// own dictionary) and counts those on which `g` would be eliminated.
pub fn anti_elimination(f: &CommandHandle, g: &Composite, pairs: usize, seed: u64) -> Result<AntiElimination, PropertyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prep = prepare(f, &mut rng)?.ok_or(PropertyError::Unsupported)?;
    let ops = CommandOps::new(&prep.command);
    let mut report = AntiElimination::default();
    while report.pairs < pairs {
        let batch = (pairs - report.pairs).min(8);
        let shape = random_shape(&mut rng);
        for p in gen_input_pairs(&shape, batch, &prep.dict, &mut rng)? {
            let o = observe(&prep.command, &p)?;
            let t = OutputTuple::from(&o);
            report.pairs += 1;
            let legal = g.in_domain(&t.y1, &ops) && g.in_domain(&t.y2, &ops);
            if !legal {
                report.illegal += 1;
            } else if !bool_sat(g, std::slice::from_ref(&t), &ops) {
                report.eliminated += 1;
            }
            if (!legal || report.eliminated > 0) && report.first_failure.is_none() {
                report.first_failure = Some(t);
            }
        }
    }
    Ok(report)
}
