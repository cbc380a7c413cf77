use log::{debug, warn};
use rand::Rng;
use rayon::prelude::*;

use super::dict::Dictionary;
use super::gen::gen_input_pairs;
use super::shape::{mutate_shape, InputShape};
use crate::dsl::RunOps;
use crate::enumerate::CandidateSet;
use crate::oracle::{observe_all, CommandHandle, Observation};
use crate::synth::is_plausible;

pub type Pair = (Vec<u8>, Vec<u8>);

pub const MUTATIONS: usize = 12;

/// Knobs of the shape search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Gradient steps per call (`M`).
    pub rounds: usize,
    /// Pairs generated per mutated shape (`n`).
    pub per_shape: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            rounds: 6,
            per_shape: 4,
        }
    }
}

/// Everything one shape search produced.
#[derive(Debug, Clone, Default)]
pub struct EffectiveInputs {
    pub pairs: Vec<Pair>,
    pub observations: Vec<Observation>,
    /// Per candidate: eliminated by some observation.
    pub eliminated: Vec<bool>,
    /// Pairs lost to execution failures.
    pub discarded: usize,
    /// The shape reached at the end of the walk.
    pub final_shape: Option<InputShape>,
}

/// Which candidates some observation in `obs` rules out.
pub fn elimination_mask(candidates: &CandidateSet, obs: &[Observation], ops: &dyn RunOps) -> Vec<bool> {
    let mut unique: Vec<&Observation> = Vec::with_capacity(obs.len());
    for o in obs {
        if !unique.iter().any(|u| u.y1 == o.y1 && u.y2 == o.y2 && u.y12 == o.y12) {
            unique.push(o);
        }
    }
    candidates
        .members()
        .par_iter()
        .map(|c| unique.iter().any(|o| !is_plausible(c, o, ops)))
        .collect()
}

/// Index (1-based) of the observation set that eliminates the most
/// candidates; ties go to the lowest index.
pub fn index_best_observed(candidates: &CandidateSet, sets: &[Vec<Observation>], ops: &dyn RunOps) -> usize {
    best_index(&counts(candidates, sets, ops))
}

fn counts(candidates: &CandidateSet, sets: &[Vec<Observation>], ops: &dyn RunOps) -> Vec<usize> {
    sets.iter()
        .map(|s| elimination_mask(candidates, s, ops).into_iter().filter(|&e| e).count())
        .collect()
}

fn best_index(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best + 1
}

fn observe_set(f: &CommandHandle, pairs: &[Pair]) -> (Vec<Pair>, Vec<Observation>, usize) {
    let mut kept = Vec::with_capacity(pairs.len());
    let mut obs = Vec::with_capacity(pairs.len());
    let mut discarded = 0;
    for (pair, r) in pairs.iter().zip(observe_all(f, pairs)) {
        match r {
            Ok(o) => {
                kept.push(pair.clone());
                obs.push(o);
            }
            Err(e) => {
                warn!("discarding input pair: {e}");
                discarded += 1;
            }
        }
    }
    (kept, obs, discarded)
}

/// [`index_best_observed`] over raw input pairs; pairs whose execution
/// fails do not count.
pub fn index_best_mutation(
    f: &CommandHandle,
    ops: &dyn RunOps,
    candidates: &CandidateSet,
    input_sets: &[Vec<Pair>],
) -> usize {
    let sets: Vec<Vec<Observation>> = input_sets.iter().map(|p| observe_set(f, p).1).collect();
    index_best_observed(candidates, &sets, ops)
}

/// Walks the shape space for `cfg.rounds` steps starting at `seed`: each
/// step tries all twelve mutations, keeps every generated pair, and moves
/// to the mutation whose pairs eliminated the most candidates.
pub fn effective_inputs<R: Rng>(
    f: &CommandHandle,
    ops: &dyn RunOps,
    candidates: &CandidateSet,
    seed: InputShape,
    dict: &Dictionary,
    cfg: SearchConfig,
    rng: &mut R,
) -> EffectiveInputs {
    let mut out = EffectiveInputs {
        eliminated: vec![false; candidates.len()],
        ..Default::default()
    };
    let mut shape = seed;
    for step in 0..cfg.rounds {
        let mut sets = Vec::with_capacity(MUTATIONS);
        for j in 1..=MUTATIONS {
            let mutated = mutate_shape(&shape, j);
            let pairs = match gen_input_pairs(&mutated, cfg.per_shape, dict, rng) {
                Ok(p) => p,
                Err(e) => {
                    debug!("mutation {j} yields no inputs: {e}");
                    Vec::new()
                }
            };
            let (kept, obs, discarded) = observe_set(f, &pairs);
            out.pairs.extend(kept);
            out.discarded += discarded;
            sets.push(obs);
        }
        let mut counts = Vec::with_capacity(MUTATIONS);
        for set in &sets {
            let mask = elimination_mask(candidates, set, ops);
            counts.push(mask.iter().filter(|&&e| e).count());
            for (acc, e) in out.eliminated.iter_mut().zip(mask) {
                *acc |= e;
            }
        }
        let best = best_index(&counts);
        debug!("search step {step}: eliminations {counts:?}, moving along mutation {best}");
        shape = mutate_shape(&shape, best);
        out.observations.extend(sets.into_iter().flatten());
    }
    out.final_shape = Some(shape);
    out
}

/// The pairs produced by the shape search.
pub fn get_effective_inputs<R: Rng>(
    f: &CommandHandle,
    ops: &dyn RunOps,
    candidates: &CandidateSet,
    seed: InputShape,
    dict: &Dictionary,
    cfg: SearchConfig,
    rng: &mut R,
) -> Vec<Pair> {
    effective_inputs(f, ops, candidates, seed, dict, cfg, rng).pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::Combiner;
    use crate::oracle::{Builtin, CommandOps};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ties_pick_lowest_index() {
        assert_eq!(best_index(&[0; 12]), 1);
        assert_eq!(best_index(&[1, 2, 0, 0, 0, 0, 3, 0, 2, 1, 0, 3]), 7);
    }

    #[test]
    fn one_round_keeps_every_pair() {
        let f = CommandHandle::builtin(Builtin::Identity);
        let ops = CommandOps::new(&f);
        let c = CandidateSet::from_members([Combiner::Concat, Combiner::First], 3);
        let cfg = SearchConfig {
            rounds: 1,
            per_shape: 3,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = effective_inputs(&f, &ops, &c, InputShape::DEFAULT, &Dictionary::generic(), cfg, &mut rng);
        assert_eq!(r.pairs.len(), 36);
        assert!(r.pairs.iter().any(|(_, b)| !b.is_empty()));
        assert_eq!(r.eliminated, [false, true]);
    }

    #[test]
    fn seeded_search_is_deterministic() {
        let f = CommandHandle::builtin(Builtin::UniqCount);
        let ops = CommandOps::new(&f);
        let c = CandidateSet::from_members([Combiner::Concat, Combiner::First], 3);
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            get_effective_inputs(&f, &ops, &c, InputShape::DEFAULT, &Dictionary::generic(), SearchConfig::default(), &mut rng)
        };
        assert_eq!(run(), run());
    }
}
