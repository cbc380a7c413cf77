//! Enumerative synthesis: start from every combiner up to a size bound and
//! discard those contradicted by observed executions, until several rounds
//! in a row eliminate nothing.

mod cache;
mod composite;

use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{CacheRecord, CombinerCache, TOOL_VERSION};
pub use composite::{domain_contains, make_composite, parse_composite, Composite};

use crate::dsl::{eval_unchecked, in_domain, Combiner, RunOps};
use crate::enumerate::{all_candidates, merge_flag_candidates, CandidateSet, DEFAULT_MAX_SIZE};
use crate::inputgen::{
    effective_inputs, elimination_mask, extract_literals, probe_command, random_shape, Dictionary, Fixtures,
    InputClass, InputShape, SearchConfig,
};
use crate::oracle::{observe, observe_all, CommandHandle, CommandOps, MergeBackend, Observation};

/// `y1, y2 ∈ SetLegal(c)` and `c(y1, y2) = y12` byte for byte. Execution
/// failures count as implausible.
pub fn is_plausible(c: &Combiner, obs: &Observation, ops: &dyn RunOps) -> bool {
    in_domain(c, &obs.y1, ops)
        && in_domain(c, &obs.y2, ops)
        && eval_unchecked(c, &obs.y1, &obs.y2, ops).is_ok_and(|v| v == obs.y12)
}

/// Keeps the candidates plausible for every observation.
pub fn filter_observed(candidates: &CandidateSet, obs: &[Observation], ops: &dyn RunOps) -> CandidateSet {
    let eliminated = elimination_mask(candidates, obs, ops);
    let keep: Vec<bool> = eliminated.iter().map(|e| !e).collect();
    candidates.retain_by_mask(&keep)
}

/// Runs `f` on every pair and keeps the candidates plausible for all
/// resulting observations. Pairs whose execution fails are skipped.
pub fn filter_candidates(
    f: &CommandHandle,
    ops: &dyn RunOps,
    candidates: &CandidateSet,
    pairs: &[(Vec<u8>, Vec<u8>)],
) -> CandidateSet {
    let obs: Vec<Observation> = observe_all(f, pairs).into_iter().filter_map(Result::ok).collect();
    filter_observed(candidates, &obs, ops)
}

/// False once `window` consecutive rounds have eliminated nothing.
/// `history` holds the candidate-set size before the first round and after
/// each round.
pub fn making_progress(history: &[usize], window: usize) -> bool {
    let rounds = history.len().saturating_sub(1);
    if rounds < window || window == 0 {
        return true;
    }
    !history[history.len() - 1 - window..].windows(2).all(|w| w[0] == w[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthStatus {
    Ok,
    Empty,
    Unsupported,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub max_size: usize,
    pub search: SearchConfig,
    /// Rounds without elimination before stopping (`R`).
    pub no_progress_rounds: usize,
    /// Hard cap on rounds.
    pub max_rounds: usize,
    pub seed: u64,
    pub merge: MergeBackend,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_size: DEFAULT_MAX_SIZE,
            search: SearchConfig::default(),
            no_progress_rounds: 3,
            max_rounds: 20,
            seed: 0,
            merge: MergeBackend::Auto,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub plausible: CandidateSet,
    pub composite: Option<Composite>,
    pub status: SynthStatus,
    pub rounds: usize,
    pub observations_used: usize,
    /// Every nonempty output seen was newline-terminated.
    pub stream_outputs: bool,
    pub input_class: Option<InputClass>,
    /// Candidate-set sizes before the first round and after each round.
    pub history: Vec<usize>,
    /// A sample of the observations, for later checks.
    pub observations: Vec<Observation>,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("command output is not deterministic for input pair {0:?}")]
    Nondeterministic(String),
    #[error("cannot prepare probe fixtures: {0}")]
    Fixtures(String),
}

/// A command ready for synthesis: how to run it and what to feed it.
#[derive(Debug)]
pub struct Prepared {
    pub command: CommandHandle,
    pub dict: Dictionary,
    pub class: InputClass,
    pub seed_shape: InputShape,
    /// Keeps fixture files alive while the command may read them.
    pub fixtures: Fixtures,
}

/// Probes `f` and picks its dictionary and first seed shape. `Ok(None)`
/// means the command rejects every probe.
pub fn prepare(f: &CommandHandle, rng: &mut ChaCha8Rng) -> Result<Option<Prepared>, SynthError> {
    let fixtures = Fixtures::create().map_err(|e| SynthError::Fixtures(e.to_string()))?;
    let class = match probe_command(f, &fixtures) {
        Ok(c) => c,
        Err(e) => {
            info!("{}: {e}", f.text());
            return Ok(None);
        }
    };
    let lits = extract_literals(f.text());
    let (command, dict) = match class {
        InputClass::Any if !lits.patterns.is_empty() => {
            (f.clone(), Dictionary::regex(&lits.patterns, rng).with_generic_fill())
        }
        InputClass::Any => (f.clone(), Dictionary::generic()),
        InputClass::SortedOnly => (f.clone(), Dictionary::sorted_words()),
        InputClass::FilenamesOnly => (
            f.clone().with_cwd(fixtures.path()),
            Dictionary::filenames(fixtures.names().iter().cloned()),
        ),
    };
    let seed_shape = lits
        .numerics
        .iter()
        .copied()
        .find(|&v| v > 0)
        .map_or(InputShape::DEFAULT, InputShape::around_literal);
    Ok(Some(Prepared {
        command,
        dict,
        class,
        seed_shape,
        fixtures,
    }))
}

fn stream_like(y: &[u8]) -> bool {
    y.is_empty() || y.last() == Some(&b'\n')
}

const KEPT_OBSERVATIONS: usize = 256;

/// Synthesizes the plausible combiners for `f`.
pub fn synthesize(f: &CommandHandle, cfg: &SynthConfig) -> Result<SynthesisResult, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let unsupported = |history| SynthesisResult {
        plausible: CandidateSet::from_members([], cfg.max_size),
        composite: None,
        status: SynthStatus::Unsupported,
        rounds: 0,
        observations_used: 0,
        stream_outputs: true,
        input_class: None,
        history,
        observations: Vec::new(),
    };
    let Some(prep) = prepare(f, &mut rng)? else {
        return Ok(unsupported(Vec::new()));
    };
    let ops = CommandOps::new(&prep.command).with_merge(cfg.merge);
    let mut candidates = all_candidates(cfg.max_size, &merge_flag_candidates(f.text()));
    let mut history = vec![candidates.len()];
    let mut observations_used = 0;
    let mut stream_outputs = true;
    let mut kept = Vec::new();
    info!(
        "{}: {} candidates, input class {:?}, dictionary {:?}",
        f.text(),
        candidates.len(),
        prep.class,
        prep.dict.kind
    );

    let mut round = 0;
    loop {
        round += 1;
        let seed = if round == 1 {
            prep.seed_shape
        } else {
            random_shape(&mut rng)
        };
        let found = effective_inputs(&prep.command, &ops, &candidates, seed, &prep.dict, cfg.search, &mut rng);
        if let Some(first) = found.observations.first() {
            let again = observe(&prep.command, &first.source);
            if again.as_ref().ok() != Some(first) {
                return Err(SynthError::Nondeterministic(
                    String::from_utf8_lossy(&first.source.0).into_owned(),
                ));
            }
        }
        observations_used += found.observations.len();
        stream_outputs &= found
            .observations
            .iter()
            .all(|o| stream_like(&o.y1) && stream_like(&o.y2) && stream_like(&o.y12));
        let keep: Vec<bool> = found.eliminated.iter().map(|e| !e).collect();
        candidates = candidates.retain_by_mask(&keep);
        history.push(candidates.len());
        let room = KEPT_OBSERVATIONS.saturating_sub(kept.len());
        kept.extend(found.observations.into_iter().take(room));
        debug!("round {round}: {} candidates left", candidates.len());
        if candidates.is_empty() || !making_progress(&history, cfg.no_progress_rounds) || round >= cfg.max_rounds {
            break;
        }
    }

    let composite = make_composite(&candidates);
    let status = if candidates.is_empty() {
        SynthStatus::Empty
    } else {
        SynthStatus::Ok
    };
    info!(
        "{}: {:?} after {round} rounds, {} plausible, composite {}",
        f.text(),
        status,
        candidates.len(),
        composite.as_ref().map_or("-".to_string(), |c| c.to_string())
    );
    Ok(SynthesisResult {
        plausible: candidates,
        composite,
        status,
        rounds: round,
        observations_used,
        stream_outputs,
        input_class: Some(prep.class),
        history,
        observations: kept,
    })
}

/// Whether every plausible member agrees on every kept observation.
pub fn plausible_members_agree(result: &SynthesisResult, ops: &dyn RunOps) -> bool {
    result.observations.par_iter().all(|o| {
        let outs: Vec<_> = result
            .plausible
            .iter()
            .map(|c| eval_unchecked(c, &o.y1, &o.y2, ops).ok())
            .collect();
        outs.windows(2).all(|w| w[0] == w[1])
    })
}
