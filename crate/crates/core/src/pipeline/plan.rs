use std::time::Duration;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lex::simple_argv;
use super::parse::{InputSource, PipelineSpec, Sink};
use crate::dsl::Combiner;
use crate::oracle::{CommandHandle, ExecError, MergeBackend, DEFAULT_TIMEOUT};
use crate::synth::{synthesize, CacheRecord, CombinerCache, Composite, SynthConfig, SynthStatus};

#[derive(Debug, Clone)]
pub struct PlanConfig {
    pub synth: SynthConfig,
    /// Run stages whose only combiner is `rerun` sequentially.
    pub rerun_sequential: bool,
    /// Add `--parallel=1` to `sort` stages.
    pub pin_sort: bool,
    pub builtin_only: bool,
    /// Per-process timeout while executing the plan.
    pub timeout: Duration,
    pub merge: MergeBackend,
    /// Pass the caller's locale to stage commands instead of forcing `C`.
    pub inherit_locale: bool,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            synth: SynthConfig::default(),
            rerun_sequential: true,
            pin_sort: true,
            builtin_only: false,
            timeout: DEFAULT_TIMEOUT,
            merge: MergeBackend::External,
            inherit_locale: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageMode {
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagePlan {
    /// The stage as written in the pipeline; combiners are keyed by it.
    pub command: String,
    /// What actually runs (`command` with execution tweaks).
    pub exec_command: String,
    pub mode: StageMode,
    pub combiner: Option<Composite>,
    pub combiner_eliminated: bool,
    pub group: usize,
    pub stream_outputs: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelinePlan {
    pub input: InputSource,
    pub sink: Sink,
    pub width: usize,
    pub builtin_only: bool,
    pub timeout: Duration,
    pub merge: MergeBackend,
    #[serde(default)]
    pub inherit_locale: bool,
    pub stages: Vec<StagePlan>,
}

impl PipelinePlan {
    pub fn stage_handle(&self, stage: &StagePlan) -> Result<CommandHandle, ExecError> {
        Ok(CommandHandle::resolve(&stage.exec_command, self.builtin_only)?
            .with_timeout(self.timeout)
            .with_c_locale(!self.inherit_locale))
    }

    /// Stage indices grouped by `group`, in order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (i, s) in self.stages.iter().enumerate() {
            match out.last_mut() {
                Some(g) if self.stages[g[0]].group == s.group => g.push(i),
                _ => out.push(vec![i]),
            }
        }
        out
    }

    pub fn parallel_stage_count(&self) -> usize {
        self.stages.iter().filter(|s| s.mode == StageMode::Parallel).count()
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("width must be at least 2, got {0}")]
    Width(usize),
    #[error("pipeline has no stages")]
    Empty,
    #[error("stage `{stage}`: {source}")]
    Resolve { stage: String, source: ExecError },
}

fn pinned(command: &str, cfg: &PlanConfig) -> String {
    if !cfg.pin_sort || cfg.builtin_only {
        return command.to_string();
    }
    match simple_argv(command) {
        Some(argv) if argv[0] == "sort" && !argv.iter().any(|a| a.starts_with("--parallel")) => {
            format!("sort --parallel=1{}", &command.trim_start()[4..])
        }
        _ => command.to_string(),
    }
}

fn rerun_only(c: &Composite) -> bool {
    c.members().iter().all(|m| *m == Combiner::Rerun)
}

/// Looks up or synthesizes the combiner for one stage.
pub fn stage_record(
    command: &str,
    cache: &mut CombinerCache,
    cfg: &PlanConfig,
) -> Result<Result<CacheRecord, String>, PlanError> {
    if let Some(r) = cache.get(command) {
        return Ok(Ok(r.clone()));
    }
    let handle = CommandHandle::resolve(command, cfg.builtin_only)
        .map_err(|source| PlanError::Resolve {
            stage: command.to_string(),
            source,
        })?
        .with_c_locale(!cfg.inherit_locale);
    match synthesize(&handle, &cfg.synth) {
        Ok(r) => {
            let record = CacheRecord::from_result(command, cfg.synth.max_size, &r);
            cache.insert(record.clone());
            Ok(Ok(record))
        }
        Err(e) => {
            warn!("{command}: synthesis failed, running it sequentially: {e}");
            Ok(Err(e.to_string()))
        }
    }
}

/// Attaches combiners to stages, picks sequential barriers, and removes
/// combiners that the next parallel stage makes unnecessary.
pub fn plan(
    spec: &PipelineSpec,
    cache: &mut CombinerCache,
    width: usize,
    cfg: &PlanConfig,
) -> Result<PipelinePlan, PlanError> {
    if width < 2 {
        return Err(PlanError::Width(width));
    }
    if spec.stages.is_empty() {
        return Err(PlanError::Empty);
    }
    let mut stages = Vec::with_capacity(spec.stages.len());
    for command in &spec.stages {
        let mut stage = StagePlan {
            command: command.clone(),
            exec_command: pinned(command, cfg),
            mode: StageMode::Sequential,
            combiner: None,
            combiner_eliminated: false,
            group: 0,
            stream_outputs: false,
            note: None,
        };
        match stage_record(command, cache, cfg)? {
            Ok(r) if r.status == SynthStatus::Ok && r.combiner.is_some() => {
                let c = r.combiner.expect("checked");
                if cfg.rerun_sequential && rerun_only(&c) {
                    stage.note = Some("only rerun is plausible".into());
                } else {
                    stage.mode = StageMode::Parallel;
                }
                stage.stream_outputs = r.stream_outputs;
                stage.combiner = Some(c);
            }
            Ok(r) => stage.note = Some(format!("no combiner ({:?})", r.status).to_lowercase()),
            Err(e) => stage.note = Some(e),
        }
        stages.push(stage);
    }

    for i in 0..stages.len().saturating_sub(1) {
        let s = &stages[i];
        let concat = s.combiner.as_ref().and_then(Composite::as_single) == Some(&Combiner::Concat);
        if s.mode == StageMode::Parallel && concat && s.stream_outputs && stages[i + 1].mode == StageMode::Parallel {
            stages[i].combiner_eliminated = true;
        }
    }
    let mut group = 0;
    for s in &mut stages {
        s.group = group;
        if !s.combiner_eliminated {
            group += 1;
        }
    }
    for s in &stages {
        info!(
            "stage `{}`: {:?}, combiner {}{}",
            s.command,
            s.mode,
            s.combiner.as_ref().map_or("-".into(), |c| c.to_string()),
            if s.combiner_eliminated { " (eliminated)" } else { "" }
        );
    }
    Ok(PipelinePlan {
        input: spec.input.clone(),
        sink: spec.sink.clone(),
        width,
        builtin_only: cfg.builtin_only,
        timeout: cfg.timeout,
        merge: if cfg.builtin_only { MergeBackend::Builtin } else { cfg.merge },
        inherit_locale: cfg.inherit_locale,
        stages,
    })
}
