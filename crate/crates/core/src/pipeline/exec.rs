use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use log::debug;
use thiserror::Error;

use super::plan::{PipelinePlan, StageMode};
use crate::dsl::{Combiner, EvalError, RunOps};
use crate::oracle::{run_command_file, split_stream, CommandHandle, CommandOps, ExecError};
use crate::synth::Composite;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("stage {stage} (`{command}`){}: {source}", instance.map_or(String::new(), |i| format!(", instance {i}")))]
    Stage {
        stage: usize,
        command: String,
        instance: Option<usize>,
        source: ExecError,
    },
    #[error("combining the outputs of stage {stage} (`{command}`): {source}")]
    Combine {
        stage: usize,
        command: String,
        source: EvalError,
    },
    #[error("staging file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn concat(parts: &[&[u8]]) -> Vec<u8> {
    parts.concat()
}

/// Combines any number of partial outputs into one.
///
/// `merge` is one k-way merge, `concat` one concatenation, and `rerun` runs
/// the command once over the concatenation. Other combiners fold pairwise
/// from the left. Empty parts are skipped when the combiner cannot take
/// them.
pub fn combine_k(c: &Composite, parts: &[&[u8]], ops: &dyn RunOps) -> Result<Vec<u8>, EvalError> {
    if c.members().iter().all(|m| *m == Combiner::Rerun) {
        return ops.rerun(&concat(parts)).map_err(EvalError::Exec);
    }
    let keep_empty = c.in_domain(b"", ops);
    let parts: Vec<&[u8]> = parts.iter().copied().filter(|p| keep_empty || !p.is_empty()).collect();
    match parts.as_slice() {
        [] => return Ok(Vec::new()),
        [one] => return Ok(one.to_vec()),
        _ => {}
    }
    let chosen = c
        .members()
        .iter()
        .find(|m| parts.iter().all(|p| crate::dsl::in_domain(m, p, ops)));
    match chosen {
        Some(Combiner::Concat) => Ok(concat(&parts)),
        Some(Combiner::Merge(flags)) => ops.merge(flags, &parts).map_err(EvalError::Exec),
        _ => {
            let mut acc = parts[0].to_vec();
            for p in &parts[1..] {
                acc = c.eval(&acc, p, ops)?;
            }
            Ok(acc)
        }
    }
}

struct Stager {
    dir: tempfile::TempDir,
    next: usize,
}

impl Stager {
    fn new() -> Result<Stager, PipelineError> {
        let dir = tempfile::tempdir().map_err(io_err(Path::new("<tempdir>")))?;
        Ok(Stager { dir, next: 0 })
    }

    fn path(&mut self) -> PathBuf {
        self.next += 1;
        self.dir.path().join(format!("s{:05}", self.next))
    }

    fn write(&mut self, data: &[u8]) -> Result<PathBuf, PipelineError> {
        let p = self.path();
        fs::write(&p, data).map_err(io_err(&p))?;
        Ok(p)
    }
}

fn handles(plan: &PipelinePlan) -> Result<Vec<CommandHandle>, PipelineError> {
    plan.stages
        .iter()
        .enumerate()
        .map(|(i, s)| {
            plan.stage_handle(s).map_err(|source| PipelineError::Stage {
                stage: i,
                command: s.command.clone(),
                instance: None,
                source,
            })
        })
        .collect()
}

/// Runs stages `idx` one after another on one instance's files.
fn run_chain(
    plan: &PipelinePlan,
    hs: &[CommandHandle],
    idx: &[usize],
    mut cur: PathBuf,
    instance: Option<usize>,
    outs: &[PathBuf],
) -> Result<PathBuf, PipelineError> {
    for (&i, out) in idx.iter().zip(outs) {
        run_command_file(&hs[i], &cur, out).map_err(|source| PipelineError::Stage {
            stage: i,
            command: plan.stages[i].command.clone(),
            instance,
            source,
        })?;
        cur = out.clone();
    }
    Ok(cur)
}

/// Executes `plan` on `input`: each group of parallel stages runs on
/// `width` substreams whose outputs are combined at the group's last stage.
pub fn execute_parallel(plan: &PipelinePlan, input: &[u8]) -> Result<Vec<u8>, PipelineError> {
    let hs = handles(plan)?;
    let mut stager = Stager::new()?;
    let mut data = input.to_vec();
    for group in plan.groups() {
        let first = &plan.stages[group[0]];
        let parts: Vec<&[u8]> = if first.mode == StageMode::Parallel {
            split_stream(&data, plan.width).into_iter().flatten().collect()
        } else {
            Vec::new()
        };
        if parts.len() < 2 {
            let cur = stager.write(&data)?;
            let outs: Vec<PathBuf> = group.iter().map(|_| stager.path()).collect();
            let last = run_chain(plan, &hs, &group, cur, None, &outs)?;
            data = fs::read(&last).map_err(io_err(&last))?;
            continue;
        }
        debug!("group {:?}: {} substreams", group, parts.len());
        let mut jobs = Vec::with_capacity(parts.len());
        for p in &parts {
            let cur = stager.write(p)?;
            let outs: Vec<PathBuf> = group.iter().map(|_| stager.path()).collect();
            jobs.push((cur, outs));
        }
        let results: Vec<Result<PathBuf, PipelineError>> = thread::scope(|s| {
            let handles: Vec<_> = jobs
                .into_iter()
                .enumerate()
                .map(|(k, (cur, outs))| {
                    let (hs, group) = (&hs, &group);
                    s.spawn(move || run_chain(plan, hs, group, cur, Some(k), &outs))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("stage thread panicked")).collect()
        });
        let mut outputs = Vec::with_capacity(results.len());
        for r in results {
            let path = r?;
            outputs.push(fs::read(&path).map_err(io_err(&path))?);
        }
        let exit = *group.last().expect("nonempty group");
        let stage = &plan.stages[exit];
        let combiner = stage.combiner.as_ref().expect("parallel stages carry a combiner");
        let ops = CommandOps::new(&hs[exit]).with_merge(plan.merge);
        let refs: Vec<&[u8]> = outputs.iter().map(Vec::as_slice).collect();
        data = combine_k(combiner, &refs, &ops).map_err(|source| PipelineError::Combine {
            stage: exit,
            command: stage.command.clone(),
            source,
        })?;
    }
    Ok(data)
}

/// Runs every stage once, in order, on the whole stream.
pub fn execute_serial(plan: &PipelinePlan, input: &[u8]) -> Result<Vec<u8>, PipelineError> {
    let hs = handles(plan)?;
    let mut stager = Stager::new()?;
    let cur = stager.write(input)?;
    let idx: Vec<usize> = (0..plan.stages.len()).collect();
    let outs: Vec<PathBuf> = idx.iter().map(|_| stager.path()).collect();
    let last = run_chain(plan, &hs, &idx, cur, None, &outs)?;
    fs::read(&last).map_err(io_err(&last))
}
