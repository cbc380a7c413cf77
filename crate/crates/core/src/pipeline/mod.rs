//! Shell pipelines: parsing, per-stage combiner planning, and data-parallel
//! execution with k-way combining of substream outputs.

mod emit;
mod exec;
pub mod lex;
mod parse;
mod plan;

pub use emit::{emit_script, shell_quote};
pub use exec::{combine_k, execute_parallel, execute_serial, PipelineError};
pub use parse::{parse_pipeline, FileOperand, InputSource, PipelineSpec, Sink, UnsupportedSyntax};
pub use plan::{plan, stage_record, PipelinePlan, PlanConfig, PlanError, StageMode, StagePlan};
