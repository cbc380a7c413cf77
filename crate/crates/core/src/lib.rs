//! Combiner synthesis for black-box stream commands, and data-parallel
//! execution of shell pipelines built from them.

pub mod dsl;
pub mod enumerate;
pub mod inputgen;
pub mod oracle;
pub mod pipeline;
pub mod synth;
pub mod verifier;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/combiners.md")]
pub struct CombinersGuide;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/synthesis.md")]
pub struct SynthesisGuide;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/verification.md")]
pub struct VerificationGuide;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/pipelines.md")]
pub struct PipelinesGuide;
