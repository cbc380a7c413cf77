//! Random input streams for the command under study.
//!
//! Streams are drawn from an [`InputShape`] (line, word and character
//! bounds plus distinctness) and a [`Dictionary`]. The shape search walks
//! through twelve mutations of a shape, moving toward inputs that rule out
//! the most candidate combiners.

mod dict;
mod gen;
mod preprocess;
mod search;
mod shape;

pub use dict::{bre_to_ere, DictKind, Dictionary, ALPHABET};
pub use gen::{check_shape, gen_input_pairs, gen_stream, pair_shape, GenError, Violation};
pub use preprocess::{extract_literals, probe_command, Fixtures, InputClass, Literals, ProbeError};
pub use search::{
    effective_inputs, elimination_mask, get_effective_inputs, index_best_mutation, index_best_observed,
    EffectiveInputs, Pair, SearchConfig, MUTATIONS,
};
pub use shape::{
    mutate_shape, mutation, random_shape, DimConfig, Dimension, Direction, InputShape, ShapeError,
    CHAR_CEILING, LINE_CEILING, WORD_CEILING,
};
