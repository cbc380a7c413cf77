//! The combiner language.
//!
//! A combiner `g` merges two partial outputs of a command `f` so that
//! `f(x1 ++ x2) == g(f(x1), f(x2))`. Combiners are small trees over three
//! operator classes:
//!
//! * recursive operators (`add`, `concat`, `first`, `second`, `front`,
//!   `back`, `fuse`) that work on arbitrary strings,
//! * structural operators (`stitch`, `stitch2`, `offset`) that look at the
//!   line boundary between the two inputs,
//! * run operators (`rerun`, `merge`) that execute a command.
//!
//! Every operator is only defined on part of the string space; see
//! [`in_domain`] for the legal inputs and [`eval`] for the semantics.

mod eval;
mod legal;
pub(crate) mod sexpr;
pub mod text;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{eval, eval_unchecked};
pub use legal::in_domain;
pub use sexpr::{parse_combiner, ParseError};

/// One of the four field delimiters the language knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Delim {
    Newline,
    Tab,
    Space,
    Comma,
}

impl Delim {
    pub const ALL: [Delim; 4] = [Delim::Newline, Delim::Tab, Delim::Space, Delim::Comma];

    pub fn byte(self) -> u8 {
        match self {
            Delim::Newline => b'\n',
            Delim::Tab => b'\t',
            Delim::Space => b' ',
            Delim::Comma => b',',
        }
    }

    pub fn from_byte(b: u8) -> Option<Delim> {
        Delim::ALL.into_iter().find(|d| d.byte() == b)
    }

    /// Token used in the s-expression form.
    pub fn token(self) -> &'static str {
        match self {
            Delim::Newline => "nl",
            Delim::Tab => "tab",
            Delim::Space => "sp",
            Delim::Comma => "comma",
        }
    }

    pub fn from_token(tok: &str) -> Option<Delim> {
        match tok {
            "nl" | "\\n" => Some(Delim::Newline),
            "tab" | "\\t" => Some(Delim::Tab),
            "sp" => Some(Delim::Space),
            "comma" | "," => Some(Delim::Comma),
            _ => None,
        }
    }
}

/// True for bytes in `Delim ∪ {'0'}`; several sufficiency conditions are
/// phrased in terms of characters outside this set.
pub fn is_delim_or_zero(b: u8) -> bool {
    b == b'0' || Delim::from_byte(b).is_some()
}

/// Comparator flags handed to the merge operator, e.g. `["-rn"]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MergeFlags(pub Vec<String>);

impl MergeFlags {
    pub fn none() -> Self {
        MergeFlags(Vec::new())
    }

    pub fn new<I, S>(flags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        MergeFlags(flags.into_iter().map(Into::into).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for MergeFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// Operator class of a combiner's root node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpClass {
    Rec,
    Struct,
    Run,
}

/// A combiner AST.
///
/// Children of `Front`, `Back`, `Fuse`, `Stitch`, `Stitch2` and `Offset`
/// must be recursive operators; [`Combiner::is_well_formed`] checks this and
/// the parser rejects anything else.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Combiner {
    Add,
    Concat,
    First,
    Second,
    Front(Delim, Box<Combiner>),
    Back(Delim, Box<Combiner>),
    Fuse(Delim, Box<Combiner>),
    Stitch(Box<Combiner>),
    Stitch2(Delim, Box<Combiner>, Box<Combiner>),
    Offset(Delim, Box<Combiner>),
    Rerun,
    Merge(MergeFlags),
}

impl Combiner {
    pub fn front(d: Delim, b: Combiner) -> Self {
        Combiner::Front(d, Box::new(b))
    }

    pub fn back(d: Delim, b: Combiner) -> Self {
        Combiner::Back(d, Box::new(b))
    }

    pub fn fuse(d: Delim, b: Combiner) -> Self {
        Combiner::Fuse(d, Box::new(b))
    }

    pub fn stitch(b: Combiner) -> Self {
        Combiner::Stitch(Box::new(b))
    }

    pub fn stitch2(d: Delim, b1: Combiner, b2: Combiner) -> Self {
        Combiner::Stitch2(d, Box::new(b1), Box::new(b2))
    }

    pub fn offset(d: Delim, b: Combiner) -> Self {
        Combiner::Offset(d, Box::new(b))
    }

    pub fn merge<I, S>(flags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Combiner::Merge(MergeFlags::new(flags))
    }

    pub fn class(&self) -> OpClass {
        match self {
            Combiner::Add
            | Combiner::Concat
            | Combiner::First
            | Combiner::Second
            | Combiner::Front(..)
            | Combiner::Back(..)
            | Combiner::Fuse(..) => OpClass::Rec,
            Combiner::Stitch(..) | Combiner::Stitch2(..) | Combiner::Offset(..) => OpClass::Struct,
            Combiner::Rerun | Combiner::Merge(_) => OpClass::Run,
        }
    }

    /// Number of operator nodes in the tree.
    pub fn node_count(&self) -> usize {
        match self {
            Combiner::Add
            | Combiner::Concat
            | Combiner::First
            | Combiner::Second
            | Combiner::Rerun
            | Combiner::Merge(_) => 1,
            Combiner::Front(_, b)
            | Combiner::Back(_, b)
            | Combiner::Fuse(_, b)
            | Combiner::Stitch(b)
            | Combiner::Offset(_, b) => 1 + b.node_count(),
            Combiner::Stitch2(_, b1, b2) => 1 + b1.node_count() + b2.node_count(),
        }
    }

    /// Two (one per argument) plus the number of operator nodes.
    pub fn size(&self) -> usize {
        2 + self.node_count()
    }

    pub fn children(&self) -> Vec<&Combiner> {
        match self {
            Combiner::Front(_, b)
            | Combiner::Back(_, b)
            | Combiner::Fuse(_, b)
            | Combiner::Stitch(b)
            | Combiner::Offset(_, b) => vec![b],
            Combiner::Stitch2(_, b1, b2) => vec![b1, b2],
            _ => Vec::new(),
        }
    }

    /// Every child of a compound node is a recursive operator.
    pub fn is_well_formed(&self) -> bool {
        self.children()
            .into_iter()
            .all(|c| c.class() == OpClass::Rec && c.is_well_formed())
    }

    /// Whether evaluation needs a command (directly or through a child).
    pub fn needs_command(&self) -> bool {
        matches!(self, Combiner::Rerun)
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Combiner::Add => f.write_str("add"),
            Combiner::Concat => f.write_str("concat"),
            Combiner::First => f.write_str("first"),
            Combiner::Second => f.write_str("second"),
            Combiner::Rerun => f.write_str("rerun"),
            Combiner::Merge(flags) if flags.is_empty() => f.write_str("merge"),
            Combiner::Merge(flags) => write!(f, "(merge {flags})"),
            Combiner::Front(d, b) => write!(f, "(front {} {b})", d.token()),
            Combiner::Back(d, b) => write!(f, "(back {} {b})", d.token()),
            Combiner::Fuse(d, b) => write!(f, "(fuse {} {b})", d.token()),
            Combiner::Stitch(b) => write!(f, "(stitch {b})"),
            Combiner::Stitch2(d, b1, b2) => write!(f, "(stitch2 {} {b1} {b2})", d.token()),
            Combiner::Offset(d, b) => write!(f, "(offset {} {b})", d.token()),
        }
    }
}

impl Serialize for Combiner {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Combiner {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_combiner(&text).map_err(serde::de::Error::custom)
    }
}

/// Errors raised while evaluating a combiner.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("input outside the legal domain of {combiner}")]
    Domain { combiner: String },
    #[error("missing structure: {0}")]
    Structure(String),
    #[error("integer overflow while adding {0} and {1}")]
    Overflow(String, String),
    #[error("command execution failed: {0}")]
    Exec(String),
}

/// Execution hooks for the run operators.
///
/// `rerun` needs the command under synthesis; `merge` needs a sorted-merge
/// implementation. Legality of an input for either operator is decided by
/// probing.
pub trait RunOps: Sync {
    fn rerun(&self, input: &[u8]) -> Result<Vec<u8>, String>;
    fn rerun_accepts(&self, s: &[u8]) -> bool;
    fn merge(&self, flags: &MergeFlags, parts: &[&[u8]]) -> Result<Vec<u8>, String>;
    fn merge_accepts(&self, flags: &MergeFlags, s: &[u8]) -> bool;
}

/// Run hooks without a command: `rerun` is unavailable, `merge` uses the
/// in-process sort comparator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoCommand;

impl RunOps for NoCommand {
    fn rerun(&self, _input: &[u8]) -> Result<Vec<u8>, String> {
        Err("rerun requires a command".into())
    }

    fn rerun_accepts(&self, _s: &[u8]) -> bool {
        false
    }

    fn merge(&self, flags: &MergeFlags, parts: &[&[u8]]) -> Result<Vec<u8>, String> {
        crate::oracle::sortcmp::merge_parts(flags, parts).map_err(|e| e.to_string())
    }

    fn merge_accepts(&self, flags: &MergeFlags, s: &[u8]) -> bool {
        crate::oracle::sortcmp::is_sorted(flags, s).unwrap_or(false)
    }
}
