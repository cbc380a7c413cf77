//! In-process reference commands. Each one reproduces the byte output of a
//! coreutils invocation under the C locale, so the synthesis engine can be
//! exercised without spawning processes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sortcmp::{sort_stream, SortOpts};
use crate::dsl::{Combiner, Delim};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// `cat`
    Identity,
    /// `wc -l`
    LineCount,
    /// `tr A-Z a-z`
    Lowercase,
    /// `sort`
    SortLines,
    /// `uniq -c`
    UniqCount,
    /// `uniq`
    Uniq,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::Identity,
        Builtin::LineCount,
        Builtin::Lowercase,
        Builtin::SortLines,
        Builtin::UniqCount,
        Builtin::Uniq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Identity => "identity",
            Builtin::LineCount => "line-count",
            Builtin::Lowercase => "lowercase",
            Builtin::SortLines => "sort-lines",
            Builtin::UniqCount => "uniq-count",
            Builtin::Uniq => "uniq",
        }
    }

    /// The coreutils command line this builtin stands in for.
    pub fn coreutils_equivalent(self) -> &'static str {
        match self {
            Builtin::Identity => "cat",
            Builtin::LineCount => "wc -l",
            Builtin::Lowercase => "tr A-Z a-z",
            Builtin::SortLines => "sort",
            Builtin::UniqCount => "uniq -c",
            Builtin::Uniq => "uniq",
        }
    }

    /// A combiner known to be correct for this command.
    pub fn known_combiner(self) -> Combiner {
        match self {
            Builtin::Identity | Builtin::Lowercase => Combiner::Concat,
            Builtin::LineCount => Combiner::back(Delim::Newline, Combiner::Add),
            Builtin::SortLines => Combiner::merge(Vec::<String>::new()),
            Builtin::UniqCount => Combiner::stitch2(Delim::Space, Combiner::Add, Combiner::First),
            Builtin::Uniq => Combiner::stitch(Combiner::First),
        }
    }

    /// Maps a command line onto a builtin when one emulates it exactly.
    pub fn for_command(text: &str) -> Option<Builtin> {
        let words: Vec<&str> = text.split_whitespace().collect();
        Builtin::ALL.into_iter().find(|b| {
            b.coreutils_equivalent().split_whitespace().eq(words.iter().copied())
        })
    }

    pub fn run(self, input: &[u8]) -> Vec<u8> {
        match self {
            Builtin::Identity => input.to_vec(),
            Builtin::LineCount => {
                let n = input.iter().filter(|&&b| b == b'\n').count();
                format!("{n}\n").into_bytes()
            }
            Builtin::Lowercase => input.to_ascii_lowercase(),
            Builtin::SortLines => sort_stream(SortOpts::default(), input),
            Builtin::UniqCount => uniq(input, true),
            Builtin::Uniq => uniq(input, false),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown builtin '{s}'"))
    }
}

fn uniq(input: &[u8], counts: bool) -> Vec<u8> {
    let mut out = Vec::new();
    if input.is_empty() {
        return out;
    }
    let body = input.strip_suffix(b"\n").unwrap_or(input);
    let mut lines = body.split(|&b| b == b'\n').peekable();
    while let Some(line) = lines.next() {
        let mut n = 1u64;
        while lines.peek() == Some(&line) {
            lines.next();
            n += 1;
        }
        if counts {
            out.extend(format!("{n:>7} ").into_bytes());
        }
        out.extend_from_slice(line);
        out.push(b'\n');
    }
    out
}
