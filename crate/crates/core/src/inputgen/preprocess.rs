use std::path::Path;

use serde::{Deserialize, Serialize};
use tempfile::TempDir;
use thiserror::Error;

use super::dict::bre_to_ere;
use crate::oracle::{run_command, CommandHandle};
use crate::pipeline::lex::{lex, TokKind};

/// Literals found in a command line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Literals {
    /// Regular expressions in extended syntax.
    pub patterns: Vec<String>,
    pub numerics: Vec<u64>,
}

fn words(command: &str) -> Vec<String> {
    match lex(command) {
        Ok(toks) => toks
            .into_iter()
            .filter_map(|t| match t.kind {
                TokKind::Word { value, .. } => Some(value),
                _ => None,
            })
            .collect(),
        Err(_) => command.split_whitespace().map(str::to_string).collect(),
    }
}

fn digit_runs(s: &str, out: &mut Vec<u64>) {
    for run in s.split(|c: char| !c.is_ascii_digit()) {
        if let Ok(v) = run.parse() {
            out.push(v);
        }
    }
}

/// `/re/` address patterns and `s/re/.../` substitutions in a sed or awk
/// script.
fn slash_patterns(script: &str) -> Vec<String> {
    let mut out = Vec::new();
    let b: Vec<char> = script.chars().collect();
    let mut i = 0;
    while i < b.len() {
        let start = if b[i] == '/' {
            Some(i + 1)
        } else if b[i] == 's' && b.get(i + 1) == Some(&'/') && (i == 0 || !b[i - 1].is_alphanumeric()) {
            Some(i + 2)
        } else {
            None
        };
        let Some(start) = start else {
            i += 1;
            continue;
        };
        let mut j = start;
        while j < b.len() && b[j] != '/' {
            if b[j] == '\\' {
                j += 1;
            }
            j += 1;
        }
        if j < b.len() && j > start {
            out.push(b[start..j].iter().collect());
        }
        let is_subst = b[i] == 's';
        i = j + 1;
        if is_subst {
            // skip the replacement part
            while i < b.len() && b[i] != '/' {
                i += 1;
            }
            i += 1;
        }
    }
    out
}

/// Extracts pattern and numeric literals from a command line.
///
/// Patterns come from `grep` (the first operand or `-e` arguments), `sed`
/// and `awk` scripts; they are returned in extended regular-expression
/// syntax. Numbers come from every argument that is not a pattern.
pub fn extract_literals(command: &str) -> Literals {
    let argv = words(command);
    let mut lits = Literals::default();
    let Some(prog) = argv.first() else {
        return lits;
    };
    let prog = prog.rsplit('/').next().unwrap_or(prog);
    let args = &argv[1..];
    match prog {
        "grep" | "egrep" | "fgrep" => {
            let extended = prog == "egrep"
                || args.iter().any(|a| a.starts_with('-') && !a.starts_with("--") && a.contains('E'));
            let fixed = prog == "fgrep"
                || args.iter().any(|a| a.starts_with('-') && !a.starts_with("--") && a.contains('F'));
            let convert = |p: &str| {
                if fixed {
                    regex_syntax::escape(p)
                } else if extended {
                    p.to_string()
                } else {
                    bre_to_ere(p)
                }
            };
            let mut explicit = false;
            let mut operand_seen = false;
            let mut it = args.iter();
            while let Some(a) = it.next() {
                if a == "-e" {
                    if let Some(p) = it.next() {
                        lits.patterns.push(convert(p));
                        explicit = true;
                    }
                } else if a.starts_with('-') && a.len() > 1 {
                    digit_runs(a, &mut lits.numerics);
                } else if !explicit && !operand_seen {
                    lits.patterns.push(convert(a));
                    operand_seen = true;
                }
            }
        }
        "sed" | "awk" => {
            for a in args {
                if a.starts_with('-') {
                    continue;
                }
                let pats = slash_patterns(a);
                let mut rest = a.clone();
                for p in &pats {
                    rest = rest.replacen(p.as_str(), "", 1);
                    lits.patterns.push(if prog == "sed" { bre_to_ere(p) } else { p.clone() });
                }
                digit_runs(&rest, &mut lits.numerics);
            }
        }
        _ => {
            for a in args {
                digit_runs(a, &mut lits.numerics);
            }
        }
    }
    lits
}

/// Which inputs a command accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputClass {
    Any,
    SortedOnly,
    FilenamesOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbeError {
    #[error("command rejects every probe input: {0}")]
    AllFailed(String),
    #[error("cannot create probe fixtures: {0}")]
    Fixtures(String),
}

/// A temporary directory of small text files whose names form the
/// filename dictionary.
#[derive(Debug)]
pub struct Fixtures {
    dir: TempDir,
    names: Vec<String>,
}

pub const FIXTURE_COUNT: usize = 32;

impl Fixtures {
    pub fn create() -> std::io::Result<Fixtures> {
        let dir = tempfile::Builder::new().prefix("combsynth-fixtures").tempdir()?;
        let mut names = Vec::with_capacity(FIXTURE_COUNT);
        for i in 0..FIXTURE_COUNT {
            let name = format!("f{i:02}.txt");
            let body: String = (0..=(i % 4)).map(|k| format!("line {k} of {name}\n")).collect();
            std::fs::write(dir.path().join(&name), body)?;
            names.push(name);
        }
        Ok(Fixtures { dir, names })
    }

    pub fn path(&self) -> &Path {
        self.dir.path()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

const UNSORTED_PROBE: &[u8] = b"zqvk\nbxwm\nqtrj\nbxwm\n";
const SORTED_PROBE: &[u8] = b"bxwm\nbxwm\nqtrj\nzqvk\n";

/// Classifies `f` by the first of three probe streams it processes
/// without error: unsorted words, sorted words, then names of existing
/// files (run inside `fixtures`).
pub fn probe_command(f: &CommandHandle, fixtures: &Fixtures) -> Result<InputClass, ProbeError> {
    let unsorted = run_command(f, UNSORTED_PROBE);
    if unsorted.is_ok() {
        return Ok(InputClass::Any);
    }
    if run_command(f, SORTED_PROBE).is_ok() {
        return Ok(InputClass::SortedOnly);
    }
    let names: String = fixtures.names().iter().take(4).map(|n| format!("{n}\n")).collect();
    let in_fixtures = f.clone().with_cwd(fixtures.path());
    if run_command(&in_fixtures, names.as_bytes()).is_ok() {
        return Ok(InputClass::FilenamesOnly);
    }
    Err(ProbeError::AllFailed(unsorted.unwrap_err().to_string()))
}
