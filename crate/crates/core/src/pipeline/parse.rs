use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lex::{lex, TokKind, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported shell syntax at byte {pos}: {msg}")]
pub struct UnsupportedSyntax {
    pub pos: usize,
    pub msg: String,
}

fn unsupported(pos: usize, msg: impl Into<String>) -> UnsupportedSyntax {
    UnsupportedSyntax { pos, msg: msg.into() }
}

/// A file operand as written in the script and after quote removal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileOperand {
    pub raw: String,
    pub path: String,
}

impl FileOperand {
    /// The path with `$VAR` and `${VAR}` replaced from the environment.
    pub fn expand(&self) -> Result<String, String> {
        expand_vars(&self.path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputSource {
    Stdin,
    File(FileOperand),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sink {
    Stdout,
    File(FileOperand),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub input: InputSource,
    /// Stage command texts as written, quoting included.
    pub stages: Vec<String>,
    pub sink: Sink,
}

fn expand_vars(s: &str) -> Result<String, String> {
    let mut out = String::new();
    let mut rest = s;
    while let Some(i) = rest.find('$') {
        out.push_str(&rest[..i]);
        let after = &rest[i + 1..];
        let (name, tail) = if let Some(body) = after.strip_prefix('{') {
            let end = body.find('}').ok_or_else(|| format!("unterminated ${{ in {s}"))?;
            (&body[..end], &body[end + 1..])
        } else {
            let end = after
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(after.len());
            (&after[..end], &after[end..])
        };
        if name.is_empty() {
            return Err(format!("cannot expand {s}"));
        }
        out.push_str(&std::env::var(name).map_err(|_| format!("variable {name} is not set"))?);
        rest = tail;
    }
    out.push_str(rest);
    Ok(out)
}

/// Joins backslash-newline continuations, drops comment lines, and checks
/// that the remaining text is one command line (newlines only after `|`).
fn single_line(text: &str) -> Result<String, UnsupportedSyntax> {
    let joined = text.replace("\\\n", " ");
    let mut out = String::new();
    let mut offset = 0;
    for line in joined.split('\n') {
        let pos = offset;
        offset += line.len() + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !out.is_empty() && !out.trim_end().ends_with('|') {
            return Err(unsupported(pos, "more than one command line"));
        }
        out.push_str(line);
        out.push(' ');
    }
    Ok(out)
}

fn word(t: &Token) -> Option<(&str, bool)> {
    match &t.kind {
        TokKind::Word { value, expands } => Some((value, *expands)),
        _ => None,
    }
}

fn operand(text: &str, t: &Token) -> FileOperand {
    FileOperand {
        raw: text[t.start..t.end].to_string(),
        path: word(t).map(|(v, _)| v.to_string()).unwrap_or_default(),
    }
}

/// Parses a pipeline of simple commands joined by `|`, with an optional
/// leading `cat FILE` and an optional trailing `> FILE`.
pub fn parse_pipeline(script: &str) -> Result<PipelineSpec, UnsupportedSyntax> {
    let text = single_line(script)?;
    let toks = lex(&text).map_err(|e| unsupported(e.pos, e.msg))?;
    let mut stages: Vec<&[Token]> = toks.split(|t| t.kind == TokKind::Pipe).collect();
    let mut sink = Sink::Stdout;

    let last = stages.len() - 1;
    for (i, stage) in stages.iter().enumerate() {
        let Some(first) = stage.first() else {
            let pos = toks.iter().filter(|t| t.kind == TokKind::Pipe).nth(i.saturating_sub(1)).map_or(0, |t| t.start);
            return Err(unsupported(pos, "empty pipeline stage"));
        };
        if word(first).is_none() {
            return Err(unsupported(first.start, "stage does not start with a command"));
        }
        for (j, t) in stage.iter().enumerate() {
            let TokKind::Op(op) = &t.kind else { continue };
            let is_sink = op == ">" && i == last && j + 2 == stage.len() && word(&stage[j + 1]).is_some();
            if !is_sink {
                return Err(unsupported(t.start, format!("operator `{op}` is not supported")));
            }
        }
    }
    if let Some(stage) = stages.last_mut() {
        if stage.len() >= 2 && stage[stage.len() - 2].kind == TokKind::Op(">".into()) {
            sink = Sink::File(operand(&text, &stage[stage.len() - 1]));
            *stage = &stage[..stage.len() - 2];
        }
    }

    let mut input = InputSource::Stdin;
    if stages.len() > 1 {
        let head = stages[0];
        if head.len() == 2 && word(&head[0]) == Some(("cat", false)) {
            let (value, _) = word(&head[1]).expect("checked above");
            if !value.starts_with('-') {
                input = InputSource::File(operand(&text, &head[1]));
                stages.remove(0);
            }
        }
    }
    let stages = stages
        .iter()
        .map(|s| text[s[0].start..s[s.len() - 1].end].to_string())
        .collect();
    Ok(PipelineSpec { input, stages, sink })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_frequency() {
        let p = parse_pipeline("cat $IN | tr -cs A-Za-z '\\n' | tr A-Z a-z | sort | uniq -c | sort -rn").unwrap();
        assert_eq!(p.stages, ["tr -cs A-Za-z '\\n'", "tr A-Z a-z", "sort", "uniq -c", "sort -rn"]);
        assert_eq!(
            p.input,
            InputSource::File(FileOperand {
                raw: "$IN".into(),
                path: "$IN".into()
            })
        );
        assert_eq!(p.sink, Sink::Stdout);
    }

    #[test]
    fn rejects_redirections_and_lists() {
        let e = parse_pipeline("sort < a | uniq").unwrap_err();
        assert_eq!(e.pos, 5);
        assert!(parse_pipeline("a && b").is_err());
        assert!(parse_pipeline("a | b >> out").is_err());
        assert!(parse_pipeline("(a) | b").is_err());
        assert!(parse_pipeline("a |  | b").is_err());
        assert!(parse_pipeline("a\nb").is_err());
    }

    #[test]
    fn leading_command_with_file_kept() {
        let p = parse_pipeline("grep 'a|b' f | wc -l").unwrap();
        assert_eq!(p.stages, ["grep 'a|b' f", "wc -l"]);
        assert_eq!(p.input, InputSource::Stdin);
        let p = parse_pipeline("cat f").unwrap();
        assert_eq!(p.stages, ["cat f"]);
    }

    #[test]
    fn sink_and_script_layout() {
        let p = parse_pipeline("#!/bin/sh\n# count\ncat \"in file\" |\n  sort \\\n  -rn > out.txt\n").unwrap();
        assert_eq!(p.stages, ["sort    -rn"]);
        assert_eq!(
            p.sink,
            Sink::File(FileOperand {
                raw: "out.txt".into(),
                path: "out.txt".into()
            })
        );
        match p.input {
            InputSource::File(f) => assert_eq!(f.path, "in file"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn variable_expansion() {
        std::env::set_var("COMBSYNTH_TEST_DIR", "/tmp/x");
        let f = FileOperand {
            raw: String::new(),
            path: "${COMBSYNTH_TEST_DIR}/a-$COMBSYNTH_TEST_DIR.txt".into(),
        };
        assert_eq!(f.expand().unwrap(), "/tmp/x/a-/tmp/x.txt");
        let missing = FileOperand {
            raw: String::new(),
            path: "$COMBSYNTH_NOT_SET_ANYWHERE".into(),
        };
        assert!(missing.expand().is_err());
    }
}
