//! A small POSIX-shell lexer: quoting, backslash escapes, and the operator
//! characters that matter for telling a plain pipeline apart from anything
//! more elaborate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{msg} at byte {pos}")]
pub struct LexError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokKind {
    /// A word after quote removal. `expands` is set when the word relies on
    /// shell expansion (variables, globs, command substitution, `~`).
    Word { value: String, expands: bool },
    Pipe,
    /// Any other operator: `<`, `>`, `>>`, `;`, `&`, `&&`, `||`, `(`, `)`, ...
    Op(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub start: usize,
    pub end: usize,
}

const OP_CHARS: &[u8] = b"|&;<>()";

pub fn lex(text: &str) -> Result<Vec<Token>, LexError> {
    let b = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c == b' ' || c == b'\t' || c == b'\n' {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if OP_CHARS.contains(&c) {
            let start = i;
            let two = b.get(i + 1).copied();
            let op_len = match (c, two) {
                (b'|', Some(b'|')) | (b'&', Some(b'&')) | (b'>', Some(b'>')) | (b';', Some(b';')) => 2,
                (b'<', Some(b'<')) => 2,
                _ => 1,
            };
            i += op_len;
            let op = &text[start..i];
            let kind = if op == "|" {
                TokKind::Pipe
            } else {
                TokKind::Op(op.to_string())
            };
            toks.push(Token { kind, start, end: i });
            continue;
        }
        let start = i;
        let mut value = Vec::new();
        let mut expands = false;
        while i < b.len() {
            let c = b[i];
            if c == b' ' || c == b'\t' || c == b'\n' || OP_CHARS.contains(&c) {
                break;
            }
            match c {
                b'\'' => {
                    let close = b[i + 1..].iter().position(|&x| x == b'\'').ok_or(LexError {
                        pos: i,
                        msg: "unterminated single quote".into(),
                    })?;
                    value.extend_from_slice(&b[i + 1..i + 1 + close]);
                    i += close + 2;
                }
                b'"' => {
                    i += 1;
                    loop {
                        match b.get(i) {
                            None => {
                                return Err(LexError {
                                    pos: start,
                                    msg: "unterminated double quote".into(),
                                })
                            }
                            Some(b'"') => {
                                i += 1;
                                break;
                            }
                            Some(b'\\') if matches!(b.get(i + 1), Some(b'$' | b'`' | b'"' | b'\\' | b'\n')) => {
                                value.push(b[i + 1]);
                                i += 2;
                            }
                            Some(&x) => {
                                if x == b'$' || x == b'`' {
                                    expands = true;
                                }
                                value.push(x);
                                i += 1;
                            }
                        }
                    }
                }
                b'\\' => {
                    match b.get(i + 1) {
                        Some(&x) => value.push(x),
                        None => {
                            return Err(LexError {
                                pos: i,
                                msg: "trailing backslash".into(),
                            })
                        }
                    }
                    i += 2;
                }
                _ => {
                    if matches!(c, b'$' | b'`' | b'*' | b'?' | b'[' | b'{' | b'}')
                        || (c == b'~' && i == start)
                    {
                        expands = true;
                    }
                    value.push(c);
                    i += 1;
                }
            }
        }
        toks.push(Token {
            kind: TokKind::Word {
                value: String::from_utf8_lossy(&value).into_owned(),
                expands,
            },
            start,
            end: i,
        });
    }
    Ok(toks)
}

/// Splits a simple command into argv. Returns `None` when the text needs a
/// real shell (operators or expansions).
pub fn simple_argv(text: &str) -> Option<Vec<String>> {
    let toks = lex(text).ok()?;
    let mut argv = Vec::with_capacity(toks.len());
    for t in toks {
        match t.kind {
            TokKind::Word { value, expands: false } => argv.push(value),
            _ => return None,
        }
    }
    if argv.is_empty() {
        None
    } else {
        Some(argv)
    }
}
