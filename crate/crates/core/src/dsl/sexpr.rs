//! S-expression syntax for combiners.
//!
//! ```text
//! add | concat | first | second | rerun | merge
//! (front D g) | (back D g) | (fuse D g)
//! (stitch g) | (stitch2 D g g) | (offset D g)
//! (merge FLAG...)
//! ```
//!
//! Delimiters are written `nl`, `tab`, `sp`, `comma` (`\n`, `\t` and `,`
//! are accepted on input).

use super::{Combiner, Delim, MergeFlags, OpClass};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                out.push((start, Tok::Word(&text[start..i])));
            }
        }
    }
    out
}

pub(crate) struct Parser<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    at: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Parser {
            toks: tokenize(text),
            at: 0,
            len: text.len(),
        }
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn next(&mut self) -> Option<Tok<'a>> {
        let t = self.toks.get(self.at).map(|t| t.1.clone());
        self.at += 1;
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub(crate) fn peek_close(&self) -> bool {
        matches!(self.toks.get(self.at), Some((_, Tok::Close)))
    }

    pub(crate) fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Tok::Close) => Ok(()),
            _ => {
                self.at -= 1;
                self.err("expected ')'")
            }
        }
    }

    /// Consumes `(head` if the next tokens are exactly that.
    pub(crate) fn eat_open_word(&mut self, head: &str) -> bool {
        let matches = matches!(
            (self.toks.get(self.at), self.toks.get(self.at + 1)),
            (Some((_, Tok::Open)), Some((_, Tok::Word(w)))) if *w == head
        );
        if matches {
            self.at += 2;
        }
        matches
    }

    fn delim(&mut self) -> Result<Delim, ParseError> {
        match self.next() {
            Some(Tok::Word(w)) => match Delim::from_token(w) {
                Some(d) => Ok(d),
                None => {
                    self.at -= 1;
                    self.err(format!("unknown delimiter '{w}'"))
                }
            },
            _ => {
                self.at -= 1;
                self.err("expected a delimiter")
            }
        }
    }

    fn rec_child(&mut self) -> Result<Combiner, ParseError> {
        let start = self.pos();
        let c = self.expr()?;
        if c.class() != OpClass::Rec {
            return Err(ParseError {
                pos: start,
                msg: format!("'{c}' is not a recursive operator"),
            });
        }
        Ok(c)
    }

    pub(crate) fn expr(&mut self) -> Result<Combiner, ParseError> {
        match self.next() {
            Some(Tok::Word(w)) => match w {
                "add" => Ok(Combiner::Add),
                "concat" => Ok(Combiner::Concat),
                "first" => Ok(Combiner::First),
                "second" => Ok(Combiner::Second),
                "rerun" => Ok(Combiner::Rerun),
                "merge" => Ok(Combiner::Merge(MergeFlags::none())),
                _ => {
                    self.at -= 1;
                    self.err(format!("unknown operator '{w}'"))
                }
            },
            Some(Tok::Open) => {
                let op = match self.next() {
                    Some(Tok::Word(w)) => w,
                    _ => {
                        self.at -= 1;
                        return self.err("expected an operator name");
                    }
                };
                let c = match op {
                    "front" => Combiner::front(self.delim()?, self.rec_child()?),
                    "back" => Combiner::back(self.delim()?, self.rec_child()?),
                    "fuse" => Combiner::fuse(self.delim()?, self.rec_child()?),
                    "stitch" => Combiner::stitch(self.rec_child()?),
                    "stitch2" => {
                        let d = self.delim()?;
                        let b1 = self.rec_child()?;
                        Combiner::stitch2(d, b1, self.rec_child()?)
                    }
                    "offset" => Combiner::offset(self.delim()?, self.rec_child()?),
                    "merge" => {
                        let mut flags = Vec::new();
                        while let Some((_, Tok::Word(w))) = self.toks.get(self.at) {
                            flags.push(w.to_string());
                            self.at += 1;
                        }
                        Combiner::Merge(MergeFlags(flags))
                    }
                    "add" | "concat" | "first" | "second" | "rerun" => {
                        let c = Parser::new(op).expr()?;
                        self.expect_close()?;
                        return Ok(c);
                    }
                    _ => {
                        self.at -= 1;
                        return self.err(format!("unknown operator '{op}'"));
                    }
                };
                self.expect_close()?;
                Ok(c)
            }
            Some(Tok::Close) => {
                self.at -= 1;
                self.err("unexpected ')'")
            }
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses one combiner; trailing input is an error.
pub fn parse_combiner(text: &str) -> Result<Combiner, ParseError> {
    let mut p = Parser::new(text);
    let c = p.expr()?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    Ok(c)
}
