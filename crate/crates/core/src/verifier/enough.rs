//! Sufficiency predicates over sets of output tuples.

use std::fmt;

use thiserror::Error;

use super::OutputTuple;
use crate::dsl::text::{del_pad, split_first, split_first_line, split_last_line};
use crate::dsl::{in_domain, is_delim_or_zero, Combiner, Delim, NoCommand};

fn has_significant_char(y: &[u8]) -> bool {
    y.iter().any(|&c| !is_delim_or_zero(c))
}

fn significant(c: Option<&u8>) -> bool {
    c.is_some_and(|&c| !is_delim_or_zero(c))
}

/// Some tuple has `y1 != y2`, and some `y1` and some `y2` contain a
/// character outside the delimiters and `'0'`.
pub fn enough_basic(y: &[OutputTuple]) -> bool {
    y.iter().any(|t| t.y1 != t.y2)
        && y.iter().any(|t| has_significant_char(&t.y1))
        && y.iter().any(|t| has_significant_char(&t.y2))
}

fn body_lines(s: &[u8]) -> impl Iterator<Item = &[u8]> {
    let body = s.strip_suffix(b"\n").unwrap_or(s);
    body.split(|&b| b == b'\n').filter(|_| !s.is_empty())
}

fn row_matches(line: &[u8], pad: u8, d: Delim) -> bool {
    line.first() == Some(&pad) && line[1..].contains(&d.byte())
}

/// Pad characters and delimiters under which every line of every tuple
/// component is empty or `pad ++ h ++ d ++ t`.
pub fn table_witnesses(y: &[OutputTuple]) -> Vec<(u8, Delim)> {
    let mut out = Vec::new();
    for pad in [b' ', b'\t'] {
        for d in Delim::ALL {
            let ok = y.iter().all(|t| {
                [&t.y1, &t.y2, &t.y12]
                    .iter()
                    .all(|s| body_lines(s).all(|l| l.is_empty() || row_matches(l, pad, d)))
            });
            if ok {
                out.push((pad, d));
            }
        }
    }
    out
}

/// `Y` reads as a table: one pad pattern and one delimiter fit every line.
pub fn is_table(y: &[OutputTuple]) -> bool {
    !table_witnesses(y).is_empty()
}

/// `(last line of y1, first line of y2, rest of y2)` when both sides split.
fn boundary(t: &OutputTuple) -> Option<(&[u8], &[u8], &[u8])> {
    let (_, l1) = split_last_line(&t.y1).ok()?;
    let (l2, rest) = split_first_line(&t.y2).ok()?;
    Some((l1, l2, rest))
}

/// Boundary line shared by `y1` and `y2` whose first unpadded and last
/// characters are significant.
fn shared_significant_boundary(t: &OutputTuple) -> Option<&[u8]> {
    let (l1, l2, rest) = boundary(t)?;
    (l1 == l2 && significant(del_pad(l1).1.first()) && significant(l1.last())).then_some(rest)
}

fn head_tail(d: Delim, line: &[u8]) -> Option<(&[u8], &[u8])> {
    match split_first(d, del_pad(line).1) {
        (h, Some(t)) => Some((h, t)),
        _ => None,
    }
}

/// Heads of the boundary rows, for tuples whose boundary rows share a tail.
fn heads_with_equal_tails(y: &[OutputTuple], d: Delim) -> Vec<OutputTuple> {
    y.iter()
        .filter_map(|t| {
            let (l1, l2, _) = boundary(t)?;
            let (h1, t1) = head_tail(d, l1)?;
            let (h2, t2) = head_tail(d, l2)?;
            (t1 == t2).then(|| OutputTuple::new(h1, h2, b""))
        })
        .collect()
}

/// Sufficiency for structural combiners: a significant shared boundary
/// line followed by a nonempty line in `y2`, and, when `Y` is a table,
/// heads that are [`enough_basic`] for every table reading.
pub fn enough_struct(y: &[OutputTuple]) -> bool {
    let first = y.iter().any(|t| {
        shared_significant_boundary(t)
            .and_then(|rest| split_first_line(rest).ok())
            .is_some_and(|(l2, _)| !l2.is_empty())
    });
    first
        && table_witnesses(y)
            .into_iter()
            .all(|(_, d)| enough_basic(&heads_with_equal_tails(y, d)))
}

/// The twelve representative combiners, with their delimiters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representative {
    A,
    C,
    F,
    S,
    Ba(Delim),
    Fa(Delim),
    Bfa(Delim, Delim),
    Fbfa(Delim, Delim, Delim),
    Fc(Delim),
    Sf,
    Saf(Delim),
    Oa(Delim),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0} is not a representative combiner")]
pub struct NotRepresentative(pub String);

impl Representative {
    pub fn from_combiner(c: &Combiner) -> Option<Representative> {
        use Combiner::*;
        Some(match c {
            Add => Representative::A,
            Concat => Representative::C,
            First => Representative::F,
            Second => Representative::S,
            Back(d, b) => match b.as_ref() {
                Add => Representative::Ba(*d),
                Fuse(d2, b2) if **b2 == Add => Representative::Bfa(*d, *d2),
                _ => return None,
            },
            Fuse(d, b) if **b == Add => Representative::Fa(*d),
            Front(d, b) => match b.as_ref() {
                Concat => Representative::Fc(*d),
                Back(d2, b2) => match b2.as_ref() {
                    Fuse(d3, b3) if **b3 == Add => Representative::Fbfa(*d, *d2, *d3),
                    _ => return None,
                },
                _ => return None,
            },
            Stitch(b) if **b == First => Representative::Sf,
            Stitch2(d, b1, b2) if **b1 == Add && **b2 == First => Representative::Saf(*d),
            Offset(d, b) if **b == Add => Representative::Oa(*d),
            _ => return None,
        })
    }

    pub fn combiner(self) -> Combiner {
        use Representative::*;
        match self {
            A => Combiner::Add,
            C => Combiner::Concat,
            F => Combiner::First,
            S => Combiner::Second,
            Ba(d) => Combiner::back(d, Combiner::Add),
            Fa(d) => Combiner::fuse(d, Combiner::Add),
            Bfa(d1, d2) => Combiner::back(d1, Fa(d2).combiner()),
            Fbfa(d1, d2, d3) => Combiner::front(d1, Bfa(d2, d3).combiner()),
            Fc(d) => Combiner::front(d, Combiner::Concat),
            Sf => Combiner::stitch(Combiner::First),
            Saf(d) => Combiner::stitch2(d, Combiner::Add, Combiner::First),
            Oa(d) => Combiner::offset(d, Combiner::Add),
        }
    }

    /// Every representative, over all delimiter choices.
    pub fn all() -> Vec<Representative> {
        use Representative::*;
        let mut out = vec![A, C, F, S, Sf];
        for d in Delim::ALL {
            out.extend([Ba(d), Fa(d), Fc(d), Saf(d), Oa(d)]);
            for d2 in Delim::ALL {
                out.push(Bfa(d, d2));
                for d3 in Delim::ALL {
                    out.push(Fbfa(d, d2, d3));
                }
            }
        }
        out
    }

    pub fn is_structural(self) -> bool {
        matches!(self, Representative::Sf | Representative::Saf(_) | Representative::Oa(_))
    }
}

impl fmt::Display for Representative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.combiner())
    }
}

fn strip_each<F>(y: &[OutputTuple], strip: F) -> Vec<OutputTuple>
where
    F: Fn(&[u8]) -> Option<&[u8]>,
{
    y.iter()
        .filter_map(|t| Some(OutputTuple::new(strip(&t.y1)?, strip(&t.y2)?, strip(&t.y12)?)))
        .collect()
}

fn fuse_segments(y: &[OutputTuple], d: Delim) -> Vec<OutputTuple> {
    let mut out = Vec::new();
    for t in y {
        let split = |s: &[u8]| -> Vec<Vec<u8>> { s.split(|&b| b == d.byte()).map(<[u8]>::to_vec).collect() };
        let (a, b, c) = (split(&t.y1), split(&t.y2), split(&t.y12));
        if a.len() == b.len() && b.len() == c.len() {
            for i in 0..a.len() {
                out.push(OutputTuple::new(&a[i], &b[i], &c[i]));
            }
        }
    }
    out
}

fn all_zeros(y: &[u8]) -> bool {
    !y.is_empty() && y.iter().all(|&b| b == b'0')
}

/// `Y` is sufficient to single out `g` among same-class candidates.
pub fn enough_for(g: &Combiner, y: &[OutputTuple]) -> Result<bool, NotRepresentative> {
    let rep = Representative::from_combiner(g).ok_or_else(|| NotRepresentative(g.to_string()))?;
    Ok(enough_rep(rep, y))
}

pub fn enough_rep(rep: Representative, y: &[OutputTuple]) -> bool {
    use Representative::*;
    match rep {
        A => y.iter().any(|t| !all_zeros(&t.y1)) && y.iter().any(|t| !all_zeros(&t.y2)),
        C => y.iter().any(|t| !t.y1.is_empty()) && y.iter().any(|t| !t.y2.is_empty()),
        F => y.iter().any(|t| t.y1 != t.y2) && y.iter().any(|t| has_significant_char(&t.y2)),
        S => y.iter().any(|t| t.y1 != t.y2) && y.iter().any(|t| has_significant_char(&t.y1)),
        Ba(d) => enough_rep(A, &strip_each(y, |s| s.strip_suffix(&[d.byte()]))),
        Fa(d) => enough_rep(A, &fuse_segments(y, d)),
        Bfa(d1, d2) => enough_rep(Fa(d2), &strip_each(y, |s| s.strip_suffix(&[d1.byte()]))),
        Fbfa(d1, d2, d3) => enough_rep(Bfa(d2, d3), &strip_each(y, |s| s.strip_prefix(&[d1.byte()]))),
        Fc(d) => enough_rep(C, &strip_each(y, |s| s.strip_prefix(&[d.byte()]))),
        Saf(_) => y.iter().any(|t| shared_significant_boundary(t).is_some()),
        Sf => {
            if !y.iter().any(|t| shared_significant_boundary(t).is_some()) {
                return false;
            }
            Delim::ALL
                .into_iter()
                .filter(|&d| stitch2_legal(y, d))
                .all(|d| y.iter().any(|t| distinct_heads_same_tail(t, d)))
        }
        Oa(d) => {
            let first = y.iter().any(|t| {
                let Some((l1, l2, rest)) = boundary(t) else {
                    return false;
                };
                significant(del_pad(l1).1.first())
                    && !l2.is_empty()
                    && split_first_line(rest).is_ok_and(|(l2b, _)| !l2b.is_empty())
            });
            let heads: Vec<OutputTuple> = y
                .iter()
                .filter_map(|t| {
                    let (l1, l2, _) = boundary(t)?;
                    let (h1, _) = head_tail(d, l1)?;
                    let (h2, _) = head_tail(d, l2)?;
                    Some(OutputTuple::new(h1, h2, b""))
                })
                .collect();
            first && enough_rep(A, &heads)
        }
    }
}

/// Every component of every tuple is legal for some `stitch2 d b1 b2`.
fn stitch2_legal(y: &[OutputTuple], d: Delim) -> bool {
    let widest = Combiner::stitch2(d, Combiner::First, Combiner::First);
    y.iter()
        .all(|t| [&t.y1, &t.y2, &t.y12].iter().all(|s| in_domain(&widest, s, &NoCommand)))
}

fn distinct_heads_same_tail(t: &OutputTuple, d: Delim) -> bool {
    let Some((l1, l2, _)) = boundary(t) else {
        return false;
    };
    match (head_tail(d, l1), head_tail(d, l2)) {
        (Some((h1, t1)), Some((h2, t2))) => t1 == t2 && h1 != h2,
        _ => false,
    }
}
