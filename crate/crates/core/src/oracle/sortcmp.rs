//! Line ordering compatible with `sort` running under the C locale.
//!
//! Supported flags: `-n` (numeric), `-r` (reverse), `-f` (fold case),
//! `-b` (ignore leading blanks), in any combination and clustering
//! (`-rn`, `-n -r`, ...). Ties on the key fall back to a byte comparison of
//! the whole line, and `-r` reverses that too.

use std::cmp::Ordering;

use thiserror::Error;

use crate::dsl::MergeFlags;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported sort flag '{0}'")]
pub struct UnsupportedFlag(pub String);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SortOpts {
    pub numeric: bool,
    pub reverse: bool,
    pub fold: bool,
    pub blanks: bool,
}

impl SortOpts {
    pub fn from_flags(flags: &MergeFlags) -> Result<Self, UnsupportedFlag> {
        Self::from_tokens(flags.as_slice())
    }

    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Self, UnsupportedFlag> {
        let mut opts = SortOpts::default();
        for tok in tokens {
            let tok = tok.as_ref();
            let letters = match tok.strip_prefix('-') {
                Some(l) if !l.is_empty() && !l.starts_with('-') => l,
                _ => return Err(UnsupportedFlag(tok.to_string())),
            };
            for c in letters.chars() {
                match c {
                    'n' => opts.numeric = true,
                    'r' => opts.reverse = true,
                    'f' => opts.fold = true,
                    'b' => opts.blanks = true,
                    _ => return Err(UnsupportedFlag(tok.to_string())),
                }
            }
        }
        Ok(opts)
    }

    fn has_key(&self) -> bool {
        self.numeric || self.fold || self.blanks
    }

    pub fn compare(&self, a: &[u8], b: &[u8]) -> Ordering {
        let mut ord = Ordering::Equal;
        if self.has_key() {
            ord = self.key_compare(a, b);
        }
        if ord == Ordering::Equal {
            ord = a.cmp(b);
        }
        if self.reverse {
            ord.reverse()
        } else {
            ord
        }
    }

    fn key_compare(&self, a: &[u8], b: &[u8]) -> Ordering {
        let (a, b) = if self.blanks || self.numeric {
            (skip_blanks(a), skip_blanks(b))
        } else {
            (a, b)
        };
        if self.numeric {
            numeric_compare(a, b)
        } else if self.fold {
            let up = |x: &u8| x.to_ascii_uppercase();
            a.iter().map(up).cmp(b.iter().map(up))
        } else {
            a.cmp(b)
        }
    }
}

fn skip_blanks(s: &[u8]) -> &[u8] {
    let n = s.iter().take_while(|&&b| b == b' ' || b == b'\t').count();
    &s[n..]
}

/// Sign, integer digits without leading zeros, and fraction digits without
/// trailing zeros of the number at the front of `s`. Text with no number
/// reads as zero.
fn leading_number(s: &[u8]) -> (bool, &[u8], &[u8]) {
    let (neg, body) = match s.first() {
        Some(b'-') => (true, &s[1..]),
        _ => (false, s),
    };
    let int_len = body.iter().take_while(|b| b.is_ascii_digit()).count();
    let int = &body[..int_len];
    let int = &int[int.iter().take_while(|&&b| b == b'0').count()..];
    let mut frac: &[u8] = &[];
    if body.get(int_len) == Some(&b'.') {
        let rest = &body[int_len + 1..];
        let n = rest.iter().take_while(|b| b.is_ascii_digit()).count();
        frac = &rest[..n];
        while let Some((&b'0', head)) = frac.split_last() {
            frac = head;
        }
    }
    let zero = int.is_empty() && frac.is_empty();
    (neg && !zero, int, frac)
}

fn numeric_compare(a: &[u8], b: &[u8]) -> Ordering {
    let (na, ia, fa) = leading_number(a);
    let (nb, ib, fb) = leading_number(b);
    let magnitude = ia
        .len()
        .cmp(&ib.len())
        .then_with(|| ia.cmp(ib))
        .then_with(|| fa.cmp(fb));
    match (na, nb) {
        (false, false) => magnitude,
        (true, true) => magnitude.reverse(),
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
    }
}

fn split_lines(s: &[u8]) -> Vec<&[u8]> {
    if s.is_empty() {
        return Vec::new();
    }
    let body = s.strip_suffix(b"\n").unwrap_or(s);
    body.split(|&b| b == b'\n').collect()
}

fn join_lines(lines: &[&[u8]]) -> Vec<u8> {
    let mut out = Vec::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.extend_from_slice(l);
        out.push(b'\n');
    }
    out
}

/// Stable sort of the lines of `s`.
pub fn sort_stream(opts: SortOpts, s: &[u8]) -> Vec<u8> {
    let mut lines = split_lines(s);
    lines.sort_by(|a, b| opts.compare(a, b));
    join_lines(&lines)
}

/// K-way merge of already-sorted parts, preferring earlier parts on ties.
pub fn merge_parts(flags: &MergeFlags, parts: &[&[u8]]) -> Result<Vec<u8>, UnsupportedFlag> {
    let opts = SortOpts::from_flags(flags)?;
    Ok(merge_with(opts, parts))
}

pub fn merge_with(opts: SortOpts, parts: &[&[u8]]) -> Vec<u8> {
    let parts: Vec<Vec<&[u8]>> = parts.iter().map(|p| split_lines(p)).collect();
    let mut idx = vec![0usize; parts.len()];
    let mut out = Vec::with_capacity(parts.iter().flatten().map(|l| l.len() + 1).sum());
    loop {
        let mut best: Option<usize> = None;
        for (k, p) in parts.iter().enumerate() {
            if idx[k] >= p.len() {
                continue;
            }
            best = match best {
                Some(j) if opts.compare(p[idx[k]], parts[j][idx[j]]) != Ordering::Less => Some(j),
                _ => Some(k),
            };
        }
        let Some(k) = best else { break };
        out.extend_from_slice(parts[k][idx[k]]);
        out.push(b'\n');
        idx[k] += 1;
    }
    out
}

/// Whether `s` is empty or a newline-terminated stream sorted under `flags`.
pub fn is_sorted(flags: &MergeFlags, s: &[u8]) -> Result<bool, UnsupportedFlag> {
    let opts = SortOpts::from_flags(flags)?;
    if s.is_empty() {
        return Ok(true);
    }
    if s.last() != Some(&b'\n') {
        return Ok(false);
    }
    let lines = split_lines(s);
    Ok(lines
        .windows(2)
        .all(|w| opts.compare(w[0], w[1]) != Ordering::Greater))
}
