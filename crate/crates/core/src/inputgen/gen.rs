use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::dict::{generic_word, Dictionary, ALPHABET};
use super::shape::{DimConfig, InputShape, ShapeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("cannot produce {wanted} distinct {what} (found {found})")]
    Unsatisfiable {
        what: &'static str,
        wanted: usize,
        found: usize,
    },
}

fn pool_target(pct: u8, n: usize) -> usize {
    (pct as usize * n).div_ceil(100).max(1)
}

/// Fills a pool of up to `target` distinct items. Falling short is an error
/// only when every element was required to be distinct.
fn fill_pool<T, R, F>(
    what: &'static str,
    target: usize,
    pct: u8,
    rng: &mut R,
    mut make: F,
) -> Result<Vec<T>, GenError>
where
    T: Eq + std::hash::Hash + Clone,
    R: Rng,
    F: FnMut(&mut R) -> T,
{
    let mut seen = HashSet::with_capacity(target);
    let mut pool = Vec::with_capacity(target);
    let attempts = 20 * target + 100;
    for _ in 0..attempts {
        if pool.len() == target {
            break;
        }
        let x = make(rng);
        if seen.insert(x.clone()) {
            pool.push(x);
        }
    }
    if pool.len() < target && pct == 100 {
        return Err(GenError::Unsatisfiable {
            what,
            wanted: target,
            found: pool.len(),
        });
    }
    Ok(pool)
}

/// `n` draws from `pool` that use every pool element at least once.
fn spread<T: Clone, R: Rng>(pool: &[T], n: usize, rng: &mut R) -> Vec<T> {
    let mut out: Vec<T> = pool.iter().take(n).cloned().collect();
    while out.len() < n {
        out.push(pool.choose(rng).expect("nonempty pool").clone());
    }
    out.shuffle(rng);
    out
}

fn uniform<R: Rng>(c: DimConfig, rng: &mut R) -> usize {
    rng.gen_range(c.min..=c.max)
}

/// The lines (without newlines) of a random stream with exactly `n` lines.
fn gen_lines<R: Rng>(
    shape: &InputShape,
    n: usize,
    dict: &Dictionary,
    rng: &mut R,
) -> Result<Vec<Vec<u8>>, GenError> {
    let mut alphabet = ALPHABET.to_vec();
    alphabet.shuffle(rng);
    alphabet.truncate(pool_target(shape.chars.distinct_pct, ALPHABET.len()));

    let distinct_lines = pool_target(shape.lines.distinct_pct, n);
    let word_slots = distinct_lines * shape.words.max.max(1);
    let mut word_target = pool_target(shape.words.distinct_pct, word_slots);
    if dict.closed() && shape.words.distinct_pct < 100 {
        word_target = word_target.min(dict.elements.len());
    }
    let words = fill_pool("words", word_target, shape.words.distinct_pct, rng, |rng| {
        let from_dict = dict.kind != super::DictKind::Generic && (dict.closed() || rng.gen_bool(0.5));
        if from_dict {
            dict.elements.choose(rng).expect("nonempty dictionary").clone()
        } else {
            let len = uniform(shape.chars, rng);
            generic_word(rng, &alphabet, len)
        }
    })?;

    let line_pool = fill_pool("lines", distinct_lines, shape.lines.distinct_pct, rng, |rng| {
        let k = uniform(shape.words, rng);
        let mut line = Vec::new();
        for i in 0..k {
            if i > 0 {
                line.push(b' ');
            }
            line.extend_from_slice(words.choose(rng).expect("nonempty word pool"));
        }
        line
    })?;
    Ok(spread(&line_pool, n, rng))
}

fn join_lines(lines: &[Vec<u8>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.extend_from_slice(l);
        out.push(b'\n');
    }
    out
}

/// A random stream satisfying `shape`. Zero lines yields the minimal
/// stream `"\n"`.
pub fn gen_stream<R: Rng>(shape: &InputShape, dict: &Dictionary, rng: &mut R) -> Result<Vec<u8>, GenError> {
    shape.validate()?;
    let n = uniform(shape.lines, rng);
    if n == 0 {
        return Ok(b"\n".to_vec());
    }
    let mut lines = gen_lines(shape, n, dict, rng)?;
    if dict.sorted() {
        lines.sort();
    }
    Ok(join_lines(&lines))
}

/// The shape actually used for pairs: both halves need at least one line.
pub fn pair_shape(shape: &InputShape) -> InputShape {
    let mut s = *shape;
    s.lines.min = s.lines.min.max(2);
    s.lines.max = s.lines.max.max(2);
    s
}

/// `n` pairs whose concatenations satisfy [`pair_shape`]`(shape)`. Each
/// stream is cut at a uniformly chosen line boundary, so either half may be
/// a single line.
pub fn gen_input_pairs<R: Rng>(
    shape: &InputShape,
    n: usize,
    dict: &Dictionary,
    rng: &mut R,
) -> Result<Vec<(Vec<u8>, Vec<u8>)>, GenError> {
    let shape = pair_shape(shape);
    (0..n)
        .map(|_| {
            let s = gen_stream(&shape, dict, rng)?;
            let lines = s.iter().filter(|&&b| b == b'\n').count();
            let cut_line = rng.gen_range(1..lines);
            let cut = s
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == b'\n')
                .nth(cut_line - 1)
                .map(|(i, _)| i + 1)
                .expect("enough lines");
            Ok((s[..cut].to_vec(), s[cut..].to_vec()))
        })
        .collect()
}

/// Why a stream does not satisfy a shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotStream,
    LineCount(usize),
    WordCount { line: usize, words: usize },
    CharCount { line: usize, word: Vec<u8> },
    Unsorted,
}

/// Independent check that `s` satisfies `shape` under `dict`: line, word
/// and character counts are within bounds. Dictionary words are exempt from
/// the character bounds.
pub fn check_shape(s: &[u8], shape: &InputShape, dict: &Dictionary) -> Result<(), Violation> {
    if s.last() != Some(&b'\n') {
        return Err(Violation::NotStream);
    }
    if shape.lines.max == 0 {
        return if s == b"\n" {
            Ok(())
        } else {
            Err(Violation::LineCount(s.split(|&b| b == b'\n').count() - 1))
        };
    }
    let body = &s[..s.len() - 1];
    let lines: Vec<&[u8]> = body.split(|&b| b == b'\n').collect();
    if !shape.lines.contains(lines.len()) {
        return Err(Violation::LineCount(lines.len()));
    }
    for (i, line) in lines.iter().enumerate() {
        let words: Vec<&[u8]> = if line.is_empty() {
            Vec::new()
        } else {
            line.split(|&b| b == b' ').collect()
        };
        if !shape.words.contains(words.len()) {
            return Err(Violation::WordCount {
                line: i,
                words: words.len(),
            });
        }
        for w in words {
            if !dict.is_element(w) && !shape.chars.contains(w.len()) {
                return Err(Violation::CharCount {
                    line: i,
                    word: w.to_vec(),
                });
            }
        }
    }
    if dict.sorted() && !lines.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Violation::Unsorted);
    }
    Ok(())
}
