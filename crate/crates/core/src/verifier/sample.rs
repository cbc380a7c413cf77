//! Random argument pairs aimed at a combiner's legal domain.
//!
//! The samplers follow the shape of each operator's domain and correlate
//! the two sides (shared boundary lines, shared row tails, equal segment
//! counts) so that the interesting evaluation rules fire often. Samples may
//! still fall outside the domain; callers filter with `in_domain`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dsl::{Combiner, Delim, MergeFlags};
use crate::oracle::sortcmp::{sort_stream, SortOpts};

const FREE_CHARS: &[u8] = b"aAbz01 9,\t\n";

fn number<R: Rng>(rng: &mut R) -> Vec<u8> {
    match rng.gen_range(0..6) {
        0 => b"0".to_vec(),
        1 => {
            let zeros = rng.gen_range(1..3);
            let mut v = vec![b'0'; zeros];
            v.extend(rng.gen_range(1..100u32).to_string().into_bytes());
            v
        }
        _ => rng.gen_range(1..5000u32).to_string().into_bytes(),
    }
}

fn free_string<R: Rng>(rng: &mut R) -> Vec<u8> {
    let len = rng.gen_range(0..7);
    (0..len).map(|_| *FREE_CHARS.choose(rng).unwrap()).collect()
}

fn without(d: u8, mut s: Vec<u8>) -> Vec<u8> {
    s.retain(|&b| b != d);
    s
}

/// A single string aimed at the domain of `c`, with no newline unless the
/// domain needs one.
pub fn sample_one<R: Rng>(c: &Combiner, rng: &mut R) -> Vec<u8> {
    sample_pair(c, rng).0
}

fn line_of<R: Rng>(b: &Combiner, rng: &mut R) -> Vec<u8> {
    without(b'\n', sample_one(b, rng))
}

fn pad<R: Rng>(rng: &mut R) -> Vec<u8> {
    if rng.gen_bool(0.25) {
        b"\t".to_vec()
    } else {
        vec![b' '; rng.gen_range(1..7)]
    }
}

fn row<R: Rng>(d: Delim, head: &[u8], tail: &[u8], rng: &mut R) -> Vec<u8> {
    let mut r = pad(rng);
    r.extend_from_slice(head);
    r.push(d.byte());
    r.extend_from_slice(tail);
    r
}

fn join(lines: &[Vec<u8>]) -> Vec<u8> {
    let mut out = Vec::new();
    for l in lines {
        out.extend_from_slice(l);
        out.push(b'\n');
    }
    out
}

/// Two line lists; half the time the last line of the first equals the
/// first line of the second.
fn line_pair<R, F>(rng: &mut R, mut make: F) -> (Vec<Vec<u8>>, Vec<Vec<u8>>)
where
    R: Rng,
    F: FnMut(&mut R) -> Vec<u8>,
{
    let n1 = rng.gen_range(1..4);
    let n2 = rng.gen_range(1..4);
    let a: Vec<Vec<u8>> = (0..n1).map(|_| make(rng)).collect();
    let mut b: Vec<Vec<u8>> = (0..n2).map(|_| make(rng)).collect();
    if rng.gen_bool(0.5) {
        b[0] = a[n1 - 1].clone();
    }
    (a, b)
}

fn sorted_stream<R: Rng>(flags: &MergeFlags, rng: &mut R) -> Vec<u8> {
    let n = rng.gen_range(0..5);
    let lines: Vec<Vec<u8>> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                number(rng)
            } else {
                without(b'\n', free_string(rng))
            }
        })
        .collect();
    let raw = join(&lines);
    match SortOpts::from_flags(flags) {
        Ok(opts) => sort_stream(opts, &raw),
        Err(_) => raw,
    }
}

/// A pair of strings aimed at `SetLegal(c)`.
pub fn sample_pair<R: Rng>(c: &Combiner, rng: &mut R) -> (Vec<u8>, Vec<u8>) {
    match c {
        Combiner::Add => (number(rng), number(rng)),
        Combiner::Concat | Combiner::First | Combiner::Second => {
            let a = free_string(rng);
            let b = if rng.gen_bool(0.2) { a.clone() } else { free_string(rng) };
            (a, b)
        }
        Combiner::Front(d, b) => {
            let (mut x, mut y) = sample_pair(b, rng);
            x.insert(0, d.byte());
            y.insert(0, d.byte());
            (x, y)
        }
        Combiner::Back(d, b) => {
            let (mut x, mut y) = sample_pair(b, rng);
            x.push(d.byte());
            y.push(d.byte());
            (x, y)
        }
        Combiner::Fuse(d, b) => {
            let k = rng.gen_range(2..5);
            let (mut x, mut y) = (Vec::new(), Vec::new());
            for i in 0..k {
                if i > 0 {
                    x.push(d.byte());
                    y.push(d.byte());
                }
                let (p, q) = sample_pair(b, rng);
                x.extend(without(d.byte(), p));
                y.extend(without(d.byte(), q));
            }
            (x, y)
        }
        Combiner::Stitch(b) => {
            if rng.gen_bool(0.1) {
                return (b"\n".to_vec(), join(&line_pair(rng, |r| line_of(b, r)).1));
            }
            let (a, c) = line_pair(rng, |r| line_of(b, r));
            (join(&a), join(&c))
        }
        Combiner::Stitch2(d, b1, b2) | Combiner::Offset(d, b1 @ b2) => {
            let offset = matches!(c, Combiner::Offset(..));
            let tail_of = |r: &mut R| {
                if offset {
                    without(b'\n', free_string(r))
                } else {
                    line_of(b2, r)
                }
            };
            let mut make = |r: &mut R| {
                if offset && r.gen_bool(0.15) {
                    return Vec::new();
                }
                let h = without(d.byte(), line_of(b1, r));
                let t = tail_of(r);
                row(*d, &h, &t, r)
            };
            if !offset && rng.gen_bool(0.1) {
                return (b"\n".to_vec(), join(&line_pair(rng, &mut make).1));
            }
            let (a, mut c2) = line_pair(rng, &mut make);
            if rng.gen_bool(0.5) {
                // same tail at the boundary, different head
                let last = a.last().unwrap().clone();
                let h = without(d.byte(), line_of(b1, rng));
                if let Some(pos) = last.iter().skip(1).position(|&x| x == d.byte()) {
                    let tail = &last[pos + 2..];
                    c2[0] = row(*d, &h, tail, rng);
                }
            }
            (join(&a), join(&c2))
        }
        Combiner::Rerun => {
            let n = rng.gen_range(1..4);
            let lines: Vec<Vec<u8>> = (0..n).map(|_| without(b'\n', free_string(rng))).collect();
            let m = rng.gen_range(1..4);
            let more: Vec<Vec<u8>> = (0..m).map(|_| without(b'\n', free_string(rng))).collect();
            (join(&lines), join(&more))
        }
        Combiner::Merge(flags) => (sorted_stream(flags, rng), sorted_stream(flags, rng)),
    }
}
