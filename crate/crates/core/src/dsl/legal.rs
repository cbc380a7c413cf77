use super::text::{del_pad, split_first};
use super::{Combiner, Delim, RunOps};

/// Whether `s` is a legal argument for `c`.
///
/// The run operators decide legality by probing: `rerun` asks whether the
/// command accepts `s`, `merge` whether `s` is already sorted under its
/// flags.
pub fn in_domain(c: &Combiner, s: &[u8], ops: &dyn RunOps) -> bool {
    match c {
        Combiner::Add => !s.is_empty() && s.iter().all(u8::is_ascii_digit),
        Combiner::Concat | Combiner::First | Combiner::Second => true,
        Combiner::Front(d, b) => s.first() == Some(&d.byte()) && in_domain(b, &s[1..], ops),
        Combiner::Back(d, b) => {
            s.last() == Some(&d.byte()) && in_domain(b, &s[..s.len() - 1], ops)
        }
        Combiner::Fuse(d, b) => fuse_legal(*d, b, s, ops),
        Combiner::Stitch(_) if s == b"\n" => true,
        Combiner::Stitch(b) => match line_body(s) {
            Some(body) => body.split(|&x| x == b'\n').all(|l| in_domain(b, l, ops)),
            None => false,
        },
        Combiner::Stitch2(d, b1, b2) => {
            if s == b"\n" {
                return true;
            }
            match line_body(s) {
                Some(body) => body.split(|&x| x == b'\n').all(|l| {
                    table_row(*d, l).is_some_and(|(h, t)| {
                        in_domain(b1, h, ops) && in_domain(b2, t, ops)
                    })
                }),
                None => false,
            }
        }
        Combiner::Offset(d, b) => match line_body(s) {
            Some(body) => body.split(|&x| x == b'\n').all(|l| {
                l.is_empty() || table_row(*d, l).is_some_and(|(h, _)| in_domain(b, h, ops))
            }),
            None => false,
        },
        Combiner::Rerun => ops.rerun_accepts(s),
        Combiner::Merge(flags) => ops.merge_accepts(flags, s),
    }
}

/// `y1 d y2 d ... d yk` with `k >= 2`, nonempty first and last segments,
/// and every segment legal for the child.
fn fuse_legal(d: Delim, b: &Combiner, s: &[u8], ops: &dyn RunOps) -> bool {
    let segments: Vec<&[u8]> = s.split(|&x| x == d.byte()).collect();
    segments.len() >= 2
        && !segments[0].is_empty()
        && !segments[segments.len() - 1].is_empty()
        && segments.iter().all(|seg| in_domain(b, seg, ops))
}

/// Body of a nonempty newline-terminated string, without the final newline.
fn line_body(s: &[u8]) -> Option<&[u8]> {
    match s.last() {
        Some(b'\n') => Some(&s[..s.len() - 1]),
        _ => None,
    }
}

/// Decomposes a padded table row `p ++ h ++ d ++ t` into `(h, t)`.
///
/// The pad must be nonempty and `h` is the first `d`-separated field of the
/// unpadded rest.
pub(crate) fn table_row(d: Delim, line: &[u8]) -> Option<(&[u8], &[u8])> {
    let (pad, rest) = del_pad(line);
    if pad.is_empty() {
        return None;
    }
    match split_first(d, rest) {
        (h, Some(t)) => Some((h, t)),
        _ => None,
    }
}
