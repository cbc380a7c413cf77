use super::text::{self, calc_pad, del_pad, split_first, StructureError};
use super::{in_domain, Combiner, Delim, EvalError, RunOps};

impl From<StructureError> for EvalError {
    fn from(e: StructureError) -> Self {
        EvalError::Structure(e.0)
    }
}

/// Evaluates `c` on `(y1, y2)` after checking both arguments are legal.
///
/// The legality check is skipped for `rerun`, whose domain is "whatever the
/// command accepts"; a rejected input surfaces as [`EvalError::Exec`].
pub fn eval(c: &Combiner, y1: &[u8], y2: &[u8], ops: &dyn RunOps) -> Result<Vec<u8>, EvalError> {
    if !matches!(c, Combiner::Rerun) && !(in_domain(c, y1, ops) && in_domain(c, y2, ops)) {
        return Err(EvalError::Domain {
            combiner: c.to_string(),
        });
    }
    eval_unchecked(c, y1, y2, ops)
}

/// Evaluates `c` without the up-front legality check. Structural mismatches
/// still fail, but some out-of-domain inputs produce a value.
pub fn eval_unchecked(
    c: &Combiner,
    y1: &[u8],
    y2: &[u8],
    ops: &dyn RunOps,
) -> Result<Vec<u8>, EvalError> {
    match c {
        Combiner::Add => add(y1, y2),
        Combiner::Concat => Ok(concat(y1, y2)),
        Combiner::First => Ok(y1.to_vec()),
        Combiner::Second => Ok(y2.to_vec()),
        Combiner::Front(d, b) => {
            let v = eval_unchecked(b, text::del_front(*d, y1)?, text::del_front(*d, y2)?, ops)?;
            let mut out = Vec::with_capacity(v.len() + 1);
            out.push(d.byte());
            out.extend_from_slice(&v);
            Ok(out)
        }
        Combiner::Back(d, b) => {
            let mut v = eval_unchecked(b, text::del_back(*d, y1)?, text::del_back(*d, y2)?, ops)?;
            v.push(d.byte());
            Ok(v)
        }
        Combiner::Fuse(d, b) => fuse(*d, b, y1, y2, ops),
        Combiner::Stitch(b) => stitch(b, y1, y2, ops),
        Combiner::Stitch2(d, b1, b2) => stitch2(*d, b1, b2, y1, y2, ops),
        Combiner::Offset(d, b) => offset(*d, b, y1, y2, ops),
        Combiner::Rerun => ops.rerun(&concat(y1, y2)).map_err(EvalError::Exec),
        Combiner::Merge(flags) => ops.merge(flags, &[y1, y2]).map_err(EvalError::Exec),
    }
}

fn concat(y1: &[u8], y2: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(y1.len() + y2.len());
    out.extend_from_slice(y1);
    out.extend_from_slice(y2);
    out
}

fn str_to_int(s: &[u8]) -> Result<u64, EvalError> {
    if s.is_empty() || !s.iter().all(u8::is_ascii_digit) {
        return Err(EvalError::Domain {
            combiner: "add".into(),
        });
    }
    s.iter().try_fold(0u64, |acc, &b| {
        acc.checked_mul(10)
            .and_then(|x| x.checked_add(u64::from(b - b'0')))
            .ok_or_else(|| {
                EvalError::Overflow(
                    String::from_utf8_lossy(s).into_owned(),
                    String::new(),
                )
            })
    })
}

fn add(y1: &[u8], y2: &[u8]) -> Result<Vec<u8>, EvalError> {
    let (a, b) = (str_to_int(y1)?, str_to_int(y2)?);
    let sum = a.checked_add(b).ok_or_else(|| {
        EvalError::Overflow(
            String::from_utf8_lossy(y1).into_owned(),
            String::from_utf8_lossy(y2).into_owned(),
        )
    })?;
    Ok(sum.to_string().into_bytes())
}

/// Piecewise application over `d`-separated segments. Both sides need the
/// same number of segments (at least two) and a nonempty last segment.
fn fuse(
    d: Delim,
    b: &Combiner,
    y1: &[u8],
    y2: &[u8],
    ops: &dyn RunOps,
) -> Result<Vec<u8>, EvalError> {
    let s1: Vec<&[u8]> = y1.split(|&x| x == d.byte()).collect();
    let s2: Vec<&[u8]> = y2.split(|&x| x == d.byte()).collect();
    if s1.len() < 2 || s2.len() < 2 {
        return Err(EvalError::Structure(format!("fuse needs at least one {d:?}")));
    }
    if s1.len() != s2.len() {
        return Err(EvalError::Structure(format!(
            "fuse segment counts differ: {} vs {}",
            s1.len(),
            s2.len()
        )));
    }
    if s1[s1.len() - 1].is_empty() || s2[s2.len() - 1].is_empty() {
        return Err(EvalError::Structure("fuse tail is empty".into()));
    }
    let mut out = Vec::new();
    for (i, (a, c)) in s1.iter().zip(&s2).enumerate() {
        if i > 0 {
            out.push(d.byte());
        }
        out.extend(eval_unchecked(b, a, c, ops)?);
    }
    Ok(out)
}

/// Replaces the boundary lines `l1` (end of `y1`) and `l2` (start of `y2`)
/// with a single combined line.
fn join_boundary(y1: &[u8], line: &[u8], rest2: &[u8]) -> Result<Vec<u8>, EvalError> {
    let before = text::before_last_line(y1)?;
    let mut out = Vec::with_capacity(before.len() + line.len() + 1 + rest2.len());
    out.extend_from_slice(before);
    out.extend_from_slice(line);
    out.push(b'\n');
    out.extend_from_slice(rest2);
    Ok(out)
}

fn stitch(b: &Combiner, y1: &[u8], y2: &[u8], ops: &dyn RunOps) -> Result<Vec<u8>, EvalError> {
    let lone = y1 == b"\n" || y2 == b"\n";
    let split = text::split_last_line(y1).and_then(|(_, l1)| {
        text::split_first_line(y2).map(|(l2, rest2)| (l1, l2, rest2))
    });
    let (l1, l2, rest2) = match split {
        Ok(parts) => parts,
        Err(_) if lone => return Ok(concat(y1, y2)),
        Err(e) => return Err(e.into()),
    };
    if l1 != l2 {
        return Ok(concat(y1, y2));
    }
    match eval_unchecked(b, l1, l2, ops) {
        Ok(v) => join_boundary(y1, &v, rest2),
        // The line rule does not apply to an empty boundary the child cannot
        // combine; fall back to the lone-newline rule.
        Err(_) if lone => Ok(concat(y1, y2)),
        Err(e) => Err(e),
    }
}

/// `(pad, head, tail)` of a padded table row.
fn row_fields(d: Delim, line: &[u8]) -> Result<(&[u8], &[u8], &[u8]), EvalError> {
    let (pad, rest) = del_pad(line);
    match split_first(d, rest) {
        (h, Some(t)) => Ok((pad, h, t)),
        (_, None) => Err(EvalError::Structure(format!("row lacks {d:?} after head"))),
    }
}

fn padded_row(pad: &[u8], head: &[u8], d: Delim, tail: &[u8]) -> Vec<u8> {
    let mut v = Vec::with_capacity(pad.len() + head.len() + 1 + tail.len());
    v.extend_from_slice(pad);
    v.extend_from_slice(head);
    v.push(d.byte());
    v.extend_from_slice(tail);
    v
}

fn stitch2(
    d: Delim,
    b1: &Combiner,
    b2: &Combiner,
    y1: &[u8],
    y2: &[u8],
    ops: &dyn RunOps,
) -> Result<Vec<u8>, EvalError> {
    if y1 == b"\n" || y2 == b"\n" {
        return Ok(concat(y1, y2));
    }
    let (_, l1) = text::split_last_line(y1)?;
    let (l2, rest2) = text::split_first_line(y2)?;
    let (p1, h1, t1) = row_fields(d, l1)?;
    let (p2, h2, t2) = row_fields(d, l2)?;
    if t1 != t2 {
        return Ok(concat(y1, y2));
    }
    let h = eval_unchecked(b1, h1, h2, ops)?;
    let t = eval_unchecked(b2, t1, t2, ops)?;
    let pad = calc_pad([p1, p2], [h1, h2], &h);
    join_boundary(y1, &padded_row(&pad, &h, d, &t), rest2)
}

fn offset(
    d: Delim,
    b: &Combiner,
    y1: &[u8],
    y2: &[u8],
    ops: &dyn RunOps,
) -> Result<Vec<u8>, EvalError> {
    let l1 = match text::split_last_nonempty_line(y1) {
        Ok((_, l1)) => l1,
        // nothing to offset by
        Err(_) if text::is_stream(y1) => return Ok(concat(y1, y2)),
        Err(e) => return Err(e.into()),
    };
    let (p1, h1, _) = row_fields(d, l1)?;
    let mut out = y1.to_vec();
    let mut rest = y2;
    while !rest.is_empty() {
        let (l2, after) = text::split_first_line(rest)?;
        if !l2.is_empty() {
            let (p2, h2, t2) = row_fields(d, l2)?;
            let h = eval_unchecked(b, h1, h2, ops)?;
            let pad = calc_pad([p2, p1], [h2, h1], &h);
            out.extend(padded_row(&pad, &h, d, t2));
        }
        out.push(b'\n');
        rest = after;
    }
    Ok(out)
}
