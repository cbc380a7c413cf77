//! Byte-string helpers shared by the evaluator, the domain checks, and the
//! sufficiency predicates. Only `\n` delimits lines; there is no locale
//! handling.

use super::Delim;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct StructureError(pub String);

/// Splits at the first occurrence of `d`. The tail is `None` when `d` does
/// not occur.
pub fn split_first(d: Delim, s: &[u8]) -> (&[u8], Option<&[u8]>) {
    match s.iter().position(|&b| b == d.byte()) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    }
}

/// Splits a newline-terminated string into the text before its last line
/// (without the separating newline) and the last line itself.
///
/// `"x\ny\n"` gives `("x", "y")`; a single-line stream gives `("", line)`.
pub fn split_last_line(s: &[u8]) -> Result<(&[u8], &[u8]), StructureError> {
    let body = strip_final_newline(s)?;
    Ok(match body.iter().rposition(|&b| b == b'\n') {
        Some(i) => (&body[..i], &body[i + 1..]),
        None => (&[][..], body),
    })
}

/// Splits a string into its first line and everything after that line's
/// newline.
pub fn split_first_line(s: &[u8]) -> Result<(&[u8], &[u8]), StructureError> {
    match s.iter().position(|&b| b == b'\n') {
        Some(i) => Ok((&s[..i], &s[i + 1..])),
        None => Err(StructureError("no complete line".into())),
    }
}

/// Like [`split_last_line`] but skips trailing empty lines.
pub fn split_last_nonempty_line(s: &[u8]) -> Result<(&[u8], &[u8]), StructureError> {
    let body = strip_final_newline(s)?;
    let mut end = body.len();
    loop {
        let start = body[..end]
            .iter()
            .rposition(|&b| b == b'\n')
            .map_or(0, |i| i + 1);
        if start < end {
            let before = if start == 0 { &body[..0] } else { &body[..start - 1] };
            return Ok((before, &body[start..end]));
        }
        if start == 0 {
            return Err(StructureError("no nonempty line".into()));
        }
        end = start - 1;
    }
}

/// The bytes of `s` that precede its last line, including their newline.
/// Used to reassemble `y1' ++ '\n' ++ v` without losing an empty prefix line.
pub fn before_last_line(s: &[u8]) -> Result<&[u8], StructureError> {
    let (_, last) = split_last_line(s)?;
    Ok(&s[..s.len() - last.len() - 1])
}

pub fn del_front(d: Delim, s: &[u8]) -> Result<&[u8], StructureError> {
    match s.first() {
        Some(&b) if b == d.byte() => Ok(&s[1..]),
        _ => Err(StructureError(format!("missing leading {:?}", d))),
    }
}

pub fn del_back(d: Delim, s: &[u8]) -> Result<&[u8], StructureError> {
    match s.last() {
        Some(&b) if b == d.byte() => Ok(&s[..s.len() - 1]),
        _ => Err(StructureError(format!("missing trailing {:?}", d))),
    }
}

/// Removes the padding at the front of a line: a run of spaces, or a single
/// tab. Returns `(padding, rest)`; the padding is empty when there is none.
pub fn del_pad(s: &[u8]) -> (&[u8], &[u8]) {
    let n = s.iter().take_while(|&&b| b == b' ').count();
    if n > 0 {
        (&s[..n], &s[n..])
    } else if s.first() == Some(&b'\t') {
        (&s[..1], &s[1..])
    } else {
        (&s[..0], s)
    }
}

pub fn add_pad(pad: &[u8], s: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(pad.len() + s.len());
    out.extend_from_slice(pad);
    out.extend_from_slice(s);
    out
}

/// Padding for a recombined head field.
///
/// A tab pad is kept as a tab. Space pads right-align the new head so the
/// padded field is as wide as the wider of the two source fields.
pub fn calc_pad(source_pads: [&[u8]; 2], source_heads: [&[u8]; 2], head: &[u8]) -> Vec<u8> {
    if source_pads[0] == b"\t" {
        return b"\t".to_vec();
    }
    let width = source_pads
        .iter()
        .zip(source_heads.iter())
        .map(|(p, h)| p.len() + h.len())
        .max()
        .unwrap_or(0);
    vec![b' '; width.saturating_sub(head.len())]
}

pub fn count_delim(d: Delim, s: &[u8]) -> usize {
    s.iter().filter(|&&b| b == d.byte()).count()
}

pub fn contains(d: Delim, s: &[u8]) -> bool {
    s.contains(&d.byte())
}

/// Lines of a newline-terminated string, without their newlines.
pub fn lines(s: &[u8]) -> Result<Vec<&[u8]>, StructureError> {
    let body = strip_final_newline(s)?;
    Ok(body.split(|&b| b == b'\n').collect())
}

pub fn is_stream(s: &[u8]) -> bool {
    s.last() == Some(&b'\n')
}

fn strip_final_newline(s: &[u8]) -> Result<&[u8], StructureError> {
    match s.last() {
        Some(b'\n') => Ok(&s[..s.len() - 1]),
        _ => Err(StructureError("not newline-terminated".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_first_examples() {
        assert_eq!(
            split_first(Delim::Comma, b"a,b,c"),
            (&b"a"[..], Some(&b"b,c"[..]))
        );
        assert_eq!(split_first(Delim::Comma, b"abc"), (&b"abc"[..], None));
        assert_eq!(split_first(Delim::Comma, b"a,"), (&b"a"[..], Some(&b""[..])));
    }

    #[test]
    fn line_splits() {
        assert_eq!(split_last_line(b"x\ny\n").unwrap(), (&b"x"[..], &b"y"[..]));
        assert_eq!(split_last_line(b"y\n").unwrap(), (&b""[..], &b"y"[..]));
        assert_eq!(split_last_line(b"\n").unwrap(), (&b""[..], &b""[..]));
        assert!(split_last_line(b"y").is_err());
        assert_eq!(split_first_line(b"a\nb\n").unwrap(), (&b"a"[..], &b"b\n"[..]));
        assert_eq!(before_last_line(b"\nb\n").unwrap(), b"\n");
        assert_eq!(before_last_line(b"b\n").unwrap(), b"");
    }

    #[test]
    fn last_nonempty_line() {
        assert_eq!(
            split_last_nonempty_line(b"a\nb\n\n\n").unwrap(),
            (&b"a"[..], &b"b"[..])
        );
        assert_eq!(split_last_nonempty_line(b"b\n").unwrap().1, b"b");
        assert!(split_last_nonempty_line(b"\n\n").is_err());
    }

    #[test]
    fn padding() {
        assert_eq!(del_pad(b"   7 cat"), (&b"   "[..], &b"7 cat"[..]));
        assert_eq!(del_pad(b"\t7 cat"), (&b"\t"[..], &b"7 cat"[..]));
        assert_eq!(del_pad(b"\t\t7"), (&b"\t"[..], &b"\t7"[..]));
        assert_eq!(del_pad(b"7"), (&b""[..], &b"7"[..]));
        assert_eq!(add_pad(b"  ", b"5 x"), b"  5 x");
        assert_eq!(calc_pad([b"  ", b"  "], [b"2", b"3"], b"5"), b"  ");
        assert_eq!(calc_pad([b" ", b" "], [b"9", b"9"], b"18"), b"");
        assert_eq!(calc_pad([b"\t", b"\t"], [b"9", b"9"], b"18"), b"\t");
    }

    #[test]
    fn delimiter_edges() {
        assert_eq!(del_front(Delim::Newline, b"\nx").unwrap(), b"x");
        assert!(del_front(Delim::Newline, b"x").is_err());
        assert_eq!(del_back(Delim::Space, b"x ").unwrap(), b"x");
        assert!(del_back(Delim::Space, b"").is_err());
        assert_eq!(count_delim(Delim::Comma, b"1,2,,3"), 3);
    }
}
