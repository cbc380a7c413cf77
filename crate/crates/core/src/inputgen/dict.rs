use rand::seq::SliceRandom;
use rand::Rng;
use regex_syntax::hir::{Class, Hir, HirKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DictKind {
    Generic,
    RegexMatching,
    Filenames,
    SortedWords,
}

/// Word source for stream generation.
///
/// A generic dictionary has no elements and words are built character by
/// character. Other kinds draw whole words from `elements`; with
/// `generic_fill` they also mix in generic words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    pub kind: DictKind,
    pub elements: Vec<Vec<u8>>,
    pub generic_fill: bool,
}

/// Characters used for generic words.
pub const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

const SAMPLES_PER_PATTERN: usize = 24;

impl Dictionary {
    pub fn generic() -> Self {
        Dictionary {
            kind: DictKind::Generic,
            elements: Vec::new(),
            generic_fill: true,
        }
    }

    /// Words that match at least one of `patterns` (extended regular
    /// expression syntax). Unparseable patterns contribute themselves as a
    /// literal word.
    pub fn regex<R: Rng>(patterns: &[String], rng: &mut R) -> Self {
        let mut elements = Vec::new();
        for p in patterns {
            match regex_syntax::ParserBuilder::new().unicode(false).utf8(false).build().parse(p) {
                Ok(hir) => {
                    for _ in 0..SAMPLES_PER_PATTERN {
                        let mut best = None;
                        for _ in 0..10 {
                            let mut w = Vec::new();
                            sample(&hir, rng, &mut w);
                            let clean = !w.iter().any(|b| b.is_ascii_whitespace());
                            if clean || best.is_none() {
                                best = Some(w);
                            }
                            if clean {
                                break;
                            }
                        }
                        elements.extend(best);
                    }
                }
                Err(_) => elements.push(p.as_bytes().to_vec()),
            }
        }
        elements.retain(|w| !w.contains(&b'\n'));
        elements.sort();
        elements.dedup();
        if elements.is_empty() {
            return Dictionary::generic();
        }
        Dictionary {
            kind: DictKind::RegexMatching,
            elements,
            generic_fill: false,
        }
    }

    pub fn filenames(names: impl IntoIterator<Item = String>) -> Self {
        let elements: Vec<Vec<u8>> = names.into_iter().map(String::into_bytes).collect();
        assert!(!elements.is_empty(), "a filename dictionary needs files");
        Dictionary {
            kind: DictKind::Filenames,
            elements,
            generic_fill: false,
        }
    }

    /// Fixed lowercase words; streams drawn from this dictionary are sorted.
    pub fn sorted_words() -> Self {
        let mut elements = Vec::new();
        for a in b"bdfhkmprtw" {
            for b in b"aeiou" {
                elements.push(vec![*a, *b, b'n']);
            }
        }
        Dictionary {
            kind: DictKind::SortedWords,
            elements,
            generic_fill: false,
        }
    }

    pub fn with_generic_fill(mut self) -> Self {
        self.generic_fill = true;
        self
    }

    /// Streams must have their lines in sorted order.
    pub fn sorted(&self) -> bool {
        self.kind == DictKind::SortedWords
    }

    /// Whether `w` is exempt from character bounds.
    pub fn is_element(&self, w: &[u8]) -> bool {
        self.kind != DictKind::Generic && self.elements.iter().any(|e| e == w)
    }

    /// Whether every word must come from `elements`.
    pub fn closed(&self) -> bool {
        self.kind != DictKind::Generic && !self.generic_fill
    }
}

fn sample<R: Rng>(hir: &Hir, rng: &mut R, out: &mut Vec<u8>) {
    match hir.kind() {
        HirKind::Empty | HirKind::Look(_) => {}
        HirKind::Literal(lit) => out.extend_from_slice(&lit.0),
        HirKind::Class(class) => {
            if let Some(b) = pick_class(class, rng) {
                out.push(b);
            }
        }
        HirKind::Repetition(rep) => {
            let lo = rep.min as usize;
            let hi = rep.max.map_or(lo + 3, |m| (m as usize).min(lo + 3));
            for _ in 0..rng.gen_range(lo..=hi) {
                sample(&rep.sub, rng, out);
            }
        }
        HirKind::Capture(cap) => sample(&cap.sub, rng, out),
        HirKind::Concat(subs) => subs.iter().for_each(|s| sample(s, rng, out)),
        HirKind::Alternation(subs) => {
            if let Some(s) = subs.choose(rng) {
                sample(s, rng, out);
            }
        }
    }
}

/// A byte from the class, preferring printable non-space ASCII.
fn pick_class<R: Rng>(class: &Class, rng: &mut R) -> Option<u8> {
    let ranges: Vec<(u32, u32)> = match class {
        Class::Unicode(c) => c.ranges().iter().map(|r| (r.start() as u32, r.end() as u32)).collect(),
        Class::Bytes(c) => c.ranges().iter().map(|r| (r.start() as u32, r.end() as u32)).collect(),
    };
    let members = |lo: u32, hi: u32| -> Vec<u8> {
        ranges
            .iter()
            .flat_map(|&(s, e)| s.max(lo)..=e.min(hi))
            .map(|c| c as u8)
            .collect()
    };
    let mut pool = members(0x21, 0x7e);
    if pool.is_empty() {
        pool = members(0x01, 0x7f);
    }
    pool.retain(|&b| b != b'\n');
    pool.choose(rng).copied()
}

/// Rewrites a basic regular expression into extended syntax.
pub fn bre_to_ere(bre: &str) -> String {
    let mut out = String::with_capacity(bre.len());
    let mut chars = bre.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some(n @ ('(' | ')' | '|' | '{' | '}' | '+' | '?')) => out.push(n),
                Some(n) => {
                    out.push('\\');
                    out.push(n);
                }
                None => out.push_str("\\\\"),
            },
            '(' | ')' | '|' | '{' | '}' | '+' | '?' => {
                out.push('\\');
                out.push(c);
            }
            _ => out.push(c),
        }
    }
    out
}

/// Random generic word of `len` characters from `chars`.
pub(crate) fn generic_word<R: Rng>(rng: &mut R, chars: &[u8], len: usize) -> Vec<u8> {
    (0..len).map(|_| *chars.choose(rng).expect("nonempty alphabet")).collect()
}
