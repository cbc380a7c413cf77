//! Hand-built observation sets with the expected predicate values.

use combsynth::dsl::Delim::{Comma, Newline, Space, Tab};
use combsynth::verifier::{enough_basic, enough_for, enough_struct, is_table, OutputTuple, Representative};
use combsynth::verifier::Representative::*;

type Set = &'static [(&'static str, &'static str, &'static str)];

pub const BASIC: &[(Set, bool)] = &[
    (&[], false),
    (&[("1", "2", "3")], true),
    (&[("0", "0", "0")], false),
    (&[("1", "1", "2")], false),
    (&[("1", "1", "2"), ("0", "5", "5")], true),
    (&[("0", "5", "5")], false),
    (&[("5", "0", "5")], false),
    (&[("\n", "a\n", "\na\n")], false),
    (&[("a\n", "\n", "a\n\n")], false),
    (&[("a\n", "b\n", "a\nb\n")], true),
    (&[(" ,\t", "00", "")], false),
    (&[("a", "a", ""), ("b", "b", "")], false),
    (&[("a", "a", ""), ("0", "00", "")], true),
    (&[("", "x", "x")], false),
    (&[("x", "", "x")], false),
    (&[("x", "", ""), ("", "y", "")], true),
    (&[("0\n0", " 0,", "")], false),
    (&[("-1", "2", "")], true),
    (&[("\t", "\t\t", "")], false),
    (&[("ab", "ab", "abab"), ("cd", "ab", "")], true),
    (&[("#", "#", ""), ("#", "$", "")], true),
    (&[("00", "000", "00000")], false),
];

pub const TABLE: &[(Set, bool)] = &[
    (&[], true),
    (&[("      2 a\n", "      1 b\n", "      2 a\n      1 b\n")], true),
    (&[("ab\n", "cd\n", "ab\ncd\n")], false),
    (&[(" a b\n", " c d\n", " a b\n c d\n")], true),
    (&[("\ta,b\n", "\tc,d\n", "\ta,b\n\tc,d\n")], true),
    (&[(" a\n", " b\n", " a\n b\n")], false),
    (&[("\n", "\n", "\n\n")], true),
    (&[("", "", "")], true),
    (&[(" a b\n", "\ta b\n", "")], false),
    (&[(" a b\n\n", " c d\n", " a b\n\n c d\n")], true),
    (&[(" a,b\n", " c d\n", "")], false),
    (&[(" a,b c\n", " c d\n", "")], true),
    (&[("  1 x\n", "   10 y\n", "")], true),
    (&[("  1 x\n", "1 y\n", "")], false),
    (&[(" x \n", " y \n", "")], true),
    (&[("  \n", "", "")], true),
    (&[(" x\ty\n", "\tx\ty\n", "")], false),
    (&[(" x\ty\n", " x\ty\n", " x\ty\n x\ty\n"), ("a", "", "")], false),
    (&[(" k,v\n", " k,v\n", "")], true),
    (&[("\t1\tz\n", "\t2\tz\n", "\t3\tz\n")], true),
    (&[(" 1\n", " 2\n", " 3\n")], false),
    (&[(" a b\n x y\n", " c d\n", "")], true),
];

pub const STRUCT: &[(Set, bool)] = &[
    (&[], false),
    (&[("a\nb\n", "b\nc\n", "")], true),
    (&[("a\nb\n", "b\n", "")], false),
    (&[("a\nb\n", "c\nd\n", "")], false),
    (&[("a\n0\n", "0\nc\n", "")], false),
    (&[("a\nb,\n", "b,\nc\n", "")], false),
    (&[("a\n,b\n", ",b\nc\n", "")], false),
    (&[("a\nb\n", "b\n\n", "")], false),
    (&[("      2 a\n", "      2 a\n      1 b\n", "")], false),
    (&[("      2 a\n", "      2 a\n      1 b\n", ""), ("      3 a\n", "      5 a\n      1 c\n", "")], true),
    (&[("      2 a\n", "      2 a\n      1 b\n", ""), ("      0 a\n", "      5 a\n      1 c\n", "")], true),
    (&[("      2 a\n", "      2 a\n      1 b\n", ""), ("      3 a\n", "      5 b\n      1 c\n", "")], false),
    (&[("p\nq\n", "q\nr\n", "p\nq\nr\n")], true),
    (&[("\t1\tx\n", "\t1\tx\n\t2\ty\n", ""), ("\t1\tx\n", "\t4\tx\n\t1\tz\n", "")], true),
    (&[("\t1\tx\n", "\t1\tx\n\t2\ty\n", "")], false),
    (&[("a\nb\n", "b\nc\n", ""), ("x\n", "\n", "")], true),
    (&[(" a b,c\n", " a b,c\n z y,w\n", "")], false),
    (&[("1\n", "1\n2\n", "")], true),
    (&[("\n", "\nx\n", "")], false),
    (&[("ab\n", "ab\ncd\n", "ab\ncd\n"), ("ab\n", "ab\n", "")], true),
    (&[("  k\n", "  k\nm\n", "")], true),
    (&[("x\n", "y\n", "x\ny\n"), ("k\n", "k\nk\n", "k\nk\n")], true),
];

pub const FOR: &[(Representative, Set, bool)] = &[
    (A, &[("1", "2", "3")], true),
    (A, &[("0", "2", "2")], false),
    (A, &[("0", "2", "2"), ("3", "00", "3")], true),
    (A, &[("", "", "")], true),
    (C, &[("a", "", "a"), ("", "b", "b")], true),
    (C, &[("a", "", "a")], false),
    (F, &[("a", "a", "a")], false),
    (F, &[("a", "b", "a")], true),
    (F, &[("a", "0", "a")], false),
    (S, &[("a", "0", "0")], true),
    (Ba(Newline), &[("1\n", "2\n", "3\n")], true),
    (Ba(Newline), &[("1", "2", "3")], false),
    (Ba(Newline), &[("0\n", "2\n", "2\n"), ("1\n", "0\n", "1\n")], true),
    (Fa(Comma), &[("1,0", "2,0", "3,0")], true),
    (Fa(Comma), &[("0,0", "0,5", "0,5")], false),
    (Fa(Comma), &[("1,2", "3", "")], false),
    (Bfa(Newline, Space), &[("1 2\n", "3 4\n", "4 6\n")], true),
    (Fbfa(Tab, Newline, Space), &[("\t1 2\n", "\t3 4\n", "\t4 6\n")], true),
    (Fbfa(Tab, Newline, Space), &[("1 2\n", "3 4\n", "4 6\n")], false),
    (Fc(Newline), &[("\na", "\nb", "\na\nb")], true),
    (Fc(Newline), &[("\n", "\nb", "\n\nb")], false),
    (Sf, &[("a\nb\n", "b\nc\n", "a\nb\nc\n")], true),
    (Sf, &[("   1 a\n", "   1 a\n   2 b\n", "   1 a\n   2 b\n")], false),
    (
        Sf,
        &[
            ("   1 a\n", "   1 a\n   2 b\n", "   1 a\n   2 b\n"),
            ("   1 a\n", "   2 a\n   3 b\n", "   1 a\n   2 a\n   3 b\n"),
        ],
        true,
    ),
    (Saf(Space), &[("   1 a\n", "   1 a\n   2 b\n", "   2 a\n   2 b\n")], true),
    (Saf(Space), &[("a\nb,\n", "b,\nc\n", "")], false),
    (Oa(Space), &[(" 1 a\n", " 2 b\n 3 c\n", "")], true),
    (Oa(Space), &[(" 0 a\n", " 2 b\n 3 c\n", "")], false),
    (Oa(Space), &[(" 1 a\n", " 0 b\n 3 c\n", "")], false),
];

fn tuples(set: Set) -> Vec<OutputTuple> {
    set.iter().map(|(a, b, c)| OutputTuple::new(a.as_bytes(), b.as_bytes(), c.as_bytes())).collect()
}

/// Runs one table; returns the number of rows and the mismatching rows.
pub fn check(table: &[(Set, bool)], pred: fn(&[OutputTuple]) -> bool) -> (usize, Vec<String>) {
    let bad = table
        .iter()
        .filter(|(set, want)| pred(&tuples(set)) != *want)
        .map(|(set, want)| format!("{set:?} expected {want}"))
        .collect();
    (table.len(), bad)
}

pub fn check_for() -> (usize, Vec<String>) {
    let bad = FOR
        .iter()
        .filter(|(rep, set, want)| enough_for(&rep.combiner(), &tuples(set)) != Ok(*want))
        .map(|(rep, set, want)| format!("{rep} {set:?} expected {want}"))
        .collect();
    (FOR.len(), bad)
}

pub fn basic() -> (usize, Vec<String>) {
    check(BASIC, enough_basic)
}

pub fn table() -> (usize, Vec<String>) {
    check(TABLE, is_table)
}

pub fn structural() -> (usize, Vec<String>) {
    check(STRUCT, enough_struct)
}
