//! Brute-force walk of the combiner grammar, producing serialized text.

const DELIMS: [&str; 4] = ["nl", "tab", "sp", "comma"];
const NULLARY: [&str; 4] = ["add", "concat", "first", "second"];

/// Recursive-operator derivations with exactly `nodes` production steps.
fn rec(nodes: usize) -> Vec<String> {
    match nodes {
        0 => Vec::new(),
        1 => NULLARY.iter().map(|s| s.to_string()).collect(),
        n => {
            let mut out = Vec::new();
            for op in ["front", "back", "fuse"] {
                for d in DELIMS {
                    for b in rec(n - 1) {
                        out.push(format!("({op} {d} {b})"));
                    }
                }
            }
            out
        }
    }
}

fn structural(nodes: usize) -> Vec<String> {
    let mut out = Vec::new();
    if nodes < 2 {
        return out;
    }
    for b in rec(nodes - 1) {
        out.push(format!("(stitch {b})"));
        for d in DELIMS {
            out.push(format!("(offset {d} {b})"));
        }
    }
    for left in 1..nodes - 1 {
        for b1 in rec(left) {
            for b2 in rec(nodes - 1 - left) {
                for d in DELIMS {
                    out.push(format!("(stitch2 {d} {b1} {b2})"));
                }
            }
        }
    }
    out
}

/// Every combiner of size at most `max_size` (no extra merge flags).
pub fn walk(max_size: usize) -> Vec<String> {
    let mut out = vec!["rerun".to_string(), "merge".to_string()];
    for nodes in 1..=max_size - 2 {
        out.extend(rec(nodes));
        out.extend(structural(nodes));
    }
    out
}
