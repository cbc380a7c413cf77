//! Exhaustive enumeration of the combiner space up to a size bound.

use std::collections::HashSet;

use crate::dsl::{Combiner, Delim, MergeFlags};
use crate::pipeline::lex::simple_argv;

pub const DEFAULT_MAX_SIZE: usize = 7;

/// An ordered set of candidate combiners, all of size at most `max_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    members: Vec<Combiner>,
    max_size: usize,
}

impl CandidateSet {
    /// Builds a set from arbitrary members: duplicates are dropped and the
    /// rest put in canonical order.
    pub fn from_members(members: impl IntoIterator<Item = Combiner>, max_size: usize) -> Self {
        let mut seen = HashSet::new();
        let mut keyed: Vec<(usize, String, Combiner)> = members
            .into_iter()
            .filter(|c| seen.insert(c.clone()))
            .map(|c| (c.size(), c.to_string(), c))
            .collect();
        keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        CandidateSet {
            members: keyed.into_iter().map(|(_, _, c)| c).collect(),
            max_size,
        }
    }

    pub fn members(&self) -> &[Combiner] {
        &self.members
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, c: &Combiner) -> bool {
        self.members.contains(c)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Combiner> {
        self.members.iter()
    }

    /// Keeps the members for which `keep` holds; order is preserved.
    pub fn retain_by_mask(&self, keep: &[bool]) -> CandidateSet {
        assert_eq!(keep.len(), self.members.len());
        CandidateSet {
            members: self
                .members
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(c, _)| c.clone())
                .collect(),
            max_size: self.max_size,
        }
    }
}

impl<'a> IntoIterator for &'a CandidateSet {
    type Item = &'a Combiner;
    type IntoIter = std::slice::Iter<'a, Combiner>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

const NULLARY_REC: [Combiner; 4] = [
    Combiner::Add,
    Combiner::Concat,
    Combiner::First,
    Combiner::Second,
];

/// Every recursive-operator tree with exactly `nodes` operator nodes.
pub fn rec_ops_with_nodes(nodes: usize) -> Vec<Combiner> {
    let mut table: Vec<Vec<Combiner>> = vec![Vec::new(), NULLARY_REC.to_vec()];
    for n in 2..=nodes {
        let mut level = Vec::with_capacity(table[n - 1].len() * 12);
        for b in &table[n - 1] {
            for d in Delim::ALL {
                level.push(Combiner::front(d, b.clone()));
                level.push(Combiner::back(d, b.clone()));
                level.push(Combiner::fuse(d, b.clone()));
            }
        }
        table.push(level);
    }
    table.into_iter().nth(nodes).unwrap_or_default()
}

/// Every structural-operator tree with exactly `nodes` operator nodes.
pub fn struct_ops_with_nodes(nodes: usize, rec: &[Vec<Combiner>]) -> Vec<Combiner> {
    let mut out = Vec::new();
    if nodes < 2 {
        return out;
    }
    for b in &rec[nodes - 1] {
        out.push(Combiner::stitch(b.clone()));
        for d in Delim::ALL {
            out.push(Combiner::offset(d, b.clone()));
        }
    }
    if nodes >= 3 {
        for left in 1..nodes - 1 {
            let right = nodes - 1 - left;
            for b1 in &rec[left] {
                for b2 in &rec[right] {
                    for d in Delim::ALL {
                        out.push(Combiner::stitch2(d, b1.clone(), b2.clone()));
                    }
                }
            }
        }
    }
    out
}

/// `G_n`: every combiner of size at most `max_size`, with one `merge`
/// candidate per entry of `merge_flags`.
pub fn all_candidates(max_size: usize, merge_flags: &[MergeFlags]) -> CandidateSet {
    assert!(max_size >= 3, "no combiner is smaller than size 3");
    let max_nodes = max_size - 2;
    let rec: Vec<Vec<Combiner>> = (0..=max_nodes).map(rec_ops_with_nodes).collect();
    let mut members: Vec<Combiner> = rec.iter().flatten().cloned().collect();
    for n in 2..=max_nodes {
        members.extend(struct_ops_with_nodes(n, &rec));
    }
    members.push(Combiner::Rerun);
    let mut flags = vec![MergeFlags::none()];
    flags.extend(merge_flags.iter().cloned());
    members.extend(flags.into_iter().map(Combiner::Merge));
    CandidateSet::from_members(members, max_size)
}

/// Comparator flags worth trying for `merge`: those of a `sort` command.
///
/// Returns the non-empty flag sets only; the empty set is always a
/// candidate.
pub fn merge_flag_candidates(command: &str) -> Vec<MergeFlags> {
    let Some(argv) = simple_argv(command) else {
        return Vec::new();
    };
    if argv.first().map(String::as_str) != Some("sort") {
        return Vec::new();
    }
    let flags: Vec<String> = argv[1..]
        .iter()
        .filter(|a| a.starts_with('-') && a.len() > 1 && !a.starts_with("--parallel"))
        .cloned()
        .collect();
    if flags.is_empty() {
        Vec::new()
    } else {
        vec![MergeFlags(flags)]
    }
}
