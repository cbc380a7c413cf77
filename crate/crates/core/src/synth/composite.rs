use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsl::sexpr::Parser;
use crate::dsl::{eval_unchecked, in_domain, Combiner, EvalError, OpClass, ParseError, RunOps};
use crate::enumerate::CandidateSet;

/// An ordered list of equivalent combiners used as one.
///
/// Evaluation applies the first member whose domain admits both inputs.
/// When none does, the last member is applied and reports the domain error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composite {
    members: Vec<Combiner>,
}

impl Composite {
    pub fn new(members: Vec<Combiner>) -> Self {
        assert!(!members.is_empty(), "a composite needs at least one member");
        Composite { members }
    }

    pub fn single(c: Combiner) -> Self {
        Composite { members: vec![c] }
    }

    pub fn members(&self) -> &[Combiner] {
        &self.members
    }

    /// The combiner when there is exactly one member.
    pub fn as_single(&self) -> Option<&Combiner> {
        match self.members.as_slice() {
            [c] => Some(c),
            _ => None,
        }
    }

    pub fn class(&self) -> OpClass {
        self.members[0].class()
    }

    pub fn in_domain(&self, s: &[u8], ops: &dyn RunOps) -> bool {
        self.members.iter().any(|m| in_domain(m, s, ops))
    }

    /// The member that would be applied to `(y1, y2)`.
    pub fn select(&self, y1: &[u8], y2: &[u8], ops: &dyn RunOps) -> Option<&Combiner> {
        self.members
            .iter()
            .find(|m| in_domain(m, y1, ops) && in_domain(m, y2, ops))
    }

    pub fn eval(&self, y1: &[u8], y2: &[u8], ops: &dyn RunOps) -> Result<Vec<u8>, EvalError> {
        match self.select(y1, y2, ops) {
            Some(m) => eval_unchecked(m, y1, y2, ops),
            None => {
                let last = self.members.last().expect("nonempty");
                crate::dsl::eval(last, y1, y2, ops)
            }
        }
    }
}

impl fmt::Display for Composite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_single() {
            return write!(f, "{c}");
        }
        f.write_str("(composite")?;
        for m in &self.members {
            write!(f, " {m}")?;
        }
        f.write_str(")")
    }
}

/// Parses a single combiner or `(composite g1 g2 ...)`.
pub fn parse_composite(text: &str) -> Result<Composite, ParseError> {
    let mut p = Parser::new(text);
    let comp = if p.eat_open_word("composite") {
        let mut members = vec![p.expr()?];
        while !p.peek_close() && !p.at_end() {
            members.push(p.expr()?);
        }
        p.expect_close()?;
        Composite::new(members)
    } else {
        Composite::single(p.expr()?)
    };
    if !p.at_end() {
        return Err(ParseError {
            pos: text.len(),
            msg: "trailing input".into(),
        });
    }
    Ok(comp)
}

impl std::str::FromStr for Composite {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_composite(s)
    }
}

impl Serialize for Composite {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Composite {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_composite(&text).map_err(serde::de::Error::custom)
    }
}

fn universal(c: &Combiner) -> bool {
    matches!(c, Combiner::Concat | Combiner::First | Combiner::Second)
}

/// Sound syntactic test for `SetLegal(a) ⊇ SetLegal(b)`. A `false` answer
/// means "not established", not "not a superset".
pub fn domain_contains(a: &Combiner, b: &Combiner) -> bool {
    use Combiner::*;
    if a == b || universal(a) {
        return true;
    }
    match (a, b) {
        (Front(d1, x), Front(d2, y)) | (Back(d1, x), Back(d2, y)) | (Fuse(d1, x), Fuse(d2, y)) => {
            d1 == d2 && domain_contains(x, y)
        }
        (Stitch(x), _) if universal(x) => b.class() == OpClass::Struct,
        (Stitch(x), Stitch(y)) => domain_contains(x, y),
        (Stitch2(d1, x1, x2), Stitch2(d2, y1, y2)) => {
            d1 == d2 && domain_contains(x1, y1) && domain_contains(x2, y2)
        }
        (Offset(d1, x), Offset(d2, y)) | (Offset(d1, x), Stitch2(d2, y, _)) => {
            d1 == d2 && domain_contains(x, y)
        }
        _ => false,
    }
}

/// Builds the composite for a plausible set: keeps the most preferred
/// class present (recursive, then structural, then run operators) in
/// canonical order, and collapses to a single member whose domain covers
/// all the others when there is one.
pub fn make_composite(plausible: &CandidateSet) -> Option<Composite> {
    let class = [OpClass::Rec, OpClass::Struct, OpClass::Run]
        .into_iter()
        .find(|k| plausible.iter().any(|c| c.class() == *k))?;
    let members: Vec<Combiner> = plausible.iter().filter(|c| c.class() == class).cloned().collect();
    if let Some(top) = members
        .iter()
        .find(|m| members.iter().all(|other| domain_contains(m, other)))
    {
        return Some(Composite::single(top.clone()));
    }
    Some(Composite::new(members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_combiner, Delim, NoCommand};

    fn set(texts: &[&str]) -> CandidateSet {
        CandidateSet::from_members(texts.iter().map(|t| parse_combiner(t).unwrap()), 7)
    }

    #[test]
    fn class_preference() {
        let c = make_composite(&set(&["concat", "rerun"])).unwrap();
        assert_eq!(c.to_string(), "concat");
        let c = make_composite(&set(&["(merge -rn)"])).unwrap();
        assert_eq!(c.to_string(), "(merge -rn)");
        assert!(make_composite(&set(&[])).is_none());
    }

    #[test]
    fn guarded_chain() {
        let c = make_composite(&set(&["(front nl concat)", "(back nl concat)"])).unwrap();
        assert_eq!(c.to_string(), "(composite (back nl concat) (front nl concat))");
        assert_eq!(c.eval(b"a\n", b"b\n", &NoCommand).unwrap(), b"ab\n");
        assert_eq!(c.eval(b"\na", b"\nb", &NoCommand).unwrap(), b"\nab");
        assert!(c.eval(b"a", b"b", &NoCommand).is_err());
        assert_eq!(parse_composite(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn superset_collapses() {
        let c = make_composite(&set(&["(stitch first)", "(stitch2 sp first first)", "(offset sp first)"]))
            .unwrap();
        assert_eq!(c.to_string(), "(stitch first)");
        let c = make_composite(&set(&["(offset tab concat)", "(stitch2 tab add first)"])).unwrap();
        assert_eq!(c.to_string(), "(offset tab concat)");
        assert!(domain_contains(
            &Combiner::fuse(Delim::Comma, Combiner::First),
            &Combiner::fuse(Delim::Comma, Combiner::Add)
        ));
        assert!(!domain_contains(&Combiner::Add, &Combiner::First));
    }
}
