//! Seeded randomized runs of the four string lemmas.

use combsynth::dsl::text::count_delim;
use combsynth::dsl::{eval, in_domain, Combiner, Delim, NoCommand};
use combsynth::enumerate::rec_ops_with_nodes;
use combsynth::verifier::sample_pair;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct LemmaRun {
    pub cases: usize,
    pub draws: usize,
    pub violations: Vec<String>,
}

const FREE: &[u8] = b"0129a, \t\n";

fn free<R: Rng>(rng: &mut R) -> Vec<u8> {
    (0..rng.gen_range(0..10)).map(|_| *FREE.choose(rng).unwrap()).collect()
}

pub struct Gen {
    table: Vec<Vec<Combiner>>,
}

impl Gen {
    pub fn new() -> Self {
        Gen {
            table: (0..=5).map(rec_ops_with_nodes).collect(),
        }
    }

    fn rec_op(&self, rng: &mut ChaCha8Rng, max_nodes: usize) -> Combiner {
        let n = rng.gen_range(1..=max_nodes);
        self.table[n].choose(rng).unwrap().clone()
    }

    /// A RecOp combiner and an input pair; half the pairs target its domain.
    fn case(&self, rng: &mut ChaCha8Rng) -> (Combiner, Vec<u8>, Vec<u8>) {
        let c = self.rec_op(rng, 5);
        let (a, b) = if rng.gen_bool(0.5) { sample_pair(&c, rng) } else { (free(rng), free(rng)) };
        (c, a, b)
    }

    /// Draws until `cases` evaluations succeed, checking `prop` on each.
    fn run<F>(&self, rng: &mut ChaCha8Rng, cases: usize, prop: F) -> LemmaRun
    where
        F: Fn(&Combiner, &[u8], &[u8], &[u8]) -> Option<String>,
    {
        let mut run = LemmaRun { cases: 0, draws: 0, violations: Vec::new() };
        while run.cases < cases {
            run.draws += 1;
            let (c, y1, y2) = self.case(rng);
            if let Ok(v) = eval(&c, &y1, &y2, &NoCommand) {
                run.cases += 1;
                if let Some(msg) = prop(&c, &y1, &y2, &v) {
                    run.violations.push(msg);
                }
            }
        }
        run
    }

    pub fn delimiter_conservation(&self, rng: &mut ChaCha8Rng, cases: usize) -> LemmaRun {
        self.run(rng, cases, |c, y1, y2, v| {
            Delim::ALL
                .into_iter()
                .find(|d| !y1.contains(&d.byte()) && !y2.contains(&d.byte()) && v.contains(&d.byte()))
                .map(|d| format!("{c} introduced {d:?}: {y1:?} {y2:?} -> {v:?}"))
        })
    }

    pub fn count_bound(&self, rng: &mut ChaCha8Rng, cases: usize) -> LemmaRun {
        self.run(rng, cases, |c, y1, y2, v| {
            Delim::ALL
                .into_iter()
                .find(|&d| count_delim(d, v) > count_delim(d, y1) + count_delim(d, y2))
                .map(|d| format!("{c} exceeded the {d:?} count: {y1:?} {y2:?} -> {v:?}"))
        })
    }

    pub fn no_middle_insertion(&self, rng: &mut ChaCha8Rng, cases: usize) -> LemmaRun {
        self.run(rng, cases, |c, y1, y2, v| {
            (v.len() > y1.len() + y2.len() && v.starts_with(y1) && v.ends_with(y2))
                .then(|| format!("{c}: {v:?} wraps {y1:?} and {y2:?}"))
        })
    }

    /// Legal inputs only: `fuse d b` keeps the `d` count of both inputs.
    pub fn fuse_count(&self, rng: &mut ChaCha8Rng, cases: usize) -> LemmaRun {
        let mut run = LemmaRun { cases: 0, draws: 0, violations: Vec::new() };
        while run.cases < cases {
            run.draws += 1;
            let d = *Delim::ALL.choose(rng).unwrap();
            let c = Combiner::fuse(d, self.rec_op(rng, 4));
            let (y1, y2) = sample_pair(&c, rng);
            if !(in_domain(&c, &y1, &NoCommand) && in_domain(&c, &y2, &NoCommand)) {
                continue;
            }
            run.cases += 1;
            match eval(&c, &y1, &y2, &NoCommand) {
                Ok(v) => {
                    let counts = [count_delim(d, &y1), count_delim(d, &y2), count_delim(d, &v)];
                    if counts[0] != counts[1] || counts[1] != counts[2] {
                        run.violations.push(format!("{c}: counts {counts:?} for {y1:?} {y2:?} -> {v:?}"));
                    }
                }
                Err(e) => run.violations.push(format!("{c}: legal inputs failed: {e}")),
            }
        }
        run
    }
}
