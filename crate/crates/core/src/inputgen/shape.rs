use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bounds for one dimension: element count range and the share of distinct
/// elements, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimConfig {
    pub min: usize,
    pub max: usize,
    pub distinct_pct: u8,
}

impl DimConfig {
    pub const fn new(min: usize, max: usize, distinct_pct: u8) -> Self {
        DimConfig {
            min,
            max,
            distinct_pct,
        }
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.min..=self.max).contains(&n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputShape {
    pub lines: DimConfig,
    pub words: DimConfig,
    pub chars: DimConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("{dim}: min {min} exceeds max {max}")]
    Bounds {
        dim: &'static str,
        min: usize,
        max: usize,
    },
    #[error("{dim}: distinct percentage {pct} is above 100")]
    Percent { dim: &'static str, pct: u8 },
    #[error("chars: words must have at least one character")]
    EmptyWords,
}

/// Upper limits that mutation never exceeds.
pub const LINE_CEILING: usize = 1000;
pub const WORD_CEILING: usize = 64;
pub const CHAR_CEILING: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Lines,
    Words,
    Chars,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    MoreElements,
    FewerElements,
    MoreVaried,
    LessVaried,
}

/// The dimension and direction selected by mutation index `j` in `1..=12`.
pub fn mutation(j: usize) -> (Dimension, Direction) {
    assert!((1..=12).contains(&j), "mutation index {j} out of range");
    let dim = match j.div_ceil(4) {
        1 => Dimension::Lines,
        2 => Dimension::Words,
        _ => Dimension::Chars,
    };
    let dir = match j % 4 {
        1 => Direction::MoreElements,
        2 => Direction::FewerElements,
        3 => Direction::MoreVaried,
        _ => Direction::LessVaried,
    };
    (dim, dir)
}

impl InputShape {
    pub const DEFAULT: InputShape = InputShape {
        lines: DimConfig::new(1, 20, 50),
        words: DimConfig::new(0, 5, 50),
        chars: DimConfig::new(1, 8, 50),
    };

    pub fn validate(&self) -> Result<(), ShapeError> {
        for (dim, c) in [("lines", self.lines), ("words", self.words), ("chars", self.chars)] {
            if c.min > c.max {
                return Err(ShapeError::Bounds {
                    dim,
                    min: c.min,
                    max: c.max,
                });
            }
            if c.distinct_pct > 100 {
                return Err(ShapeError::Percent {
                    dim,
                    pct: c.distinct_pct,
                });
            }
        }
        if self.chars.min == 0 {
            return Err(ShapeError::EmptyWords);
        }
        Ok(())
    }

    /// Seed shape built around a numeric literal `v` found in the command:
    /// line counts straddle `v`.
    pub fn around_literal(v: u64) -> InputShape {
        let v = v.min(LINE_CEILING as u64) as usize;
        InputShape {
            lines: DimConfig::new(v.saturating_sub(2).max(1), (v + 2).min(LINE_CEILING), 50),
            ..InputShape::DEFAULT
        }
    }

    fn dim_mut(&mut self, d: Dimension) -> (&mut DimConfig, usize, usize) {
        match d {
            Dimension::Lines => (&mut self.lines, 0, LINE_CEILING),
            Dimension::Words => (&mut self.words, 0, WORD_CEILING),
            Dimension::Chars => (&mut self.chars, 1, CHAR_CEILING),
        }
    }
}

/// Applies mutation `j` (see [`mutation`]); the result is always valid.
pub fn mutate_shape(s: &InputShape, j: usize) -> InputShape {
    let (dim, dir) = mutation(j);
    let mut out = *s;
    let (c, floor, ceiling) = out.dim_mut(dim);
    match dir {
        Direction::MoreElements => {
            c.min = (c.min * 2).min(ceiling);
            c.max = (c.max * 2).max(1).min(ceiling);
        }
        Direction::FewerElements => {
            c.min /= 2;
            c.max = (c.max / 2).max(1);
        }
        Direction::MoreVaried => c.distinct_pct = (c.distinct_pct.max(1) as u16 * 2).min(100) as u8,
        Direction::LessVaried => c.distinct_pct = (c.distinct_pct / 2).max(1),
    }
    c.min = c.min.max(floor);
    c.max = c.max.max(c.min);
    out
}

/// A fresh shape drawn uniformly from moderate bounds.
pub fn random_shape<R: Rng>(rng: &mut R) -> InputShape {
    let mut dim = |lo: usize, hi: usize, spread: usize| {
        let min = rng.gen_range(lo..=hi);
        let max = min + rng.gen_range(0..=spread);
        let pct = rng.gen_range(10..=100u8);
        DimConfig::new(min, max, pct)
    };
    InputShape {
        lines: dim(1, 10, 40),
        words: dim(0, 3, 6),
        chars: dim(1, 3, 10),
    }
}
