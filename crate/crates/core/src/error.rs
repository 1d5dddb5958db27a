use thiserror::Error;

use crate::language::CountSeries;
use crate::word::Word;

#[derive(Debug, Error)]
pub enum Error {
    #[error("letter {letter} at position {position} is outside the alphabet 0..={max_letter}")]
    LetterOutOfAlphabet {
        letter: u8,
        position: usize,
        max_letter: u8,
    },

    #[error("word lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("word {0} is not admissible")]
    Inadmissible(Word),

    #[error("word {0} is not in G")]
    NotInG(Word),

    #[error("word {word} is not in G({m})")]
    NotInGM { word: Word, m: usize },

    #[error("shift is not canonical: {0}")]
    NotCanonical(String),

    #[error("limiting gradient is zero")]
    ZeroGradient,

    #[error("empty word not allowed here")]
    EmptyWord,

    #[error("enumeration budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64, partial: Box<CountSeries> },

    #[error("orbit {word} could not be certified up to window length {horizon}")]
    UncertifiedOrbit { word: Word, horizon: usize },

    #[error("cylinder length {requested} exceeds stored horizon {stored}")]
    CylinderTooLong { requested: usize, stored: usize },

    #[error("sum(v) = {sum_v} is smaller than sum(w) = {sum_w}")]
    SumOrder { sum_v: u64, sum_w: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
