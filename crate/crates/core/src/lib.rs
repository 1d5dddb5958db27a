//! Bounded density shifts over exact rational functions.
//!
//! A bounded density shift `X_f` holds every bi-infinite sequence over
//! `{0, ..., ⌊f(1)⌋}` whose length-`p` windows sum to at most `f(p)`. This
//! crate enumerates its language, brackets its entropy, builds the
//! `B·G·B` factorization of its words, approximates the measure of maximal
//! entropy by periodic points, and tests extender-set containments at finite
//! radius.
//!
//! ```
//! use bds_core::{fixtures, language, periodic};
//!
//! let golden = fixtures::golden_mean();
//! let counts = language::count_words(&golden, 7).unwrap();
//! assert_eq!(counts.count_u64(7), 34);
//!
//! let verdict = periodic::certificate(&golden).unwrap();
//! assert_eq!(verdict, periodic::Certificate::Inconclusive);
//! ```

#![forbid(unsafe_code)]

pub mod decomposition;
pub mod enumerate;
pub mod error;
pub mod extender;
pub mod fixtures;
pub mod language;
pub mod periodic;
pub mod rational;
pub mod shift;
pub mod word;

pub use error::{Error, Result};
pub use language::{CountClass, CountSeries, EntropyBracket, LanguageCounts};
pub use rational::Rational;
pub use shift::{CanonicalFunction, ShiftSpec, ValidationReport};
pub use word::Word;
