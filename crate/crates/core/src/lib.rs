//! Symbolic words generated by piecewise isometries and interval exchange
//! transformations, computed with exact arithmetic in ℚ(√d).
//!
//! The pipeline is: build a [`PiecewiseMap`] (or an [`Iet`]), color `[0, 1)`
//! with a [`Subdivision`], and code orbits into [`SymbolicWord`]s. Any
//! subdivision can be refined into one that is *good* for the map, and the
//! refined word glues back onto the original word letter by letter.

// errors and violation reports carry exact witness points by value
#![allow(clippy::result_large_err, clippy::large_enum_variant)]

pub mod analysis;
pub mod boundary;
pub mod cli;
pub mod coding;
pub mod exactnum;
pub mod intervalmap;
pub mod random;
pub mod subdivision;

pub use analysis::{complexity, detect_period, recurrence_window, ComplexityProfile, Periodicity, Recurrence};
pub use boundary::{BoundarySet, Span};
pub use coding::{code, orbit, roundtrip_check, RoundTrip, SymbolicWord, WordStream};
pub use exactnum::ExactScalar;
pub use intervalmap::{iet_to_map, to_iet, AffinePiece, HalfOpenInterval, Iet, PiecewiseMap, Slope};
pub use subdivision::{GluingMap, Goodness, Letter, Subdivision};

/// 64-bit FNV-1a; stable across platforms and releases, used for map and
/// subdivision ids.
pub(crate) fn fingerprint(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}
