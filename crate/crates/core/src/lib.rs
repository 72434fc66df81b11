//! A λ-parameterized Faber–Schauder frame of `C[0,1]`.
//!
//! Each dyadic hat appears twice, paired with two different point-evaluation
//! functionals, which makes the system a frame rather than a basis. The
//! crate builds the frame exactly on dyadic grids, expands functions in it,
//! bounds the uniform reconstruction error, and runs finite-truncation
//! diagnostics (besselian sums, unconditionality probes, the Gram
//! projection matrix).

pub mod cli;
pub mod corpus;
pub mod diagnostics;
pub mod dyadic;
pub mod error;
pub mod frame;

pub use corpus::{builtin_corpus, modulus_of_continuity, CorpusFunction, Regularity};
pub use dyadic::{sup_norm_diff, DyadicGrid, DyadicInterval, DyadicRational, PiecewiseLinearFn};
pub use error::{FrameError, Result};
pub use frame::{
    faber_coefficient, hat_function, synthesize, CoefficientSequence, Evaluable, FrameIndex,
    FrameSystem, Half, LambdaSchedule, PointMassFunctional,
};
