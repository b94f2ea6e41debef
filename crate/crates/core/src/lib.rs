//! A laboratory for k-OBDD branching programs and the shuffled address
//! function `SAF_{k,w}`.
//!
//! * [`program`]: leveled programs, evaluation, k-OBDD validation, metrics,
//!   truth tables, random generation, JSON and DOT output.
//! * [`saf`]: parameters, block layout and the reference evaluator.
//! * [`builder`]: the explicit 2k-OBDD of width at most `3w + 1`.
//! * [`analysis`]: exact subfunction census, bound checks and the
//!   distinguishing-witness search.

pub mod analysis;
pub mod builder;
pub mod error;
pub mod program;
pub mod saf;

pub use error::{AnalysisError, ParamError, ProgramError};
pub use program::{Assignment, LeveledProgram};
pub use saf::{ExtValue, SafParams};
