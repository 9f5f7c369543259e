//! Implicit iterative process with errors for finite families of
//! asymptotically quasi `I`-nonexpansive mappings.
//!
//! The scheme, for `n >= 1` with `n = (k(n) - 1) N + j(n)`:
//!
//! ```text
//! x_n = alpha_n x_{n-1} + beta_n T_j^k y_n + gamma_n u_n
//! y_n = alpha^_n x_n + beta^_n I_j^k x_n + gamma^_n v_n
//! ```
//!
//! Each step is implicit in `x_n` and is solved by a Picard inner loop.
//! Every step record carries the quantities needed to check the
//! per-step recurrence `||x_n - p|| <= (1 + b_n) ||x_{n-1} - p|| + c_n`.
//!
//! Modules:
//! * [`vectorspace`]: vectors, norms, convex combinations.
//! * [`mappings`]: mapping specs, powers, predicate checks, the zoo.
//! * [`schedule`]: index decomposition, coefficient sequences, condition validation.
//! * [`solver`]: implicit step, the scheme runner, and two baselines.
//! * [`diagnostics`]: recurrence oracle, residual profiles, gaps.

pub mod diagnostics;
pub mod error;
pub mod mappings;
pub mod schedule;
pub mod solver;
pub mod vectorspace;

pub use error::{Error, Result};
pub use mappings::{AsymptoticRate, FamilyConfig, MappingSpec};
pub use schedule::{ConditionReport, ErrorTermSpec, ScheduleParams, SeqSpec};
pub use solver::{IterationTrace, StepRecord, Terminated};
pub use vectorspace::{NormKind, Vector};
