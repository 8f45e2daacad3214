//! Fixed-point iteration schemes on box domains, with sampled
//! falsification of nonexpansiveness conditions and convergence
//! diagnostics.
//!
//! The crate revolves around a small set of pieces:
//!
//! * [`space`]: points, norms (`euclidean`, `max`, `sum`), box domains,
//!   and deterministic samplers seeded per `(seed, stream)`.
//! * [`expr`]: a tiny expression language (`x == 1 ? 5/8 : x/2`) used to
//!   define mappings, schedules, and rate functions from text.
//! * [`mapping`]: self-maps of a box with declared fixed points, plus a
//!   validated catalog of named examples.
//! * [`schemes`]: Picard, Mann, three-step, and two-step-with-auxiliary
//!   iterations producing fully recorded traces.
//! * [`conditions`]: sampled falsification checkers for
//!   quasi-nonexpansiveness and related inequality families; a pass is
//!   "no counterexample found within budget", never a proof.
//! * [`diagnostics`]: trace analysis (monotone distance checks, residual
//!   decay, fitted geometric rates) and cross-scheme comparison tables.
//!
//! Everything is deterministic: runs are pure functions of their
//! configuration, including RNG seeds, and traces serialize with
//! round-trippable 17-significant-digit values.

pub mod cli;
pub mod conditions;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod expr;
pub mod mapping;
pub mod numfmt;
pub mod schemes;
pub mod space;

pub use error::{Error, Result};
pub use mapping::{Catalog, FixedPointSet, MappingSpec};
pub use schemes::{run_scheme, IterationTrace, ParamSchedule, SchemeId, StopCriteria};
pub use space::{Domain, NormKind, Point, Sampler};
