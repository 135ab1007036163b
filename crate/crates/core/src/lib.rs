//! Temporal projection over a time-indexed knowledge base.
//!
//! Fluents are stored with closed day intervals. Queries outside the stored
//! intervals are answered by projecting persistence from event brackets,
//! discrete-time hazard models, markers and fixed-duration defaults.

pub mod cli;
pub mod corpus;
pub mod eval;
pub mod events;
pub mod hazard;
pub mod kb;
pub mod learner;
pub mod projector;
pub mod sexpr;
pub mod time;
pub mod world;

pub use corpus::{Corpus, LoadError, Query};
pub use hazard::{HazardSpec, HazardRegistry};
pub use kb::{Fluent, Kb};
pub use projector::{Answer, Mode, ProjectionResult, Projector, Source, Verdict};
pub use time::{PeriodScheme, TimeInterval, TimePoint};
