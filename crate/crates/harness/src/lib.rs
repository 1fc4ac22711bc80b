//! A small message-passing runtime and five key-distribution protocols
//! written against the secalgo primitives, with exact per-primitive call
//! counts and library versus protocol timing.

pub mod clock;
pub mod error;
pub mod instrument;
pub mod measure;
pub mod protocols;
pub mod runtime;
pub mod trace;

pub use error::{HarnessError, Result};
pub use instrument::CallCounts;
pub use measure::{measure, MeasureOptions, Measurement};
pub use protocols::{Protocol, ProtocolFailure, RunOptions};
pub use runtime::{Intercept, Message, Schedule};
pub use trace::ProtocolTrace;
