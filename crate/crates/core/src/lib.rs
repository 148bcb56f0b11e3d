//! Immediate snapshot protocol complexes `P(r)` built from round counters,
//! together with checks of their combinatorial structure.

pub mod cli;
pub mod complex;
pub mod counting;
pub mod decomposition;
pub mod error;
pub mod report;
pub mod rounds;
pub mod sets;
pub mod topology;
pub mod witness;

pub use error::{Error, Result};
pub use rounds::RoundCounter;
pub use sets::{ProcSet, ProcessId};
pub use witness::WitnessTable;
