//! Sweep descriptions, evaluation and output for the `compass` binary.

pub mod presets;
pub mod spec;
pub mod sweep;

pub use spec::{AlphaSpec, Format, Quantity, StateSelector, SweepSpec};
pub use sweep::{run_sweep, SweepResult};
