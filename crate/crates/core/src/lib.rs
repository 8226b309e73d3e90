//! Toolkit for experimenting with the approximation method for circuit
//! lower bounds: approximation models, error-set covers, barrier
//! constructions, the fusion method and oracle-circuit localization.

pub mod barrier;
pub mod budget;
pub mod circuit;
pub mod distance;
pub mod connective;
pub mod enumerate;
pub mod error;
pub mod formats;
pub mod fusion;
pub mod localize;
pub mod model;
pub mod presets;
pub mod report;
pub mod setcover;
pub mod truth_table;

pub use circuit::{Circuit, CircuitBuilder, Gate, OracleCircuit};
pub use connective::Connective;
pub use error::{Error, Result};
pub use truth_table::TruthTable;
