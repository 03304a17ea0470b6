//! Synthetic Choi-state time series for single-qubit dissipative channels and
//! recurrent networks that classify them as semigroup, Markovian or
//! non-Markovian, or forecast their continuation.

pub mod choi;
pub mod dataset;
pub mod experiments;
pub mod nn;

mod label;

pub use label::ClassLabel;
