//! Exact Markov-chain fault-tolerance thresholds for erasure errors on the
//! 7-qubit Steane code, with a Monte Carlo cross-check.
//!
//! A block of seven qubits collects erasures (flagged Z measurements in the
//! ideal model; Z erasures and full erasures in the lossy model), and a
//! sequence of correction attempts either restores it or gives up. Every
//! attempt is an exact stochastic map on erasure patterns whose entries are
//! polynomials in the failure rates. The patterns are lumped into a handful
//! of classes, and the resulting absorbing chain is solved for the encoded
//! failure rate, either exactly at a rational point or as a truncated series.
//!
//! ```
//! use erasure_ft::{build_chain, ClassOptions, ErrorModel, Procedure};
//! use erasure_ft::arith::ratio;
//!
//! let proc = Procedure::with_defaults(ErrorModel::Ideal);
//! let chain = build_chain(&proc, &ClassOptions::reduced(proc.code())).unwrap();
//! assert_eq!(chain.len(), 5);
//! let series = chain.recursion_series(3);
//! assert_eq!(series.coeff(3, 0), ratio(49, 1));
//! ```

#![no_std]
#![allow(clippy::result_large_err)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod chain;
pub mod circuits;
pub mod classes;
pub mod erasure;
pub mod montecarlo;
pub mod pauli;
pub mod threshold;

pub use arith::{Poly, Rational};
pub use chain::{build_chain, ChainResult, TransitionMatrix};
pub use circuits::{
    CircuitConfig, CorrectionStep, OutcomeDistribution, Procedure, StepChoice, StepKind,
};
pub use classes::{
    build_classes, ClassOptions, ClassTable, ClassUnsound, EquivClass, PermutationGroup,
};
pub use erasure::{Composition, Correctability, ErasurePattern, ErrorModel, ModelParams, Site};
pub use montecarlo::{Comparison, McEstimate};
pub use pauli::{Pauli, PauliType, QubitSet, SteaneCode};
pub use threshold::{BreakEvenCondition, Recursion, ThresholdError, ThresholdResult};
