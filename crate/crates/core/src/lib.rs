//! Truncated-matrix numerics for Toeplitz, Hankel and H-Toeplitz operators on
//! the Fock space `F²_α`, with a quadrature oracle, spectral and Berezin
//! analysis, and the directed graphs read off H-Toeplitz matrices.

pub mod analysis;
pub mod error;
pub mod fock;
pub mod graph;
pub mod operator;
pub mod oracle;
pub mod special;
pub mod symbol;
pub mod verify;

pub use error::{Error, ParseError, Result};
pub use fock::{FockVector, FockWeight, MixedMonomial, MixedVector, Tolerances};
pub use graph::{HGraph, ParamSet};
pub use operator::{BasisMap, OperatorKind, TruncatedOperator};
pub use oracle::{QuadratureRule, SampledSymbol};
pub use symbol::HarmonicSymbol;
