//! Finite-dimensional von Neumann algebras, splitting maps and semi-causal
//! channels.
//!
//! A splitting map is an isometry `χ: H → H_L ⊗ H_R`. The crate computes
//! which operators on `H` it represents as local to either leg, decides
//! balance and leanness, builds canonical maps from Artin–Wedderburn data,
//! constructs comprehension witnesses between maps, and uses lean maps to
//! test and decompose semi-causal channels.
//!
//! Modules build strictly on each other:
//! [`linops`] → [`vnalg`] → [`splitmap`] → [`channels`] → [`cli`].

pub mod channels;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod linops;
pub mod sampling;
pub mod splitmap;
pub mod vnalg;

pub use error::{Error, Result};
pub use linops::{ComplexMatrix, OperatorSubspace, Settings, Side, Tolerance, C64};
