//! Exact additive-combinatorics toolkit for finite abelian groups.

pub mod bohr;
pub mod check;
pub mod error;
pub mod exact;
pub mod group;
pub mod harmonic;
pub mod set;
pub mod setstat;
pub mod spectral;
pub mod structure;
pub mod worked;

pub use error::{Error, Result};
pub use group::{Character, Element, Group};
pub use harmonic::FunctionTable;
pub use set::GroupSet;
