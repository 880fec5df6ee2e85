//! Generators and verifiers for the two worked examples (`H + Λ` sets in
//! `F2^n` and Katz index sets in `F*_{p^d}`) and seeded instance
//! generators.

mod field;
mod generate;
mod hlambda;

pub use field::{make_finite_field, make_katz_set, verify_katz_bound, FiniteField, KatzReport, MAX_FIELD_ORDER};
pub use generate::{make_planted, make_random_set, Planted, PlantedCoset};
pub use hlambda::{make_h_lambda, verify_h_lambda, ConcentrationRatio, HLambdaReport, HLambdaSpec};
