//! Mamdani fuzzy inference: fuzzifier, rule evaluation, max aggregation and
//! centroid defuzzification, with the Light-Edge trust system as the default
//! configuration.

mod config_file;
mod engine;
mod membership;
mod variable;

use thiserror::Error;

pub use config_file::{format_config, parse_config, LIGHT_EDGE_CONFIG};
pub use engine::{
    defuzzify_centroid, infer, trust_score, Aggregate, FuzzyConfig, Rule, DEFAULT_DISCRETIZATION,
};
pub use membership::{membership, TriangularMF};
pub use variable::{fuzzify, GapTieBreak, LinguisticVariable, Term};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("invalid triangular membership ({a}, {b}, {c})")]
    InvalidMembership { a: f64, b: f64, c: f64 },
    #[error("invalid linguistic variable {name}: {reason}")]
    InvalidVariable { name: String, reason: String },
    #[error("invalid rule base: {0}")]
    InvalidRuleBase(String),
    #[error("input {0} must be finite and non-negative")]
    InvalidInput(f64),
    #[error("aggregate output set is empty")]
    EmptyAggregate,
    #[error("config line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
