//! Coupling and cohesion metrics for object-oriented designs.
//!
//! The pipeline is: parse sources ([`parser`]) into a [`model::ClassModel`],
//! compute per-class metrics ([`metrics`]), then aggregate, correlate and gate
//! them ([`report`]). [`gen`] produces seeded synthetic models for testing.

pub mod cli;
pub mod gen;
pub mod metrics;
pub mod model;
pub mod parser;
pub mod report;
