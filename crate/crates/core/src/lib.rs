//! Exchangeable sequences of negative binomial point processes built from
//! exchangeable sequences of Bernoulli processes.
//!
//! The constructions in [`construct`] only read coins from a
//! [`sources::BernoulliSequence`]; the random base measure directing that
//! sequence is never represented. [`analytics`] and [`suites`] hold the
//! analytic oracles and the statistical checks of every sampler.

pub mod analytics;
pub mod cli;
pub mod construct;
pub mod error;
pub mod jsonl;
pub mod measures;
pub mod pipeline;
pub mod rng;
pub mod sources;
pub mod special;
pub mod suites;

pub use error::{Error, Result};
