//! Explanation-driven weak supervision.
//!
//! Natural-language explanations are parsed into typed logical forms by a
//! CCG chart parser with a log-linear ranker ([`ccg`]). Forms are executed
//! strictly to split a corpus into labeled and unlabeled parts
//! ([`logic::exec_strict`], [`pipeline::partition_corpus`]) and softly, with a
//! trainable string matcher and fuzzy logic, to pseudo-label the rest
//! ([`exec`], [`matcher`]). The pseudo-labels, weighted by normalized matching
//! scores, train a downstream classifier jointly with the matcher
//! ([`pipeline::train_joint`]).

pub mod ccg;
mod error;
pub mod exec;
pub mod io;
pub mod logic;
pub mod matcher;
pub mod optim;
pub mod pipeline;

pub use error::{Error, Result};
