//! Optimal communication in sender–receiver games where the sender's payoff
//! depends only on the receiver's action.
//!
//! Three protocols are compared: Bayesian persuasion (sender commits to an
//! experiment), mediation (a trusted mediator elicits the sender's report),
//! and cheap talk (unmediated messages). All solvers work on finitely
//! supported distributions of posteriors and reduce to small linear programs.

pub mod battery;
pub mod diagnose;
pub mod error;
pub mod geom;
pub mod linprog;
pub mod model;
pub mod moment;
pub mod papercases;
pub mod solve;

pub use error::{Error, Result};
