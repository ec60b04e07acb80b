//! Planning in terminating labeled MDPs against preferences given as an
//! automaton whose states are partitioned into partially ordered classes.
//!
//! The pipeline: [`pdfa::Pdfa`] and [`mdp::Tlmdp`] → [`product::build_product`]
//! → [`momdp::Momdp`] → [`momdp::solve_scalarized`] / [`momdp::pareto_front`].
//! [`oracle`] enumerates every deterministic policy on small instances as an
//! independent check.

pub mod cli;
pub mod error;
pub mod files;
mod linalg;
pub mod mdp;
pub mod momdp;
pub mod oracle;
pub mod order;
pub mod pdfa;
pub mod product;
pub mod report;
pub mod scenarios;

pub use error::{Error, Result};
