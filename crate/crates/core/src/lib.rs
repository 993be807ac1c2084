//! Classical simulation and verification of Simon-style algorithms for the
//! linear structures of Boolean functions.
//!
//! The crate is organized bottom-up:
//!
//! - [`gf2`]: packed vectors, matrices and subspaces over GF(2)
//! - [`boolfn`]: truth tables, algebraic normal form, derivatives, planted instances
//! - [`oracle`]: exhaustive ground truth via the autocorrelation spectrum
//! - [`sim`]: exact measurement statistics of the two-register routines
//! - [`linstruct`]: the structure- and period-finding procedures
//! - [`anf_props`]: coefficient conditions and top-degree classifiers on the ANF
//! - [`probmodel`]: probability of collecting a full-rank sample, pseudo-structure bounds
//! - [`sat3`]: 3SAT to product-equation reduction and pattern identities
//! - [`cli`]: the `simonls` command-line front end

pub mod anf_props;
pub mod boolfn;
pub mod cli;
pub mod error;
pub mod gf2;
pub mod linstruct;
pub mod oracle;
pub mod probmodel;
pub mod sat3;
pub mod seed;
pub mod sim;
mod walsh;

pub use error::{Error, Result};
