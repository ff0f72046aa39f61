//! Exact learning-theoretic complexity measures for finite function classes:
//! eluder dimension, star number and threshold dimension (combinatorial and
//! scale-sensitive), VC and Littlestone dimensions, generalized-rank
//! certificates with the matching closed-form upper bounds, Ramsey witness
//! extraction, and the randomized separating constructions.
//!
//! A function class is a finite table of exact rationals (points × functions);
//! every dimension value ships with a witness sequence that re-verifies
//! independently of the search that produced it.

pub mod combodim;
pub mod error;
pub mod ramsey;
pub mod randcon;
pub mod rank;
pub mod ratio;
pub mod scaledim;
pub mod table;
pub mod witness;

pub mod testutil;

pub use error::{Error, Result};
