//! Discrete Green's functions of cycles, tori and Cartesian products of
//! regular graphs.
//!
//! The closed forms in [`closed_forms`] and [`product`] evaluate
//! pseudo-inverses and Dirichlet inverses of normalized Laplacians through
//! Chebyshev polynomials and finite residue sums; [`oracle`] rebuilds the
//! same quantities from dense eigendecompositions so every formula can be
//! checked against ground truth. [`walk`] turns Green's functions into
//! random-walk hitting times.

pub mod bench;
pub mod chebyshev;
pub mod closed_forms;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod product;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
