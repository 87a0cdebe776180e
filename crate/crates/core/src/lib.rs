//! Hermite-moment multiple-relaxation-time (MRT) lattice Boltzmann kernels.
//!
//! The collision operator relaxes the irreducible (traceless) components of
//! the central Hermite moments of the distribution, each with its own rate,
//! and evaluates everything in the laboratory frame through closed-form
//! binomial transforms. The `modes` module measures the resulting transport
//! coefficients from the complex eigenfrequencies of the four linear
//! hydrodynamic modes on a periodic grid.

pub mod collision;
pub mod error;
pub mod fit;
pub mod hermite;
pub mod irrep;
mod linalg;
pub mod modes;
pub mod solver;
pub mod tensor;
pub mod velset;

pub use error::{Error, Result};
pub use tensor::{CoeffSet, SymTensor};
