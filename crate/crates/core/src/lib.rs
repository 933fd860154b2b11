//! Lattice-point and spectral computations for Laplace eigenfunctions on the
//! flat torus `T^d = R^d / 2πZ^d`, `d = 2, 3, 4`.
//!
//! Integer questions (eigenspaces, representation numbers, pair counts) are
//! answered exactly. Analytic ones (ball averages, smooth approximants)
//! reduce to finite sums over frequency pairs weighted by a radial kernel.
//! The guide in `book/` walks through each layer with runnable examples.

pub mod approx;
pub mod arithmetic;
pub mod constructions;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use lattice::{enumerate_sphere, Eigenspace, LatticePoint};
pub use spectral::{mass_average, Ball, Eigenfunction};

// The guide's code blocks run as doctests so they cannot drift from the API.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/mass.md")]
    mod mass {}
    #[doc = include_str!("../../../book/src/approximants.md")]
    mod approximants {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
