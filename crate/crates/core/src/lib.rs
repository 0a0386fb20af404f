//! Exact-arithmetic dual polar graphs over finite fields.
//!
//! The crate builds the lattice of totally isotropic subspaces of a formed
//! space (symplectic, quadratic, or Hermitian), realizes the dual polar
//! graph on its maximal elements, and verifies the structure the graph
//! carries: distance regularity, the Laplacian eigenspace decomposition
//! with eigenvalues mu_j, the tight-frame property of projected rank
//! indicators with exact frame constants lambda_j, and the Norton algebra
//! product on the first nontrivial eigenspace. Everything is computed over
//! the rationals; no floating point is involved anywhere, so every check is
//! an exact identity rather than an approximation.
//!
//! The intended entry points are [`forms::make_space`] for the formed
//! space, [`lattice::PolarLattice::enumerate`] for the lattice, the graph
//! and association-scheme layer in [`scheme`], and the verification drivers
//! in [`spectral`], [`frames`], [`norton`], and [`verify`].

pub mod forms;
pub mod frames;
pub mod gf;
pub mod lattice;
pub mod matrix;
pub mod norton;
mod par;
pub mod qseries;
pub mod scheme;
pub mod spectral;
pub mod subspace;
pub mod verify;

pub use forms::{make_space, Family, FormedSpace, Params};
pub use lattice::PolarLattice;
pub use scheme::DualPolarGraph;
