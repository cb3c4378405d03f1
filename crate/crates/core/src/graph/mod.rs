//! Matrix primitives, graph generators and the symmetric eigensolver.

pub mod eigen;
pub mod generators;
pub mod matrix;
pub mod rng;

pub use eigen::{eigen_sym, spectrum_sym, SymmetricEigen};
pub use generators::{gen_circulant, gen_complete, gen_erdos_renyi, gen_ring};
pub use matrix::{kronecker_product, kronecker_sum, CouplingMatrix};
pub use rng::{derive_seed, SeededRng};
