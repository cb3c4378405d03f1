//! Kuramoto oscillators on multiplex networks.
//!
//! A multiplex network with `M` identical layers of `N` nodes, where each
//! node is linked only to its own copies in other layers, has the Kronecker
//! sum `A_intra ⊕ A_inter` as adjacency. This crate integrates the full
//! `NM`-oscillator system, integrates the `N`-node intra-layer and `M`-node
//! inter-layer systems separately and composes them, and checks the
//! resulting identities: composed trajectories, factorized order
//! parameters, sumset Jacobian spectra and stability inheritance.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which the scenario runner uses.

// `!(x > 0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod composition;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod scalar;
pub mod stability;

pub use composition::{
    compose_state, composition_residual, order_parameter, order_parameter_product, perturb, random_composed,
    simulate_composed, twisted_state, ComposedRun, ComposedState, OrderParameterSeries,
};
pub use dynamics::{
    assemble_multiplex, integrate_euler, integrate_rk4, kuramoto_rhs, wrap_phase, FrequencyVector, MultiplexSystem,
    PhaseState, Scheme, Trajectory,
};
pub use error::{Error, Result};
pub use graph::{
    gen_circulant, gen_complete, gen_erdos_renyi, gen_ring, kronecker_product, kronecker_sum, spectrum_sym,
    CouplingMatrix, SeededRng,
};
pub use scalar::Scalar;
pub use stability::{
    classify_stability, jacobian_direct, jacobian_multiplex, jacobian_single_layer, spectrum_sumset,
    stability_of_composed, Classification, ComposedStability, SpectrumReport,
};

pub type Matrix = CouplingMatrix<f64>;
pub type Matrix32 = CouplingMatrix<f32>;
pub type Phases = PhaseState<f64>;
pub type Phases32 = PhaseState<f32>;
pub type Frequencies = FrequencyVector<f64>;
pub type System = MultiplexSystem<f64>;
pub type System32 = MultiplexSystem<f32>;
pub type Report = SpectrumReport<f64>;
