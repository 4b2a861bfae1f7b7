//! Spectral projections correlation functions of stationary processes.
//!
//! The crate evaluates, simulates and estimates the correlation between
//! eigenfunctions (and co-eigenfunctions) of a Markov semigroup observed
//! along three clocks:
//!
//! - the identity clock (the Markov process itself),
//! - a Bochner subordinator `T_t` (eigenvalues `λ_n` become `φ(λ_n)`),
//! - an inverse subordinator `L_t` (non-Markov, possibly long-range dependent).
//!
//! Module map:
//!
//! | module        | content                                                         |
//! |---------------|-----------------------------------------------------------------|
//! | [`specfun`]   | Laguerre families, Mittag-Leffler, Rodrigues term algebra       |
//! | [`measures`]  | stationary densities, quadrature, norms, κ and angle cosines     |
//! | [`system`]    | eigen systems (classical, small perturbation, Gauss-Laguerre)   |
//! | [`subordinate`] | Bernstein functions, `η_t(λ)`, renewal measures, path sampling |
//! | [`corrkernel`]| closed-form correlations, sandwich bounds, asymptotics           |
//! | [`simulate`]  | exact CIR ensembles under the three clocks                       |
//! | [`inference`] | empirical κ, symmetry test, range and jump-activity classifiers  |

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corrkernel;
pub mod inference;
pub mod error;
pub mod measures;
pub mod quad;
pub mod simulate;
pub mod specfun;
pub mod stats;
pub mod subordinate;
pub mod system;

pub use error::{Error, Result};
pub use subordinate::SubordinatorSpec;
pub use system::EigenSystem;
