//! Special functions and the eigenfunction families of the generalized
//! Laguerre semigroups.

pub(crate) mod gl;
pub(crate) mod laguerre;
mod mittag_leffler;
pub(crate) mod rodrigues;
pub(crate) mod smallpert;

pub use gl::{gl_eigen_p, GlFamily, GLCoefficients, POLY_N_MAX};
pub use laguerre::{laguerre, laguerre_normalized, laguerre_norm_const, ln_laguerre_norm_const, LaguerreParams};
pub use mittag_leffler::mittag_leffler;
pub use rodrigues::{gauss_laguerre_coeigen_v, gauss_laguerre_coeigen_v_with_limit, ExpTermSum, RODRIGUES_N_MAX};
pub use smallpert::{smallpert_coeigen_v, smallpert_eigen_p};
