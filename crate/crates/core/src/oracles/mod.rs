//! Special functions and closed-form solutions used to cross-check the integrator.

pub mod bessel;
pub mod closed_form;
pub mod gamma;

pub use bessel::{
    bessel_i, bessel_i_deriv, bessel_i_scaled, bessel_k, bessel_k_deriv, bessel_k_scaled,
    MAX_ORDER,
};
pub use closed_form::{fit_constants, ClosedFormFamily, ClosedFormSolution};
pub use gamma::{gamma_fn, ln_gamma};
