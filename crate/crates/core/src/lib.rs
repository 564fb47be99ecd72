//! Exact local densities of Hermitian lattices over imaginary quadratic
//! fields, their interpolating polynomials and normalized Whittaker functions,
//! the global normalizing factors Λ_m(s), finite group orders used in volume
//! comparisons, Weil-index bookkeeping, and Fourier-coefficient assembly.

pub mod arith;
pub mod error;
pub mod field_data;
pub mod hermitian;
pub mod truncated_ring;
pub mod density;
pub mod density_poly;
pub mod weil_index;
pub mod whittaker;
pub mod analytic;
pub mod finite_groups;
pub mod assembly;
pub mod checks;

pub use error::{Error, Result};
