//! Periodic-grid realisation of the evolution operators.

pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod ops;
pub mod warp;

pub use fft::Fft3;
pub use field::{gaussian, GridField, Rep};
pub use grid::GridSpec;
pub use io::{load_field, read_field, save_field, write_field, write_slice_csv};
pub use ops::{curl, curl_norm, gradient_field, max_relative_delta, scalar_fourier, Evolver, EvolverConfig, Family, Operator};
pub use warp::{evaluate_interpolant, pullback, pullback_flow, Interpolation, DIRECT_SPECTRAL_MAX_N};
