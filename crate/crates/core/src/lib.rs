//! Linearised semi-geostrophic (LSG) and quasi-geostrophic (LQG) dynamics
//! around quadratic steady states `P̄(x) = x·Ax/2` on ℝ³.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below name the double-precision instantiations used by the CLI.

// `!(x > 0)` deliberately rejects NaN; small fixed-size index loops read
// closer to the matrix algebra than iterator chains.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod model;
pub mod planewave;
pub mod qg;
pub mod quadrature;
pub mod scalar;
pub mod spectral;
pub mod symbols;
pub mod witnesses;

pub use error::{Error, Result};
pub use geometry::{
    classify_sg, flow_matrix, j_matrix, matrix_exp, mu_sg, validate_spd, Coefficients, FlowMatrix, RegimeLabel,
    RegimeLabelSg, SpectrumKind, SteadyState, SymPosDef3,
};
pub use linalg::{Mat3, Vec3};
pub use model::{LinearModel, ModelKind};
pub use planewave::{PlaneWave, PlaneWaveState, StabilityVerdict, Verdict};
pub use qg::{QgParams, Quadrant, RegimeReport};
pub use quadrature::QuadratureConfig;
pub use scalar::Real;
pub use spectral::{Evolver, EvolverConfig, GridField, GridSpec, Interpolation, Rep};
pub use symbols::SymbolEvaluator;

pub type SymPosDef3F64 = SymPosDef3<f64>;
pub type SteadyState64 = SteadyState<f64>;
pub type FlowMatrix64 = FlowMatrix<f64>;
pub type LinearModel64 = LinearModel<f64>;
pub type SteadyState32 = SteadyState<f32>;
pub type GridSpec64 = GridSpec<f64>;
pub type GridField64 = GridField<f64>;
pub type EvolverConfig64 = EvolverConfig<f64>;
