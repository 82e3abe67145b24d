//! Algebraic curvature tensors on indefinite inner-product spaces.

pub mod acceptance;
pub mod classify;
pub mod cli;
pub mod curvature;
pub mod geometry;
pub mod io;
pub mod probe;
pub mod pseudo;
pub mod random;
pub mod spectral;
pub mod tol;
mod util;
pub mod zoo;

pub use classify::{classify_rank2, fit_C, reconstruct_phi, Rank2Class, ReconstructConfig};
pub use curvature::{CurvatureError, CurvatureOperator, CurvatureTensor, SymmetryReport};
pub use probe::{probe, sample_plane, ProbeMode, ProbeReport, Verdict};
pub use pseudo::{
    CausalType, InnerProductSpace, KernelCausalContent, LinalgError, Matrix, OrientedPlane,
    SelfAdjointMap, Vector,
};
pub use spectral::{JordanBlock, JordanStructure, SpectralConfig, SpectralError};
pub use tol::Tolerances;
