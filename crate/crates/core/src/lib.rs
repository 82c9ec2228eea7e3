//! Symmetric extendibility of Bell-diagonal two-qubit states.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

// `!(x > 0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bellstate;
pub mod distill;
pub mod error;
pub mod matrix;
pub mod output;
pub mod qkd;
pub mod sampling;
pub mod scalar;
pub mod sdp;
pub mod symext;
pub mod symmetry;

pub use bellstate::{alpha_to_p, p_to_alpha, twirl, AlphaCoords, BellIndex, BellProbs};
pub use distill::{
    bstep, cad, cad_brute_force, cad_components, d_c, d_c_alpha, rounds_to_break, run_bsteps,
    DistillOutcome, DistillTrace, ExtReal, ParityCoords,
};
pub use error::{Error, Result};
pub use matrix::{HermMat, Mat};
pub use qkd::{
    classify_region, region_scan, scheme_state, threshold, Region, RegionVerdict, ScanGrid, Scheme,
    SchemeState,
};
pub use scalar::Real;
pub use sdp::{
    check_extendible_numeric, solve_simplified_dual, solve_simplified_primal, SdpStatus, SdpVerdict,
};
pub use symext::{
    check_extension, extension_certificate, has_symext, lift_extension, ExtCertificate,
};

pub type BellProbs64 = BellProbs<f64>;
pub type AlphaCoords64 = AlphaCoords<f64>;
pub type HermMat64 = HermMat<f64>;
pub type ExtReal64 = ExtReal<f64>;
pub type DistillOutcome64 = DistillOutcome<f64>;
pub type SdpVerdict64 = SdpVerdict<f64>;
pub type ExtCertificate64 = ExtCertificate<f64>;

pub type BellProbs32 = BellProbs<f32>;
pub type AlphaCoords32 = AlphaCoords<f32>;
pub type HermMat32 = HermMat<f32>;
pub type ExtReal32 = ExtReal<f32>;
pub type DistillOutcome32 = DistillOutcome<f32>;
pub type SdpVerdict32 = SdpVerdict<f32>;
pub type ExtCertificate32 = ExtCertificate<f32>;
