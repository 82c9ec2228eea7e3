//! Numerical oracles for symmetric extendibility.
//!
//! The reduced 3×3 problems and the full problem on `8×8` extensions are
//! solved independently of the closed-form criterion in [`crate::symext`],
//! so that the two can be checked against each other.

pub mod barrier;
mod full;
mod reduced;

use serde::{Deserialize, Serialize};

use crate::matrix::{HermMat, MatrixRows};
use crate::scalar::Real;

pub use barrier::{BarrierOptions, BarrierSolution, Lmi};
pub use full::{
    check_extendible_numeric, check_extendible_with, dykstra, NumericMethod, NumericOptions,
    SdpProblem, DYKSTRA_MAX_ITER,
};
pub use reduced::{
    slackness_report, solve_simplified_dual, solve_simplified_dual_with, solve_simplified_primal,
    solve_simplified_primal_with,
};

/// Default tolerance on optimal values.
pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Extendible,
    NotExtendible,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpMethod {
    SimplifiedDual,
    SimplifiedPrimal,
    FullInteriorPoint,
    FullDykstra,
}

/// Outcome of one numerical solve.
///
/// `margin` is positive on the extendible side: `1 − Tr Z*` for the reduced
/// primal, `1 + Σ x*_j α_j` for the reduced dual, and the optimal value of
/// `max 1 − Tr X` for the full problem.
#[derive(Debug, Clone)]
pub struct SdpVerdict<T> {
    pub status: SdpStatus,
    pub method: SdpMethod,
    pub margin: T,
    pub objective: T,
    pub primal_solution: HermMat<T>,
    pub dual_solution: Vec<T>,
    pub gap: T,
    pub slackness_residual: T,
    pub primal_residual: T,
    pub iterations: usize,
}

impl<T: Real> SdpVerdict<T> {
    pub fn extendible(&self) -> bool {
        self.status == SdpStatus::Extendible
    }

    /// `None` when the solve was undecided.
    pub fn decision(&self) -> Option<bool> {
        match self.status {
            SdpStatus::Extendible => Some(true),
            SdpStatus::NotExtendible => Some(false),
            SdpStatus::Undecided => None,
        }
    }

    pub fn record(&self) -> SdpRecord {
        SdpRecord::from(self)
    }
}

/// Serializable form of [`SdpVerdict`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SdpRecord {
    pub status: SdpStatus,
    pub extendible: Option<bool>,
    pub method: SdpMethod,
    pub margin: f64,
    pub objective: f64,
    pub gap: f64,
    pub slackness_residual: f64,
    pub primal_residual: f64,
    pub iterations: usize,
    pub primal_solution: MatrixRows,
    pub dual_solution: Vec<f64>,
}

impl<T: Real> From<&SdpVerdict<T>> for SdpRecord {
    fn from(v: &SdpVerdict<T>) -> Self {
        SdpRecord {
            status: v.status,
            extendible: v.decision(),
            method: v.method,
            margin: v.margin.to_f64_lossy(),
            objective: v.objective.to_f64_lossy(),
            gap: v.gap.to_f64_lossy(),
            slackness_residual: v.slackness_residual.to_f64_lossy(),
            primal_residual: v.primal_residual.to_f64_lossy(),
            iterations: v.iterations,
            primal_solution: MatrixRows::from(&v.primal_solution),
            dual_solution: v.dual_solution.iter().map(|x| x.to_f64_lossy()).collect(),
        }
    }
}
