use crate::bellstate::AlphaCoords;
use crate::error::{Error, Result};
use crate::matrix::HermMat;
use crate::scalar::Real;
use crate::symmetry::f_matrices;

use super::barrier::{self, BarrierOptions, BarrierSolution, Lmi};
use super::{SdpMethod, SdpStatus, SdpVerdict, DEFAULT_TOL};

fn check_state<T: Real>(alpha: &AlphaCoords<T>) -> Result<()> {
    if alpha.is_valid_state() {
        Ok(())
    } else {
        Err(Error::NotAState(format!("alpha {:?}", alpha.alpha)))
    }
}

fn unconverged<T: Real>(what: &str, s: &BarrierSolution<T>) -> Error {
    Error::NonConvergence(format!(
        "{what}: {} Newton iterations, mu = {}, gap = {}, residual = {}",
        s.iterations, s.mu, s.gap, s.conjugate_residual
    ))
}

/// `F(x) = F0 + Σ x_i F_i`.
pub(crate) fn f_of_x<T: Real>(x: &[T]) -> HermMat<T> {
    let f = f_matrices::<T>();
    (0..3).fold(f[0].clone(), |acc, i| &acc + &f[i + 1].scale(x[i]))
}

pub fn solve_simplified_dual<T: Real>(alpha: &AlphaCoords<T>) -> Result<SdpVerdict<T>> {
    solve_simplified_dual_with(alpha, DEFAULT_TOL, &BarrierOptions::default())
}

/// Minimizes `Σ x_j α_j` over `F(x) ⪰ 0`; extendible iff the optimum is at
/// least `−1 − tol`.
pub fn solve_simplified_dual_with<T: Real>(
    alpha: &AlphaCoords<T>,
    tol: f64,
    opts: &BarrierOptions,
) -> Result<SdpVerdict<T>> {
    check_state(alpha)?;
    let f = f_matrices::<T>();
    let lmi = Lmi::new(f[0].clone(), f[1..].to_vec(), alpha.xyz().to_vec())?;
    let s = barrier::solve(&lmi, &[T::zero(); 3], opts)?;
    if !s.converged {
        return Err(unconverged("simplified dual", &s));
    }
    let status = if s.objective >= -T::one() - T::tol(tol) {
        SdpStatus::Extendible
    } else {
        SdpStatus::NotExtendible
    };
    Ok(SdpVerdict {
        status,
        method: SdpMethod::SimplifiedDual,
        margin: s.objective + T::one(),
        objective: s.objective,
        slackness_residual: (&s.slack * &s.conjugate).frobenius_norm(),
        primal_solution: s.conjugate,
        dual_solution: s.y,
        gap: s.gap,
        primal_residual: s.conjugate_residual,
        iterations: s.iterations,
    })
}

pub fn solve_simplified_primal<T: Real>(alpha: &AlphaCoords<T>) -> Result<SdpVerdict<T>> {
    solve_simplified_primal_with(alpha, DEFAULT_TOL, &BarrierOptions::default())
}

/// Minimizes `Tr Z` over `Z ⪰ 0` with `Tr[F_i Z] = α_i`; extendible iff the
/// optimum is at most `1 + tol`.
///
/// The constraints fix `z11 = α1 + z33`, `z12 = α2/2`, `z23 = α3/2`, leaving
/// `(z22, z33, z13)` free.
pub fn solve_simplified_primal_with<T: Real>(
    alpha: &AlphaCoords<T>,
    tol: f64,
    opts: &BarrierOptions,
) -> Result<SdpVerdict<T>> {
    check_state(alpha)?;
    let [a1, a2, a3] = alpha.xyz();
    let h = T::lit(0.5);
    let (o, z) = (T::one(), T::zero());
    let sym = |m: [T; 9]| HermMat::from_real(3, &m).expect("3x3");
    let g0 = sym([a1, h * a2, z, h * a2, z, h * a3, z, h * a3, z]);
    let gs = vec![
        sym([z, z, z, z, o, z, z, z, z]),
        sym([o, z, z, z, z, z, z, z, o]),
        sym([z, z, o, z, z, z, o, z, z]),
    ];
    let lmi = Lmi::new(g0, gs, vec![o, T::lit(2.0), z])?;
    let big = o + a1.abs() + a2.abs() + a3.abs();
    let s = barrier::solve(&lmi, &[big, big, z], opts)?;
    if !s.converged {
        return Err(unconverged("simplified primal", &s));
    }
    let zmat = s.slack.clone();
    let trace = zmat.trace();
    let w = &s.conjugate;
    let x = vec![
        (w.get(0, 0).re - w.get(2, 2).re) * h,
        w.get(0, 1).re,
        w.get(1, 2).re,
    ];
    let f = f_matrices::<T>();
    let primal_residual = (1..4)
        .map(|i| (f[i].inner_product(&zmat) - alpha.alpha[i]).abs())
        .fold(T::zero(), T::max);
    let status = if trace <= T::one() + T::tol(tol) {
        SdpStatus::Extendible
    } else {
        SdpStatus::NotExtendible
    };
    Ok(SdpVerdict {
        status,
        method: SdpMethod::SimplifiedPrimal,
        margin: T::one() - trace,
        objective: trace,
        slackness_residual: (&zmat * w).frobenius_norm(),
        primal_solution: zmat,
        dual_solution: x,
        gap: s.gap,
        primal_residual,
        iterations: s.iterations,
    })
}

/// `‖F(x*) Z*‖_F` with `Z*` from the primal solve and `x*` from the dual.
pub fn slackness_report<T: Real>(primal: &SdpVerdict<T>, dual: &SdpVerdict<T>) -> Result<T> {
    if primal.primal_solution.dim() != 3 || dual.dual_solution.len() != 3 {
        return Err(Error::DimensionMismatch(
            "slackness_report expects reduced 3x3 solves".into(),
        ));
    }
    Ok((&f_of_x(&dual.dual_solution) * &primal.primal_solution).frobenius_norm())
}
