//! Symmetric extension of an arbitrary two-qubit state, on `8×8` operators.
//!
//! Primal: maximize `1 − Tr X` over swap-invariant `X ⪰ 0` whose `AB`
//! marginal matches `ρ` on every traceless operator `L_i`. Dual: minimize
//! `Tr[Kρ]` over `K = 1 + Σ l_i L_i` with `Sym(K ⊗ 1) ⪰ 0`. The state is
//! extendible iff the common optimum is non-negative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{pauli_string, HermMat};
use crate::scalar::Real;
use crate::symmetry::symmetrize_bb;

use super::barrier::{self, BarrierOptions, Lmi};
use super::{SdpMethod, SdpStatus, SdpVerdict, DEFAULT_TOL};

pub const DYKSTRA_MAX_ITER: usize = 50_000;
const WITNESS_EVERY: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NumericMethod {
    #[default]
    InteriorPoint,
    Dykstra,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    pub method: NumericMethod,
    pub tol: f64,
    pub barrier: BarrierOptions,
    pub max_iter: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            method: NumericMethod::InteriorPoint,
            tol: DEFAULT_TOL,
            barrier: BarrierOptions::default(),
            max_iter: DYKSTRA_MAX_ITER,
        }
    }
}

/// The extension problem for one state.
#[derive(Debug, Clone)]
pub struct SdpProblem<T> {
    pub dimension: usize,
    pub rho: HermMat<T>,
    /// Traceless two-qubit operators `L_i`.
    pub constraint_ops: Vec<HermMat<T>>,
    /// `Tr[ρ L_i]`.
    pub constraint_vals: Vec<T>,
}

fn sym_lift<T: Real>(m: &HermMat<T>) -> HermMat<T> {
    symmetrize_bb(&m.kron(&HermMat::identity(2))).expect("4x4 input")
}

fn marginal_ab<T: Real>(x: &HermMat<T>) -> HermMat<T> {
    x.partial_trace(&[2, 2, 2], &[0, 1]).expect("8x8 input")
}

/// Solves `Tr_B′ Sym(M ⊗ 1) = Δ` for `M`.
fn invert_marginal<T: Real>(delta: &HermMat<T>) -> HermMat<T> {
    let tb = delta.partial_trace(&[2, 2], &[0]).expect("4x4 input");
    delta - &tb.kron(&HermMat::identity(2)).scale(T::lit(0.25))
}

impl<T: Real> SdpProblem<T> {
    /// Uses the fifteen normalized Pauli products `σ_i ⊗ σ_j / 2`.
    pub fn new(rho: &HermMat<T>) -> Result<Self> {
        let ops = (0..16)
            .skip(1)
            .map(|k| pauli_string::<T>(&[k / 4, k % 4]).scale(T::lit(0.5)))
            .collect();
        Self::with_basis(rho, ops)
    }

    pub fn with_basis(rho: &HermMat<T>, ops: Vec<HermMat<T>>) -> Result<Self> {
        if rho.dim() != 4 || ops.iter().any(|l| l.dim() != 4) {
            return Err(Error::DimensionMismatch(
                "two-qubit operators required".into(),
            ));
        }
        if (rho.trace() - T::one()).abs() > T::tol(1e-10) || !rho.is_psd(T::tol(1e-10))? {
            return Err(Error::NotAState("rho is not a density matrix".into()));
        }
        if ops.len() != 15 || ops.iter().any(|l| l.trace().abs() > T::tol(1e-12)) {
            return Err(Error::InvalidArgument(
                "constraint operators must be 15 traceless matrices".into(),
            ));
        }
        let p = Self {
            dimension: 8,
            rho: rho.clone(),
            constraint_vals: ops.iter().map(|l| l.inner_product(rho)).collect(),
            constraint_ops: ops,
        };
        let cond = p.gram_condition()?;
        if !(cond < T::one() / T::tol(1e-10)) {
            return Err(Error::InvalidArgument(format!(
                "constraint operators are linearly dependent (condition {cond})"
            )));
        }
        Ok(p)
    }

    /// Condition number of the Gram matrix `Tr[L_i L_j]`.
    pub fn gram_condition(&self) -> Result<T> {
        let n = self.constraint_ops.len();
        let mut g = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = self.constraint_ops[i].inner_product(&self.constraint_ops[j]);
            }
        }
        let ev = HermMat::from_real(n, &g)?.eigenvalues()?;
        Ok(ev[n - 1] / ev[0].max(T::min_positive_value()))
    }

    fn lmi(&self) -> Lmi<T> {
        Lmi {
            g0: HermMat::identity(8),
            gs: self.constraint_ops.iter().map(sym_lift).collect(),
            c: self.constraint_vals.clone(),
        }
    }

    /// `max_i |Tr[X Sym(L_i ⊗ 1)] − Tr[ρ L_i]|`.
    fn constraint_residual(&self, x: &HermMat<T>) -> T {
        let m = marginal_ab(x);
        self.constraint_ops
            .iter()
            .zip(&self.constraint_vals)
            .map(|(l, &v)| (l.inner_product(&m) - v).abs())
            .fold(T::zero(), T::max)
    }
}

pub fn check_extendible_numeric<T: Real>(rho: &HermMat<T>, tol: f64) -> Result<SdpVerdict<T>> {
    check_extendible_with(
        &SdpProblem::new(rho)?,
        &NumericOptions {
            tol,
            ..NumericOptions::default()
        },
    )
}

pub fn check_extendible_with<T: Real>(
    problem: &SdpProblem<T>,
    opts: &NumericOptions,
) -> Result<SdpVerdict<T>> {
    match opts.method {
        NumericMethod::InteriorPoint => interior_point(problem, opts),
        NumericMethod::Dykstra => Ok(dykstra(problem, opts.tol, opts.max_iter)?),
    }
}

fn undecided<T: Real>(method: SdpMethod, iterations: usize, residual: T) -> SdpVerdict<T> {
    SdpVerdict {
        status: SdpStatus::Undecided,
        method,
        margin: T::nan(),
        objective: T::nan(),
        primal_solution: HermMat::zeros(8),
        dual_solution: Vec::new(),
        gap: T::nan(),
        slackness_residual: T::nan(),
        primal_residual: residual,
        iterations,
    }
}

fn interior_point<T: Real>(p: &SdpProblem<T>, opts: &NumericOptions) -> Result<SdpVerdict<T>> {
    let lmi = p.lmi();
    let s = barrier::solve(&lmi, &vec![T::zero(); lmi.gs.len()], &opts.barrier)?;
    if !s.converged {
        return Ok(undecided(
            SdpMethod::FullInteriorPoint,
            s.iterations,
            s.conjugate_residual,
        ));
    }
    // dual value Tr[Kρ] bounds the primal optimum from above
    let value = T::one() + s.objective;
    let status = if value >= -T::tol(opts.tol) {
        SdpStatus::Extendible
    } else {
        SdpStatus::NotExtendible
    };
    let x = s.conjugate;
    Ok(SdpVerdict {
        status,
        method: SdpMethod::FullInteriorPoint,
        margin: value,
        objective: value,
        slackness_residual: (&s.slack * &x).frobenius_norm(),
        primal_residual: p.constraint_residual(&x),
        primal_solution: x,
        dual_solution: s.y,
        gap: s.gap,
        iterations: s.iterations,
    })
}

/// Orthogonal projection onto the swap-invariant operators with `AB`
/// marginal `ρ`.
fn project_affine<T: Real>(x: &HermMat<T>, rho: &HermMat<T>) -> HermMat<T> {
    let xs = symmetrize_bb(x).expect("8x8");
    let delta = rho - &marginal_ab(&xs);
    &xs + &sym_lift(&invert_marginal(&delta))
}

/// Tries to turn the gap `N` between the two sets into a witness `K` with
/// `Sym(K ⊗ 1) + e·1 ⪰ 0` and `Tr[Kρ] + e < 0`. Returns the normalized value
/// of `Tr[Kρ] + e`, and `K`.
fn witness<T: Real>(n: &HermMat<T>, rho: &HermMat<T>) -> Result<(T, HermMat<T>)> {
    let k = invert_marginal(&marginal_ab(&symmetrize_bb(n)?));
    let kt = sym_lift(&k);
    let e = (-kt.min_eigenvalue()?).max(T::zero());
    let norm = kt.frobenius_norm() + e * T::lit(8.0).sqrt();
    if !(norm > T::zero()) {
        return Ok((T::zero(), k));
    }
    Ok(((k.inner_product(rho) + e) / norm, k))
}

/// Dykstra alternating projections between the affine extension set and
/// the PSD cone. Extendible when the two projections come within `tol`;
/// not extendible once the gap yields a valid witness; undecided at the
/// iteration cap.
pub fn dykstra<T: Real>(p: &SdpProblem<T>, tol: f64, max_iter: usize) -> Result<SdpVerdict<T>> {
    let rho = &p.rho;
    let tol = T::tol(tol);
    let mut x = HermMat::identity(8).scale(T::lit(0.125));
    let mut pa = HermMat::zeros(8);
    let mut pb = HermMat::zeros(8);
    let mut residual = T::infinity();
    for it in 1..=max_iter {
        let a = project_affine(&(&x + &pa), rho);
        pa = &(&x + &pa) - &a;
        let ya = &a + &pb;
        let b = ya.psd_part()?;
        pb = &ya - &b;
        residual = (&a - &b).frobenius_norm();
        x = b;
        if residual < tol {
            // repair the marginal exactly and report the PSD deficit
            let ext = project_affine(&x, rho);
            let deficit = ext.min_eigenvalue()?;
            return Ok(SdpVerdict {
                status: SdpStatus::Extendible,
                method: SdpMethod::FullDykstra,
                margin: deficit,
                objective: residual,
                primal_residual: p.constraint_residual(&ext),
                primal_solution: ext,
                dual_solution: Vec::new(),
                gap: residual,
                slackness_residual: residual,
                iterations: it,
            });
        }
        if it % WITNESS_EVERY == 0 {
            let (value, k) = witness(&(&x - &a), rho)?;
            if value < -tol {
                let dual: Vec<T> = p
                    .constraint_ops
                    .iter()
                    .map(|l| l.inner_product(&k))
                    .collect();
                return Ok(SdpVerdict {
                    status: SdpStatus::NotExtendible,
                    method: SdpMethod::FullDykstra,
                    margin: value,
                    objective: value,
                    primal_residual: residual,
                    primal_solution: x,
                    dual_solution: dual,
                    gap: residual,
                    slackness_residual: residual,
                    iterations: it,
                });
            }
        }
    }
    Ok(undecided(SdpMethod::FullDykstra, max_iter, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellstate::{BellIndex, BellProbs};
    use crate::sampling;
    use crate::sdp::solve_simplified_dual;
    use crate::symext::{has_symext, symext_margin};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn maximally_mixed_is_extendible() {
        let rho = BellProbs::<f64>::maximally_mixed().to_density_matrix();
        let v = check_extendible_numeric(&rho, 1e-7).unwrap();
        assert!(v.extendible());
        let v = dykstra(&SdpProblem::new(&rho).unwrap(), 1e-7, DYKSTRA_MAX_ITER).unwrap();
        assert!(v.extendible());
        assert!(
            v.primal_solution
                .max_abs_diff(&HermMat::identity(8).scale(0.125))
                < 1e-6
        );
    }

    #[test]
    fn phi_plus_is_not_extendible() {
        let rho = BellProbs::<f64>::pure(BellIndex::I).to_density_matrix();
        let v = check_extendible_numeric(&rho, 1e-7).unwrap();
        assert_eq!(v.status, SdpStatus::NotExtendible);
        assert!(v.gap >= -1e-8);
        let v = dykstra(&SdpProblem::new(&rho).unwrap(), 1e-7, DYKSTRA_MAX_ITER).unwrap();
        assert_eq!(v.status, SdpStatus::NotExtendible);
    }

    #[test]
    fn agrees_with_closed_form() {
        let p = BellProbs::new([0.7, 0.1, 0.1, 0.1]).unwrap();
        let v = check_extendible_numeric(&p.to_density_matrix(), 1e-7).unwrap();
        assert_eq!(v.extendible(), has_symext(&p.to_alpha()).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let p = sampling::uniform_state(&mut rng);
            let a = p.to_alpha();
            if symext_margin(&a).unwrap().abs() < 1e-6 {
                continue;
            }
            let v = check_extendible_numeric(&p.to_density_matrix(), 1e-7).unwrap();
            assert_eq!(v.extendible(), has_symext(&a).unwrap(), "{p:?}");
            assert!(v.gap >= -1e-8);
            // with normalized Pauli constraints the full optimum is 1 + (reduced dual optimum)
            let d = solve_simplified_dual(&a).unwrap();
            assert!((v.objective - (1.0 + d.objective)).abs() < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn dykstra_agrees_away_from_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut n = 0;
        while n < 12 {
            let p = sampling::uniform_state(&mut rng);
            let a = p.to_alpha();
            if symext_margin(&a).unwrap().abs() < 1e-2 {
                continue;
            }
            n += 1;
            let prob = SdpProblem::new(&p.to_density_matrix()).unwrap();
            let v = dykstra(&prob, 1e-7, DYKSTRA_MAX_ITER).unwrap();
            if let Some(d) = v.decision() {
                assert_eq!(d, has_symext(&a).unwrap(), "{p:?}");
            }
        }
    }

    #[test]
    fn basis_choice_does_not_change_verdict() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..6 {
            let p = sampling::uniform_state(&mut rng);
            let rho = p.to_density_matrix();
            let std = SdpProblem::new(&rho).unwrap();
            // random invertible mixing of the Pauli basis
            let mixed: Vec<HermMat<f64>> = (0..15)
                .map(|i| {
                    (0..15).fold(HermMat::zeros(4), |acc, j| {
                        let w = if i == j {
                            2.0
                        } else {
                            rng.gen_range(-0.3..0.3)
                        };
                        &acc + &std.constraint_ops[j].scale(w)
                    })
                })
                .collect();
            let alt = SdpProblem::with_basis(&rho, mixed).unwrap();
            assert!(alt.gram_condition().unwrap() > 1.0);
            let a = check_extendible_with(&std, &NumericOptions::default()).unwrap();
            let b = check_extendible_with(&alt, &NumericOptions::default()).unwrap();
            if a.margin.abs() > 1e-5 {
                assert_eq!(a.status, b.status);
            }
        }
    }

    #[test]
    fn non_bell_diagonal_states() {
        // product states are always extendible
        let a = HermMat::<f64>::from_real(2, &[0.8, 0.1, 0.1, 0.2]).unwrap();
        let b = HermMat::<f64>::from_real(2, &[0.3, -0.2, -0.2, 0.7]).unwrap();
        let v = check_extendible_numeric(&a.kron(&b), 1e-7).unwrap();
        assert!(v.extendible());
        assert!(v.primal_residual < 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SdpProblem::new(&HermMat::<f64>::identity(4)).is_err());
        let rho = BellProbs::<f64>::maximally_mixed().to_density_matrix();
        let ops = vec![HermMat::identity(4); 15];
        assert!(SdpProblem::with_basis(&rho, ops).is_err());
    }
}
