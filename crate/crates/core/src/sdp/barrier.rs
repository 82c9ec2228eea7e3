//! Log-det barrier method for `minimize cᵀy  s.t.  G(y) = G0 + Σ y_i G_i ⪰ 0`.

use crate::error::{Error, Result};
use crate::matrix::HermMat;
use crate::scalar::Real;

/// A linear matrix inequality with linear objective.
#[derive(Debug, Clone)]
pub struct Lmi<T> {
    pub g0: HermMat<T>,
    pub gs: Vec<HermMat<T>>,
    pub c: Vec<T>,
}

impl<T: Real> Lmi<T> {
    pub fn new(g0: HermMat<T>, gs: Vec<HermMat<T>>, c: Vec<T>) -> Result<Self> {
        if gs.len() != c.len() || gs.iter().any(|g| g.dim() != g0.dim()) {
            return Err(Error::DimensionMismatch(
                "LMI terms and objective must agree in size".into(),
            ));
        }
        Ok(Self { g0, gs, c })
    }

    pub fn eval(&self, y: &[T]) -> HermMat<T> {
        self.gs
            .iter()
            .zip(y)
            .fold(self.g0.clone(), |acc, (g, &yi)| &acc + &g.scale(yi))
    }

    pub fn objective(&self, y: &[T]) -> T {
        self.c.iter().zip(y).map(|(&a, &b)| a * b).sum()
    }
}

/// Largest Newton decrement tolerated when the line search can no longer
/// make representable progress.
const STALL_DECREMENT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierOptions {
    pub mu0: f64,
    pub mu_factor: f64,
    pub mu_min: f64,
    /// Stop a centering stage once half the squared Newton decrement is below this.
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            mu0: 1.0,
            mu_factor: 0.1,
            mu_min: 1e-9,
            newton_tol: 1e-14,
            max_newton: 600,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BarrierSolution<T> {
    pub y: Vec<T>,
    /// `G(y)`.
    pub slack: HermMat<T>,
    /// Central-path estimate `μ G(y)⁻¹` of the conjugate variable; it meets
    /// `Tr[W G_i] = c_i` up to the final Newton residual.
    pub conjugate: HermMat<T>,
    pub objective: T,
    /// `Tr[G(y) W]`, the duality gap of the pair.
    pub gap: T,
    /// `max_i |Tr[W G_i] − c_i|`.
    pub conjugate_residual: T,
    pub mu: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Newton direction for `f(y) = cᵀy − μ log det G(y)` at a strictly
/// feasible point, or `None` if `G(y)` is not positive definite.
///
/// The Hessian `μ Tr[G⁻¹G_i G⁻¹G_j]` equals `JᵀJ` with columns
/// `J_i = √μ · vec(L⁻¹ G_i L⁻†)`, `G = L L†`. Its condition number grows like
/// `μ⁻²`, so the step is computed from a QR factorization of `J` rather
/// than from the Hessian itself.
struct Newton<T> {
    step: Vec<T>,
    /// `gᵀΔ` (non-positive).
    slope: T,
}

fn newton<T: Real>(lmi: &Lmi<T>, g: &HermMat<T>, mu: T) -> Option<Newton<T>> {
    let ch = g.cholesky()?;
    let m = lmi.gs.len();
    let d = g.dim();
    let rows = 2 * d * d;
    let sq = mu.sqrt();
    let mut jac = vec![T::zero(); rows * m];
    let mut grad = vec![T::zero(); m];
    for (i, gi) in lmi.gs.iter().enumerate() {
        let w = ch.whiten(gi);
        grad[i] = lmi.c[i] - mu * w.trace();
        for (k, z) in w.as_mat().as_slice().iter().enumerate() {
            jac[k * m + i] = sq * z.re;
            jac[(d * d + k) * m + i] = sq * z.im;
        }
    }
    let r = qr_r(&mut jac, rows, m);
    let neg: Vec<T> = grad.iter().map(|&v| -v).collect();
    let step = r_solve(&r, m, &neg);
    let slope = grad.iter().zip(&step).map(|(&a, &b)| a * b).sum();
    Some(Newton { step, slope })
}

/// Householder QR of a row-major `rows × cols` matrix; returns `R` (row-major
/// `cols × cols`). The input is overwritten.
fn qr_r<T: Real>(a: &mut [T], rows: usize, cols: usize) -> Vec<T> {
    for k in 0..cols.min(rows) {
        let norm = (k..rows).map(|i| a[i * cols + k].powi(2)).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if a[k * cols + k] > T::zero() {
            -norm
        } else {
            norm
        };
        let mut v: Vec<T> = (k..rows).map(|i| a[i * cols + k]).collect();
        v[0] -= alpha;
        let vv: T = v.iter().map(|&x| x * x).sum();
        if vv == T::zero() {
            continue;
        }
        for j in k..cols {
            let dot: T = (k..rows).map(|i| v[i - k] * a[i * cols + j]).sum();
            let f = T::lit(2.0) * dot / vv;
            for i in k..rows {
                a[i * cols + j] -= f * v[i - k];
            }
        }
    }
    let mut r = vec![T::zero(); cols * cols];
    for i in 0..cols.min(rows) {
        for j in i..cols {
            r[i * cols + j] = a[i * cols + j];
        }
    }
    r
}

/// Solves `RᵀR x = b`, flooring tiny pivots of `R`.
fn r_solve<T: Real>(r: &[T], n: usize, b: &[T]) -> Vec<T> {
    let top = (0..n).map(|i| r[i * n + i].abs()).fold(T::zero(), T::max);
    let floor = top * T::epsilon() * T::lit(n as f64);
    let piv = |i: usize| {
        let p = r[i * n + i];
        if p.abs() > floor {
            p
        } else if p < T::zero() {
            -floor
        } else {
            floor.max(T::min_positive_value())
        }
    };
    let mut w = b.to_vec();
    for i in 0..n {
        let mut s = w[i];
        for k in 0..i {
            s -= r[k * n + i] * w[k];
        }
        w[i] = s / piv(i);
    }
    for i in (0..n).rev() {
        let mut s = w[i];
        for k in i + 1..n {
            s -= r[i * n + k] * w[k];
        }
        w[i] = s / piv(i);
    }
    w
}

fn log_det<T: Real>(lmi: &Lmi<T>, y: &[T]) -> Option<T> {
    Some(lmi.eval(y).cholesky()?.log_det())
}

/// Runs the barrier method from a strictly feasible `y0`.
///
/// Non-convergence is reported through `converged = false` rather than an
/// error so callers can surface an undecided verdict.
pub fn solve<T: Real>(lmi: &Lmi<T>, y0: &[T], opts: &BarrierOptions) -> Result<BarrierSolution<T>> {
    let n = lmi.gs.len();
    if y0.len() != n {
        return Err(Error::DimensionMismatch(
            "start point has wrong length".into(),
        ));
    }
    if lmi.eval(y0).cholesky().is_none() {
        return Err(Error::InvalidArgument(
            "start point is not strictly feasible".into(),
        ));
    }
    let mu_min = T::tol(opts.mu_min);
    let newton_tol = T::tol(opts.newton_tol);
    let mut y = y0.to_vec();
    let mut mu = T::lit(opts.mu0);
    let mut iterations = 0;
    let mut converged = true;

    'outer: loop {
        let mut prev_decrement = T::infinity();
        loop {
            let Some(nt) = newton(lmi, &lmi.eval(&y), mu) else {
                converged = false;
                break 'outer;
            };
            let decrement = -nt.slope / mu / T::lit(2.0);
            if decrement <= newton_tol {
                break;
            }
            // round-off floor: steps that no longer shrink a tiny decrement
            if decrement >= prev_decrement && decrement <= T::tol(STALL_DECREMENT) {
                break;
            }
            prev_decrement = decrement;
            iterations += 1;
            if iterations > opts.max_newton {
                converged = false;
                break 'outer;
            }
            let ld0 = log_det(lmi, &y).expect("current point is interior");
            let cstep: T = lmi.c.iter().zip(&nt.step).map(|(&a, &b)| a * b).sum();
            let full_step_ok = decrement < T::lit(0.02);
            let mut t = T::one();
            let mut moved = false;
            while t > T::lit(1e-14) {
                let trial: Vec<T> = y.iter().zip(&nt.step).map(|(&a, &b)| a + t * b).collect();
                if let Some(ld) = log_det(lmi, &trial) {
                    // difference taken termwise to avoid cancellation against cᵀy
                    let df = t * cstep - mu * (ld - ld0);
                    if full_step_ok || df <= T::lit(0.25) * t * nt.slope {
                        y = trial;
                        moved = true;
                        break;
                    }
                }
                t *= T::lit(0.5);
            }
            if !moved {
                // round-off floor: accept only if the iterate is nearly centred
                if decrement > T::tol(STALL_DECREMENT) {
                    converged = false;
                    break 'outer;
                }
                break;
            }
        }
        let next = mu * T::lit(opts.mu_factor);
        if next < mu_min * T::lit(1.0 - 1e-9) {
            break;
        }
        mu = next;
    }

    let slack = lmi.eval(&y);
    let ginv = match slack.cholesky() {
        Some(ch) => ch.inverse(),
        None => {
            return Err(Error::Internal(
                "barrier iterate left the feasible set".into(),
            ));
        }
    };
    let conjugate = ginv.scale(mu);
    let conjugate_residual = lmi
        .gs
        .iter()
        .zip(&lmi.c)
        .map(|(g, &ci)| (conjugate.inner_product(g) - ci).abs())
        .fold(T::zero(), T::max);
    Ok(BarrierSolution {
        objective: lmi.objective(&y),
        gap: slack.inner_product(&conjugate),
        conjugate_residual,
        slack,
        conjugate,
        y,
        mu,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_lp() {
        // minimize y s.t. 1 + y ≥ 0
        let lmi = Lmi::new(
            HermMat::<f64>::identity(1),
            vec![HermMat::identity(1)],
            vec![1.0],
        )
        .unwrap();
        let s = solve(&lmi, &[0.0], &BarrierOptions::default()).unwrap();
        assert!(s.converged);
        assert!((s.y[0] + 1.0).abs() < 1e-8);
        assert!(s.gap.abs() < 1e-8);
    }

    #[test]
    fn min_eigenvalue_as_sdp() {
        // minimize -t s.t. M - t·I ⪰ 0 gives t = λ_min(M)
        let m = HermMat::<f64>::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let lmi = Lmi::new(m, vec![HermMat::identity(2).scale(-1.0)], vec![-1.0]).unwrap();
        let s = solve(&lmi, &[0.0], &BarrierOptions::default()).unwrap();
        assert!((s.y[0] - 1.0).abs() < 1e-8);
        assert!(s.conjugate_residual < 1e-6);
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let lmi = Lmi::new(
            HermMat::<f64>::identity(1),
            vec![HermMat::identity(1)],
            vec![1.0],
        )
        .unwrap();
        assert!(solve(&lmi, &[-2.0], &BarrierOptions::default()).is_err());
    }
}
